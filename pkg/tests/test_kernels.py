"""Cross-checks between the compiled kernels and the NumPy fallback."""

import numpy as np
import pytest

from docnids import _kernels_py

compiled = pytest.importorskip("docnids._kernels")


@pytest.fixture
def layers(rng):
    dims = [5, 9, 4]
    return [rng.normal(size=(o, i)) for i, o in zip(dims[:-1], dims[1:])]


@pytest.mark.parametrize("slope", [0.0, 0.01, 1.0])
def test_forward_agreement(layers, rng, slope):
    x = rng.normal(size=(17, 5))
    a = compiled.forward_pass(layers, x, slope)
    b = _kernels_py.forward_pass(layers, x, slope)
    for u, v in zip(a, b):
        assert np.allclose(u, v, atol=1e-12, rtol=0)


@pytest.mark.parametrize("slope", [0.0, 0.01, 1.0])
def test_backward_agreement(layers, rng, slope):
    x = rng.normal(size=(17, 5))
    delta = rng.normal(size=(17, 4))
    acts_c = compiled.forward_pass(layers, x, slope)
    acts_p = _kernels_py.forward_pass(layers, x, slope)
    ga = compiled.backward_pass(layers, acts_c, delta, slope)
    gb = _kernels_py.backward_pass(layers, acts_p, delta, slope)
    for u, v in zip(ga, gb):
        assert np.allclose(u, v, atol=1e-10, rtol=0)


def test_hbos_agreement(rng):
    d, k = 6, 9
    lo = rng.normal(size=d)
    width = np.abs(rng.normal(size=d))
    width[2] = 0.0  # degenerate dimension
    heights = rng.uniform(size=(d, k))
    heights[1, 4] = 0.0  # empty bin hits the floor path
    z = rng.normal(size=(40, d)) * 3
    a = compiled.hbos_scores(lo, width, heights, z, 1e-6)
    b = _kernels_py.hbos_scores(lo, width, heights, z, 1e-6)
    assert np.allclose(a, b, atol=1e-12, rtol=0)
