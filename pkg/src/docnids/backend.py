"""Kernel backend selection.

The NumPy dense passes are BLAS-backed and beat the compiled triple
loops, while the compiled histogram scorer beats fancy-indexed NumPy
(see benchmarks/bench_kernels.py), so the default mixes the two: NumPy
forward/backward, compiled histogram lookup, falling back to pure NumPy
when the extension is missing. Set ``DOCNIDS_BACKEND=numpy`` or
``DOCNIDS_BACKEND=cython`` to force one side everywhere.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels
except ImportError:
    _kernels = None

_forced = os.environ.get("DOCNIDS_BACKEND")

if _forced == "numpy" or (_forced is None and _kernels is None):
    BACKEND = "numpy"
    forward_pass = _kernels_py.forward_pass
    backward_pass = _kernels_py.backward_pass
    hbos_scores = _kernels_py.hbos_scores
elif _forced == "cython":
    if _kernels is None:
        raise ImportError("DOCNIDS_BACKEND=cython but the extension is not built")
    BACKEND = "cython"
    forward_pass = _kernels.forward_pass
    backward_pass = _kernels.backward_pass
    hbos_scores = _kernels.hbos_scores
else:
    BACKEND = "mixed"
    forward_pass = _kernels_py.forward_pass
    backward_pass = _kernels_py.backward_pass
    hbos_scores = _kernels.hbos_scores
