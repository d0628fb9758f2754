# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: dense forward/backward passes and histogram scoring.

Mirrors the semantics of ``docnids._kernels_py`` exactly; see that module
for the contract of each function.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor as c_floor, log

cnp.import_array()

BACKEND = "cython"


def forward_pass(list weights, object x, double slope):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w, z
    cdef Py_ssize_t n, m, p, i, j, r, layer, last
    cdef double acc
    cdef list acts = [a]
    last = len(weights) - 1
    for layer in range(len(weights)):
        w = weights[layer]
        n = a.shape[0]
        m = a.shape[1]
        p = w.shape[0]
        z = np.empty((n, p), dtype=np.float64)
        for i in range(n):
            for j in range(p):
                acc = 0.0
                for r in range(m):
                    acc += a[i, r] * w[j, r]
                if layer < last and acc <= 0.0:
                    acc *= slope
                z[i, j] = acc
        a = z
        acts.append(a)
    return acts


def backward_pass(list weights, list acts, object delta, double slope):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] d = np.ascontiguousarray(delta, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w, a, g, nd
    cdef Py_ssize_t n, p, m, i, j, r, layer
    cdef double acc
    cdef list grads = [None] * len(weights)
    for layer in range(len(weights) - 1, -1, -1):
        w = weights[layer]
        a = acts[layer]
        n = d.shape[0]
        p = d.shape[1]
        m = a.shape[1]
        g = np.zeros((p, m), dtype=np.float64)
        for i in range(n):
            for j in range(p):
                acc = d[i, j]
                for r in range(m):
                    g[j, r] += acc * a[i, r]
        grads[layer] = g
        if layer > 0:
            nd = np.empty((n, m), dtype=np.float64)
            for i in range(n):
                for r in range(m):
                    acc = 0.0
                    for j in range(p):
                        acc += d[i, j] * w[j, r]
                    if a[i, r] <= 0.0:
                        acc *= slope
                    nd[i, r] = acc
            d = nd
    return grads


def hbos_scores(object lo, object width, object heights, object z, double floor):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lo_ = np.ascontiguousarray(lo, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w_ = np.ascontiguousarray(width, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] h_ = np.ascontiguousarray(heights, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] z_ = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t n = z_.shape[0], d = z_.shape[1], k = h_.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef long idx
    cdef double acc, height
    for i in range(n):
        acc = 0.0
        for j in range(d):
            if w_[j] > 0.0:
                idx = <long>c_floor((z_[i, j] - lo_[j]) / w_[j])
                if idx < 0:
                    idx = 0
                elif idx > k - 1:
                    idx = k - 1
            else:
                idx = 0
            height = h_[j, idx]
            if height < floor:
                height = floor
            acc -= log(height)
        out[i] = acc
    return out
