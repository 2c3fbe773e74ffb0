# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the elementwise hot loops.

Arithmetic mirrors the numpy backend expression-for-expression so the two
backends produce bitwise-identical results at the same dtype.
"""
import numpy as np

cimport cython
from libc.math cimport sqrt, sqrtf

ctypedef fused floating:
    float
    double

NAME = "native"


def leaky_relu(x, double slope):
    x2 = np.ascontiguousarray(x).reshape(-1)
    out = np.empty_like(x2)
    _leaky_relu(x2, out, slope)
    return out.reshape(x.shape)


def _leaky_relu(floating[::1] x, floating[::1] out, double slope):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef floating s = <floating> slope
    for i in range(n):
        out[i] = x[i] if x[i] > 0 else x[i] * s


def leaky_relu_grad(x, g, double slope):
    x2 = np.ascontiguousarray(x).reshape(-1)
    g2 = np.ascontiguousarray(g).reshape(-1)
    out = np.empty_like(g2)
    _leaky_relu_grad(x2, g2, out, slope)
    return out.reshape(g.shape)


def _leaky_relu_grad(floating[::1] x, floating[::1] g, floating[::1] out,
                     double slope):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef floating s = <floating> slope
    for i in range(n):
        out[i] = g[i] if x[i] > 0 else g[i] * s


def adam_update(param, grad, m, v, long t, double lr, double beta1,
                double beta2, double eps):
    _adam(param.reshape(-1), np.ascontiguousarray(grad).reshape(-1),
          m.reshape(-1), v.reshape(-1), t, lr, beta1, beta2, eps)


def _adam(floating[::1] p, floating[::1] g, floating[::1] m, floating[::1] v,
          long t, double lr, double beta1, double beta2, double eps):
    cdef Py_ssize_t i, n = p.shape[0]
    cdef floating b1 = <floating> beta1
    cdef floating b2 = <floating> beta2
    cdef floating one = <floating> 1.0
    cdef floating bc1 = <floating> (1.0 - beta1 ** t)
    cdef floating bc2 = <floating> (1.0 - beta2 ** t)
    cdef floating lrf = <floating> lr
    cdef floating epsf = <floating> eps
    cdef floating mhat, vhat
    for i in range(n):
        m[i] = m[i] * b1 + (one - b1) * g[i]
        v[i] = v[i] * b2 + (one - b2) * g[i] * g[i]
        mhat = m[i] / bc1
        vhat = v[i] / bc2
        p[i] = p[i] - lrf * mhat / (<floating> sqrt(vhat) + epsf)


def scatter_add(out, idx, rows):
    _scatter_add(out, np.ascontiguousarray(idx, dtype=np.int64),
                 np.ascontiguousarray(rows))


def _scatter_add(floating[:, ::1] out, long long[::1] idx,
                 floating[:, ::1] rows):
    cdef Py_ssize_t i, j, n = idx.shape[0], d = out.shape[1]
    cdef long long r
    for i in range(n):
        r = idx[i]
        for j in range(d):
            out[r, j] += rows[i, j]
