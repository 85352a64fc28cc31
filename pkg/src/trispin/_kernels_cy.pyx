# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled state-vector kernels.

Bit convention shared with ``_kernels_py``: site ``s`` of an ``n``-site
register lives on bit ``n - 1 - s`` of the basis index, and a Pauli string
is stored as ``(x_mask, z_mask)`` meaning ``X^x Z^z`` (Z acts first).
"""
import numpy as np

from libc.stdint cimport uint64_t
from libc.math cimport sqrt

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

ctypedef fused scalar_t:
    double
    double complex


def apply_pauli_sum(const uint64_t[::1] xs, const uint64_t[::1] zs,
                    const double complex[::1] cs, const scalar_t[::1] v,
                    scalar_t[::1] out):
    """Accumulate ``sum_t cs[t] X^xs[t] Z^zs[t] v`` into ``out``."""
    cdef Py_ssize_t dim = v.shape[0]
    cdef Py_ssize_t nterms = xs.shape[0]
    cdef Py_ssize_t t, i
    cdef uint64_t x, z
    cdef scalar_t c, mc
    if out.shape[0] != dim:
        raise ValueError("output length mismatch")
    with nogil:
        for t in range(nterms):
            x = xs[t]
            z = zs[t]
            if scalar_t is double:
                c = cs[t].real
            else:
                c = cs[t]
            mc = -c
            for i in range(dim):
                if __builtin_popcountll(<uint64_t>i & z) & 1:
                    out[<uint64_t>i ^ x] += mc * v[i]
                else:
                    out[<uint64_t>i ^ x] += c * v[i]


def pauli_expectations(const uint64_t[::1] xs, const uint64_t[::1] zs,
                       const double complex[::1] v):
    """Return ``<v| X^x Z^z |v>`` for every mask pair."""
    cdef Py_ssize_t dim = v.shape[0]
    cdef Py_ssize_t nterms = xs.shape[0]
    result = np.zeros(nterms, dtype=np.complex128)
    cdef double complex[::1] res = result
    cdef Py_ssize_t t, i
    cdef uint64_t x, z
    cdef double complex acc, w
    with nogil:
        for t in range(nterms):
            x = xs[t]
            z = zs[t]
            acc = 0
            for i in range(dim):
                w = v[<uint64_t>i ^ x].conjugate() * v[i]
                if __builtin_popcountll(<uint64_t>i & z) & 1:
                    acc -= w
                else:
                    acc += w
            res[t] = acc
    return result


def rotate_site(double complex[::1] psi, int n, int site,
                const double complex[:, ::1] m):
    """Apply the 2x2 matrix ``m`` to ``site`` of ``psi`` in place."""
    cdef uint64_t bit = (<uint64_t>1) << (n - 1 - site)
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t i
    cdef uint64_t j
    cdef double complex a, b
    cdef double complex m00 = m[0, 0], m01 = m[0, 1], m10 = m[1, 0], m11 = m[1, 1]
    with nogil:
        for i in range(dim):
            if <uint64_t>i & bit:
                continue
            j = <uint64_t>i | bit
            a = psi[i]
            b = psi[j]
            psi[i] = m00 * a + m01 * b
            psi[j] = m10 * a + m11 * b


def pair_concurrence_sum(const double complex[::1] psi, int n, int a, int b):
    """Sum of ``2|p00 p11 - p01 p10|`` over all configurations of the other sites.

    For an unnormalised conditional state this equals probability times
    concurrence, so the sum is the outcome-averaged concurrence of the pair.
    """
    cdef uint64_t ba = (<uint64_t>1) << (n - 1 - a)
    cdef uint64_t bb = (<uint64_t>1) << (n - 1 - b)
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t i
    cdef double complex d
    cdef double acc = 0.0
    with nogil:
        for i in range(dim):
            if (<uint64_t>i & ba) or (<uint64_t>i & bb):
                continue
            d = (psi[i] * psi[<uint64_t>i | ba | bb]
                 - psi[<uint64_t>i | bb] * psi[<uint64_t>i | ba])
            acc += 2.0 * sqrt(d.real * d.real + d.imag * d.imag)
    return acc
