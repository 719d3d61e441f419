# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for state-vector permutation gates and GF(2^n) arithmetic.

Every function here has a numpy twin in ``_fallback`` with identical semantics.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t

cnp.import_array()

BACKEND = "cython"


cdef inline uint64_t _mask(int n) nogil:
    if n >= 64:
        return <uint64_t>0xFFFFFFFFFFFFFFFF
    return (<uint64_t>1 << n) - 1


cdef inline uint64_t _mulmod(uint64_t a, uint64_t b, uint64_t low, int n) nogil:
    cdef uint64_t acc = 0
    cdef uint64_t top = <uint64_t>1 << (n - 1)
    cdef uint64_t full = _mask(n)
    cdef uint64_t carry
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        carry = a & top
        a = (a << 1) & full
        if carry:
            a ^= low
    return acc


def gf_mul(uint64_t a, uint64_t b, uint64_t low, int n):
    """Product of two field elements; ``low`` holds f_0..f_{n-1}."""
    return _mulmod(a, b, low, n)


def gf_mul_batch(a, b, uint64_t low, int n):
    cdef const uint64_t[::1] av = np.ascontiguousarray(a, dtype=np.uint64)
    cdef const uint64_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint64)
    cdef Py_ssize_t size = av.shape[0]
    if bv.shape[0] != size:
        raise ValueError("operand arrays differ in length")
    out = np.empty(size, dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(size):
            ov[i] = _mulmod(av[i], bv[i], low, n)
    return out


def gf_orbit(uint64_t low, int n, uint64_t start=1):
    """Successive products start * x^j for j = 0 .. 2^n - 2."""
    cdef Py_ssize_t size = (<Py_ssize_t>1 << n) - 1
    out = np.empty(size, dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef uint64_t top = <uint64_t>1 << (n - 1)
    cdef uint64_t full = _mask(n)
    cdef uint64_t g = start
    cdef uint64_t carry
    cdef Py_ssize_t j
    with nogil:
        for j in range(size):
            ov[j] = g
            carry = g & top
            g = (g << 1) & full
            if carry:
                g ^= low
    return out


def xor_permute(double complex[::1] amps, uint64_t cmask, uint64_t xmask):
    """In place: for indices with all ``cmask`` bits set, flip ``xmask`` bits."""
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t i, j
    cdef double complex tmp
    with nogil:
        for i in range(dim):
            if (<uint64_t>i & cmask) == cmask:
                j = <Py_ssize_t>(<uint64_t>i ^ xmask)
                if j > i:
                    tmp = amps[i]
                    amps[i] = amps[j]
                    amps[j] = tmp


def swap_permute(double complex[::1] amps, uint64_t cmask, uint64_t amask, uint64_t bmask):
    """In place: exchange bits ``amask`` and ``bmask`` where ``cmask`` bits are set."""
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t i, j
    cdef uint64_t both = amask | bmask
    cdef double complex tmp
    with nogil:
        for i in range(dim):
            if ((<uint64_t>i & cmask) == cmask and (<uint64_t>i & amask)
                    and not (<uint64_t>i & bmask)):
                j = <Py_ssize_t>(<uint64_t>i ^ both)
                tmp = amps[i]
                amps[i] = amps[j]
                amps[j] = tmp


def phase_mask(double complex[::1] amps, uint64_t mask, double complex phase):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t i
    with nogil:
        for i in range(dim):
            if (<uint64_t>i & mask) == mask:
                amps[i] = amps[i] * phase
