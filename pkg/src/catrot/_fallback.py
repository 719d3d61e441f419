"""Numpy implementations of the compiled kernels, used when the extension is absent."""
import numpy as np

BACKEND = "numpy"

_ONE = np.uint64(1)


def _full(n):
    return np.uint64((1 << n) - 1)


def gf_mul(a, b, low, n):
    """Product of two field elements; ``low`` holds f_0..f_{n-1}."""
    a, b, acc = int(a), int(b), 0
    top, full = 1 << (n - 1), (1 << n) - 1
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        carry = a & top
        a = (a << 1) & full
        if carry:
            a ^= low
    return acc


def gf_mul_batch(a, b, low, n):
    a = np.array(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    if a.shape != b.shape:
        raise ValueError("operand arrays differ in length")
    low, full = np.uint64(low), _full(n)
    shift = np.uint64(n - 1)
    acc = np.zeros_like(a)
    for bit in range(n):
        acc ^= np.where((b >> np.uint64(bit)) & _ONE, a, np.uint64(0))
        carry = (a >> shift) & _ONE
        a = ((a << _ONE) & full) ^ (carry * low)
    return acc


def gf_orbit(low, n, start=1):
    """Successive products start * x^j for j = 0 .. 2^n - 2."""
    size = (1 << n) - 1
    out = np.empty(size, dtype=np.uint64)
    g, top, full = int(start), 1 << (n - 1), (1 << n) - 1
    for j in range(size):
        out[j] = g
        carry = g & top
        g = (g << 1) & full
        if carry:
            g ^= low
    return out


def _indices(dim):
    return np.arange(dim, dtype=np.int64)


def xor_permute(amps, cmask, xmask):
    idx = _indices(amps.shape[0])
    i = idx[((idx & cmask) == cmask) & ((idx ^ xmask) > idx)]
    j = i ^ xmask
    amps[i], amps[j] = amps[j], amps[i].copy()


def swap_permute(amps, cmask, amask, bmask):
    idx = _indices(amps.shape[0])
    i = idx[((idx & cmask) == cmask) & ((idx & amask) != 0) & ((idx & bmask) == 0)]
    j = i ^ (amask | bmask)
    amps[i], amps[j] = amps[j], amps[i].copy()


def phase_mask(amps, mask, phase):
    idx = _indices(amps.shape[0])
    amps[(idx & mask) == mask] *= phase
