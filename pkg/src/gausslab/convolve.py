"""Exact integer convolution via number-theoretic transforms.

Floating-point FFTs cannot be trusted at the magnitudes representation
counts reach, so products are computed modulo three NTT-friendly primes

    2013265921 = 15 * 2^27 + 1   (generator 31)
    2281701377 = 17 * 2^27 + 1   (generator 3)
    3221225473 =  3 * 2^30 + 1   (generator 5)

and reconstructed by the Chinese remainder theorem.  The primes fit in 32
bits, so every butterfly product fits a uint64 exactly and the whole
transform vectorizes in numpy.  The CRT modulus is ~2^93, comfortably above
any true coefficient that arises here; any reconstructed value that does not
fit in 64 bits aborts with ConvolutionOverflowError rather than wrapping.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "exact_convolve",
    "naive_convolve",
    "ConvolutionOverflowError",
    "ConvolutionCapacityError",
    "MAX_RESULT_LEN",
]

_PRIMES = (2013265921, 2281701377, 3221225473)
_GENERATORS = (31, 3, 5)
_MAX_LOG2 = 27  # limited by the 2-adic valuation of p-1 for the first two primes

MAX_RESULT_LEN = 1 << _MAX_LOG2

_U64_MAX = np.uint64(2**64 - 1)


class ConvolutionOverflowError(OverflowError):
    """A convolution coefficient does not fit in an unsigned 64-bit integer."""


class ConvolutionCapacityError(ValueError):
    """Requested transform size exceeds what the fixed primes support."""


_bitrev_cache: dict[int, np.ndarray] = {}


def _bitrev_indices(n: int) -> np.ndarray:
    cached = _bitrev_cache.get(n)
    if cached is not None:
        return cached
    lg = n.bit_length() - 1
    j = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(lg):
        rev |= ((j >> b) & 1) << (lg - 1 - b)
    _bitrev_cache[n] = rev
    return rev


def _root_powers(w: int, count: int, p: int) -> np.ndarray:
    """w^0 .. w^(count-1) mod p, built by doubling."""
    ws = np.ones(1, dtype=np.uint64)
    cur = w
    while ws.shape[0] < count:
        ws = np.concatenate([ws, ws * np.uint64(cur) % np.uint64(p)])
        cur = cur * cur % p
    return ws[:count]


def _ntt(values: np.ndarray, p: int, g: int, invert: bool) -> np.ndarray:
    n = values.shape[0]
    pn = np.uint64(p)
    a = values[_bitrev_indices(n)]
    half = 1
    while half < n:
        wlen = pow(g, (p - 1) // (2 * half), p)
        if invert:
            wlen = pow(wlen, p - 2, p)
        ws = _root_powers(wlen, half, p)
        blk = a.reshape(-1, 2 * half)
        u = blk[:, :half]
        v = blk[:, half:] * ws % pn
        s = u + v
        s -= np.where(s >= pn, pn, np.uint64(0))
        d = u + pn - v
        d -= np.where(d >= pn, pn, np.uint64(0))
        blk[:, :half] = s
        blk[:, half:] = d
        half *= 2
    if invert:
        a = a * np.uint64(pow(n, p - 2, p)) % pn
    return a


def exact_convolve(a: np.ndarray, b: np.ndarray, n_out: int) -> np.ndarray:
    """First n_out coefficients of the product of integer sequences a and b.

    Inputs are uint64 arrays (values < 2^64); the result is exact uint64.
    Raises ConvolutionOverflowError if any true coefficient is >= 2^64 and
    ConvolutionCapacityError if the required transform exceeds 2^27 points.
    """
    if n_out <= 0:
        return np.zeros(0, dtype=np.uint64)
    same = b is a
    a = np.ascontiguousarray(np.asarray(a, dtype=np.uint64)[:n_out])
    b = a if same else np.ascontiguousarray(np.asarray(b, dtype=np.uint64)[:n_out])
    need = a.shape[0] + b.shape[0] - 1
    if need > MAX_RESULT_LEN:
        raise ConvolutionCapacityError(
            f"convolution needs {need} points; transform capacity is {MAX_RESULT_LEN}"
        )
    size = 1 << max(1, (need - 1).bit_length())
    residues = []
    for p, g in zip(_PRIMES, _GENERATORS):
        pa = np.zeros(size, dtype=np.uint64)
        pa[: a.shape[0]] = a % np.uint64(p)
        fa = _ntt(pa, p, g, invert=False)
        if same:
            fb = fa
        else:
            pb = np.zeros(size, dtype=np.uint64)
            pb[: b.shape[0]] = b % np.uint64(p)
            fb = _ntt(pb, p, g, invert=False)
        residues.append(_ntt(fa * fb % np.uint64(p), p, g, invert=True)[:n_out])
    return _crt3(residues)


def _crt3(residues: list[np.ndarray]) -> np.ndarray:
    p0, p1, p2 = _PRIMES
    r0, r1, r2 = residues
    inv0 = np.uint64(pow(p0, -1, p1))
    t1 = (r1 + np.uint64(p1) - r0 % np.uint64(p1)) % np.uint64(p1) * inv0 % np.uint64(p1)
    x01 = r0 + np.uint64(p0) * t1  # < p0 * p1 < 2^63, exact
    p01 = p0 * p1
    inv01 = np.uint64(pow(p01 % p2, -1, p2))
    t2 = (r2 + np.uint64(p2) - x01 % np.uint64(p2)) % np.uint64(p2) * inv01 % np.uint64(p2)
    # value = x01 + p01 * t2; reject coefficients that would exceed 2^64
    headroom = (_U64_MAX - x01) // np.uint64(p01)
    if np.any(t2 > headroom):
        bad = int(np.argmax(t2 > headroom))
        raise ConvolutionOverflowError(
            f"convolution coefficient at index {bad} exceeds 64 bits"
        )
    return x01 + np.uint64(p01) * t2


def naive_convolve(a, b, n_out: int) -> list[int]:
    """Reference quadratic convolution over Python integers (oracle scale)."""
    a = [int(x) for x in a[:n_out]]
    b = [int(x) for x in b[:n_out]]
    out = [0] * min(n_out, len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if i + j >= n_out:
                break
            out[i + j] += ai * bj
    return out
