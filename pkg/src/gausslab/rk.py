"""Exact representation numbers r_k(n) and their persistent tables.

r_k(n) counts ordered integer k-tuples (n_1, ..., n_k) with
n_1^2 + ... + n_k^2 = n, signs and zeros included, so r_k(0) = 1 and
r_k(1) = 2k.

Construction routes:
  k = 1   squares get count 2 (two signed roots), r_1(0) = 1
  k = 2   direct enumeration of pairs a^2 + b^2 <= n_max, cost O(n_max)
  k = 3   sparse convolution of the k=2 table with squares, O(n_max^{3/2})
  k >= 4  binary powering of the k=2 table under exact NTT convolution,
          with one extra squares-convolution for odd k

Every route is exact in 64-bit integers; any value that would exceed 2^64
aborts instead of wrapping.

Cache file format (little-endian):
  magic "RKTB" (4 bytes) | format version u32 = 1 | k u32 | n_max u64 |
  (n_max + 1) u64 count values | u64 FNV-1a checksum of all preceding bytes
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
from dataclasses import dataclass

import numpy as np

from .convolve import ConvolutionOverflowError, exact_convolve

__all__ = [
    "RkTable",
    "build_rk_table",
    "convolve_tables",
    "rk_bruteforce",
    "rk_enumeration_tables",
    "sigma",
    "sigma_odd",
    "sigma_table",
    "save_table",
    "load_table",
    "fnv1a",
    "CacheFormatError",
    "CacheTruncatedError",
    "CacheChecksumError",
    "MAX_K",
    "MAX_N",
]

MAX_K = 8
MAX_N = 10**8

BRUTEFORCE_MAX_K = 6
BRUTEFORCE_MAX_N = 10**4

_MAGIC = b"RKTB"
_VERSION = 1
_HEADER = struct.Struct("<IIQ")  # version, k, n_max (after the 4 magic bytes)

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


class CacheFormatError(ValueError):
    """Bad magic bytes or unsupported format version."""


class CacheTruncatedError(ValueError):
    """File shorter than the header-declared payload."""


class CacheChecksumError(ValueError):
    """Stored FNV-1a checksum does not match the payload."""


@dataclass(frozen=True, eq=False)
class RkTable:
    """Exact counts r_k(0..n_max) for one dimension k.

    The counts array is read-only after construction and safe to share.
    """

    k: int
    n_max: int
    counts: np.ndarray

    def __post_init__(self):
        if self.counts.dtype != np.uint64 or self.counts.shape != (self.n_max + 1,):
            raise ValueError("RkTable: counts must be uint64 of length n_max + 1")
        self.counts.flags.writeable = False

    def __eq__(self, other):
        return (
            isinstance(other, RkTable)
            and self.k == other.k
            and self.n_max == other.n_max
            and np.array_equal(self.counts, other.counts)
        )


def _check_range(k: int, n_max: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or not (1 <= k <= MAX_K):
        raise ValueError(f"k = {k} outside [1, {MAX_K}]")
    if not isinstance(n_max, int) or n_max < 0 or n_max > MAX_N:
        raise ValueError(f"n_max = {n_max} outside [0, {MAX_N}]")


def _r1_u32(n_max: int) -> np.ndarray:
    counts = np.zeros(n_max + 1, dtype=np.uint32)
    counts[0] = 1
    roots = np.arange(1, math.isqrt(n_max) + 1, dtype=np.int64)
    counts[roots * roots] = 2
    return counts


def _r2_u32(n_max: int) -> np.ndarray:
    counts = np.zeros(n_max + 1, dtype=np.uint32)
    for a in range(math.isqrt(n_max) + 1):
        rem = n_max - a * a
        b = np.arange(math.isqrt(rem) + 1, dtype=np.int64)
        idx = a * a + b * b
        if a == 0:
            mult = np.where(b == 0, 1, 2)
        else:
            mult = np.where(b == 0, 2, 4)
        counts[idx] += mult.astype(np.uint32)
    return counts


def _sparse_square_convolve(base: np.ndarray, n_max: int) -> np.ndarray:
    """Convolve a table with the k=1 squares table: out[n] = sum_j base[n - j^2]."""
    out = base.copy()
    doubled = base * base.dtype.type(2)
    for j in range(1, math.isqrt(n_max) + 1):
        jj = j * j
        out[jj:] += doubled[: n_max + 1 - jj]
    return out


def build_rk_table(k: int, n_max: int) -> RkTable:
    """Exact r_k(0..n_max); see the module docstring for the routes."""
    _check_range(k, n_max)
    if k == 1:
        counts = _r1_u32(n_max).astype(np.uint64)
    elif k == 2:
        counts = _r2_u32(n_max).astype(np.uint64)
    elif k == 3:
        r2 = _r2_u32(n_max)
        r3 = _sparse_square_convolve(r2, n_max)
        # r_3 <= ~n^(1/2+eps); far below the u32 ceiling at any supported n_max
        if int(r3.max(initial=0)) >= 2**31:
            raise ConvolutionOverflowError("r_3 accumulator unexpectedly large")
        counts = r3.astype(np.uint64)
    else:
        counts = _theta_power_even(k // 2, n_max)
        if k % 2:
            counts = exact_convolve(counts, _r1_u32(n_max).astype(np.uint64), n_max + 1)
    return RkTable(k=k, n_max=n_max, counts=counts)


def _theta_power_even(e: int, n_max: int) -> np.ndarray:
    """Counts for 2e squares, by square-and-multiply over the k=2 table."""
    base = _r2_u32(n_max).astype(np.uint64)
    result = None
    while e:
        if e & 1:
            result = base if result is None else exact_convolve(result, base, n_max + 1)
        e >>= 1
        if e:
            base = exact_convolve(base, base, n_max + 1)
    return result


def convolve_tables(a: RkTable, b: RkTable) -> RkTable:
    """Exact product table: dimension a.k + b.k, truncated to min(n_max)."""
    k = a.k + b.k
    if k > MAX_K:
        raise ValueError(f"combined dimension {k} exceeds {MAX_K}")
    n_max = min(a.n_max, b.n_max)
    counts = exact_convolve(a.counts, b.counts, n_max + 1)
    return RkTable(k=k, n_max=n_max, counts=counts)


def rk_bruteforce(k: int, n: int) -> int:
    """r_k(n) by nested enumeration over coordinates in [-sqrt(n), sqrt(n)].

    Exponential-cost oracle; keep k <= 6 and n <= 10^4.  The recursion prunes
    on the remaining budget and resolves the final coordinate by a perfect
    square test.
    """
    if not (1 <= k <= BRUTEFORCE_MAX_K):
        raise ValueError(f"rk_bruteforce: k = {k} outside [1, {BRUTEFORCE_MAX_K}]")
    if not (0 <= n <= BRUTEFORCE_MAX_N):
        raise ValueError(f"rk_bruteforce: n = {n} outside [0, {BRUTEFORCE_MAX_N}]")

    def count(dims: int, budget: int) -> int:
        if dims == 1:
            if budget == 0:
                return 1
            r = math.isqrt(budget)
            return 2 if r * r == budget else 0
        total = 0
        r = math.isqrt(budget)
        for t in range(-r, r + 1):
            total += count(dims - 1, budget - t * t)
        return total

    return count(k, n)


def rk_enumeration_tables(k_max: int, n_max: int) -> list[list[int]]:
    """r_1..r_{k_max} tables by adding one signed coordinate at a time.

    Pure-Python integer enumeration, independent of the production build
    path; the batch analogue of rk_bruteforce for full-range cross-checks.
    Returns tables[j] = r_{j+1}(0..n_max).
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    root = math.isqrt(n_max)
    current = [1] + [0] * n_max  # zero coordinates: the empty sum
    tables = []
    for _ in range(k_max):
        nxt = [0] * (n_max + 1)
        for t in range(-root, root + 1):
            tt = t * t
            for m in range(n_max + 1 - tt):
                nxt[m + tt] += current[m]
        tables.append(nxt)
        current = nxt
    return tables


def sigma(nu: float, h: int) -> float:
    """Divisor power sum sigma_nu(h) = sum over d | h of d^nu, trial division."""
    if not isinstance(h, int) or h < 1:
        raise ValueError("sigma: h must be a positive integer")
    if h > 10**9:
        raise ValueError("sigma: h above trial-division range")
    total = []
    d = 1
    while d * d <= h:
        if h % d == 0:
            total.append(float(d) ** nu)
            q = h // d
            if q != d:
                total.append(float(q) ** nu)
        d += 1
    return math.fsum(total)


def sigma_odd(nu: float, h: int) -> float:
    """Odd-divisor power sum: sum over odd d | h of d^nu."""
    if not isinstance(h, int) or h < 1:
        raise ValueError("sigma_odd: h must be a positive integer")
    if h > 10**9:
        raise ValueError("sigma_odd: h above trial-division range")
    total = []
    d = 1
    while d * d <= h:
        if h % d == 0:
            if d % 2 == 1:
                total.append(float(d) ** nu)
            q = h // d
            if q != d and q % 2 == 1:
                total.append(float(q) ** nu)
        d += 1
    return math.fsum(total)


def sigma_table(nu: float, n_max: int, odd_only: bool = False) -> np.ndarray:
    """sigma_nu(h) for all h <= n_max by sieve accumulation (index 0 unused)."""
    out = np.zeros(n_max + 1, dtype=np.float64)
    start = 1
    step = 2 if odd_only else 1
    for d in range(start, n_max + 1, step):
        out[d::d] += float(d) ** nu
    return out


def fnv1a(chunks) -> int:
    """64-bit FNV-1a over an iterable of bytes-like chunks."""
    h = _FNV_OFFSET
    mask = (1 << 64) - 1
    prime = _FNV_PRIME
    for chunk in chunks:
        for byte in memoryview(chunk):
            h = ((h ^ byte) * prime) & mask
    return h


def save_table(table: RkTable, path) -> None:
    """Write the cache file atomically (temp file + rename)."""
    header = _MAGIC + _HEADER.pack(_VERSION, table.k, table.n_max)
    payload = np.ascontiguousarray(table.counts, dtype="<u8").tobytes()
    checksum = fnv1a((header, payload))
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".rktb.tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(payload)
            fh.write(struct.pack("<Q", checksum))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_table(path) -> RkTable:
    """Read and validate a cache file; the round trip is bit-exact."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 or data[:4] != _MAGIC:
        raise CacheFormatError(f"{path}: bad magic bytes")
    if len(data) < 4 + _HEADER.size + 8:
        raise CacheTruncatedError(f"{path}: shorter than a minimal table file")
    version, k, n_max = _HEADER.unpack_from(data, 4)
    if version != _VERSION:
        raise CacheFormatError(f"{path}: unsupported format version {version}")
    body_end = 4 + _HEADER.size + 8 * (n_max + 1)
    if len(data) < body_end + 8:
        raise CacheTruncatedError(f"{path}: truncated ({len(data)} bytes, need {body_end + 8})")
    if len(data) > body_end + 8:
        raise CacheFormatError(f"{path}: trailing bytes after checksum")
    (stored,) = struct.unpack_from("<Q", data, body_end)
    if fnv1a((data[:body_end],)) != stored:
        raise CacheChecksumError(f"{path}: checksum mismatch")
    counts = np.frombuffer(data, dtype="<u8", count=n_max + 1, offset=4 + _HEADER.size)
    return RkTable(k=k, n_max=n_max, counts=counts.astype(np.uint64))
