"""Numerical and GF(2) kernels shared by the statistical tests."""

from __future__ import annotations

import math

import numba
import numpy as np

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 1_000_000


def erfc(x: float) -> float:
    """Complementary error function (the C library's ``erfc``)."""
    return math.erfc(x)


def std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _log_prefactor(a: float, x: float) -> float:
    return -x + a * math.log(x) - math.lgamma(a)


def _lower_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by its power series."""
    ap = a
    term = total = 1.0 / a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError(f"igam series did not converge for a={a}, x={x}")
    return total * math.exp(_log_prefactor(a, x))


def _upper_continued_fraction(a: float, x: float) -> float:
    """Q(a, x) by the Legendre continued fraction, modified Lentz evaluation."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"igamc continued fraction did not converge for a={a}, x={x}")
    return math.exp(_log_prefactor(a, x)) * h


def igamc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(a, x), clamped to [0, 1]."""
    if not a > 0:
        raise ValueError(f"igamc requires a > 0, got {a}")
    if x < 0:
        raise ValueError(f"igamc requires x >= 0, got {x}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        q = 1.0 - _lower_series(a, x)
    else:
        q = _upper_continued_fraction(a, x)
    return min(1.0, max(0.0, q))


def gf2_rank(matrix) -> int:
    """Rank over GF(2) of a 2-D array of 0/1 entries."""
    m = np.asarray(matrix, dtype=np.uint8)
    if m.ndim != 2 or m.size == 0:
        raise ValueError("gf2_rank needs a nonempty 2-D matrix")
    rows = [int("".join(map(str, row)), 2) for row in m.tolist()]
    rank = 0
    for bit in reversed(range(m.shape[1])):
        mask = 1 << bit
        pivot = next((i for i in range(rank, len(rows)) if rows[i] & mask), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & mask:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def gf2_rank_batch(rows: np.ndarray, ncols: int) -> np.ndarray:
    """Ranks of many matrices at once.

    ``rows`` has shape ``(count, nrows)``; each entry packs one matrix row
    into an unsigned integer, first column in the most significant of the
    ``ncols`` low bits. Elimination runs column by column across the whole
    batch.
    """
    rows = np.array(rows, dtype=np.uint64)
    count, nrows = rows.shape
    rank = np.zeros(count, dtype=np.int64)
    row_index = np.arange(nrows)
    for col in range(ncols):
        bit = np.uint64(1 << (ncols - 1 - col))
        has = (rows & bit) != 0
        eligible = has & (row_index[None, :] >= rank[:, None])
        found = np.flatnonzero(eligible.any(axis=1))
        if found.size == 0:
            continue
        pivot = eligible[found].argmax(axis=1)
        target = rank[found]
        pivot_rows = rows[found, pivot]
        rows[found, pivot] = rows[found, target]
        rows[found, target] = pivot_rows
        sub = rows[found]
        hit = (sub & bit) != 0
        hit[np.arange(found.size), target] = False
        sub ^= np.where(hit, pivot_rows[:, None], np.uint64(0))
        rows[found] = sub
        rank[found] += 1
    return rank


@numba.njit(cache=True)
def _bm_length(s):
    n = s.size
    c = np.zeros(n + 1, np.uint8)
    b = np.zeros(n + 1, np.uint8)
    t = np.zeros(n + 1, np.uint8)
    c[0] = 1
    b[0] = 1
    lc = 0
    lb = 0
    m = -1
    for pos in range(n):
        d = s[pos]
        for i in range(1, lc + 1):
            d ^= c[i] & s[pos - i]
        if d:
            shift = pos - m
            if 2 * lc <= pos:
                for j in range(lc + 1):
                    t[j] = c[j]
                for j in range(min(lb + 1, n + 1 - shift)):
                    c[j + shift] ^= b[j]
                for j in range(lc + 1):
                    b[j] = t[j]
                lb = lc
                lc = pos + 1 - lc
                m = pos
            else:
                for j in range(min(lb + 1, n + 1 - shift)):
                    c[j + shift] ^= b[j]
    return lc


@numba.njit(cache=True)
def _bm_lengths(blocks):
    out = np.empty(blocks.shape[0], np.int64)
    for k in range(blocks.shape[0]):
        out[k] = _bm_length(blocks[k])
    return out


def berlekamp_massey(bits) -> int:
    """Linear complexity: length of the shortest LFSR producing ``bits``."""
    arr = np.ascontiguousarray(np.asarray(bits, dtype=np.uint8))
    if arr.size == 0:
        raise ValueError("berlekamp_massey needs at least one bit")
    return int(_bm_length(arr))


def linear_complexities(blocks: np.ndarray) -> np.ndarray:
    """Berlekamp-Massey over each row of a 2-D 0/1 array."""
    return _bm_lengths(np.ascontiguousarray(blocks, dtype=np.uint8))


def dft_magnitudes(bits) -> np.ndarray:
    """``|S_j|`` for ``j < n/2`` of the DFT of the ±1 image of ``bits``."""
    arr = np.asarray(bits, dtype=np.float64)
    if arr.size < 2:
        raise ValueError("dft_magnitudes needs n >= 2")
    x = 2.0 * arr - 1.0
    return np.abs(np.fft.fft(x)[: arr.size // 2])
