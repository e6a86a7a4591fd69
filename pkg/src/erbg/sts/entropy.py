"""Maurer's universal test, approximate entropy and the serial test."""

from __future__ import annotations

import math

import numpy as np

from ..bitseq import as_bit_array
from ..specialfn import erfc, igamc
from .common import NotApplicable, clip01, pattern_counts

# minimum n for each block length L
UNIVERSAL_SCHEDULE = (
    (387_840, 6), (904_960, 7), (2_068_480, 8), (4_654_080, 9), (10_342_400, 10),
    (22_753_280, 11), (49_643_520, 12), (107_560_960, 13), (231_669_760, 14),
    (496_435_200, 15), (1_059_061_760, 16),
)
# indexed by L; entry 0 unused
UNIVERSAL_EXPECTED = (
    0.0, 0.7326495, 1.5374383, 2.4016068, 3.3112247, 4.2534266, 5.2177052, 6.1962507,
    7.1836656, 8.1764248, 9.1723243, 10.170032, 11.168765, 12.168070, 13.167693,
    14.167488, 15.167379,
)
UNIVERSAL_VARIANCE = (
    0.0, 0.690, 1.338, 1.901, 2.358, 2.705, 2.954, 3.125, 3.238, 3.311, 3.356, 3.384,
    3.401, 3.410, 3.416, 3.419, 3.421,
)


def universal_parameters(n: int) -> tuple[int, int]:
    """Block length L and initialization segment Q for a sequence of n bits."""
    L = None
    for minimum, length in UNIVERSAL_SCHEDULE:
        if n >= minimum:
            L = length
    if L is None:
        raise NotApplicable(f"Universal needs n >= {UNIVERSAL_SCHEDULE[0][0]}, got {n}")
    return L, 10 * (1 << L)


def universal_statistic(seq, L: int, Q: int) -> tuple[float, int]:
    """Average log2 distance ``f`` between repeated L-bit blocks, and K."""
    bits = as_bit_array(seq)
    n_blocks = bits.size // L
    K = n_blocks - Q
    if K < 1:
        raise NotApplicable("Universal needs at least one test block")
    weights = 1 << np.arange(L - 1, -1, -1, dtype=np.int64)
    values = bits[: n_blocks * L].reshape(n_blocks, L).astype(np.int64) @ weights
    # previous occurrence of every block value, found by a stable sort
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    same = sorted_values[1:] == sorted_values[:-1]
    previous = np.full(n_blocks, -1, dtype=np.int64)
    previous[order[1:][same]] = order[:-1][same]
    index = np.arange(Q, n_blocks)
    prev = previous[Q:]
    distance = np.where(prev >= 0, index - prev, index + 1)
    return float(np.log2(distance).sum()) / K, K


def universal(seq, L: int | None = None, Q: int | None = None) -> float:
    bits = as_bit_array(seq)
    if L is None:
        L, default_q = universal_parameters(bits.size)
        Q = default_q if Q is None else Q
    elif Q is None:
        Q = 10 * (1 << L)
    f, K = universal_statistic(bits, L, Q)
    c = 0.7 - 0.8 / L + (4.0 + 32.0 / L) * K ** (-3.0 / L) / 15.0
    sigma = c * math.sqrt(UNIVERSAL_VARIANCE[L] / K)
    return clip01(erfc(abs(f - UNIVERSAL_EXPECTED[L]) / (math.sqrt(2.0) * sigma)))


def _phi(bits: np.ndarray, m: int) -> float:
    freq = pattern_counts(bits, m)
    freq = freq[freq > 0] / bits.size
    return float(np.sum(freq * np.log(freq)))


def approximate_entropy(seq, m: int = 10) -> float:
    bits = as_bit_array(seq)
    n = bits.size
    if n < m + 1:
        raise NotApplicable(f"ApproximateEntropy needs n > m = {m}")
    apen = _phi(bits, m) - _phi(bits, m + 1)
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    return clip01(igamc(2.0 ** (m - 1), chi2 / 2.0))


def psi_squared(bits: np.ndarray, m: int) -> float:
    if m <= 0:
        return 0.0
    counts = pattern_counts(bits, m).astype(np.float64)
    return (2.0 ** m / bits.size) * float(np.sum(counts ** 2)) - bits.size


def serial(seq, m: int = 16) -> tuple[float, float]:
    bits = as_bit_array(seq)
    if m < 2:
        raise ValueError("serial test needs m >= 2")
    if bits.size < m:
        raise NotApplicable(f"Serial needs n >= m = {m}")
    psim0, psim1, psim2 = (psi_squared(bits, k) for k in (m, m - 1, m - 2))
    del1 = psim0 - psim1
    del2 = psim0 - 2.0 * psim1 + psim2
    # rounding can push a statistic a hair below zero
    return (clip01(igamc(2.0 ** (m - 2), max(del1, 0.0) / 2.0)),
            clip01(igamc(2.0 ** (m - 3), max(del2, 0.0) / 2.0)))
