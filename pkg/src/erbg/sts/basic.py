"""Frequency, block frequency, runs, longest run and cumulative sums."""

from __future__ import annotations

import math

import numpy as np

from ..bitseq import as_bit_array
from ..specialfn import erfc, igamc, std_normal_cdf
from .common import NotApplicable, chi_square_pvalue, clip01, require_length


def frequency(seq) -> float:
    bits = as_bit_array(seq)
    n = bits.size
    require_length(n, 1, "Frequency")
    s = 2 * int(bits.sum()) - n
    return clip01(erfc(abs(s) / math.sqrt(n) / math.sqrt(2.0)))


def block_frequency(seq, M: int = 128) -> float:
    bits = as_bit_array(seq)
    n_blocks = bits.size // M
    if n_blocks < 1:
        raise NotApplicable(f"BlockFrequency needs at least one block of {M} bits")
    pi = bits[: n_blocks * M].reshape(n_blocks, M).sum(axis=1) / M
    chi2 = 4.0 * M * float(np.sum((pi - 0.5) ** 2))
    return clip01(igamc(n_blocks / 2.0, chi2 / 2.0))


def runs(seq) -> float:
    bits = as_bit_array(seq)
    n = bits.size
    require_length(n, 2, "Runs")
    pi = int(bits.sum()) / n
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return 0.0
    v_obs = 1 + int(np.count_nonzero(np.diff(bits)))
    num = abs(v_obs - 2.0 * n * pi * (1.0 - pi))
    den = 2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)
    return clip01(erfc(num / den))


# (block length, lowest category, probabilities); categories run from the
# lowest value up, the first and last are open-ended
LONGEST_RUN_REGIMES = (
    (8, 1, (0.2148, 0.3672, 0.2305, 0.1875)),
    (128, 4, (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (10_000, 10, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
)


def longest_run_regime(n: int) -> tuple[int, int, tuple[float, ...]]:
    require_length(n, 128, "LongestRun")
    if n < 6272:
        return LONGEST_RUN_REGIMES[0]
    if n < 750_000:
        return LONGEST_RUN_REGIMES[1]
    return LONGEST_RUN_REGIMES[2]


def longest_runs_of_ones(blocks: np.ndarray) -> np.ndarray:
    """Longest run of ones in each row of a 2-D 0/1 array."""
    count, width = blocks.shape
    padded = np.zeros((count, width + 2), dtype=np.int8)
    padded[:, 1:-1] = blocks
    edges = np.diff(padded.ravel())
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    longest = np.zeros(count, dtype=np.int64)
    np.maximum.at(longest, starts // (width + 2), ends - starts)
    return longest


def longest_run_counts(seq) -> tuple[np.ndarray, tuple[float, ...]]:
    bits = as_bit_array(seq)
    M, low, probs = longest_run_regime(bits.size)
    n_blocks = bits.size // M
    longest = longest_runs_of_ones(bits[: n_blocks * M].reshape(n_blocks, M))
    cells = np.clip(longest - low, 0, len(probs) - 1)
    return np.bincount(cells, minlength=len(probs)), probs


def longest_run_pvalue(counts, probs) -> float:
    return chi_square_pvalue(counts, probs, len(probs) - 1)


def longest_run(seq) -> float:
    counts, probs = longest_run_counts(seq)
    return longest_run_pvalue(counts, probs)


def cusum_pvalue(z: int, n: int) -> float:
    """P-value for a maximal partial-sum excursion ``z`` over ``n`` steps."""
    if z == 0:
        return 1.0
    sqrt_n = math.sqrt(n)
    total = 1.0
    for k in range(math.floor((-n / z + 1) / 4), math.floor((n / z - 1) / 4) + 1):
        total -= std_normal_cdf((4 * k + 1) * z / sqrt_n) - std_normal_cdf((4 * k - 1) * z / sqrt_n)
    for k in range(math.floor((-n / z - 3) / 4), math.floor((n / z - 1) / 4) + 1):
        total += std_normal_cdf((4 * k + 3) * z / sqrt_n) - std_normal_cdf((4 * k + 1) * z / sqrt_n)
    return clip01(total)


def cumulative_sums(seq) -> tuple[float, float]:
    """Forward and backward cumulative-sums P-values."""
    bits = as_bit_array(seq)
    n = bits.size
    require_length(n, 1, "CumulativeSums")
    x = 2 * bits.astype(np.int64) - 1
    forward = int(np.abs(np.cumsum(x)).max())
    backward = int(np.abs(np.cumsum(x[::-1])).max())
    return cusum_pvalue(forward, n), cusum_pvalue(backward, n)
