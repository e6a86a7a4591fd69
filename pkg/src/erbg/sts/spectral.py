"""Binary matrix rank and discrete Fourier transform tests."""

from __future__ import annotations

import math

import numpy as np

from ..bitseq import as_bit_array
from ..specialfn import dft_magnitudes, erfc, gf2_rank_batch
from .common import NotApplicable, chi_square_pvalue, clip01

RANK_ROWS = RANK_COLS = 32
RANK_PROBS = (0.2888, 0.5776, 0.1336)  # full rank, full rank - 1, lower


def matrix_ranks(seq, rows: int = RANK_ROWS, cols: int = RANK_COLS) -> np.ndarray:
    bits = as_bit_array(seq)
    size = rows * cols
    count = bits.size // size
    if count < 1:
        raise NotApplicable(f"Rank needs at least {size} bits")
    mats = bits[: count * size].reshape(count, rows, cols).astype(np.uint64)
    weights = np.uint64(1) << np.arange(cols - 1, -1, -1, dtype=np.uint64)
    packed = (mats * weights).sum(axis=2, dtype=np.uint64)
    return gf2_rank_batch(packed, cols)


def rank_pvalue(full: int, minus_one: int, n_matrices: int) -> float:
    counts = (full, minus_one, n_matrices - full - minus_one)
    return chi_square_pvalue(counts, RANK_PROBS, 2)


def rank(seq) -> float:
    ranks = matrix_ranks(seq)
    full = int(np.count_nonzero(ranks == RANK_ROWS))
    minus_one = int(np.count_nonzero(ranks == RANK_ROWS - 1))
    return rank_pvalue(full, minus_one, ranks.size)


def fft_threshold(n: int) -> float:
    return math.sqrt(math.log(1.0 / 0.05) * n)


def fft_pvalue(below: int, n: int) -> float:
    """P-value given ``below`` = number of peaks under the 95 % threshold."""
    expected = 0.95 * n / 2.0
    d = (below - expected) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    return clip01(erfc(abs(d) / math.sqrt(2.0)))


def fft(seq) -> float:
    bits = as_bit_array(seq)
    if bits.size < 2:
        raise NotApplicable("FFT needs n >= 2")
    mags = dft_magnitudes(bits)
    below = int(np.count_nonzero(mags < fft_threshold(bits.size)))
    return fft_pvalue(below, bits.size)
