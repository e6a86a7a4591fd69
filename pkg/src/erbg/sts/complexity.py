"""Linear complexity test."""

from __future__ import annotations

import numpy as np

from ..bitseq import as_bit_array
from ..specialfn import linear_complexities
from .common import NotApplicable, chi_square_pvalue

LINEAR_COMPLEXITY_PROBS = (0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833)
_EDGES = np.array([-2.5, -1.5, -0.5, 0.5, 1.5, 2.5])


def expected_complexity(M: int) -> float:
    return M / 2.0 + (9.0 + (-1) ** (M + 1)) / 36.0 - (M / 3.0 + 2.0 / 9.0) * 2.0 ** -M


def complexity_cells(complexities, M: int) -> np.ndarray:
    """Bin the normalized statistic ``T`` of each block into the seven cells."""
    mu = expected_complexity(M)
    t = (-1) ** M * (np.asarray(complexities, dtype=np.float64) - mu) + 2.0 / 9.0
    cells = np.searchsorted(_EDGES, t, side="left")
    return np.bincount(cells, minlength=len(LINEAR_COMPLEXITY_PROBS))


def linear_complexity_pvalue(cell_counts) -> float:
    return chi_square_pvalue(cell_counts, LINEAR_COMPLEXITY_PROBS, len(LINEAR_COMPLEXITY_PROBS) - 1)


def linear_complexity(seq, M: int = 500) -> float:
    bits = as_bit_array(seq)
    n_blocks = bits.size // M
    if n_blocks < 1:
        raise NotApplicable(f"LinearComplexity needs at least one block of {M} bits")
    lengths = linear_complexities(bits[: n_blocks * M].reshape(n_blocks, M))
    return linear_complexity_pvalue(complexity_cells(lengths, M))
