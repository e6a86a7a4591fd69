"""Non-overlapping and overlapping template matching."""

from __future__ import annotations

import hashlib
import math
from functools import lru_cache

import numpy as np

from ..bitseq import as_bit_array
from ..specialfn import igamc
from .common import NotApplicable, chi_square_pvalue, clip01, window_values

NONOVERLAPPING_BLOCKS = 8
OVERLAPPING_BLOCK = 1032
OVERLAPPING_CELLS = 6
OVERLAPPING_PROBS_9 = (0.364091, 0.185659, 0.139381, 0.100571, 0.070432, 0.139865)

# sha256 over the newline-joined m=9 template strings in ascending order
TEMPLATES_9_SHA256 = "2c4d118b09d3eca849863941961d1373c501b488d8c40dc8ab2f365037cfda7c"


def is_aperiodic(value: int, m: int) -> bool:
    """True if the m-bit pattern cannot overlap a shifted copy of itself."""
    bits = format(value, f"0{m}b")
    return all(bits[:m - k] != bits[k:] for k in range(1, m))


@lru_cache(maxsize=None)
def aperiodic_templates(m: int) -> tuple[int, ...]:
    """All aperiodic m-bit templates as integers, ascending."""
    if m < 1:
        raise ValueError("template length must be positive")
    table = tuple(v for v in range(1 << m) if is_aperiodic(v, m))
    if m == 9 and templates_digest(table, m) != TEMPLATES_9_SHA256:
        raise RuntimeError("generated m=9 template table does not match its checksum")
    return table


def templates_digest(table, m: int) -> str:
    text = "\n".join(format(v, f"0{m}b") for v in table)
    return hashlib.sha256(text.encode("ascii")).hexdigest()


def template_label(value: int, m: int) -> str:
    return format(value, f"0{m}b")


def nonoverlapping_counts(seq, m: int = 9) -> tuple[np.ndarray, int]:
    """Hit counts ``W[template, block]`` and the block length ``M``.

    An aperiodic template cannot match again within ``m - 1`` positions of a
    previous match, so skipping ahead after a hit never loses one and plain
    window counting gives the non-overlapping count.
    """
    bits = as_bit_array(seq)
    M = bits.size // NONOVERLAPPING_BLOCKS
    if M < m:
        raise NotApplicable(f"NonOverlappingTemplate needs blocks of at least {m} bits")
    windows = window_values(bits[: M * NONOVERLAPPING_BLOCKS], m)
    templates = np.array(aperiodic_templates(m))
    counts = np.empty((templates.size, NONOVERLAPPING_BLOCKS), dtype=np.int64)
    for j in range(NONOVERLAPPING_BLOCKS):
        hist = np.bincount(windows[j * M: j * M + M - m + 1], minlength=1 << m)
        counts[:, j] = hist[templates]
    return counts, M


def template_block_counts(seq, template: int, m: int,
                          n_blocks: int = NONOVERLAPPING_BLOCKS) -> np.ndarray:
    """Non-overlapping hits of any template (periodic or not) in each block.

    The scan restarts ``m`` bits after every hit.
    """
    bits = as_bit_array(seq)
    M = bits.size // n_blocks
    counts = np.zeros(n_blocks, dtype=np.int64)
    for j in range(n_blocks):
        matches = np.flatnonzero(window_values(bits[j * M:(j + 1) * M], m) == template)
        next_free = 0
        for pos in matches.tolist():
            if pos >= next_free:
                counts[j] += 1
                next_free = pos + m
    return counts


def nonoverlapping_pvalue(w: np.ndarray, M: int, m: int) -> float:
    mu = (M - m + 1) / 2.0 ** m
    var = M * (1.0 / 2.0 ** m - (2.0 * m - 1.0) / 2.0 ** (2 * m))
    chi2 = float(np.sum((np.asarray(w, dtype=np.float64) - mu) ** 2)) / var
    return clip01(igamc(len(w) / 2.0, chi2 / 2.0))


def non_overlapping_template(seq, m: int = 9) -> list[float]:
    """One P-value per aperiodic template, in ascending template order."""
    counts, M = nonoverlapping_counts(seq, m)
    return [nonoverlapping_pvalue(row, M, m) for row in counts]


def _overlap_cell_probability(u: int, eta: float) -> float:
    if u == 0:
        return math.exp(-eta)
    return sum(
        math.exp(-eta - u * math.log(2) + l * math.log(eta) - math.lgamma(l + 1)
                 + math.lgamma(u) - math.lgamma(l) - math.lgamma(u - l + 1))
        for l in range(1, u + 1)
    )


@lru_cache(maxsize=None)
def overlapping_probabilities(m: int, M: int = OVERLAPPING_BLOCK) -> tuple[float, ...]:
    if m == 9 and M == OVERLAPPING_BLOCK:
        return OVERLAPPING_PROBS_9
    eta = (M - m + 1) / 2.0 ** m / 2.0
    head = [_overlap_cell_probability(u, eta) for u in range(OVERLAPPING_CELLS - 1)]
    return tuple(head + [1.0 - sum(head)])


def overlapping_counts(seq, m: int = 9) -> np.ndarray:
    """Per-block overlapping occurrence counts of the all-ones template."""
    bits = as_bit_array(seq)
    M = OVERLAPPING_BLOCK
    n_blocks = bits.size // M
    if n_blocks < 1 or M < m:
        raise NotApplicable(f"OverlappingTemplate needs at least {M} bits")
    target = (1 << m) - 1
    hits = window_values(bits[: n_blocks * M], m) == target
    hits = np.concatenate((hits, np.zeros(m - 1, dtype=bool)))
    return hits.reshape(n_blocks, M)[:, : M - m + 1].sum(axis=1)


def overlapping_pvalue(cell_counts, m: int = 9) -> float:
    return chi_square_pvalue(cell_counts, overlapping_probabilities(m), OVERLAPPING_CELLS - 1)


def overlapping_template(seq, m: int = 9) -> float:
    hits = overlapping_counts(seq, m)
    cells = np.bincount(np.minimum(hits, OVERLAPPING_CELLS - 1), minlength=OVERLAPPING_CELLS)
    return overlapping_pvalue(cells, m)
