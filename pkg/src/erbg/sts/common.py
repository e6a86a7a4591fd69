from __future__ import annotations

import numpy as np

from ..specialfn import igamc


class NotApplicable(Exception):
    """The test cannot be evaluated on this input (too short, too few cycles)."""

    @property
    def reason(self) -> str:
        return str(self.args[0]) if self.args else "not applicable"


def clip01(p: float) -> float:
    return min(1.0, max(0.0, float(p)))


def require_length(n: int, minimum: int, test: str) -> None:
    if n < minimum:
        raise NotApplicable(f"{test} needs n >= {minimum}, got {n}")


def chi_square(observed, probabilities, total: float | None = None) -> float:
    observed = np.asarray(observed, dtype=np.float64)
    probabilities = np.asarray(probabilities, dtype=np.float64)
    if total is None:
        total = observed.sum()
    expected = total * probabilities
    return float(np.sum((observed - expected) ** 2 / expected))


def chi_square_pvalue(observed, probabilities, dof: int) -> float:
    """P-value of a goodness-of-fit chi-square with ``dof`` degrees of freedom."""
    return clip01(igamc(dof / 2.0, chi_square(observed, probabilities) / 2.0))


def window_values(bits: np.ndarray, m: int, wrap: bool = False) -> np.ndarray:
    """Integer value of every m-bit window, first bit most significant.

    With ``wrap`` the sequence is extended by its own first ``m - 1`` bits,
    giving ``n`` windows; otherwise there are ``n - m + 1``.
    """
    n = bits.size
    if wrap:
        ext = np.concatenate((bits, np.resize(bits, m - 1))) if m > 1 else bits
        count = n
    else:
        ext = bits
        count = n - m + 1
    if count <= 0:
        return np.zeros(0, dtype=np.int64)
    values = np.zeros(count, dtype=np.int64)
    for k in range(m):
        values <<= 1
        values |= ext[k:k + count]
    return values


def pattern_counts(bits: np.ndarray, m: int) -> np.ndarray:
    """Counts of all 2**m overlapping patterns with wraparound."""
    if m == 0:
        return np.array([bits.size], dtype=np.int64)
    return np.bincount(window_values(bits, m, wrap=True), minlength=1 << m)
