"""Random excursions and random excursions variant."""

from __future__ import annotations

import math

import numpy as np

from ..bitseq import as_bit_array
from ..specialfn import erfc
from .common import NotApplicable, chi_square_pvalue, clip01

MIN_CYCLES = 500
EXCURSION_STATES = (-4, -3, -2, -1, 1, 2, 3, 4)
VARIANT_STATES = tuple(x for x in range(-9, 10) if x)


def excursion_probabilities(x: int) -> tuple[float, ...]:
    """Probability that a cycle visits state x exactly k times, k = 0..4 and >= 5."""
    q = 1.0 - 1.0 / (2.0 * abs(x))
    probs = [q]
    probs += [q ** (k - 1) / (4.0 * x * x) for k in range(1, 5)]
    probs.append(q ** 4 / (2.0 * abs(x)))
    return tuple(probs)


def random_walk(seq) -> tuple[np.ndarray, int]:
    """Partial sums of the ±1 walk and the number of zero-delimited cycles J."""
    bits = as_bit_array(seq)
    if bits.size == 0:
        raise NotApplicable("random excursions need a nonempty sequence")
    walk = np.cumsum(2 * bits.astype(np.int64) - 1)
    cycles = int(np.count_nonzero(walk == 0)) + (1 if walk[-1] != 0 else 0)
    return walk, cycles


def cycle_visits(walk: np.ndarray, cycles: int, states=EXCURSION_STATES) -> np.ndarray:
    """``visits[c, i]`` = times cycle ``c`` visits ``states[i]``."""
    zero = walk == 0
    # a zero closes the cycle it sits in
    cycle_of = np.concatenate(([0], np.cumsum(zero)[:-1]))
    span = max(abs(s) for s in states)
    inside = np.abs(walk) <= span
    flat = cycle_of[inside] * (2 * span + 1) + walk[inside] + span
    table = np.bincount(flat, minlength=cycles * (2 * span + 1)).reshape(cycles, 2 * span + 1)
    return table[:, [s + span for s in states]]


def _check_cycles(cycles: int, test: str) -> None:
    if cycles < MIN_CYCLES:
        raise NotApplicable(f"{test}: only {cycles} cycles, need {MIN_CYCLES}")


def random_excursions(seq) -> list[float]:
    """P-values for states -4..-1, 1..4."""
    walk, cycles = random_walk(seq)
    _check_cycles(cycles, "RandomExcursions")
    visits = cycle_visits(walk, cycles)
    out = []
    for i, x in enumerate(EXCURSION_STATES):
        nu = np.bincount(np.minimum(visits[:, i], 5), minlength=6)
        out.append(chi_square_pvalue(nu, excursion_probabilities(x), 5))
    return out


def random_excursions_variant(seq) -> list[float]:
    """P-values for states -9..-1, 1..9."""
    walk, cycles = random_walk(seq)
    _check_cycles(cycles, "RandomExcursionsVariant")
    counts = np.bincount(walk[np.abs(walk) <= 9] + 9, minlength=19)
    out = []
    for x in VARIANT_STATES:
        xi = int(counts[x + 9])
        out.append(clip01(erfc(abs(xi - cycles) / math.sqrt(2.0 * cycles * (4.0 * abs(x) - 2.0)))))
    return out
