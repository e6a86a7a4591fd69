"""Runs all fifteen tests on one stream and labels every P-value."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..bitseq import as_bit_array
from .basic import block_frequency, cumulative_sums, frequency, longest_run, runs
from .common import NotApplicable
from .complexity import linear_complexity
from .config import SuiteConfig
from .entropy import approximate_entropy, serial, universal
from .excursions import (EXCURSION_STATES, VARIANT_STATES, random_excursions,
                         random_excursions_variant)
from .spectral import fft, rank
from .templates import aperiodic_templates, non_overlapping_template, overlapping_template, template_label

# report order
TEST_NAMES = (
    "Frequency",
    "BlockFrequency",
    "CumulativeSums",
    "Runs",
    "LongestRun",
    "Rank",
    "FFT",
    "NonOverlappingTemplate",
    "OverlappingTemplate",
    "Universal",
    "ApproximateEntropy",
    "RandomExcursions",
    "RandomExcursionsVariant",
    "Serial",
    "LinearComplexity",
)


@dataclass(frozen=True)
class StreamTestResult:
    test_name: str
    subtest_index: int
    subtest: str
    p_value: float | None
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.p_value is not None


def _state_label(x: int) -> str:
    return f"x={x:+d}"


def subtest_labels(test_name: str, cfg: SuiteConfig) -> tuple[str, ...]:
    if test_name == "CumulativeSums":
        return ("forward", "backward")
    if test_name == "Serial":
        return ("1", "2")
    if test_name == "NonOverlappingTemplate":
        m = cfg.nonoverlapping_m
        return tuple(template_label(t, m) for t in aperiodic_templates(m))
    if test_name == "RandomExcursions":
        return tuple(_state_label(x) for x in EXCURSION_STATES)
    if test_name == "RandomExcursionsVariant":
        return tuple(_state_label(x) for x in VARIANT_STATES)
    return ("",)


def _runner(test_name: str, cfg: SuiteConfig) -> Callable[[np.ndarray], object]:
    return {
        "Frequency": frequency,
        "BlockFrequency": lambda b: block_frequency(b, cfg.block_frequency_m),
        "CumulativeSums": cumulative_sums,
        "Runs": runs,
        "LongestRun": longest_run,
        "Rank": rank,
        "FFT": fft,
        "NonOverlappingTemplate": lambda b: non_overlapping_template(b, cfg.nonoverlapping_m),
        "OverlappingTemplate": lambda b: overlapping_template(b, cfg.overlapping_m),
        "Universal": universal,
        "ApproximateEntropy": lambda b: approximate_entropy(b, cfg.approx_entropy_m),
        "RandomExcursions": random_excursions,
        "RandomExcursionsVariant": random_excursions_variant,
        "Serial": lambda b: serial(b, cfg.serial_m),
        "LinearComplexity": lambda b: linear_complexity(b, cfg.linear_complexity_m),
    }[test_name]


def run_test(test_name: str, seq, cfg: SuiteConfig | None = None) -> list[StreamTestResult]:
    cfg = cfg or SuiteConfig()
    labels = subtest_labels(test_name, cfg)
    try:
        value = _runner(test_name, cfg)(as_bit_array(seq))
    except NotApplicable as exc:
        return [StreamTestResult(test_name, i, label, None, exc.reason)
                for i, label in enumerate(labels)]
    values = [value] if isinstance(value, float) else list(value)
    return [StreamTestResult(test_name, i, label, float(p))
            for i, (label, p) in enumerate(zip(labels, values, strict=True))]


def run_battery(seq, cfg: SuiteConfig | None = None, tests=TEST_NAMES) -> list[StreamTestResult]:
    """Every P-value of every requested test for one stream, in report order."""
    cfg = cfg or SuiteConfig()
    bits = as_bit_array(seq)
    results: list[StreamTestResult] = []
    for name in tests:
        results.extend(run_test(name, bits, cfg))
    return results
