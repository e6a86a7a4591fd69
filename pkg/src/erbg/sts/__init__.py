"""The fifteen-test statistical battery.

Each test takes a bit sequence (a :class:`~erbg.bitseq.BitSequence`, a 0/1
array or a '0'/'1' string) and returns its P-value(s). Inputs a test cannot
handle raise :class:`NotApplicable`.
"""

from .basic import block_frequency, cumulative_sums, frequency, longest_run, runs
from .battery import TEST_NAMES, StreamTestResult, run_battery, run_test, subtest_labels
from .common import NotApplicable
from .complexity import linear_complexity
from .config import SuiteConfig
from .entropy import approximate_entropy, serial, universal
from .excursions import random_excursions, random_excursions_variant
from .spectral import fft, rank
from .templates import aperiodic_templates, non_overlapping_template, overlapping_template

__all__ = [
    "NotApplicable",
    "StreamTestResult",
    "SuiteConfig",
    "TEST_NAMES",
    "aperiodic_templates",
    "approximate_entropy",
    "block_frequency",
    "cumulative_sums",
    "fft",
    "frequency",
    "linear_complexity",
    "longest_run",
    "non_overlapping_template",
    "overlapping_template",
    "random_excursions",
    "random_excursions_variant",
    "rank",
    "run_battery",
    "run_test",
    "runs",
    "serial",
    "subtest_labels",
    "universal",
]
