"""Parity bit extraction from raw byte streams, plus a fifteen-test
statistical battery with second-level verdicts and reports."""

__version__ = "0.1.0"

from .bitseq import BitSequence, StreamSet, read_ascii, read_packed, split_streams, write_ascii
from .extract import ExtractionConfig, ExtractionStats, extract_bit, extract_stream, margin_check
from .sts import SuiteConfig, run_battery

__all__ = [
    "BitSequence",
    "ExtractionConfig",
    "ExtractionStats",
    "StreamSet",
    "SuiteConfig",
    "extract_bit",
    "extract_stream",
    "margin_check",
    "read_ascii",
    "read_packed",
    "run_battery",
    "split_streams",
    "write_ascii",
]
