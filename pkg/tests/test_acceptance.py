"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line to the terminal
(bypassing output capture) before asserting. Run directly with
``python3 tests/test_acceptance.py`` or as part of ``pytest``.
"""

import json
import math
import sys

import numpy as np
import pytest
from scipy import special

from erbg import sts
from erbg.assess import condensed, format_pvalue, min_pass_count, render_text, summarize
from erbg.bitseq import BitSequence, read_ascii, split_streams
from erbg.cli import main
from erbg.extract import ExtractionConfig, MemorySink, extract_stream
from erbg.sources import SourceSpec, reference_mixer
from erbg.specialfn import berlekamp_massey, dft_magnitudes, gf2_rank
from erbg.sts.config import SuiteConfig
from erbg.sts.excursions import EXCURSION_STATES, excursion_probabilities
from erbg.sts.templates import aperiodic_templates

from conftest import bits_of, brute_force_linear_complexity, direct_dft_magnitudes, span_size

FULL_STREAMS, FULL_LENGTH = 100, 10 ** 6


@pytest.fixture
def announce(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")
    return emit


def full_scale_summaries(kind: str, seed: int):
    """generate -> extract with defaults -> 100 streams of 10^6 bits -> summaries."""
    cfg = SuiteConfig()
    sink = MemorySink()
    length = FULL_STREAMS * FULL_LENGTH + ExtractionConfig().cut_bits
    extract_stream(SourceSpec(kind, seed, length).chunks(), ExtractionConfig(), sink)
    streams = split_streams(sink.sequence(), FULL_LENGTH, FULL_STREAMS)
    results = []
    for s in streams:
        results.extend(sts.run_battery(s, cfg))
    return summarize(results, cfg), cfg


# 1 -------------------------------------------------------------------------

def test_criterion_1_known_answers(announce):
    erfc = special.erfc
    cases = []
    # Frequency: S_n = 2
    cases.append(("Frequency", sts.frequency("1011010101"), erfc(2 / math.sqrt(20)), 0.527089))
    # BlockFrequency: chi2 = 1 over 3 blocks
    cases.append(("BlockFrequency", sts.block_frequency("0110011010", 3),
                  special.gammaincc(1.5, 0.5), 0.801252))
    # Runs: V = 7, pi = 0.6
    cases.append(("Runs", sts.runs("1001101011"),
                  erfc(abs(7 - 12 * 0.4) / (2 * math.sqrt(20) * 0.24)), 0.147232))
    # Serial: brute-force circular pattern counts
    text, n = "0011011101", 10
    ext = text + text[:2]

    def psi(m):
        if m == 0:
            return 0.0
        counts = {}
        for i in range(n):
            counts[ext[i:i + m]] = counts.get(ext[i:i + m], 0) + 1
        return 2 ** m / n * sum(c * c for c in counts.values()) - n

    d1, d2 = psi(3) - psi(2), psi(3) - 2 * psi(2) + psi(1)
    p1, p2 = sts.serial(text, 3)
    cases.append(("Serial 1", p1, special.gammaincc(2, d1 / 2), 0.808792))
    cases.append(("Serial 2", p2, special.gammaincc(1, d2 / 2), 0.670320))

    bad = [name for name, ours, oracle, printed in cases
           if abs(ours - oracle) > 1e-6 or abs(oracle - printed) > 1e-6]
    block = bits_of("1101011110001")
    L, L_oracle = berlekamp_massey(block), brute_force_linear_complexity(block.tolist(), 6)
    if not L == L_oracle == 4:
        bad.append("BerlekampMassey")
    ok = not bad
    announce(1, ok, "known answers match oracles within 1e-6" if ok else f"mismatch: {bad}")
    assert ok


# 2 -------------------------------------------------------------------------

def test_criterion_2_verdict_arithmetic(announce):
    got = (min_pass_count(100, 0.01), min_pass_count(62, 0.01))
    ok = got == (96, 59)
    announce(2, ok, f"min_pass_count(100)={got[0]}, min_pass_count(62)={got[1]}")
    assert ok


# 3 -------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_3_calibration_run(announce):
    summaries, cfg = full_scale_summaries("reference-mixer", 1)
    text = render_text(summaries, cfg)
    failing = [f"{s.test_name}[{s.subtest}] {s.proportion_passed}/{s.sample_size} "
               f"uniformity={s.uniformity_p:.3g}" for s in summaries if not s.passed]
    ok = "15 out of 15 tests passed" in text and not failing
    overall = text.strip().splitlines()[-1]
    announce(3, ok, overall + ("" if ok else f"; failing rows: {failing}"))
    assert ok


# 4 -------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_4_failure_signature(announce):
    summaries, cfg = full_scale_summaries("smlt-sim", 1)
    rows = {(s.test_name, s.subtest): s for s in summaries}
    targets = [rows[("Frequency", "")], rows[("CumulativeSums", "forward")],
               rows[("CumulativeSums", "backward")]]
    rendered = [format_pvalue(s.uniformity_p, s.uniformity_ok) for s in targets]
    signature = all(s.uniformity_p < 0.0001 and not s.passed for s in targets)
    text = render_text(summaries, cfg)
    verdict_no = "15 out of 15" not in text and not all(s.passed for s in summaries)
    ok = signature and rendered == ["0*"] * 3 and verdict_no
    announce(4, ok, f"Frequency/CuSum forward/backward render {rendered}; {text.strip().splitlines()[-1]}")
    assert ok


# 5 -------------------------------------------------------------------------

def _desk_pipeline(tmp_path, kind: str):
    raw, bits, out = tmp_path / f"{kind}.bin", tmp_path / f"{kind}.txt", tmp_path / kind
    main(["generate", kind, str(raw), "--length", str(10 ** 6 + 4000)])
    main(["extract", str(raw), str(bits)])
    code = main(["assess", str(bits), "--streams", "10", "--stream-length", "100000",
                 "--out-dir", str(out), "-q"])
    doc = json.loads((out / "report.json").read_text())
    return code, {r["test_name"]: r for r in doc["rows"]}, bits


def test_criterion_5_degenerate_anchors(announce, tmp_path):
    code_z, rows_z, bits_z = _desk_pipeline(tmp_path, "all-zero")
    stream_p = sts.frequency(read_ascii(bits_z)[:100_000])
    zero_fails = (code_z == 1 and not rows_z["Frequency"]["passed"]
                  and rows_z["Frequency"]["proportion_passed"] == 0 and stream_p < 1e-10)
    code_a, rows_a, _ = _desk_pipeline(tmp_path, "alternating")
    alt_fails = code_a == 1 and not rows_a["Runs"]["passed"] and rows_a["Runs"]["proportion_passed"] == 0
    ok = zero_fails and alt_fails
    announce(5, ok, f"all-zero Frequency per-stream P={stream_p:.3g}, row passed="
                    f"{rows_z['Frequency']['passed']}; alternating Runs row passed={rows_a['Runs']['passed']}")
    assert ok


# 6 -------------------------------------------------------------------------

def _excursion_bits(rng, cycles: int) -> np.ndarray:
    """Concatenated excursions of height 1..6 on either side; ``cycles`` zero returns."""
    heights = rng.integers(1, 7, cycles)
    up = rng.integers(0, 2, cycles)
    values = np.stack((up, 1 - up), axis=1).ravel()
    return np.repeat(values, np.repeat(heights, 2)).astype(np.uint8)


def _small_input(rng) -> np.ndarray:
    n = int(rng.integers(1032, 2200))
    kind = rng.integers(0, 10)
    if kind == 0:
        return np.full(n, rng.integers(0, 2), dtype=np.uint8)
    p = 0.5 if kind > 2 else float(rng.uniform(0.02, 0.98))
    return (rng.random(n) < p).astype(np.uint8)


SMALL_RUNNERS = {
    "Frequency": sts.frequency,
    "BlockFrequency": lambda b: sts.block_frequency(b, 128),
    "CumulativeSums": sts.cumulative_sums,
    "Runs": sts.runs,
    "LongestRun": sts.longest_run,
    "Rank": sts.rank,
    "FFT": sts.fft,
    "NonOverlappingTemplate": sts.non_overlapping_template,
    "OverlappingTemplate": sts.overlapping_template,
    "Universal": lambda b: sts.universal(b, 4, 160),
    "ApproximateEntropy": lambda b: sts.approximate_entropy(b, 4),
    "RandomExcursions": sts.random_excursions,
    "RandomExcursionsVariant": sts.random_excursions_variant,
    "Serial": lambda b: sts.serial(b, 5),
    "LinearComplexity": lambda b: sts.linear_complexity(b, 100),
}


def _pvalue_range_violations(rng, per_test: int) -> list[str]:
    bad = []
    for name, fn in SMALL_RUNNERS.items():
        for _ in range(per_test):
            if name.startswith("RandomExcursions"):
                bits = _excursion_bits(rng, int(rng.integers(500, 700)))
            else:
                bits = _small_input(rng)
            ps = np.atleast_1d(np.asarray(fn(bits), dtype=np.float64))
            if not np.all((ps >= 0.0) & (ps <= 1.0)):
                bad.append(name)
                break
    return bad


def test_criterion_6_property_suites(announce, rng):
    failures = []
    failures += [f"range:{n}" for n in _pvalue_range_violations(rng, 10_000)]

    for _ in range(300):
        a = _small_input(rng)
        shift = int(rng.integers(0, a.size))
        if not (math.isclose(sts.frequency(a), sts.frequency(1 - a), rel_tol=1e-12, abs_tol=1e-300)
                and math.isclose(sts.runs(a), sts.runs(1 - a), rel_tol=1e-12, abs_tol=1e-300)):
            failures.append("complement")
            break
        rolled = np.roll(a, shift)
        if not (np.allclose(sts.serial(rolled, 5), sts.serial(a, 5), rtol=1e-9, atol=1e-12)
                and math.isclose(sts.approximate_entropy(rolled, 4), sts.approximate_entropy(a, 4),
                                 rel_tol=1e-9, abs_tol=1e-12)):
            failures.append("rotation")
            break
        if sts.cumulative_sums(a[::-1])[0] != sts.cumulative_sums(a)[1]:
            failures.append("cusum symmetry")
            break

    for x in EXCURSION_STATES:
        if abs(sum(excursion_probabilities(x)) - 1.0) > 1e-9:
            failures.append(f"pi normalization x={x}")

    for n in (2, 10, 64, 333, 1000, 1024):
        bits = rng.integers(0, 2, n)
        ours, oracle = dft_magnitudes(bits), direct_dft_magnitudes(bits)
        scale = np.maximum(np.abs(oracle), 1e-6 * math.sqrt(n))
        if not np.all(np.abs(ours - oracle) <= 1e-6 * scale):
            failures.append(f"dft n={n}")

    for _ in range(200):
        m = rng.integers(0, 2, (6, 6))
        if 2 ** gf2_rank(m) != span_size(m.tolist()):
            failures.append("gf2 rank")
            break

    brute = [v for v in range(512)
             if all(format(v, "09b")[:9 - k] != format(v, "09b")[k:] for k in range(1, 9))]
    if not (len(brute) == 148 and list(aperiodic_templates(9)) == brute):
        failures.append("template table")

    ok = not failures
    announce(6, ok, "all property suites hold" if ok else f"violations: {failures}")
    assert ok


# 7 -------------------------------------------------------------------------

def test_criterion_7_extraction_contract(announce, tmp_path):
    raw, out = tmp_path / "raw.bin", tmp_path / "bits.txt"
    data = reference_mixer(77, 10 ** 6)
    raw.write_bytes(data)
    main(["extract", str(raw), str(out)])
    bits = np.frombuffer(out.read_bytes(), dtype=np.uint8) - ord("0")
    expected = np.frombuffer(data, dtype=np.uint8)[4000:] & 1
    ok = bits.size == 10 ** 6 - 4000 and np.array_equal(bits, expected)
    announce(7, ok, f"bits_emitted={bits.size}, output bit i == parity of byte 4000+i: "
                    f"{np.array_equal(bits, expected) if bits.size == expected.size else False}")
    assert ok


# 8 -------------------------------------------------------------------------

ITEMIZED_ROWS = {"Frequency": 1, "BlockFrequency": 1, "CumulativeSums": 2, "Runs": 1,
                 "LongestRun": 1, "Rank": 1, "FFT": 1, "NonOverlappingTemplate": 148,
                 "OverlappingTemplate": 1, "Universal": 1, "ApproximateEntropy": 1,
                 "RandomExcursions": 8, "RandomExcursionsVariant": 18, "Serial": 2,
                 "LinearComplexity": 1}
STATED_ROW_TOTAL = 187


@pytest.fixture(scope="module")
def default_report():
    stream = BitSequence(np.random.default_rng(8).integers(0, 2, FULL_LENGTH))
    cfg = SuiteConfig(num_streams=1)
    summaries = summarize(sts.run_battery(stream, cfg), cfg)
    return summaries, render_text(summaries, cfg)


def test_criterion_8_report_shape(announce, default_report):
    summaries, text = default_report
    per_test = {name: sum(s.test_name == name for s in summaries) for name in ITEMIZED_ROWS}
    view = condensed(summaries)
    names = [s.test_name for s in view]
    shape_ok = (per_test == ITEMIZED_ROWS and len(view) == 17
                and names.count("CumulativeSums") == 2 and names.count("Serial") == 2
                and "worst NonOverlappingTemplate" in text)
    ok = shape_ok and len(summaries) == STATED_ROW_TOTAL
    announce(8, ok, f"{len(summaries)} subtest rows (stated total {STATED_ROW_TOTAL}; itemized "
                    f"counts sum to {sum(ITEMIZED_ROWS.values())}), condensed view {len(view)} rows, "
                    f"per-test structure {'matches' if per_test == ITEMIZED_ROWS else 'differs'}")
    assert ok


def test_report_shape_itemized(default_report):
    """The per-test row structure and condensed view, independent of the stated total."""
    summaries, text = default_report
    assert {name: sum(s.test_name == name for s in summaries) for name in ITEMIZED_ROWS} == ITEMIZED_ROWS
    assert len(summaries) == sum(ITEMIZED_ROWS.values()) == 188
    view = condensed(summaries)
    assert len(view) == 17 and len({s.test_name for s in view}) == 15
    assert "worst NonOverlappingTemplate of 148" in text


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", *sys.argv[1:]]))
