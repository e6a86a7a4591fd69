"""Second-level verdicts over many streams, and the final report.

For every (test, subtest) row the per-stream P-values are reduced to a
proportion check (enough streams at or above ``alpha``) and a uniformity
check (chi-square of the P-value histogram). A row passes only if both do.
Failed figures carry a ``*`` in the text report.
"""

from __future__ import annotations

import json
import math
import re
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .specialfn import igamc
from .sts.battery import TEST_NAMES, StreamTestResult
from .sts.config import SuiteConfig

SCHEMA = "erbg.report"
SCHEMA_VERSION = 1

# tests whose subtests stay separate rows in the condensed view
_KEEP_ALL_SUBTESTS = ("CumulativeSums", "Serial")


@dataclass(frozen=True)
class TestSummary:
    test_name: str
    subtest_index: int
    subtest: str
    histogram: tuple[int, ...]
    uniformity_p: float | None
    proportion_passed: int
    sample_size: int
    min_pass: int
    proportion_ok: bool
    uniformity_ok: bool

    __test__ = False  # keep pytest from collecting this class

    @property
    def passed(self) -> bool:
        return self.proportion_ok and self.uniformity_ok

    @property
    def applicable(self) -> bool:
        return self.sample_size > 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["histogram"] = list(self.histogram)
        d["passed"] = self.passed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TestSummary":
        return cls(
            test_name=d["test_name"],
            subtest_index=int(d["subtest_index"]),
            subtest=d.get("subtest", ""),
            histogram=tuple(int(c) for c in d["histogram"]),
            uniformity_p=d["uniformity_p"],
            proportion_passed=int(d["proportion_passed"]),
            sample_size=int(d["sample_size"]),
            min_pass=int(d["min_pass"]),
            proportion_ok=bool(d["proportion_ok"]),
            uniformity_ok=bool(d["uniformity_ok"]),
        )


def stream_pass(p: float, alpha: float = 0.01, strict_band: bool = False) -> bool:
    """Per-stream verdict, ``p >= alpha``; ``strict_band`` also requires ``p <= 1 - alpha``."""
    if strict_band:
        return alpha <= p <= 1.0 - alpha
    return p >= alpha


def min_pass_count(sample_size: int, alpha: float = 0.01) -> int:
    """Fewest passing streams compatible with ``alpha`` at three sigma."""
    if sample_size < 1:
        raise ValueError("sample size must be positive")
    p_hat = 1.0 - alpha
    return math.floor(sample_size * (p_hat - 3.0 * math.sqrt(p_hat * alpha / sample_size)))


def pvalue_histogram(pvalues: Iterable[float], bins: int = 10) -> np.ndarray:
    p = np.asarray(list(pvalues), dtype=np.float64)
    index = np.minimum((p * bins).astype(np.int64), bins - 1)
    return np.bincount(index, minlength=bins)


def uniformity_pvalue(pvalues: Iterable[float], bins: int = 10) -> float:
    """Chi-square uniformity of P-values over ``bins`` equal bins of [0, 1]."""
    hist = pvalue_histogram(pvalues, bins)
    s = int(hist.sum())
    if s == 0:
        raise ValueError("uniformity needs at least one P-value")
    expected = s / bins
    chi2 = float(np.sum((hist - expected) ** 2 / expected))
    return igamc((bins - 1) / 2.0, chi2 / 2.0)


def summarize_row(test_name: str, subtest_index: int, subtest: str,
                  pvalues: list[float], cfg: SuiteConfig) -> TestSummary:
    s = len(pvalues)
    if s == 0:
        return TestSummary(test_name, subtest_index, subtest, (0,) * cfg.histogram_bins,
                           None, 0, 0, 0, False, False)
    hist = pvalue_histogram(pvalues, cfg.histogram_bins)
    uniformity = uniformity_pvalue(pvalues, cfg.histogram_bins)
    passed = sum(stream_pass(p, cfg.alpha, cfg.strict_band) for p in pvalues)
    need = min_pass_count(s, cfg.alpha)
    return TestSummary(
        test_name=test_name,
        subtest_index=subtest_index,
        subtest=subtest,
        histogram=tuple(int(c) for c in hist),
        uniformity_p=uniformity,
        proportion_passed=passed,
        sample_size=s,
        min_pass=need,
        proportion_ok=passed >= need,
        uniformity_ok=uniformity >= cfg.uniformity_alpha,
    )


def summarize(results: Iterable[StreamTestResult], cfg: SuiteConfig | None = None) -> list[TestSummary]:
    """One summary per (test, subtest) over all streams; inapplicable streams are left out."""
    cfg = cfg or SuiteConfig()
    groups: dict[tuple[str, int], list[float]] = defaultdict(list)
    labels: dict[tuple[str, int], str] = {}
    for r in results:
        key = (r.test_name, r.subtest_index)
        labels.setdefault(key, r.subtest)
        if r.applicable:
            groups[key].append(r.p_value)
        else:
            groups.setdefault(key, [])
    order = {name: i for i, name in enumerate(TEST_NAMES)}
    keys = sorted(labels, key=lambda k: (order.get(k[0], len(order)), k[0], k[1]))
    return [summarize_row(name, idx, labels[(name, idx)], groups[(name, idx)], cfg)
            for name, idx in keys]


def _severity(s: TestSummary):
    fraction = s.proportion_passed / s.sample_size if s.sample_size else -1.0
    return (s.passed, s.applicable, s.proportion_ok, s.uniformity_ok, fraction,
            -1.0 if s.uniformity_p is None else s.uniformity_p)


def worst(rows: Iterable[TestSummary]) -> TestSummary:
    return min(rows, key=_severity)


def condensed(summaries: list[TestSummary]) -> list[TestSummary]:
    """One row per test name (worst subtest); CumulativeSums and Serial keep both rows."""
    by_name: dict[str, list[TestSummary]] = defaultdict(list)
    for s in summaries:
        by_name[s.test_name].append(s)
    out = []
    for name in [n for n in TEST_NAMES if n in by_name] + [n for n in by_name if n not in TEST_NAMES]:
        rows = by_name[name]
        out.extend(rows if name in _KEEP_ALL_SUBTESTS else [worst(rows)])
    return out


def tests_passed(summaries: list[TestSummary]) -> tuple[int, int]:
    """(named tests with every subtest passing, named tests present)."""
    verdict: dict[str, bool] = {}
    for s in summaries:
        verdict[s.test_name] = verdict.get(s.test_name, True) and s.passed
    return sum(verdict.values()), len(verdict)


def overall_line(summaries: list[TestSummary]) -> str:
    passed, total = tests_passed(summaries)
    return f"{passed} out of {total} tests passed"


def format_pvalue(p: float | None, ok: bool) -> str:
    """Six decimals with trailing zeros stripped, ``*`` when failed; dashes if absent."""
    if p is None:
        return "----"
    text = f"{p:.6f}".rstrip("0").rstrip(".")
    return text + ("" if ok else "*")


def format_proportion(s: TestSummary) -> str:
    if not s.applicable:
        return "------"
    return f"{s.proportion_passed}/{s.sample_size}" + ("" if s.proportion_ok else "*")


RULE = "-" * 110


def _row(s: TestSummary) -> str:
    hist = "".join(f"{c:4d}" for c in s.histogram)
    return (f"{hist}  {format_pvalue(s.uniformity_p, s.uniformity_ok):<10} "
            f"{format_proportion(s):<11} {s.test_name:<25} {'YES' if s.passed else 'NO':<5} {s.subtest}").rstrip()


def _histogram_header(bins: int) -> str:
    return "".join(f"{'C' + str(i + 1):>4}" for i in range(bins))


def render_text(summaries: list[TestSummary], cfg: SuiteConfig | None = None,
                source: str = "", timestamp: str | None = None) -> str:
    cfg = cfg or SuiteConfig()
    bins = len(summaries[0].histogram) if summaries else cfg.histogram_bins
    header = f"{_histogram_header(bins)}  P-VALUE    PROPORTION  STATISTICAL TEST          PASS  SUBTEST"
    lines = [
        RULE,
        "RESULTS FOR THE UNIFORMITY OF P-VALUES AND THE PROPORTION OF PASSING SEQUENCES",
        RULE,
    ]
    if source:
        lines.append(f"   input: {source}")
    if timestamp:
        lines.append(f"   generated: {timestamp}")
    lines += [
        f"   streams: {cfg.num_streams} x {cfg.stream_length} bits, alpha = {cfg.alpha}, "
        f"uniformity alpha = {cfg.uniformity_alpha}"
        + (", per-stream band [alpha, 1 - alpha]" if cfg.strict_band else ""),
        "   note: every NonOverlappingTemplate template gets its own row; the one-row"
        " summaries report the worst template.",
        RULE,
        header,
        RULE,
    ]
    lines += [_row(s) for s in summaries]
    if not summaries:
        return "\n".join(lines) + "\n"
    lines.append(RULE)
    nonover = [s for s in summaries if s.test_name == "NonOverlappingTemplate"]
    if nonover:
        w = worst(nonover)
        lines.append(f"   worst NonOverlappingTemplate of {len(nonover)}: template {w.subtest}, "
                     f"P-VALUE {format_pvalue(w.uniformity_p, w.uniformity_ok)}, "
                     f"PROPORTION {format_proportion(w)}, PASS {'YES' if w.passed else 'NO'}")
        lines.append(RULE)
    lines += ["CONDENSED VIEW (one row per test)", RULE,
              "P-VALUE    PROPORTION  STATISTICAL TEST          PASS", RULE]
    for s in condensed(summaries):
        lines.append(f"{format_pvalue(s.uniformity_p, s.uniformity_ok):<10} {format_proportion(s):<11} "
                     f"{s.test_name:<25} {'YES' if s.passed else 'NO'}")
    lines += [RULE, overall_line(summaries), ""]
    return "\n".join(lines)


def render_structured(summaries: list[TestSummary], cfg: SuiteConfig | None = None) -> dict:
    cfg = cfg or SuiteConfig()
    passed, total = tests_passed(summaries)
    return {
        "schema": SCHEMA,
        "version": SCHEMA_VERSION,
        "config": cfg.as_dict(),
        "rows": [s.to_dict() for s in summaries],
        "condensed": [[s.test_name, s.subtest_index] for s in condensed(summaries)],
        "overall": {"tests_passed": passed, "tests_total": total,
                    "all_passed": bool(summaries) and passed == total},
    }


def render_report(summaries: list[TestSummary], format: str = "text",
                  cfg: SuiteConfig | None = None, **kwargs) -> str:
    """Text report, or the structured report serialized as JSON."""
    if format == "text":
        return render_text(summaries, cfg, **kwargs)
    if format in ("structured", "json"):
        return json.dumps(render_structured(summaries, cfg), indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def load_structured(text: str) -> tuple[list[TestSummary], SuiteConfig]:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError("not a structured battery report")
    if doc.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report version {doc.get('version')}")
    return [TestSummary.from_dict(r) for r in doc["rows"]], SuiteConfig.from_dict(doc["config"])


_ROW_RE = re.compile(
    r"^(?P<hist>(?:\s*\d+){2,})\s+(?P<p>\S+)\s+(?P<prop>\S+)\s+(?P<name>[A-Za-z]+)\s+(?P<verdict>YES|NO)"
    r"(?:\s+(?P<subtest>\S+))?$")


def parse_text_rows(text: str) -> list[dict]:
    """Verdict fields of every full-table row in a text report."""
    rows = []
    for line in text.splitlines():
        m = _ROW_RE.match(line)
        if not m:
            continue
        prop = m["prop"]
        if prop.startswith("-"):
            passed_count = sample = None
        else:
            passed_count, sample = (int(x) for x in prop.rstrip("*").split("/"))
        rows.append({
            "test_name": m["name"],
            "subtest": m["subtest"] or "",
            "uniformity_ok": not m["p"].endswith("*") and not m["p"].startswith("-"),
            "proportion_ok": not prop.endswith("*") and not prop.startswith("-"),
            "proportion_passed": passed_count,
            "sample_size": sample,
            "passed": m["verdict"] == "YES",
        })
    return rows


def _battery_job(args):
    from .sts.battery import run_battery
    bits, cfg = args
    return run_battery(bits, cfg)


def assess_streams(streams, cfg: SuiteConfig | None = None, workers: int = 1,
                   logger=None) -> list[TestSummary]:
    """Run the battery on every stream and summarize.

    With ``workers > 1`` streams are spread over processes; results are
    gathered in stream order, so the summaries do not depend on scheduling.
    """
    from .bitseq import as_bit_array
    from .sts.battery import run_battery

    cfg = cfg or SuiteConfig()
    arrays = [as_bit_array(s) for s in streams]
    results: list[StreamTestResult] = []
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_stream = pool.map(_battery_job, [(a, cfg) for a in arrays])
            for k, r in enumerate(per_stream):
                results.extend(r)
                if logger:
                    logger.info("stream %d/%d done", k + 1, len(arrays))
    else:
        for k, a in enumerate(arrays):
            results.extend(run_battery(a, cfg))
            if logger:
                logger.info("stream %d/%d done", k + 1, len(arrays))
    return summarize(results, cfg)
