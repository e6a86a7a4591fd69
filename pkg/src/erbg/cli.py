"""Command line front end: ``erbg extract | generate | assess | report``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import fields
from datetime import datetime, timezone

from . import __version__
from .assess import (assess_streams, load_structured, render_report, render_text,
                     tests_passed)
from .bitseq import BitFormatError, InsufficientBitsError, read_ascii, read_packed, split_streams
from .extract import AsciiSink, ExtractionConfig, ExtractionError, PackedSink, extract_stream
from .sources import KINDS, SourceSpec
from .sts.config import SuiteConfig

log = logging.getLogger("erbg")

EXIT_OK = 0
EXIT_FAILED_TESTS = 1
EXIT_ERROR = 2


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def build_manifest(argv: list[str], config: dict, inputs: dict[str, str], **extra) -> dict:
    """Everything needed to rerun a command; only ``timestamp`` varies between runs."""
    return {
        "tool": "erbg",
        "version": __version__,
        "command": argv,
        "config": config,
        "input_sha256": inputs,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        **extra,
    }


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_extract(args, argv) -> int:
    cfg = ExtractionConfig(threshold_count=args.threshold_bytes, cut_bits=args.cut_bits,
                           output=args.format, bit_order=args.bit_order)
    try:
        src = open(args.input, "rb")
    except OSError as exc:
        print(f"erbg extract: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_ERROR
    with src, open(args.output, "wb") as out:
        sink = AsciiSink(out) if cfg.output == "ascii" else PackedSink(out, cfg.bit_order)
        try:
            stats = extract_stream(src, cfg, sink)
        except ExtractionError as exc:
            print(f"erbg extract: {exc}", file=sys.stderr)
            return EXIT_ERROR
    if stats.bits_emitted == 0:
        os.remove(args.output)
        print(f"erbg extract: no bits left after skipping {cfg.threshold_count} bytes "
              f"and cutting {cfg.cut_bits} bits from {stats.bytes_read} bytes", file=sys.stderr)
        return EXIT_ERROR
    for key, value in stats.as_dict().items():
        print(f"{key}={value}")
    manifest = build_manifest(argv, {f.name: getattr(cfg, f.name) for f in fields(cfg)},
                              {args.input: sha256_file(args.input)}, stats=stats.as_dict())
    _write_json(args.manifest or args.output + ".manifest.json", manifest)
    return EXIT_OK


def cmd_generate(args, argv) -> int:
    spec = SourceSpec(args.kind, args.seed, args.length)
    with open(args.output, "wb") as out:
        for chunk in spec.chunks():
            out.write(chunk)
    if args.manifest:
        _write_json(args.manifest, build_manifest(
            argv, {"kind": spec.kind, "seed": spec.seed, "length": spec.length}, {},
            output_sha256=sha256_file(args.output)))
    return EXIT_OK


def suite_config_from_args(args) -> SuiteConfig:
    return SuiteConfig(
        stream_length=args.stream_length,
        num_streams=args.streams,
        block_frequency_m=args.block_frequency_m,
        nonoverlapping_m=args.nonoverlapping_m,
        overlapping_m=args.overlapping_m,
        approx_entropy_m=args.approx_entropy_m,
        serial_m=args.serial_m,
        linear_complexity_m=args.linear_complexity_m,
        alpha=args.alpha,
        uniformity_alpha=args.uniformity_alpha,
        histogram_bins=args.histogram_bins,
        strict_band=args.strict_band,
    )


def cmd_assess(args, argv) -> int:
    cfg = suite_config_from_args(args)
    try:
        if args.input_format == "ascii":
            seq = read_ascii(args.input)
        else:
            seq = read_packed(args.input, args.bit_order)
        streams = split_streams(seq, cfg.stream_length, cfg.num_streams)
    except InsufficientBitsError as exc:
        print(f"erbg assess: {args.input}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, BitFormatError) as exc:
        print(f"erbg assess: {exc}", file=sys.stderr)
        return EXIT_ERROR

    summaries = assess_streams(streams, cfg, workers=args.workers, logger=log)
    manifest = build_manifest(argv, cfg.as_dict(), {args.input: sha256_file(args.input)},
                              input_format=args.input_format, bit_order=args.bit_order)
    text = render_text(summaries, cfg, source=args.input, timestamp=manifest["timestamp"])

    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "finalAnalysisReport.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    with open(os.path.join(args.out_dir, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(render_report(summaries, "structured", cfg))
    _write_json(os.path.join(args.out_dir, "manifest.json"), manifest)
    if not args.quiet:
        sys.stdout.write(text)

    passed, total = tests_passed(summaries)
    if args.always_zero or (total and passed == total):
        return EXIT_OK
    return EXIT_FAILED_TESTS


def cmd_report(args, argv) -> int:
    with open(args.structured, encoding="utf-8") as fh:
        summaries, cfg = load_structured(fh.read())
    sys.stdout.write(render_text(summaries, cfg, source=args.structured))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="erbg", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log one line per stream")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="parity-extract bits from a raw byte file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--threshold-bytes", type=int, default=0, help="leading bytes to skip (tc)")
    p.add_argument("--cut-bits", type=int, default=4000, help="leading extracted bits to discard")
    p.add_argument("--format", choices=("ascii", "packed"), default="ascii")
    p.add_argument("--bit-order", choices=("msb", "lsb"), default="msb")
    p.add_argument("--manifest", help="manifest path (default: OUTPUT.manifest.json)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("generate", help="write a deterministic byte stream")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--length", type=int, required=True, help="bytes to write")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_generate)

    d = SuiteConfig()
    p = sub.add_parser("assess", help="run the battery over consecutive streams of a bit file")
    p.add_argument("input")
    p.add_argument("--input-format", choices=("ascii", "packed"), default="ascii")
    p.add_argument("--bit-order", choices=("msb", "lsb"), default="msb")
    p.add_argument("--stream-length", type=int, default=d.stream_length)
    p.add_argument("--streams", type=int, default=d.num_streams)
    p.add_argument("--block-frequency-m", type=int, default=d.block_frequency_m)
    p.add_argument("--nonoverlapping-m", type=int, default=d.nonoverlapping_m)
    p.add_argument("--overlapping-m", type=int, default=d.overlapping_m)
    p.add_argument("--approx-entropy-m", type=int, default=d.approx_entropy_m)
    p.add_argument("--serial-m", type=int, default=d.serial_m)
    p.add_argument("--linear-complexity-m", type=int, default=d.linear_complexity_m)
    p.add_argument("--alpha", type=float, default=d.alpha)
    p.add_argument("--uniformity-alpha", type=float, default=d.uniformity_alpha)
    p.add_argument("--histogram-bins", type=int, default=d.histogram_bins)
    p.add_argument("--strict-band", action="store_true",
                   help="per-stream pass needs alpha <= P <= 1 - alpha")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default="erbg-report")
    p.add_argument("--always-zero", action="store_true", help="exit 0 even if tests fail")
    p.add_argument("-q", "--quiet", action="store_true", help="do not print the text report")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("report", help="render a structured report as text")
    p.add_argument("structured")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args, ["erbg", *argv])
    except (ValueError, OSError) as exc:
        print(f"erbg {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
