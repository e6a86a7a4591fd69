"""Parity extraction over raw byte streams.

Every byte after the first ``threshold_count`` bytes contributes its parity
``|b| mod 2`` as one output bit. Bytes are unsigned here, so ``|b| = b``;
the absolute value only matters where a platform hands out signed bytes.
The first ``cut_bits`` emitted bits are dropped because capture start-up
produces a long constant prefix.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Literal, Protocol

import numpy as np

from .bitseq import BitOrder, BitSequence

log = logging.getLogger(__name__)

FLUSH_BITS = 4096
DEFAULT_CUT_BITS = 4000
MARGIN = 1.23


class ExtractionError(IOError):
    """Reading the source failed; output written so far stays on disk."""

    def __init__(self, message: str, bytes_read: int):
        super().__init__(f"{message} (after {bytes_read} bytes)")
        self.bytes_read = bytes_read


@dataclass(frozen=True)
class ExtractionConfig:
    threshold_count: int = 0
    cut_bits: int = DEFAULT_CUT_BITS
    output: Literal["ascii", "packed"] = "ascii"
    bit_order: BitOrder = "msb"

    def __post_init__(self):
        if self.threshold_count < 0 or self.cut_bits < 0:
            raise ValueError("threshold_count and cut_bits must be >= 0")
        if self.output not in ("ascii", "packed"):
            raise ValueError(f"unknown output format {self.output!r}")


@dataclass
class ExtractionStats:
    bytes_read: int = 0
    bits_emitted: int = 0
    ones: int = 0
    zeros: int = 0
    longest_run_ones: int = 0
    longest_run_zeros: int = 0
    # run still open at the end of the last chunk: (bit value, length)
    _open_run: tuple[int, int] = field(default=(0, 0), repr=False, compare=False)

    def update(self, bits: np.ndarray) -> None:
        if bits.size == 0:
            return
        n = int(bits.size)
        ones = int(bits.sum())
        self.bits_emitted += n
        self.ones += ones
        self.zeros += n - ones

        edges = np.flatnonzero(np.diff(bits)) + 1
        starts = np.concatenate(([0], edges))
        lengths = np.diff(np.concatenate((starts, [n])))
        values = bits[starts]
        value, length = self._open_run
        if length and values[0] == value:
            lengths[0] += length
        elif length:
            self._close_run(value, length)
        for v in (0, 1):
            closed = lengths[:-1][values[:-1] == v]
            if closed.size:
                self._close_run(v, int(closed.max()))
        self._open_run = (int(values[-1]), int(lengths[-1]))

    def _close_run(self, value: int, length: int) -> None:
        if value:
            self.longest_run_ones = max(self.longest_run_ones, length)
        else:
            self.longest_run_zeros = max(self.longest_run_zeros, length)

    def finish(self) -> "ExtractionStats":
        value, length = self._open_run
        if length:
            self._close_run(value, length)
        self._open_run = (0, 0)
        return self

    def as_dict(self) -> dict[str, int]:
        return {
            "bytes_read": self.bytes_read,
            "bits_emitted": self.bits_emitted,
            "ones": self.ones,
            "zeros": self.zeros,
            "longest_run_ones": self.longest_run_ones,
            "longest_run_zeros": self.longest_run_zeros,
        }


class BitSink(Protocol):
    def write(self, bits: np.ndarray) -> None: ...

    def close(self) -> None: ...


class AsciiSink:
    """Writes '0'/'1' characters and flushes after every write."""

    def __init__(self, fh: BinaryIO):
        self.fh = fh

    def write(self, bits: np.ndarray) -> None:
        self.fh.write((bits + ord("0")).astype(np.uint8).tobytes())
        self.fh.flush()

    def close(self) -> None:
        self.fh.flush()


class PackedSink:
    """Packs bits into bytes; a final partial byte is zero padded on close."""

    def __init__(self, fh: BinaryIO, bit_order: BitOrder = "msb"):
        self.fh = fh
        self.order = "big" if bit_order == "msb" else "little"
        self._pending = np.zeros(0, dtype=np.uint8)

    def write(self, bits: np.ndarray) -> None:
        bits = np.concatenate((self._pending, bits))
        whole = bits.size - bits.size % 8
        self.fh.write(np.packbits(bits[:whole], bitorder=self.order).tobytes())
        self.fh.flush()
        self._pending = bits[whole:]

    def close(self) -> None:
        if self._pending.size:
            self.fh.write(np.packbits(self._pending, bitorder=self.order).tobytes())
            self._pending = np.zeros(0, dtype=np.uint8)
        self.fh.flush()


class MemorySink:
    """Collects bits in memory; :meth:`sequence` returns them."""

    def __init__(self):
        self._chunks: list[np.ndarray] = []

    def write(self, bits: np.ndarray) -> None:
        self._chunks.append(bits.copy())

    def close(self) -> None:
        pass

    def sequence(self) -> BitSequence:
        if not self._chunks:
            return BitSequence()
        return BitSequence(np.concatenate(self._chunks))


def extract_bit(b: int) -> int:
    return abs(b) % 2


def _byte_chunks(source, chunk_size: int) -> Iterable[bytes]:
    if isinstance(source, (bytes, bytearray, memoryview)):
        data = memoryview(source)
        for i in range(0, len(data), chunk_size):
            yield bytes(data[i:i + chunk_size])
    elif hasattr(source, "read"):
        while True:
            chunk = source.read(chunk_size)
            if not chunk:
                return
            yield chunk
    else:
        yield from source


def extract_stream(source, cfg: ExtractionConfig, sink: BitSink,
                   chunk_size: int = FLUSH_BITS) -> ExtractionStats:
    """Run the extractor over ``source`` and feed the kept bits to ``sink``.

    ``source`` may be a bytes object, a binary file object, or an iterable
    of byte chunks. Bits reach the sink at most ``chunk_size`` at a time, so
    an interrupted run loses at most one chunk.
    """
    stats = ExtractionStats()
    skip_bytes = cfg.threshold_count
    skip_bits = cfg.cut_bits
    chunks = iter(_byte_chunks(source, chunk_size))
    try:
        while True:
            try:
                chunk = next(chunks)
            except StopIteration:
                break
            except OSError as exc:
                raise ExtractionError(f"source read failed: {exc}", stats.bytes_read) from exc
            raw = np.frombuffer(chunk, dtype=np.uint8)
            stats.bytes_read += raw.size
            if skip_bytes:
                dropped = min(skip_bytes, raw.size)
                raw = raw[dropped:]
                skip_bytes -= dropped
            bits = raw & 1
            if skip_bits:
                dropped = min(skip_bits, bits.size)
                bits = bits[dropped:]
                skip_bits -= dropped
            for start in range(0, bits.size, FLUSH_BITS):
                piece = bits[start:start + FLUSH_BITS]
                sink.write(piece)
                stats.update(piece)
    finally:
        sink.close()
    return stats.finish()


def margin_check(observed_zero_prefix: int) -> tuple[int, int]:
    """Cut length covering an observed constant prefix plus a 23 % margin.

    Returns ``(recommended, convenience)``: ``ceil(prefix * 1.23)`` and the
    same value rounded up to the next multiple of 500.
    """
    if observed_zero_prefix < 0:
        raise ValueError("observed prefix must be >= 0")
    recommended = -(-observed_zero_prefix * 123 // 100)
    convenience = 500 * math.ceil(recommended / 500)
    return recommended, convenience
