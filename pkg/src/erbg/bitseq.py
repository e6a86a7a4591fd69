"""Bit sequences and the two on-disk formats the battery reads.

A :class:`BitSequence` stores its bits packed eight to a byte (MSB first)
together with an explicit length, so pad bits in the last byte are never
visible. Documentation elsewhere uses 1-based ``ε_i`` notation; in Python
``seq[i - 1]`` is ``ε_i``.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

log = logging.getLogger(__name__)

BitOrder = Literal["msb", "lsb"]

_ASCII_ZERO = ord("0")
_ASCII_ONE = ord("1")
_WHITESPACE = np.array([ord(c) for c in " \t\r\n"], dtype=np.uint8)


class BitFormatError(ValueError):
    """Input bytes are not a valid bitstream."""


class EmptySequenceError(BitFormatError):
    """Input holds no bits at all."""


class InsufficientBitsError(ValueError):
    def __init__(self, required: int, available: int):
        super().__init__(f"need {required} bits, only {available} available "
                         f"(short by {required - available})")
        self.required = required
        self.available = available


class BitSequence:
    """Immutable binary sequence with an exact length."""

    __slots__ = ("_packed", "_n")

    def __init__(self, bits: Iterable[int] | str | np.ndarray = ()):
        if isinstance(bits, str):
            arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - _ASCII_ZERO
        elif isinstance(bits, np.ndarray):
            arr = bits.ravel()
        else:
            arr = np.fromiter(bits, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() > 1):
            raise BitFormatError("bits must be 0 or 1")
        self._n = int(arr.size)
        packed = np.packbits(arr.astype(np.uint8))
        packed.flags.writeable = False
        self._packed = packed

    @classmethod
    def from_packed(cls, data: bytes | np.ndarray, n: int | None = None,
                    bit_order: BitOrder = "msb") -> "BitSequence":
        """Build from raw bytes; ``n`` truncates to the first ``n`` bits."""
        raw = np.frombuffer(bytes(data), dtype=np.uint8) if not isinstance(data, np.ndarray) \
            else data.astype(np.uint8, copy=False)
        if n is None:
            n = raw.size * 8
        if n > raw.size * 8:
            raise InsufficientBitsError(n, raw.size * 8)
        order = "big" if bit_order == "msb" else "little"
        return cls(np.unpackbits(raw, count=n, bitorder=order))

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, index):
        if isinstance(index, slice):
            return BitSequence(self.to_array()[index])
        if index < 0:
            index += self._n
        if not 0 <= index < self._n:
            raise IndexError("bit index out of range")
        return int((self._packed[index >> 3] >> (7 - (index & 7))) & 1)

    def __iter__(self):
        return iter(self.to_array().tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitSequence):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._packed, other._packed)

    def __hash__(self) -> int:
        return hash((self._n, self._packed.tobytes()))

    def __repr__(self) -> str:
        if self._n <= 64:
            return f"BitSequence('{self.to_string()}')"
        return f"BitSequence(<{self._n} bits>)"

    def to_array(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Unpacked ``uint8`` array of 0/1 values for bits ``[start, stop)``."""
        stop = self._n if stop is None else min(stop, self._n)
        if start >= stop:
            return np.zeros(0, dtype=np.uint8)
        first, last = start >> 3, (stop + 7) >> 3
        bits = np.unpackbits(self._packed[first:last])
        offset = start - (first << 3)
        return bits[offset:offset + stop - start]

    def to_string(self) -> str:
        return (self.to_array() + _ASCII_ZERO).tobytes().decode("ascii")

    def to_bytes(self, bit_order: BitOrder = "msb") -> bytes:
        """Packed bytes; the final partial byte is zero padded."""
        if bit_order == "msb":
            return self._packed.tobytes()
        return np.packbits(self.to_array(), bitorder="little").tobytes()

    def ones(self) -> int:
        return int(np.unpackbits(self._packed).sum())


@dataclass(frozen=True)
class StreamSet:
    streams: tuple[BitSequence, ...]
    stream_length: int

    def __post_init__(self):
        if not self.streams:
            raise ValueError("a stream set needs at least one stream")
        for s in self.streams:
            if len(s) != self.stream_length:
                raise ValueError("all streams must have stream_length bits")

    @property
    def count(self) -> int:
        return len(self.streams)

    def __iter__(self):
        return iter(self.streams)

    def __len__(self) -> int:
        return len(self.streams)


def parse_ascii(data: bytes) -> BitSequence:
    raw = np.frombuffer(data, dtype=np.uint8)
    digit = (raw == _ASCII_ZERO) | (raw == _ASCII_ONE)
    bad = ~(digit | np.isin(raw, _WHITESPACE))
    if bad.any():
        offset = int(np.flatnonzero(bad)[0])
        raise BitFormatError(f"invalid character {bytes([raw[offset]])!r} at byte offset {offset}")
    bits = raw[digit] - _ASCII_ZERO
    if bits.size == 0:
        raise EmptySequenceError("input contains no bits")
    return BitSequence(bits)


def read_ascii(path: str | os.PathLike) -> BitSequence:
    """Read '0'/'1' characters; spaces, tabs and line breaks are skipped."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return parse_ascii(data)
    except BitFormatError as exc:
        raise type(exc)(f"{os.fspath(path)}: {exc}") from None


def write_ascii(seq: BitSequence, path: str | os.PathLike, newline: bool = False,
                allow_empty: bool = True) -> None:
    if len(seq) == 0 and not allow_empty:
        raise EmptySequenceError("refusing to write an empty sequence")
    try:
        with open(path, "wb") as fh:
            fh.write((seq.to_array() + _ASCII_ZERO).tobytes())
            if newline:
                fh.write(b"\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {os.fspath(path)}: {exc.strerror}") from exc


def read_packed(path: str | os.PathLike, bit_order: BitOrder = "msb") -> BitSequence:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data:
        raise EmptySequenceError(f"{os.fspath(path)}: empty file")
    return BitSequence.from_packed(data, bit_order=bit_order)


def write_packed(seq: BitSequence, path: str | os.PathLike, bit_order: BitOrder = "msb") -> None:
    with open(path, "wb") as fh:
        fh.write(seq.to_bytes(bit_order))


def split_streams(seq: BitSequence, stream_length: int, num_streams: int) -> StreamSet:
    """Cut ``num_streams`` consecutive disjoint streams from the front of ``seq``."""
    if stream_length < 1 or num_streams < 1:
        raise ValueError("stream_length and num_streams must be positive")
    required = stream_length * num_streams
    if len(seq) < required:
        raise InsufficientBitsError(required, len(seq))
    tail = len(seq) - required
    if tail:
        log.info("ignoring %d trailing bits beyond %d x %d", tail, num_streams, stream_length)
    streams = tuple(BitSequence(seq.to_array(k * stream_length, (k + 1) * stream_length))
                    for k in range(num_streams))
    return StreamSet(streams, stream_length)


def as_bit_array(seq: BitSequence | Sequence[int] | np.ndarray | str) -> np.ndarray:
    """Unpacked uint8 view of anything bit-like; the test functions accept all of these."""
    if isinstance(seq, BitSequence):
        return seq.to_array()
    if isinstance(seq, str):
        return BitSequence(seq).to_array()
    arr = np.asarray(seq)
    if arr.dtype != np.uint8:
        arr = arr.astype(np.uint8)
    return arr
