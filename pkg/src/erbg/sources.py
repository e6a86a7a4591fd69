"""Deterministic byte sources for calibration and capture simulation.

Every source is a pure function of ``(seed, length)``. Generators yield the
stream in chunks so that 10^8-byte runs never hold the whole stream twice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
MASK64 = (1 << 64) - 1

CHUNK_BYTES = 1 << 20

SMLT_STEP_MASK = 63  # one step per 64 bytes on average
SMLT_START = 128
FFCS_PERIOD = 100_000

SourceKind = Literal["reference-mixer", "all-zero", "alternating", "ffcs-sim", "smlt-sim"]
KINDS: tuple[str, ...] = ("reference-mixer", "all-zero", "alternating", "ffcs-sim", "smlt-sim")


def splitmix64(state: int) -> tuple[int, int]:
    """One scalar SplitMix64 step: returns ``(output, new_state)``."""
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31), state


def _mixer_words(seed: int, first: int, count: int) -> np.ndarray:
    # state after k+1 steps is seed + (k+1)*gamma, so any word can be reached directly
    k = np.arange(first + 1, first + 1 + count, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + k * np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def iter_reference_mixer(seed: int, length: int, chunk: int = CHUNK_BYTES) -> Iterator[bytes]:
    chunk -= chunk % 8
    for start in range(0, length, chunk):
        size = min(chunk, length - start)
        words = _mixer_words(seed, start // 8, (size + 7) // 8)
        yield words.astype("<u8").tobytes()[:size]


def reference_mixer(seed: int, length: int) -> bytes:
    """SplitMix64 output, eight little-endian bytes per step."""
    return b"".join(iter_reference_mixer(seed, length))


def iter_all_zero(seed: int, length: int, chunk: int = CHUNK_BYTES) -> Iterator[bytes]:
    for start in range(0, length, chunk):
        yield bytes(min(chunk, length - start))


def iter_alternating(seed: int, length: int, chunk: int = CHUNK_BYTES) -> Iterator[bytes]:
    chunk -= chunk % 2
    pattern = b"\x00\x01" * (chunk // 2)
    for start in range(0, length, chunk):
        yield pattern[: min(chunk, length - start)]


def iter_smlt_sim(seed: int, length: int, chunk: int = CHUNK_BYTES) -> Iterator[bytes]:
    """Static scene: a byte level that drifts by ±1 on roughly 1 in 64 bytes.

    The level is clamped to [0, 255] after every step. Each step flips the
    parity of the byte, so the extracted bits come out as long constant runs.
    """
    level = SMLT_START
    for raw in iter_reference_mixer(seed, length, chunk):
        r = np.frombuffer(raw, dtype=np.uint8)
        moves = np.flatnonzero((r & SMLT_STEP_MASK) == 0)
        signs = np.where(r[moves] & 64, 1, -1).tolist()
        levels = list(itertools.accumulate(
            signs, lambda a, s: min(255, max(0, a + s)), initial=level))
        # level in effect at byte t is the one set by the last move at or before t
        seg = np.searchsorted(moves, np.arange(r.size), side="right")
        out = np.asarray(levels, dtype=np.uint8)[seg]
        level = levels[-1]
        yield out.tobytes()


def ffcs_envelope(t: np.ndarray) -> np.ndarray:
    """Motion envelope in [0, 1]; its troughs are the calm spells between spins."""
    return 0.5 * (1.0 + np.sin(2.0 * np.pi * t / FFCS_PERIOD))


def iter_ffcs_sim(seed: int, length: int, chunk: int = CHUNK_BYTES) -> Iterator[bytes]:
    """Fast-moving scene: mixer bytes whose magnitude follows a slow envelope.

    Only the upper seven bits are scaled; the low bit of every mixer byte is
    kept as is.
    """
    offset = 0
    for raw in iter_reference_mixer(seed, length, chunk):
        r = np.frombuffer(raw, dtype=np.uint8)
        env = ffcs_envelope(np.arange(offset, offset + r.size, dtype=np.float64))
        high = np.floor((r >> 1) * env).astype(np.uint8)
        yield ((high << 1) | (r & 1)).astype(np.uint8).tobytes()
        offset += r.size


_GENERATORS = {
    "reference-mixer": iter_reference_mixer,
    "all-zero": iter_all_zero,
    "alternating": iter_alternating,
    "ffcs-sim": iter_ffcs_sim,
    "smlt-sim": iter_smlt_sim,
}


@dataclass(frozen=True)
class SourceSpec:
    kind: SourceKind
    seed: int = 0
    length: int = 0

    def __post_init__(self):
        if self.kind not in _GENERATORS:
            raise ValueError(f"unknown source kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.length < 0:
            raise ValueError("length must be >= 0")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must fit in 64 bits")

    def chunks(self, chunk: int = CHUNK_BYTES) -> Iterator[bytes]:
        return _GENERATORS[self.kind](self.seed, self.length, chunk)

    def generate(self) -> bytes:
        return b"".join(self.chunks())


def smlt_sim(seed: int, length: int) -> bytes:
    return SourceSpec("smlt-sim", seed, length).generate()


def ffcs_sim(seed: int, length: int) -> bytes:
    return SourceSpec("ffcs-sim", seed, length).generate()
