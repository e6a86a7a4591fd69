import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def bits_of(text: str) -> np.ndarray:
    return np.array([int(c) for c in text], dtype=np.uint8)


def lfsr_generates(seq, taps) -> bool:
    """True if s[i] = XOR of taps[k] * s[i-1-k] reproduces ``seq``."""
    L = len(taps)
    for i in range(L, len(seq)):
        if sum(t & seq[i - 1 - k] for k, t in enumerate(taps)) % 2 != seq[i]:
            return False
    return True


def brute_force_linear_complexity(seq, max_length: int) -> int:
    """Shortest L for which some LFSR (every tap vector tried) generates seq."""
    if not any(seq):
        return 0
    for L in range(1, max_length + 1):
        for taps in itertools.product((0, 1), repeat=L):
            if lfsr_generates(seq, taps):
                return L
    raise AssertionError("no LFSR up to max_length")


def span_size(rows) -> int:
    """Number of distinct vectors in the GF(2) row span, by enumeration."""
    ints = [int("".join(map(str, r)), 2) for r in rows]
    seen = set()
    for mask in range(1 << len(ints)):
        acc = 0
        for i, v in enumerate(ints):
            if mask >> i & 1:
                acc ^= v
        seen.add(acc)
    return len(seen)


def direct_dft_magnitudes(bits) -> np.ndarray:
    x = 2.0 * np.asarray(bits, dtype=np.float64) - 1.0
    n = x.size
    k = np.arange(n)
    out = []
    for j in range(n // 2):
        out.append(abs(np.sum(x * np.exp(-2j * np.pi * j * k / n))))
    return np.array(out)
