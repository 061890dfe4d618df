"""Word-frequency statistics and correlation averages for ±1 sequences.

A membership set over [1, N] reads as a binary string (bit n set iff n is
a member).  For a set with good equidistribution every word w of length m
should occur with frequency close to 2^-m.  The counting here is exact:
counts are integers, frequencies are Fractions, and the expansion of word
frequencies into signed correlation averages is an identity, not an
approximation, so the two routes must agree bit for bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import OutOfRangeError
from .sieve import OffsetSpec
from .signs import SetBitset, SignedSequence

#: Hard cap on word length; the count table for length L has 2^L cells.
MAX_WORD_LEN = 24

#: Below this many window positions, chunking for threads is pure overhead.
_CHUNK_FLOOR = 1 << 16


def _parse_word(word: str) -> tuple[int, int]:
    """Return (length, code) for a binary word; leftmost character is the
    most significant bit."""
    if not word or any(ch not in "01" for ch in word):
        raise ValueError(f"word must be a nonempty string over 0/1, got {word!r}")
    if len(word) > MAX_WORD_LEN:
        raise ValueError(f"word length {len(word)} exceeds {MAX_WORD_LEN}")
    return len(word), int(word, 2)


def _count_range(ind: np.ndarray, length: int, lo: int, hi: int) -> np.ndarray:
    """Occurrence counts of every word of the given length whose window
    starts in [lo, hi) of the 0-based indicator array."""
    width = hi - lo
    seg = ind[lo : hi + length - 1]
    code = np.zeros(width, dtype=np.int32)
    for j in range(length):
        code <<= 1
        code |= seg[j : j + width]
    return np.bincount(code, minlength=1 << length).astype(np.int64)


def _word_counts(ind: np.ndarray, length: int, threads: int) -> np.ndarray:
    positions = len(ind) - length + 1
    if threads <= 1 or positions < _CHUNK_FLOOR:
        return _count_range(ind, length, 0, positions)
    # chunk boundaries may differ with the thread count; integer counts
    # merge by addition, so the result cannot
    edges = np.linspace(0, positions, threads + 1, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(
            pool.map(lambda se: _count_range(ind, length, se[0], se[1]), zip(edges, edges[1:]))
        )
    return np.sum(parts, axis=0)


class WordStats:
    """Exact occurrence counts of every binary word of length 1..max_len
    over the window positions of [1, N].

    A word of length m is counted at positions n = 1 .. N-m+1, so the
    frequencies of each length sum to exactly 1.
    """

    __slots__ = ("N", "max_len", "counts")

    def __init__(self, N: int, max_len: int, counts: list) -> None:
        self.N = N
        self.max_len = max_len
        self.counts = counts  # counts[length] is an int64 array of 2^length cells

    def window(self, length: int) -> int:
        return self.N - length + 1

    def count(self, word: str) -> int:
        length, code = _parse_word(word)
        if length > self.max_len:
            raise ValueError(f"word longer than the tabulated max_len {self.max_len}")
        return int(self.counts[length][code])

    def freq(self, word: str) -> Fraction:
        return Fraction(self.count(word), self.window(len(word)))

    def deviation(self, word: str) -> Fraction:
        """|freq(word) - 2^-len(word)|, exact."""
        return abs(self.freq(word) - Fraction(1, 1 << len(word)))


def word_frequencies(
    bits: SetBitset, max_len: int, N: int, threads: int = 1
) -> WordStats:
    """Tabulate occurrence counts of all words up to max_len over [1, N]."""
    if not 1 <= max_len <= MAX_WORD_LEN:
        raise ValueError(f"max_len must be in [1, {MAX_WORD_LEN}], got {max_len}")
    if N > bits.limit:
        raise OutOfRangeError(f"N={N} exceeds the bitset limit {bits.limit}")
    if N < max_len:
        raise ValueError(f"need N >= max_len, got N={N} < {max_len}")
    ind = bits.indicator()[:N]
    counts: list = [None] * (max_len + 1)
    for length in range(1, max_len + 1):
        counts[length] = _word_counts(ind, length, threads)
    return WordStats(N, max_len, counts)


@dataclass(frozen=True)
class CorrelationResult:
    """Average of the products seq(n) * seq(n+i_1) * ... * seq(n+i_k)
    over n = 1..n_terms.  total is the integer sum of the ±1 products."""

    offsets: tuple[int, ...]
    n_terms: int
    total: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.total, self.n_terms)

    @property
    def value_float(self) -> float:
        return self.total / self.n_terms


def correlation_sum(seq: SignedSequence, spec: OffsetSpec, N: int) -> CorrelationResult:
    """Exact correlation average of the sequence against its shifts."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if N + spec.max_offset > seq.limit:
        raise OutOfRangeError(
            f"need values up to {N + spec.max_offset}, sequence stops at {seq.limit}"
        )
    signs = seq.signs
    acc = signs[1 : N + 1].copy()
    for i in spec.offsets:
        acc *= signs[1 + i : N + 1 + i]
    return CorrelationResult(spec.offsets, N, int(acc.sum(dtype=np.int64)))


def word_freq_via_correlations(seq: SignedSequence, word: str, N: int) -> Fraction:
    """Frequency of a word computed through correlation averages only.

    Expanding the indicator of "window matches word" as a product of
    (1 ± seq(n+j))/2 terms gives the frequency as 2^-m times a signed sum
    of correlation sums over all subsets of the word's positions.  Exact
    arithmetic throughout; must equal the directly counted frequency.
    """
    m, _ = _parse_word(word)
    if N < m:
        raise ValueError(f"need N >= len(word), got N={N} < {m}")
    if N > seq.limit:
        raise OutOfRangeError(f"N={N} exceeds the sequence limit {seq.limit}")
    width = N - m + 1
    signs = seq.signs
    ones_mask = 0
    for j, ch in enumerate(word):
        if ch == "1":
            ones_mask |= 1 << j
    total = 0
    for mask in range(1 << m):
        if mask == 0:
            subtotal = width  # empty product contributes 1 at every position
        else:
            acc = None
            for j in range(m):
                if mask >> j & 1:
                    view = signs[1 + j : 1 + j + width]
                    acc = view.copy() if acc is None else acc * view
            subtotal = int(acc.sum(dtype=np.int64))
        if (mask & ones_mask).bit_count() & 1:
            total -= subtotal
        else:
            total += subtotal
    return Fraction(total, (1 << m) * width)


@dataclass(frozen=True)
class LengthDeviation:
    length: int
    word: str  # a word attaining the maximum deviation at this length
    deviation: Fraction

    @property
    def deviation_float(self) -> float:
        return float(self.deviation)


@dataclass(frozen=True)
class DiscrepancyReport:
    """Worst-case |freq - 2^-length| per word length and overall."""

    N: int
    max_len: int
    per_length: tuple[LengthDeviation, ...]
    overall: Fraction
    worst_word: str

    @property
    def overall_float(self) -> float:
        return float(self.overall)


def discrepancy_report(
    bits: SetBitset, max_len: int, N: int, threads: int = 1
) -> DiscrepancyReport:
    """Maximum deviation of word frequencies from the equidistributed value."""
    stats = word_frequencies(bits, max_len, N, threads=threads)
    rows = []
    overall = Fraction(0)
    worst_word = ""
    for length in range(1, max_len + 1):
        width = stats.window(length)
        counts = stats.counts[length]
        # |count/width - 2^-length| == |count * 2^length - width| / (width * 2^length)
        dev_num = np.abs(counts * (1 << length) - width)
        idx = int(dev_num.argmax())
        dev = Fraction(int(dev_num[idx]), width << length)
        word = format(idx, f"0{length}b")
        rows.append(LengthDeviation(length, word, dev))
        if dev > overall:
            overall = dev
            worst_word = word
    if not worst_word:
        worst_word = rows[0].word
    return DiscrepancyReport(N, max_len, tuple(rows), overall, worst_word)


@dataclass(frozen=True)
class TrendPoint:
    N: int
    total: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.total, self.N)

    @property
    def value_float(self) -> float:
        return self.total / self.N


@dataclass(frozen=True)
class TrendReport:
    """Correlation averages along a growing grid of cut-offs.

    ratios[i] = N_i / N_{i+1}; on a sensible grid these approach 1, so
    consecutive averages cannot jump.  tail_max_abs is the largest |value|
    over the later half of the grid.  degenerate marks single-point grids,
    where a trend is not defined.
    """

    offsets: tuple[int, ...]
    points: tuple[TrendPoint, ...]
    ratios: tuple[float, ...]
    tail_max_abs: float
    degenerate: bool


def subsequence_trend(seq: SignedSequence, spec: OffsetSpec, grid) -> TrendReport:
    """Evaluate the correlation average at every cut-off in the grid."""
    grid = [int(n) for n in grid]
    if not grid:
        raise ValueError("grid must not be empty")
    if grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"grid must be strictly increasing positive, got {grid}")
    if grid[-1] + spec.max_offset > seq.limit:
        raise OutOfRangeError(
            f"grid needs values up to {grid[-1] + spec.max_offset}, "
            f"sequence stops at {seq.limit}"
        )
    top = grid[-1]
    signs = seq.signs
    acc = signs[1 : top + 1].copy()
    for i in spec.offsets:
        acc *= signs[1 + i : top + 1 + i]
    prefix = np.cumsum(acc, dtype=np.int64)
    points = tuple(TrendPoint(n, int(prefix[n - 1])) for n in grid)
    ratios = tuple(a / b for a, b in zip(grid, grid[1:]))
    tail = points[len(points) // 2 :]
    tail_max_abs = max(abs(p.value_float) for p in tail)
    return TrendReport(spec.offsets, points, ratios, tail_max_abs, len(grid) < 2)


def poly_grid(start: int, stop: int, degree: int) -> list[int]:
    """All perfect degree-th powers in [start, stop]; consecutive ratios
    tend to 1, which is what subsequence_trend wants from a grid."""
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    if not 1 <= start <= stop:
        raise ValueError(f"need 1 <= start <= stop, got [{start}, {stop}]")
    lo = max(1, round(start ** (1 / degree)) - 2)
    while lo**degree < start:
        lo += 1
    hi = round(stop ** (1 / degree)) + 2
    while hi**degree > stop:
        hi -= 1
    if lo > hi:
        raise ValueError(f"no degree-{degree} powers inside [{start}, {stop}]")
    return [i**degree for i in range(lo, hi + 1)]
