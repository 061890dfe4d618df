"""Square-pair statistics for shifted products.

For a completely multiplicative ±1 sequence drawn with fair independent
prime signs, the expectation of seq(x)*seq(y) over the draw is 1 when x*y
is a perfect square and 0 otherwise.  Applied to the shifted products
xi(x) = x(x+i_1)...(x+i_k), the second moment of the correlation average
T_N is therefore exactly (number of pairs (x, y) in [1, N]^2 with
xi(x)*xi(y) a perfect square) / N^2.  This module counts those pairs
exactly, checks the per-x counting bound that drives the decay estimate,
and cross-checks the second moment by Monte Carlo over seeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from .sieve import OffsetSpec, SpfTable, common_divisor_set, is_prime
from .signs import SignAssignment, build_signed_sequence


def square_class(x: int, spec: OffsetSpec, table: SpfTable) -> tuple[int, ...]:
    """Sorted primes with odd exponent in xi(x) = x(x+i_1)...(x+i_k).

    Two shifted products multiply to a perfect square exactly when their
    classes are equal.  Computed by merging per-factor exponent parities;
    xi(x) itself is never formed, so nothing here grows with the product.
    """
    table.check(x)
    if spec.offsets:
        table.check(x + spec.max_offset)
    spf = table.spf
    odd: set[int] = set()
    for pos in spec.positions():
        m = x + pos
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e ^= 1
            if e:
                odd.symmetric_difference_update((p,))
    return tuple(sorted(odd))


def _class_counts(N: int, spec: OffsetSpec, table: SpfTable) -> dict:
    counts: dict = {}
    for x in range(1, N + 1):
        cls = square_class(x, spec, table)
        counts[cls] = counts.get(cls, 0) + 1
    return counts


@dataclass(frozen=True)
class PairCountResult:
    """Exact count of ordered pairs (x, y) in [1, N]^2 whose shifted
    products multiply to a perfect square."""

    N: int
    offsets: tuple[int, ...]
    pair_count: int

    @property
    def e_tn2(self) -> Fraction:
        """Second moment of T_N under fair independent prime signs."""
        return Fraction(self.pair_count, self.N * self.N)


def count_square_pairs(N: int, spec: OffsetSpec, table: SpfTable) -> PairCountResult:
    """Count square pairs by grouping x by class and summing squared sizes.

    Every x pairs with itself, so pair_count >= N always.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    table.check(N + spec.max_offset)
    counts = _class_counts(N, spec, table)
    pair_count = sum(c * c for c in counts.values())
    return PairCountResult(N, spec.offsets, pair_count)


@dataclass(frozen=True)
class BoundViolation:
    x: int
    matches: int
    r: int
    h: int
    N: int


def per_x_bound_check(N: int, spec: OffsetSpec, table: SpfTable) -> list[BoundViolation]:
    """Check, for every x <= N, that the number of y <= N sharing x's class
    is at most 2^r * 2^h(x) * sqrt(N).

    r counts the possible common divisors of the shifted values (a function
    of the offsets only) and h(x) the odd-exponent primes of xi(x).  The
    comparison is exact: matches^2 <= (2^(r+h))^2 * N in integers.  Returns
    the violations, expected to be none.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    table.check(N + spec.max_offset)
    r = common_divisor_set(spec).r
    classes = [square_class(x, spec, table) for x in range(1, N + 1)]
    counts: dict = {}
    for cls in classes:
        counts[cls] = counts.get(cls, 0) + 1
    violations = []
    for x, cls in enumerate(classes, start=1):
        matches = counts[cls]
        h = len(cls)
        factor = 1 << (r + h)
        if matches * matches > factor * factor * N:
            violations.append(BoundViolation(x, matches, r, h, N))
    return violations


def smallest_prime_for_decay(k: int) -> int:
    """Least prime p with (k+1)/log2(p) <= 0.45.

    Decided in exact integer arithmetic: the inequality is equivalent to
    p^9 >= 2^(20(k+1)) since 0.45 = 9/20.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    threshold = 1 << (20 * (k + 1))
    p = 2
    while True:
        if is_prime(p) and p**9 >= threshold:
            return p
        p += 1


@dataclass(frozen=True)
class Sum2hReport:
    """Partial sums of 2^h(xi(n)) and their empirical growth rate.

    smallest_prime is the least prime p with (k+1)/log2(p) <= 0.45 and
    prime_index its 1-based position in the primes; together they size the
    constant in front of the N^1.45 growth bound for the sum.
    fitted_exponent is the least-squares slope of log(partial sum) against
    log(n) over the checkpoints (None when the grid is too small to fit).
    """

    N: int
    offsets: tuple[int, ...]
    total: int
    smallest_prime: int
    prime_index: int
    checkpoints: tuple[tuple[int, int], ...]
    fitted_exponent: float | None


def sum_2h(N: int, spec: OffsetSpec, table: SpfTable) -> Sum2hReport:
    """Sum 2^h(xi(n)) for n = 1..N with growth diagnostics."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    table.check(N + spec.max_offset)
    marks = sorted({max(1, N >> j) for j in range(3, -1, -1)})
    mark_set = set(marks)
    running = 0
    checkpoints = []
    for n in range(1, N + 1):
        running += 1 << len(square_class(n, spec, table))
        if n in mark_set:
            checkpoints.append((n, running))
    p = smallest_prime_for_decay(spec.k)
    index = sum(1 for q in range(2, p + 1) if is_prime(q))
    usable = [(n, s) for n, s in checkpoints if n >= 2]
    if len(usable) >= 2:
        xs = np.log([n for n, _ in usable])
        ys = np.log([s for _, s in usable])
        fitted = float(np.polyfit(xs, ys, 1)[0])
    else:
        fitted = None
    return Sum2hReport(N, spec.offsets, running, p, index, tuple(checkpoints), fitted)


@dataclass(frozen=True)
class MonteCarloResult:
    """Sample mean and standard error of T_N^2 across seeds.

    Each per-seed value is exact (a Fraction); mean and stderr are the
    usual floating summaries with ddof=1.
    """

    N: int
    offsets: tuple[int, ...]
    seeds: tuple[int, ...]
    values: tuple[Fraction, ...]
    mean: float
    stderr: float


def monte_carlo_e_tn2(
    N: int, spec: OffsetSpec, seeds, table: SpfTable
) -> MonteCarloResult:
    """Estimate the second moment of T_N by drawing one sequence per seed."""
    seeds = tuple(int(s) for s in seeds)
    if len(seeds) < 2:
        raise ValueError(f"need at least 2 seeds, got {len(seeds)}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    need = N + spec.max_offset
    table.check(need)
    values = []
    for seed in seeds:
        seq = build_signed_sequence(SignAssignment(seed), need, table)
        signs = seq.signs
        acc = signs[1 : N + 1].copy()
        for i in spec.offsets:
            acc *= signs[1 + i : N + 1 + i]
        total = int(acc.sum(dtype=np.int64))
        values.append(Fraction(total * total, N * N))
    floats = np.array([float(v) for v in values])
    mean = float(floats.mean())
    stderr = float(floats.std(ddof=1) / sqrt(len(seeds)))
    return MonteCarloResult(N, spec.offsets, seeds, tuple(values), mean, stderr)
