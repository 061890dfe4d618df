"""Equation searches over integer sets.

Two directions.  First, the negative results: inside a set built from a
multiplicative sign assignment, x*y = z has no solutions (the product of
two -1 values is +1), and neither does x*y = c*n^k for even k once the
assignment puts c on the -1 side.  Both are verified by exhaustive scan,
not by the algebra.  Second, the positive results: x*y = z^2 is solvable
in any set containing a dyadic progression, and x^2 + y^2 = square and
u^2 - v^2 = square are solvable whenever the set contains two members of a
scaled magic triple: three numbers whose pairwise sums (or differences) of
squares are all perfect squares.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .errors import OutOfRangeError, SeedPreconditionError
from .sieve import SpfTable, build_spf, factorize
from .signs import SetBitset, SignAssignment, a_q_set, lambda_q


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


@dataclass(frozen=True)
class MagicTriple:
    """Triple a < b < c whose pairwise sums of squares (kind "sum") or
    pairwise differences of squares (kind "difference") are all perfect
    squares.  The constructor checks the shape only; verify_magic_triple
    checks the squares."""

    a: int
    b: int
    c: int
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("sum", "difference"):
            raise ValueError(f"kind must be 'sum' or 'difference', got {self.kind!r}")
        if not 0 < self.a < self.b < self.c:
            raise ValueError(f"need 0 < a < b < c, got ({self.a}, {self.b}, {self.c})")

    def pair_values(self) -> tuple[int, int, int]:
        """The three pairwise combinations, each expected to be square."""
        a, b, c = self.a, self.b, self.c
        if self.kind == "sum":
            return (a * a + b * b, a * a + c * c, b * b + c * c)
        return (b * b - a * a, c * c - a * a, c * c - b * b)


#: Default triples used by the scaled-triple solvers.
SUM_TRIPLE = MagicTriple(44, 117, 240, "sum")
DIFF_TRIPLE = MagicTriple(153, 185, 697, "difference")


def verify_magic_triple(triple: MagicTriple) -> bool:
    """True iff all three pairwise combinations are perfect squares."""
    return all(_is_square(v) for v in triple.pair_values())


def find_magic_triples(limit: int, kind: str) -> list[MagicTriple]:
    """Exhaustive search for magic triples with c <= limit.

    Builds the compatibility graph on pairs first, then closes triangles;
    cost is quadratic in the limit, fine for the few-hundred range where
    the known small triples live.
    """
    if limit < 3:
        raise ValueError(f"limit must be >= 3, got {limit}")
    if kind not in ("sum", "difference"):
        raise ValueError(f"kind must be 'sum' or 'difference', got {kind!r}")
    compatible: dict[int, list[int]] = {}
    for a in range(1, limit + 1):
        aa = a * a
        partners = []
        for b in range(a + 1, limit + 1):
            v = aa + b * b if kind == "sum" else b * b - aa
            if _is_square(v):
                partners.append(b)
        if partners:
            compatible[a] = partners
    out = []
    for a, partners in compatible.items():
        pset = set(partners)
        for i, b in enumerate(partners):
            if b not in compatible:
                continue
            for c in compatible[b]:
                if c in pset:
                    out.append(MagicTriple(a, b, c, kind))
    out.sort(key=lambda t: (t.c, t.b, t.a))
    return out


@dataclass(frozen=True)
class SolutionReport:
    """Outcome of one equation search.

    verified means: the witnesses (if any) satisfy the equation exactly and
    every witness is a member of the searched set; for the verify_* scans it
    additionally means the scan finished with nothing found.  For solver
    runs, verified False with empty witnesses is an honest "not found up to
    searched_to", not an error.
    """

    equation: str
    witnesses: dict[str, int]
    verified: bool
    searched_to: int
    seed: int | None = None

    def to_json_dict(self) -> dict:
        out = {
            "equation": self.equation,
            "witnesses": dict(sorted(self.witnesses.items())),
            "verified": self.verified,
            "searched_to": self.searched_to,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def dilation(bits: SetBitset, a: int) -> SetBitset:
    """The set {n : a*n is a member}, over [1, limit // a]."""
    if a < 1:
        raise ValueError(f"dilation factor must be >= 1, got {a}")
    if a > bits.limit:
        raise OutOfRangeError(f"factor {a} exceeds the bitset limit {bits.limit}")
    new_limit = bits.limit // a
    ind = bits.indicator()
    return SetBitset.from_indicator(new_limit, ind[a - 1 :: a][:new_limit])


def find_schur_violation(bits: SetBitset, N: int):
    """Exhaustive scan for members x, y with x*y <= N also a member.

    Returns the lexicographically first violating (x, y, x*y) or None.
    Pairs are ordered, so (x, y) and (y, x) are both inspected; total work
    is proportional to the number of admissible pairs, grouped into numpy
    blocks of equal y-range so the scan stays vectorized.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if N > bits.limit:
        raise OutOfRangeError(f"N={N} exceeds the bitset limit {bits.limit}")
    ind = bits.indicator()
    members = np.flatnonzero(ind[:N]).astype(np.int64) + 1
    if members.size == 0:
        return None
    is_member = np.zeros(N + 1, dtype=bool)
    is_member[members] = True
    caps = N // members  # per x, the largest admissible y
    ycounts = np.searchsorted(members, caps, side="right")
    # members ascend, so caps and ycounts are nonincreasing: split into runs
    boundaries = np.flatnonzero(np.diff(ycounts)) + 1
    start = 0
    for stop in list(boundaries) + [len(members)]:
        c = int(ycounts[start])
        if c == 0:
            break
        xs = members[start:stop]
        prods = np.multiply.outer(xs, members[:c])
        hits = is_member[prods]
        if hits.any():
            i, j = np.argwhere(hits)[0]
            x = int(xs[i])
            y = int(members[j])
            return (x, y, x * y)
        start = stop
    return None


def verify_multiplicative_schur(
    assignment: SignAssignment, N: int, table: SpfTable
) -> SolutionReport:
    """Exhaustively confirm that x*y = z has no solution inside the -1 set."""
    bits = a_q_set(assignment, N, table)
    hit = find_schur_violation(bits, N)
    seed = assignment.seed if assignment.mode == "random" else None
    if hit is None:
        return SolutionReport("xy_eq_z", {}, True, N, seed)
    x, y, z = hit
    return SolutionReport("xy_eq_z", {"x": x, "y": y, "z": z}, False, N, seed)


def _divisors_from_table(m: int, table: SpfTable) -> list[int]:
    divs = [1]
    for p, e in factorize(m, table):
        divs = [d * p**j for d in divs for j in range(e + 1)]
    divs.sort()
    return divs


def verify_cnk(
    assignment: SignAssignment, c: int, k: int, N: int, table: SpfTable
) -> SolutionReport:
    """Exhaustively confirm x*y = c*n^k has no solution in the -1 set.

    Requires c >= 2 and not a perfect square, and k even and positive; the
    assignment must put c on the -1 side, otherwise the scan would be
    checking the wrong statement and a SeedPreconditionError says to pick
    another seed.  Every admissible right-hand side m = c*n^k <= N is
    factored through the table and all divisor pairs are inspected.
    """
    if c < 2 or _is_square(c):
        raise ValueError(f"c must be >= 2 and not a perfect square, got {c}")
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and positive, got {k}")
    table.check(N)
    if lambda_q(assignment, c, table) != -1:
        raise SeedPreconditionError(
            f"the assignment gives sign +1 to c={c}; rerun with a different seed"
        )
    bits = a_q_set(assignment, N, table)
    seed = assignment.seed if assignment.mode == "random" else None
    n = 1
    while c * n**k <= N:
        m = c * n**k
        for x in _divisors_from_table(m, table):
            if x * x > m:
                break
            y = m // x
            if x in bits and y in bits:
                return SolutionReport(
                    "xy_eq_c_nk", {"x": x, "y": y, "n": n, "m": m}, False, N, seed
                )
        n += 1
    return SolutionReport("xy_eq_c_nk", {}, True, N, seed)


def solve_xy_z2(bits: SetBitset, N: int, table: SpfTable | None = None) -> SolutionReport:
    """Search for members x, y, z (pairwise distinct) with x*y = z^2.

    First pass: for each odd base n, collect the exponents e with n*2^e a
    member; any three exponents in arithmetic progression give a solution
    n*2^a * n*2^(a+2d) = (n*2^(a+d))^2.  Fallback pass: members sharing a
    squarefree kernel multiply to a square, so scan kernel classes for a
    pair x < y whose geometric mean is also a member.  Witnesses are
    returned in a deterministic first-found order; not finding any is a
    result, not an error.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if N > bits.limit:
        raise OutOfRangeError(f"N={N} exceeds the bitset limit {bits.limit}")
    ind = bits.indicator()

    def is_member(v: int) -> bool:
        return bool(ind[v - 1])

    # dyadic progressions: smallest odd base first, then smallest exponents
    for n in range(1, N // 4 + 1, 2):
        exps = []
        q = n
        while q <= N:
            if is_member(q):
                exps.append((q // n).bit_length() - 1)
            q <<= 1
        if len(exps) >= 3:
            eset = set(exps)
            for ai in range(len(exps) - 2):
                for ci in range(ai + 2, len(exps)):
                    lo, hi = exps[ai], exps[ci]
                    if (lo + hi) % 2 == 0 and (lo + hi) // 2 in eset:
                        mid = (lo + hi) // 2
                        x, y, z = n << lo, n << hi, n << mid
                        return SolutionReport(
                            "xy_eq_z2", {"x": x, "y": y, "z": z}, True, N
                        )
    # kernel classes: x and y share a kernel, so x*y is automatically square
    if table is None or table.limit < N:
        table = build_spf(max(N, 2))
    classes: dict[int, list[int]] = {}
    for v in bits.members():
        v = int(v)
        if v > N:
            break
        kernel = 1
        for p, e in factorize(v, table):
            if e & 1:
                kernel *= p
        partners = classes.setdefault(kernel, [])
        for x in partners:
            z = isqrt(x * v)
            if z * z == x * v and z <= N and is_member(z) and z != x and z != v:
                return SolutionReport("xy_eq_z2", {"x": x, "y": v, "z": z}, True, N)
        partners.append(v)
    return SolutionReport("xy_eq_z2", {}, False, N)


def _solve_scaled_triple(
    bits: SetBitset, N: int, triple: MagicTriple, tag: str
) -> SolutionReport:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if N > bits.limit:
        raise OutOfRangeError(f"N={N} exceeds the bitset limit {bits.limit}")
    if not verify_magic_triple(triple):
        raise ValueError(f"{triple} is not a magic triple of kind {triple.kind!r}")
    ind = bits.indicator()
    pairs = ((triple.a, triple.b), (triple.a, triple.c), (triple.b, triple.c))
    z = 1
    while z * triple.b <= N:
        for u, v in pairs:
            if z * v > N:
                continue
            lo, hi = z * u, z * v
            if ind[lo - 1] and ind[hi - 1]:
                if triple.kind == "sum":
                    s = isqrt(lo * lo + hi * hi)
                    witnesses = {"x": lo, "y": hi, "s": s, "scale": z}
                else:
                    s = isqrt(hi * hi - lo * lo)
                    witnesses = {"u": hi, "v": lo, "s": s, "scale": z}
                return SolutionReport(tag, witnesses, True, N)
        z += 1
    return SolutionReport(tag, {}, False, N)


def solve_sum_of_squares(
    bits: SetBitset, N: int, triple: MagicTriple = SUM_TRIPLE
) -> SolutionReport:
    """Find members x, y with x^2 + y^2 a perfect square.

    Scans scales z = 1, 2, ... and checks whether two of (za, zb, zc) are
    members; any two legs of a magic sum triple work, which is what makes
    the search short on sets of density near one half.
    """
    if triple.kind != "sum":
        raise ValueError(f"need a 'sum' triple, got kind {triple.kind!r}")
    return _solve_scaled_triple(bits, N, triple, "x2_plus_y2_square")


def solve_diff_of_squares(
    bits: SetBitset, N: int, triple: MagicTriple = DIFF_TRIPLE
) -> SolutionReport:
    """Find members u > v with u^2 - v^2 a perfect square."""
    if triple.kind != "difference":
        raise ValueError(f"need a 'difference' triple, got kind {triple.kind!r}")
    return _solve_scaled_triple(bits, N, triple, "u2_minus_v2_square")
