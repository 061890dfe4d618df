"""Seed-keyed prime sign assignments and the ±1 sequences they induce.

A SignAssignment maps each prime to -1 or +1.  Extending multiplicatively
gives a completely multiplicative sequence on 1..limit; the integers that
land on -1 form the membership set studied by the statistics and equation
modules.  Everything is a pure function of (seed, mode), so runs replay
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeError
from .sieve import SpfTable, factorize, is_prime

_M64 = (1 << 64) - 1

RANDOM = "random"
CLASSIC = "classic"  # every prime maps to -1: the classic multiplicative parity
_MODE_ALIASES = {"all-primes-negative": CLASSIC}

DEFAULT_SEED = 0


def _mix64(x: int) -> int:
    """SplitMix64 finalizer; the entire source of per-prime randomness."""
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _mix64_array(values: np.ndarray) -> np.ndarray:
    # vectorized twin of _mix64; uint64 arithmetic wraps like the masked ops above
    x = values.astype(np.uint64, copy=True)
    x += np.uint64(0x9E3779B97F4A7C15)
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return x


@dataclass(frozen=True)
class SignAssignment:
    """Deterministic prime -> {-1, +1} map keyed by a 64-bit seed.

    mode "random": the sign of p is the low bit of the SplitMix64 finalizer
    applied to (seed XOR p); bit 1 means -1.  mode "classic": every prime
    gets -1 regardless of seed.
    """

    seed: int = DEFAULT_SEED
    mode: str = RANDOM

    def __post_init__(self) -> None:
        mode = _MODE_ALIASES.get(self.mode, self.mode)
        if mode not in (RANDOM, CLASSIC):
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if not 0 <= self.seed < 1 << 64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    def sign_of_prime(self, p: int) -> int:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        return self._sign(p)

    def _sign(self, p: int) -> int:
        # primality of p is the caller's responsibility here
        if self.mode == CLASSIC:
            return -1
        return -1 if _mix64((self.seed ^ p) & _M64) & 1 else 1

    def prime_sign_array(self, primes: np.ndarray) -> np.ndarray:
        """int8 signs for an ascending array of primes."""
        if self.mode == CLASSIC:
            return np.full(len(primes), -1, dtype=np.int8)
        mixed = _mix64_array(primes.astype(np.uint64) ^ np.uint64(self.seed))
        out = np.ones(len(primes), dtype=np.int8)
        out[(mixed & np.uint64(1)).astype(bool)] = -1
        return out


def sign_of_prime(assignment: SignAssignment, p: int) -> int:
    """Sign of a prime under the assignment.  Rejects non-primes."""
    return assignment.sign_of_prime(p)


def lambda_q(assignment: SignAssignment, n: int, table: SpfTable) -> int:
    """Multiplicative extension of the prime signs, evaluated at one point."""
    s = 1
    for p, e in factorize(n, table):
        if e & 1:
            s *= assignment._sign(p)
    return s


class SignedSequence:
    """Values of the multiplicative extension on 1..limit as an int8 array.

    ``signs[n]`` is the value at n; index 0 is an unused zero sentinel.
    """

    __slots__ = ("limit", "signs")

    def __init__(self, limit: int, signs: np.ndarray) -> None:
        self.limit = limit
        self.signs = signs

    def sign(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise OutOfRangeError(f"{n} outside [1, {self.limit}]")
        return int(self.signs[n])

    def negatives(self) -> "SetBitset":
        """Packed set of all n with value -1."""
        return SetBitset.from_indicator(self.limit, self.signs[1:] == -1)


def build_signed_sequence(
    assignment: SignAssignment, limit: int, table: SpfTable
) -> SignedSequence:
    """Bulk-evaluate the multiplicative extension on 1..limit.

    For every prime p with sign -1 the signs of the multiples of p, p^2, ...
    are flipped in turn, which applies (-1)^(exponent of p in n) to each n.
    Agrees pointwise with lambda_q and costs about limit * loglog(limit).
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    if limit > table.limit:
        raise OutOfRangeError(f"limit {limit} exceeds the sieve table ({table.limit})")
    signs = np.ones(limit + 1, dtype=np.int8)
    signs[0] = 0
    primes = table.primes()
    primes = primes[primes <= limit]
    sgn = assignment.prime_sign_array(primes)
    for p in primes[sgn == -1].tolist():
        q = p
        while q <= limit:
            view = signs[q::q]
            np.negative(view, out=view)
            q *= p
    return SignedSequence(limit, signs)


class SetBitset:
    """Packed membership bitset over 1..limit.

    Integer n corresponds to bit n-1, LSB-first within each byte, and any
    padding bits in the final byte are zero.  This is exactly the payload
    layout of the NSET container, so serialization is a copy.
    """

    __slots__ = ("limit", "payload")

    def __init__(self, limit: int, payload: np.ndarray) -> None:
        if limit < 0:
            raise ValueError(f"limit must be >= 0, got {limit}")
        payload = np.asarray(payload, dtype=np.uint8)
        expected = (limit + 7) // 8
        if payload.shape != (expected,):
            raise ValueError(
                f"payload must be {expected} bytes for limit {limit}, got {payload.shape}"
            )
        if limit % 8 and payload.size and int(payload[-1]) >> (limit % 8):
            raise ValueError("padding bits beyond the limit must be zero")
        self.limit = limit
        self.payload = payload

    @classmethod
    def from_indicator(cls, limit: int, indicator: np.ndarray) -> "SetBitset":
        """Build from a 0/1 (or bool) array where position i stands for i+1."""
        ind = np.asarray(indicator, dtype=np.uint8)
        if ind.shape != (limit,):
            raise ValueError(f"indicator must have length {limit}, got {ind.shape}")
        return cls(limit, np.packbits(ind, bitorder="little"))

    @classmethod
    def from_members(cls, limit: int, members) -> "SetBitset":
        ind = np.zeros(limit, dtype=np.uint8)
        for m in members:
            if not 1 <= m <= limit:
                raise OutOfRangeError(f"member {m} outside [1, {limit}]")
            ind[m - 1] = 1
        return cls(limit, np.packbits(ind, bitorder="little"))

    def indicator(self) -> np.ndarray:
        """uint8 0/1 array of length limit; position i stands for integer i+1."""
        return np.unpackbits(self.payload, count=self.limit, bitorder="little")

    def contains_array(self) -> np.ndarray:
        """bool array of length limit+1 indexed directly by the integer."""
        arr = np.zeros(self.limit + 1, dtype=bool)
        arr[1:] = self.indicator().view(bool)
        return arr

    def __contains__(self, n: int) -> bool:
        if not 1 <= n <= self.limit:
            return False
        i = n - 1
        return bool(int(self.payload[i >> 3]) >> (i & 7) & 1)

    def members(self) -> np.ndarray:
        return np.flatnonzero(self.indicator()).astype(np.int64) + 1

    def count(self) -> int:
        return int(self.indicator().sum())

    def density(self) -> float:
        return self.count() / self.limit if self.limit else 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetBitset):
            return NotImplemented
        return self.limit == other.limit and bool(
            np.array_equal(self.payload, other.payload)
        )


def a_q_set(assignment: SignAssignment, limit: int, table: SpfTable) -> SetBitset:
    """The set of n in [1, limit] where the multiplicative extension is -1."""
    return build_signed_sequence(assignment, limit, table).negatives()
