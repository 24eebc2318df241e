"""Bernoulli random subsets of the naturals as a pure function of a 64-bit seed.

Membership of ``n`` is decided by hashing ``(seed, n)`` with a limb-wise
splitmix64 fold, so arbitrarily large integers can be queried without
materializing anything.  ``materialize`` gives the dense view over ``[1..N]``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DomainError, ResourceError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

BUDGET_ENV = "RANDFS_MEMORY_BUDGET"
DEFAULT_BUDGET = 256 * 1024 * 1024  # bytes

_G = np.uint64(GOLDEN)
_M1 = np.uint64(MIX1)
_M2 = np.uint64(MIX2)
_S30, _S27, _S31 = np.uint64(30), np.uint64(27), np.uint64(31)


def memory_budget() -> int:
    """Byte budget for dense materializations (env override allowed)."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"{BUDGET_ENV} must be an integer byte count, got {raw!r}")
    if value <= 0:
        raise DomainError(f"{BUDGET_ENV} must be positive, got {value}")
    return value


def check_budget(nbytes: int, what: str) -> None:
    limit = memory_budget()
    if nbytes > limit:
        raise ResourceError(
            f"{what} needs {nbytes} bytes, over the memory budget of {limit} bytes "
            f"(set {BUDGET_ENV} to raise it)"
        )


def splitmix64(x: int) -> int:
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def splitmix64_np(x: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 over a uint64 array (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = x + _G
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def limbs(n: int) -> list[int]:
    """Base 2**64 digits of ``n``, least significant first."""
    nbytes = (n.bit_length() + 63) // 64 * 8
    return np.frombuffer(n.to_bytes(nbytes, "little"), dtype="<u8").tolist()


def hash_int(seed: int, n: int) -> int:
    """The 64-bit hash whose ratio to 2**64 is the uniform u(seed, n)."""
    s = seed & MASK64
    for limb in limbs(n):
        s = splitmix64(s ^ ((limb * GOLDEN) & MASK64))
    return splitmix64(s)


def hash_seeds(seeds: np.ndarray, n: int) -> np.ndarray:
    """u64 hashes of one integer ``n`` under many seeds at once."""
    s = np.asarray(seeds, dtype=np.uint64).copy()
    for limb in limbs(n):
        s = splitmix64_np(s ^ np.uint64((limb * GOLDEN) & MASK64))
    return splitmix64_np(s)


def hash_grid(seeds: np.ndarray, ns: np.ndarray) -> np.ndarray:
    """Hashes for every (seed, n) pair; ``ns`` must lie in [1, 2**64).

    Returns an array of shape ``seeds.shape + ns.shape``.
    """
    seeds = np.asarray(seeds, dtype=np.uint64)
    ns = np.asarray(ns, dtype=np.uint64)
    with np.errstate(over="ignore"):
        folded = ns * _G
    s = seeds.reshape(seeds.shape + (1,) * ns.ndim) ^ folded
    return splitmix64_np(splitmix64_np(s))


def threshold(p) -> int:
    """Largest hash value still counted as a member: u < p  iff  hash <= threshold(p).

    Exact for float or Fraction ``p``; stays within uint64 even as p -> 1.
    """
    return math.ceil(Fraction(p) * (1 << 64)) - 1


def validate_p(p) -> None:
    if not (0 < p < 1):
        raise DomainError(f"inclusion probability must lie in (0, 1), got {p!r}")


@dataclass(frozen=True)
class SubsetModel:
    """A seeded sample of N_p: each n >= 1 is included independently w.p. ``p``."""

    p: float
    seed: int
    _zero_chain: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        validate_p(self.p)
        if not (0 <= self.seed <= MASK64):
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @cached_property
    def cutoff(self) -> int:
        return threshold(self.p)

    def _chain(self, t: int) -> int:
        # state after folding t zero limbs: splitmix64 iterated t times on seed
        chain = self._zero_chain
        if not chain:
            chain.append(self.seed)
        while len(chain) <= t:
            chain.append(splitmix64(chain[-1]))
        return chain[t]

    def hash(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"membership is defined for n >= 1, got {n}")
        if n <= MASK64:
            return splitmix64(splitmix64(self.seed ^ ((n * GOLDEN) & MASK64)))
        # dilated probes carry long runs of zero low limbs; reuse the cached chain
        t = ((n & -n).bit_length() - 1) // 64
        s = self._chain(t)
        for limb in limbs(n >> (64 * t)):
            s = splitmix64(s ^ ((limb * GOLDEN) & MASK64))
        return splitmix64(s)

    def uniform(self, n: int) -> float:
        return self.hash(n) / 2.0**64

    def contains(self, n: int) -> bool:
        return self.hash(n) <= self.cutoff

    __contains__ = contains

    def materialize(self, N: int) -> "DenseSample":
        return materialize(self, N)


def contains(model: SubsetModel, n: int) -> bool:
    return model.contains(n)


_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class DenseSample:
    """Bit vector over [1..bound]; bit ``i - 1`` of the packed array is entry i."""

    bound: int
    bits: np.ndarray

    @classmethod
    def from_mask(cls, mask) -> "DenseSample":
        """Build from a boolean array whose entry 0 is the integer 1."""
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 1 or mask.size == 0:
            raise DomainError("mask must be a nonempty 1-d array")
        return cls(int(mask.size), np.packbits(mask, bitorder="little"))

    @classmethod
    def from_set(cls, members, bound: int) -> "DenseSample":
        mask = np.zeros(bound, dtype=bool)
        for m in members:
            if not 1 <= m <= bound:
                raise DomainError(f"member {m} outside [1..{bound}]")
            mask[m - 1] = True
        return cls.from_mask(mask)

    @cached_property
    def mask(self) -> np.ndarray:
        """Boolean view indexed directly by integer (entry 0 is always False)."""
        out = np.zeros(self.bound + 1, dtype=bool)
        out[1:] = np.unpackbits(self.bits, count=self.bound, bitorder="little").astype(bool)
        out.flags.writeable = False
        return out

    def __contains__(self, n: int) -> bool:
        return 1 <= n <= self.bound and bool(self.bits[(n - 1) >> 3] >> ((n - 1) & 7) & 1)

    def __eq__(self, other):
        if not isinstance(other, DenseSample):
            return NotImplemented
        return self.bound == other.bound and np.array_equal(self.bits, other.bits)

    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def popcount(self) -> int:
        return int(np.bitwise_count(self.bits).sum())


def materialize(model: SubsetModel, N: int) -> DenseSample:
    if N < 1:
        raise DomainError(f"bound must be >= 1, got {N}")
    check_budget((N + 7) // 8, f"dense sample over [1..{N}]")
    cut = model.cutoff
    seed = np.array(model.seed, dtype=np.uint64)
    parts = []
    for start in range(1, N + 1, _CHUNK):
        ns = np.arange(start, min(N, start + _CHUNK - 1) + 1, dtype=np.uint64)
        parts.append(np.packbits(hash_grid(seed, ns) <= np.uint64(cut), bitorder="little"))
    # chunks are multiples of 8 bits except possibly the last, so concatenation is aligned
    return DenseSample(N, np.concatenate(parts))


def member_matrix(p, seeds, N: int) -> np.ndarray:
    """Boolean matrix ``M[t, n]`` = (n in model(p, seeds[t])), column 0 unused."""
    validate_p(p)
    seeds = np.asarray(seeds, dtype=np.uint64)
    out = np.zeros((seeds.size, N + 1), dtype=bool)
    out[:, 1:] = hash_grid(seeds, np.arange(1, N + 1, dtype=np.uint64)) <= np.uint64(threshold(p))
    return out
