"""Monte Carlo estimators, exact small-universe oracles and threshold sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Optional

import numpy as np

from . import patterns
from .detect import _fs_search, quadruple_bound
from .errors import DomainError, SizeError
from .model import MASK64, check_budget, hash_grid, hash_seeds, member_matrix, threshold, validate_p
from .parallel import map_chunks
from .patterns import Kind, distinct_count

Z95 = 1.96
MAX_UNIVERSE_BITS = 24
DEFAULT_SEED = 20240601


def as_fraction(p) -> Fraction:
    """Exact rational for ``p``; floats are read by their shortest decimal repr (0.3 -> 3/10)."""
    if isinstance(p, Fraction):
        return p
    if isinstance(p, float):
        return Fraction(repr(p))
    return Fraction(p)


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        raise DomainError("Wilson interval needs at least one trial")
    phat = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    # clamp guards against rounding at phat in {0, 1}
    return max(0.0, min(phat, center - half)), min(1.0, max(phat, center + half))


@dataclass(frozen=True)
class Estimate:
    trials: int
    successes: int
    point: float = field(init=False)
    wilson95: tuple[float, float] = field(init=False)

    def __post_init__(self):
        if self.trials < 1 or not 0 <= self.successes <= self.trials:
            raise DomainError(f"invalid counts: {self.successes}/{self.trials}")
        object.__setattr__(self, "point", self.successes / self.trials)
        object.__setattr__(self, "wilson95", wilson_interval(self.successes, self.trials))

    def contains(self, value: float) -> bool:
        lo, hi = self.wilson95
        return lo <= value <= hi

    def merge(self, other: "Estimate") -> "Estimate":
        return Estimate(self.trials + other.trials, self.successes + other.successes)


def _seeds(seed_base: int, lo: int, hi: int) -> np.ndarray:
    return np.array([(seed_base + t) & MASK64 for t in range(lo, hi)], dtype=np.uint64)


# -- probe events -----------------------------------------------------------

def _event_chunk(kind, L, p, j, seed_base, lo, hi) -> int:
    seeds = _seeds(seed_base, lo, hi)
    cut = np.uint64(threshold(p))
    ok = np.ones(seeds.size, dtype=bool)
    for e in patterns.probe_elements(kind, L, j):
        ok &= hash_seeds(seeds, e) <= cut
    return int(ok.sum())


def estimate_event_prob(kind, L: int, p: float, j_count: int, seed_base: int = DEFAULT_SEED,
                        j: Optional[int] = None, workers: int = 1) -> Estimate:
    """Estimate P(E_j): trial t draws model(p, seed_base + t) and tests probe ``j``.

    ``j`` defaults to the first probe of the family; the event probability
    p**R does not depend on it.
    """
    if j_count < 1:
        raise DomainError(f"need at least one trial, got {j_count}")
    validate_p(p)
    kind = Kind(kind)
    j = patterns.first_probe_index(kind) if j is None else j
    list(patterns.probe_elements(kind, L, j))  # validates L and j up front
    counts = map_chunks(partial(_event_chunk, kind, L, p, j, seed_base), j_count, workers)
    return Estimate(j_count, sum(counts))


# -- quadruple moments ------------------------------------------------------

@dataclass(frozen=True)
class QuadrupleExpectation:
    N: int
    p: Fraction
    exact: Fraction
    idealized: Fraction

    @property
    def difference(self) -> Fraction:
        return self.exact - self.idealized


def expected_quadruples_exact(N: int, p) -> QuadrupleExpectation:
    """E[X_N] summing p**d(x, y), d the number of distinct values in {x, y, x+y, xy}."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    q = as_fraction(p)
    validate_p(q)
    counts = {2: 0, 3: 0, 4: 0}
    for x in range(1, N + 1):
        for y in range(1, N + 1):
            counts[distinct_count(x, y)] += 1
    exact = sum(c * q**d for d, c in counts.items())
    return QuadrupleExpectation(N, q, exact, q**4 * N * N)


@dataclass(frozen=True)
class SecondMomentReport:
    N: int
    p: Fraction
    universe: int
    exact_EX: Fraction
    leading_EX: Fraction
    exact_EX2: Fraction
    exact_PX_pos: Fraction
    mc_PX_pos: Optional[Estimate] = None

    @property
    def variance(self) -> Fraction:
        return self.exact_EX2 - self.exact_EX**2

    @property
    def pz_lower_bound(self) -> Fraction:
        return self.exact_EX**2 / self.exact_EX2

    @property
    def pz_holds(self) -> bool:
        return self.pz_lower_bound <= self.exact_PX_pos


def quadruple_masks(N: int) -> list[int]:
    """Bitmask (bit e-1 for element e) of each ordered pair's distinct-element set."""
    out = []
    for x in range(1, N + 1):
        for y in range(1, N + 1):
            m = 0
            for e in {x, y, x + y, x * y}:
                m |= 1 << (e - 1)
            out.append(m)
    return out


def exact_small_universe(N: int, p, mc_trials: int = 0, seed_base: int = DEFAULT_SEED) -> SecondMomentReport:
    """Exact moments of X_N by enumerating every subset of [1..max(2N, N^2)]."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    U = quadruple_bound(N)
    if U > MAX_UNIVERSE_BITS:
        raise SizeError(f"universe [1..{U}] has 2^{U} subsets, over the 2^{MAX_UNIVERSE_BITS} cap; "
                        f"use estimate_PX_pos (Monte Carlo) instead")
    q = as_fraction(p)
    validate_p(q)
    subsets = np.arange(1 << U, dtype=np.uint32)
    X = np.zeros(subsets.size, dtype=np.int64)
    for m in quadruple_masks(N):
        mm = np.uint32(m)
        X += (subsets & mm) == mm
    sizes = np.bitwise_count(subsets).astype(np.int64)
    keys, counts = np.unique(sizes * (N * N + 1) + X, return_counts=True)
    ex = ex2 = pos = Fraction(0)
    for key, c in zip(keys.tolist(), counts.tolist()):
        size, x = divmod(key, N * N + 1)
        w = c * q**size * (1 - q) ** (U - size)
        ex += w * x
        ex2 += w * x * x
        if x > 0:
            pos += w
    mc = estimate_PX_pos(N, float(q), mc_trials, seed_base) if mc_trials else None
    return SecondMomentReport(N, q, U, ex, q**4 * N * N, ex2, pos, mc)


def _quadruple_chunk(N, p, seed_base, lo, hi) -> np.ndarray:
    U = quadruple_bound(N)
    m = member_matrix(p, _seeds(seed_base, lo, hi), U)
    x = np.arange(1, N + 1)
    X, Y = x[:, None], x[None, :]
    grid = m[:, X] & m[:, Y] & m[:, X + Y] & m[:, X * Y]
    return grid.reshape(hi - lo, -1).sum(axis=1)


def quadruple_counts(N: int, p: float, trials: int, seed_base: int = DEFAULT_SEED,
                     workers: int = 1) -> np.ndarray:
    """X_N for each of ``trials`` independent models (seed_base + t)."""
    if trials < 1:
        raise DomainError(f"need at least one trial, got {trials}")
    validate_p(p)
    U = quadruple_bound(N)
    check_budget((U + 7) // 8, f"dense sample over [1..{U}]")
    chunk = max(1, (1 << 22) // max(U, N * N))
    parts = map_chunks(partial(_quadruple_chunk, N, p, seed_base), trials, workers, chunk)
    return np.concatenate(parts)


def estimate_PX_pos(N: int, p: float, trials: int, seed_base: int = DEFAULT_SEED,
                    workers: int = 1) -> Estimate:
    counts = quadruple_counts(N, p, trials, seed_base, workers)
    return Estimate(trials, int((counts > 0).sum()))


# -- threshold sweep --------------------------------------------------------

@dataclass(frozen=True)
class ThresholdResult:
    L: int
    N: int
    target: float
    lo: float
    hi: float
    lo_estimate: Estimate
    hi_estimate: Estimate
    evaluations: tuple[tuple[float, Estimate], ...]
    widened: bool
    coupling_violations: int

    @property
    def estimate(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> float:
        return self.hi - self.lo


class _CoupledSweep:
    """Success indicators for a fixed set of trials at any p (common random numbers)."""

    def __init__(self, L: int, N: int, trials: int, seed_base: int):
        check_budget(trials * N * 8, f"hash table for {trials} trials over [1..{N}]")
        self.L, self.N = L, N
        self.hashes = hash_grid(_seeds(seed_base, 0, trials), np.arange(1, N + 1, dtype=np.uint64))
        self.cache: dict[float, np.ndarray] = {}

    def successes(self, p: float) -> np.ndarray:
        if p not in self.cache:
            member = self.hashes <= np.uint64(threshold(p))
            out = np.zeros(member.shape[0], dtype=bool)
            mask = np.zeros(self.N + 1, dtype=bool)
            for t, row in enumerate(member):
                if row.sum() < self.L:
                    continue
                mask[1:] = row
                out[t] = _fs_search(mask, self.L, self.N) is not None
            self.cache[p] = out
        return self.cache[p]

    def estimate(self, p: float) -> Estimate:
        s = self.successes(p)
        return Estimate(s.size, int(s.sum()))


def threshold_sweep(L: int, N: int, target: float = 0.5, trials_per_p: int = 400,
                    seed_base: int = DEFAULT_SEED, tol: float = 0.01,
                    bracket: tuple[float, float] = (0.001, 0.5), eps: float = 1e-6) -> ThresholdResult:
    """Bisect for the p at which an FS witness of length L appears in [1..N] w.p. ``target``."""
    if not 1 <= L <= 4:
        raise DomainError(f"threshold sweeps support 1 <= L <= 4, got {L}")
    if N < 1 or trials_per_p < 1 or not 0 < target < 1 or tol <= 0:
        raise DomainError("need N >= 1, trials_per_p >= 1, 0 < target < 1 and tol > 0")
    sweep = _CoupledSweep(L, N, trials_per_p, seed_base)
    lo, hi = bracket
    widened = False
    if not (0 < lo < hi < 1) or sweep.estimate(lo).point >= target or sweep.estimate(hi).point < target:
        lo, hi, widened = eps, 1 - eps, True
        if sweep.estimate(lo).point >= target or sweep.estimate(hi).point < target:
            raise DomainError(f"success rate does not cross {target} on ({eps}, {1 - eps}); "
                              f"N={N} may be too small for L={L}")
    while hi - lo >= tol:
        mid = (lo + hi) / 2
        if sweep.estimate(mid).point >= target:
            hi = mid
        else:
            lo = mid
    evaluated = sorted(sweep.cache)
    violations = sum(int((sweep.cache[a] & ~sweep.cache[b]).sum()) for a, b in zip(evaluated, evaluated[1:]))
    return ThresholdResult(
        L, N, target, lo, hi, sweep.estimate(lo), sweep.estimate(hi),
        tuple((p, sweep.estimate(p)) for p in evaluated), widened, violations,
    )
