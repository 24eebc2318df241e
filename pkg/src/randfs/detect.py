"""Pattern search in samples of the random set."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .model import DenseSample, SubsetModel
from .patterns import (
    Kind,
    PatternInstance,
    PRIMES,
    probe,
    probe_bits,
    probe_elements,
    probe_size,
)

DEFAULT_PROBE_BITS = 1 << 22
MAX_FS_SEARCH_L = 6


@dataclass(frozen=True)
class ProbeHitReport:
    kind: Kind
    L: int
    j_start: int
    j_stop: int
    hits: tuple[int, ...]
    R: int
    # first j whose probe exceeded the big-integer budget, None if the range completed
    truncated_at: Optional[int] = None

    @property
    def tested(self) -> int:
        end = self.j_stop if self.truncated_at is None else self.truncated_at
        return end - self.j_start

    @property
    def frequency(self) -> float:
        return len(self.hits) / self.tested if self.tested else float("nan")


@dataclass(frozen=True)
class QuadrupleCount:
    N: int
    count: int
    witnesses: tuple[tuple[int, int], ...] = field(default=())


@dataclass(frozen=True)
class MinElementResult:
    probe: Optional[PatternInstance]
    attempts: int
    start_j: int


def probe_hit(model: SubsetModel, kind, L: int, j: int) -> bool:
    """Whether every element of probe ``j`` lies in the model (short-circuits on a miss)."""
    return all(model.contains(e) for e in probe_elements(kind, L, j))


def probe_hits(model: SubsetModel, kind, L: int, j_range: range,
               max_bits: int = DEFAULT_PROBE_BITS) -> ProbeHitReport:
    kind = Kind(kind)
    R = probe_size(kind, L)
    if j_range.step != 1:
        raise DomainError("j_range must be a contiguous range")
    hits = []
    truncated = None
    for j in j_range:
        if probe_bits(kind, L, j) > max_bits:
            truncated = j
            break
        if probe_hit(model, kind, L, j):
            hits.append(j)
    return ProbeHitReport(kind, L, j_range.start, j_range.stop, tuple(hits), R, truncated)


def disjoint_probe_count(model: SubsetModel, kind, L: int, j_range: range,
                         max_bits: int = DEFAULT_PROBE_BITS) -> int:
    return len(probe_hits(model, kind, L, j_range, max_bits).hits)


def disjointness_audit(report: ProbeHitReport) -> bool:
    """True iff the element sets of all hit probes are pairwise disjoint."""
    seen: set[int] = set()
    total = 0
    for j in report.hits:
        elems = list(probe_elements(report.kind, report.L, j))
        seen.update(elems)
        total += len(elems)
    return len(seen) == total


def verify_hits(model: SubsetModel, report: ProbeHitReport) -> bool:
    return all(probe_hit(model, report.kind, report.L, j) for j in report.hits)


def first_index_with_min_above(kind, L: int, M: int) -> int:
    """Smallest probe index whose least element exceeds ``M``."""
    kind = Kind(kind)
    if kind is Kind.FS_PROBE:
        # least element is 2**(L*j)
        return _fs_first(L, M)
    return PRIMES.first_index_above(M)


def _fs_first(L: int, M: int) -> int:
    j = max(0, (M.bit_length() - 1) // L)
    while (1 << (L * j)) <= M:
        j += 1
    return j


def default_attempt_cap(p: float, R: int) -> int:
    return math.ceil(50 / p**R)


def min_element_probe(model: SubsetModel, kind, L: int, M: int,
                      max_attempts: Optional[int] = None) -> MinElementResult:
    """First hit probe, scanning upward, all of whose elements exceed ``M``."""
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    kind = Kind(kind)
    R = probe_size(kind, L)
    cap = default_attempt_cap(model.p, R) if max_attempts is None else max_attempts
    start = first_index_with_min_above(kind, L, M)
    for attempt in range(1, cap + 1):
        j = start + attempt - 1
        if probe_hit(model, kind, L, j):
            return MinElementResult(probe(kind, L, j), attempt, start)
    return MinElementResult(None, cap, start)


# -- dense searches ---------------------------------------------------------

def _fs_search(mask: np.ndarray, L: int, bound: int) -> Optional[tuple[int, ...]]:
    """Lexicographically least x_1 < ... < x_L <= bound with FS(x) inside ``mask``.

    ``mask`` is boolean and indexed by integer (entry 0 unused).  Candidates for
    the next generator are found by AND-ing shifted copies of the mask, one per
    subset sum already formed, so every sum involving the new element is checked
    at once.
    """
    N = mask.size - 1

    def extend(start: int, sums: np.ndarray, chosen: tuple[int, ...]):
        if len(chosen) == L:
            return chosen
        remaining = L - len(chosen)
        top = int(sums[-1])
        # the remaining generators exceed x, so the final total is at least
        # top + x + (x+1) + ... ; require that to fit under N
        hi = min(bound, (N - top - remaining * (remaining - 1) // 2) // remaining)
        if hi < start:
            return None
        cand = mask[start:hi + 1].copy()
        for s in sums[1:]:
            cand &= mask[start + s:hi + s + 1]
            if not cand.any():
                return None
        for off in np.flatnonzero(cand):
            x = start + int(off)
            grown = np.union1d(sums, sums + x)
            found = extend(x + 1, grown, chosen + (x,))
            if found is not None:
                return found
        return None

    return extend(1, np.zeros(1, dtype=np.int64), ())


def find_fs(sample: DenseSample, L: int, search_bound: Optional[int] = None) -> Optional[tuple[int, ...]]:
    """Least increasing L-tuple (elements <= search_bound) whose finite sumset lies in ``sample``."""
    if not 1 <= L <= MAX_FS_SEARCH_L:
        raise DomainError(f"exhaustive FS search supports 1 <= L <= {MAX_FS_SEARCH_L}, got {L}")
    bound = sample.bound if search_bound is None else search_bound
    if bound > sample.bound:
        raise DomainError(f"search bound {bound} exceeds sample bound {sample.bound}")
    return _fs_search(sample.mask, L, bound)


def quadruple_bound(N: int) -> int:
    """Smallest sample bound making every I_{x,y}, 1 <= x,y <= N, well defined."""
    return max(2 * N, N * N)


def _quadruple_grid(mask: np.ndarray, N: int) -> np.ndarray:
    x = np.arange(1, N + 1)
    X, Y = x[:, None], x[None, :]
    return mask[X] & mask[Y] & mask[X + Y] & mask[X * Y]


def count_quadruples(sample: DenseSample, N: int, witness_cap: int = 100) -> QuadrupleCount:
    """X_N: ordered pairs (x, y) in [1..N]^2 whose {x, y, x+y, xy} lies in the sample."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    need = quadruple_bound(N)
    if sample.bound < need:
        raise DomainError(f"counting quadruples up to N={N} needs sample bound >= max(2N, N^2) = {need}, "
                          f"got {sample.bound}")
    grid = _quadruple_grid(sample.mask, N)
    xs, ys = np.nonzero(grid)
    witnesses = tuple((int(a) + 1, int(b) + 1) for a, b in zip(xs[:witness_cap], ys[:witness_cap]))
    return QuadrupleCount(N, int(grid.sum()), witnesses)
