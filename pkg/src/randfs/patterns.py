"""Finite sum/product sets and the explicit probe families.

All values are exact Python integers; nothing here touches randomness.
"""
from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DomainError, ResourceError, SizeError

MAX_GENERATORS = 20
FS_MAX_L = 20
FP_MAX_L = 12
EXP_MAX_BITS = 16384


class Kind(str, enum.Enum):
    FS_PROBE = "fs"
    FP_PROBE = "fp"
    QUADRUPLE = "quadruple"
    EXP_QUADRUPLE = "exp"


@dataclass(frozen=True)
class PatternInstance:
    kind: Kind
    generators: tuple[int, ...]
    elements: tuple[int, ...]

    def __len__(self):
        return len(self.elements)

    @property
    def min_element(self) -> int:
        return self.elements[0]


# -- primes -----------------------------------------------------------------

def _incremental_sieve() -> Iterator[int]:
    # Sieve of Eratosthenes with a dict of upcoming composites
    yield 2
    composites: dict[int, int] = {}
    n = 3
    while True:
        step = composites.pop(n, None)
        if step is None:
            composites[n * n] = 2 * n
            yield n
        else:
            m = n + step
            while m in composites:
                m += step
            composites[m] = step
        n += 2


class _PrimeTable:
    def __init__(self):
        self._gen = _incremental_sieve()
        self.primes: list[int] = []

    def nth(self, j: int) -> int:
        """The j-th prime, 1-based (nth(1) == 2)."""
        if j < 1:
            raise DomainError(f"prime index must be >= 1, got {j}")
        while len(self.primes) < j:
            self.primes.append(next(self._gen))
        return self.primes[j - 1]

    def first_index_above(self, M: int) -> int:
        """Smallest j with nth(j) > M."""
        while not self.primes or self.primes[-1] <= M:
            self.nth(len(self.primes) + 1)
        return bisect.bisect_right(self.primes, M) + 1


PRIMES = _PrimeTable()


def nth_prime(j: int) -> int:
    return PRIMES.nth(j)


# -- finite sumsets / product sets ------------------------------------------

def _check_generators(xs: Sequence[int]) -> None:
    if len(xs) == 0:
        raise DomainError("need at least one generator")
    if len(xs) > MAX_GENERATORS:
        raise SizeError(f"at most {MAX_GENERATORS} generators can be enumerated, got {len(xs)}")
    if any(x < 1 for x in xs):
        raise DomainError("generators must be positive integers")
    if len(set(xs)) != len(xs):
        raise DomainError("generators must be distinct")


def fs(xs: Sequence[int]) -> set[int]:
    """All nonempty subset sums of ``xs``."""
    _check_generators(xs)
    sums = {0}
    for x in xs:
        sums |= {s + x for s in sums}
    sums.discard(0)
    return sums


def fp(xs: Sequence[int]) -> set[int]:
    """All nonempty subset products of ``xs``."""
    _check_generators(xs)
    prods: set[int] = set()
    for x in xs:
        prods |= {q * x for q in prods} | {x}
    return prods


# -- probes -----------------------------------------------------------------

def _check_L(L: int, cap: int) -> None:
    if not 1 <= L <= cap:
        raise DomainError(f"L must lie in [1, {cap}], got {L}")


def probe_size(kind: Kind | str, L: int) -> int:
    """Number of elements of one FS or FP probe (2**L - 1 in both cases)."""
    kind = Kind(kind)
    if kind not in (Kind.FS_PROBE, Kind.FP_PROBE):
        raise DomainError(f"{kind} is not a probe family")
    return 2**L - 1


def first_probe_index(kind: Kind | str) -> int:
    return 0 if Kind(kind) is Kind.FS_PROBE else 1


def probe_elements(kind: Kind | str, L: int, j: int) -> Iterator[int]:
    """Yield the elements of probe ``j`` in increasing order without building a set."""
    kind = Kind(kind)
    R = 2**L - 1
    if kind is Kind.FS_PROBE:
        _check_L(L, FS_MAX_L)
        if j < 0:
            raise DomainError(f"FS probe index must be >= 0, got {j}")
        shift = L * j  # (R+1)**j == 2**(L*j)
        for s in range(1, R + 1):
            yield s << shift
    elif kind is Kind.FP_PROBE:
        _check_L(L, FP_MAX_L)
        if j < 1:
            raise DomainError(f"FP probe index must be >= 1, got {j}")
        q = nth_prime(j)
        value = 1
        for _ in range(R):
            value *= q
            yield value
    else:
        raise DomainError(f"{kind} is not a probe family")


def probe_bits(kind: Kind | str, L: int, j: int) -> int:
    """Bit length of the largest element of probe ``j``."""
    kind = Kind(kind)
    if kind is Kind.FS_PROBE:
        return L * j + L
    return (2**L - 1) * nth_prime(j).bit_length()


def fs_probe(L: int, j: int) -> PatternInstance:
    """Dilated binary block: generators 2**(L*j) * (1, 2, ..., 2**(L-1))."""
    _check_L(L, FS_MAX_L)
    if j < 0:
        raise DomainError(f"FS probe index must be >= 0, got {j}")
    gens = tuple(1 << (L * j + i) for i in range(L))
    return PatternInstance(Kind.FS_PROBE, gens, tuple(probe_elements(Kind.FS_PROBE, L, j)))


def fp_probe(L: int, j: int) -> PatternInstance:
    """Prime-power block: generators q**(2**(i-1)) for the j-th prime q."""
    _check_L(L, FP_MAX_L)
    if j < 1:
        raise DomainError(f"FP probe index must be >= 1, got {j}")
    q = nth_prime(j)
    gens = tuple(q ** (2**i) for i in range(L))
    return PatternInstance(Kind.FP_PROBE, gens, tuple(probe_elements(Kind.FP_PROBE, L, j)))


def probe(kind: Kind | str, L: int, j: int) -> PatternInstance:
    kind = Kind(kind)
    if kind is Kind.FS_PROBE:
        return fs_probe(L, j)
    if kind is Kind.FP_PROBE:
        return fp_probe(L, j)
    raise DomainError(f"{kind} is not a probe family")


def exp_bases(j: int) -> tuple[int, int]:
    """(u_j, v_j): odd primes split alternately, u from even slots, v from odd slots."""
    if j < 1:
        raise DomainError(f"index must be >= 1, got {j}")
    # odd primes are primes 2, 3, 4, ... in 1-based prime numbering
    return nth_prime(2 * j), nth_prime(2 * j + 1)


def exp_probe(j: int, max_bits: int = EXP_MAX_BITS) -> PatternInstance:
    """The pattern {u, v, u*v, u**v} built from the j-th base pair."""
    u, v = exp_bases(j)
    bits = v * u.bit_length()
    if bits > max_bits:
        raise ResourceError(f"u**v = {u}**{v} needs up to {bits} bits, budget is {max_bits}")
    elements = tuple(sorted({u, v, u * v, u**v}))
    return PatternInstance(Kind.EXP_QUADRUPLE, (u, v), elements)


def quadruple_set(x: int, y: int) -> tuple[int, ...]:
    return tuple(sorted({x, y, x + y, x * y}))


def quadruple(x: int, y: int) -> PatternInstance:
    if x < 1 or y < 1:
        raise DomainError(f"x and y must be positive, got ({x}, {y})")
    return PatternInstance(Kind.QUADRUPLE, (x, y), quadruple_set(x, y))


def distinct_count(x: int, y: int) -> int:
    """Number of distinct values among x, y, x+y, x*y."""
    return len({x, y, x + y, x * y})

