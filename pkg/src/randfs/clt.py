"""Normalized Bernoulli-weighted sums over a Hindman-type sequence.

Every normalized quantity here is invariant under multiplying all weights by a
positive constant, so sums are formed after dividing by the largest weight.
This keeps doubly-exponential families finite in float64.  Diagnostics are
computed exactly with rationals.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Optional, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DomainError, SizeError
from .model import MASK64, hash_grid, threshold, validate_p
from .parallel import map_chunks
from .patterns import fs
from .stats import as_fraction

FAMILIES = ("linear", "doubly-exponential")
DOM_LABEL = 0.95
TRIM_LABEL = 0.05


def family(name: str, k: int) -> tuple[int, ...]:
    """First ``k`` terms of a named weight family (1-based index j)."""
    if name == "linear":
        return tuple(range(1, k + 1))
    if name == "doubly-exponential":
        return tuple(1 << (1 << j) for j in range(1, k + 1))
    raise DomainError(f"unknown family {name!r}; choose from {FAMILIES}")


@dataclass(frozen=True)
class CltConfig:
    ys: tuple
    p: float
    k: int
    M: int
    seed: int = 0
    # 1-based positions n_j of the ys inside the parent sequence; None means n_j = j
    indices: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        validate_p(self.p)
        if self.k < 1 or self.k > len(self.ys):
            raise DomainError(f"k={self.k} must lie in [1, {len(self.ys)}]")
        if any(y <= 0 for y in self.ys):
            raise DomainError("weights must be positive")
        if self.M < 1:
            raise DomainError(f"M must be >= 1, got {self.M}")
        if self.indices is not None:
            if len(self.indices) < self.k or len(set(self.indices[: self.k])) != self.k:
                raise DomainError("indices must give k distinct parent positions")

    @classmethod
    def from_family(cls, name: str, k: int, p: float, M: int, seed: int = 0) -> "CltConfig":
        return cls(family(name, k), p, k, M, seed)

    @classmethod
    def from_hindman(cls, seq, p: float, M: int, seed: int = 0,
                     indices: Optional[Sequence[int]] = None) -> "CltConfig":
        """Use a monochromatic FS witness (or any parent list) as the weight sequence."""
        x = tuple(seq.x) if hasattr(seq, "x") else tuple(seq)
        if not x:
            raise DomainError("empty Hindman sequence")
        if indices is None:
            return cls(x, p, len(x), M, seed)
        idx = tuple(indices)
        return cls(tuple(x[i - 1] for i in idx), p, len(idx), M, seed, idx)

    @property
    def positions(self) -> np.ndarray:
        idx = range(1, self.k + 1) if self.indices is None else self.indices[: self.k]
        return np.asarray(idx, dtype=np.uint64)


def _exact(y) -> Fraction:
    return Fraction(y)


def _ratio(a: Fraction, b: Fraction) -> float:
    if b == 0:
        return float("inf")
    try:
        return float(a / b)
    except OverflowError:
        return float("inf")


def argmax_index(ys: Sequence, k: int) -> int:
    """0-based index of the largest of ys[:k]; ties go to the smallest index."""
    best = 0
    for j in range(1, k):
        if ys[j] > ys[best]:
            best = j
    return best


@dataclass(frozen=True)
class RegimeDiagnostics:
    k: int
    j_k: int  # 1-based
    sigma2: Fraction
    R_k: Fraction
    y_max2: Fraction
    ratio_dom: float
    ratio_maxres: float
    ratio_reinsert: float

    @property
    def dominated(self) -> bool:
        return self.ratio_dom > DOM_LABEL

    @property
    def trimmed_clt(self) -> bool:
        return self.ratio_maxres < TRIM_LABEL

    def as_dict(self) -> dict:
        return {
            "k": self.k, "j_k": self.j_k,
            "ratio_dom": self.ratio_dom, "ratio_maxres": self.ratio_maxres,
            "ratio_reinsert": self.ratio_reinsert,
            "label_dominated": self.dominated, "label_trimmed_clt": self.trimmed_clt,
        }


def diagnostics(ys: Sequence, k: int, p) -> RegimeDiagnostics:
    if k < 2:
        raise DomainError(f"diagnostics need k >= 2, got {k}")
    if k > len(ys):
        raise DomainError(f"k={k} exceeds the {len(ys)} available weights")
    q = as_fraction(p)
    validate_p(q)
    exact = [_exact(y) for y in ys[:k]]
    jk = argmax_index(exact, k)
    sq = [y * y for y in exact]
    top = sq[jk]
    rest = [s for j, s in enumerate(sq) if j != jk]
    R = sum(rest)
    return RegimeDiagnostics(
        k=k, j_k=jk + 1, sigma2=q * (1 - q) * (top + R), R_k=R, y_max2=top,
        ratio_dom=_ratio(top, top + R),
        ratio_maxres=_ratio(max(rest), R),
        ratio_reinsert=_ratio(top, R),
    )


def lindeberg_sum(ys: Sequence, k: int, p, delta: float) -> float:
    """Exact Lindeberg functional of the trimmed, centred array at level ``delta``.

    Summand j takes (1-p) y_j w.p. p and -p y_j w.p. 1-p; the functional is
    sum_j E[Z_j^2 ; |Z_j| > delta * sigma_trim] / sigma_trim^2.
    """
    q = as_fraction(p)
    d = diagnostics(ys, k, q)
    exact = [_exact(y) for y in ys[:k]]
    var = q * (1 - q) * d.R_k
    level2 = Fraction(delta) ** 2 * var
    total = Fraction(0)
    for j, y in enumerate(exact):
        if j == d.j_k - 1:
            continue
        for value, prob in (((1 - q) * y, q), (-q * y, 1 - q)):
            if value * value > level2:
                total += prob * value * value
    return _ratio(total, var)


def scaled_weights(ys: Sequence, k: int, skip: Optional[int] = None) -> np.ndarray:
    """ys[:k] (minus index ``skip``) divided exactly by their maximum, as float64."""
    exact = [_exact(y) for j, y in enumerate(ys[:k]) if j != skip]
    top = max(exact)
    return np.array([float(y / top) for y in exact])


@dataclass(frozen=True)
class EmpiricalLaw:
    values: np.ndarray  # sorted ascending
    normalization: str  # FULL, TRIMMED or FULL_BY_TRIM

    def __len__(self):
        return self.values.size

    @classmethod
    def of(cls, values, normalization: str) -> "EmpiricalLaw":
        v = np.sort(np.asarray(values, dtype=float))
        v.flags.writeable = False
        return cls(v, normalization)


@dataclass(frozen=True)
class CltRun:
    config: CltConfig
    full: EmpiricalLaw
    trimmed: Optional[EmpiricalLaw]
    diagnostics: Optional[RegimeDiagnostics]


def _eps_chunk(config: CltConfig, lo: int, hi: int) -> np.ndarray:
    seeds = np.array([(config.seed + r) & MASK64 for r in range(lo, hi)], dtype=np.uint64)
    return hash_grid(seeds, config.positions) <= np.uint64(threshold(config.p))


def draw_eps(config: CltConfig, workers: int = 1) -> np.ndarray:
    """Bernoulli(p) matrix (M, k): eps[r, j] = [n_j in model(p, seed + r)]."""
    chunk = max(1, (1 << 21) // config.k)
    return np.concatenate(map_chunks(partial(_eps_chunk, config), config.M, workers, chunk))


def _normalized(eps: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    centred = eps @ w - p * w.sum()
    return centred / np.sqrt(p * (1 - p) * np.dot(w, w))


def _laws(config: CltConfig, eps: np.ndarray):
    """FULL, TRIMMED and FULL_BY_TRIM normalized values (unsorted, row-aligned)."""
    p, k = config.p, config.k
    full = _normalized(eps, scaled_weights(config.ys, k), p)
    if k == 1:
        return full, None, None
    jk = argmax_index([_exact(y) for y in config.ys], k)
    keep = np.arange(k) != jk
    trimmed = _normalized(eps[:, keep], scaled_weights(config.ys, k, skip=jk), p)
    # (S - mu)/sigma_trim = trimmed + (eps_jk - p) * y_jk / sigma_trim
    exact = [_exact(y) for y in config.ys[:k]]
    R = sum(y * y for j, y in enumerate(exact) if j != jk)
    lead = _ratio(exact[jk] ** 2, R) ** 0.5 / np.sqrt(p * (1 - p))
    by_trim = trimmed + (eps[:, jk] - p) * lead
    return full, trimmed, by_trim


def simulate(config: CltConfig, trim: bool = True, workers: int = 1) -> CltRun:
    if trim and config.k == 1:
        raise DomainError("trimming needs k >= 2 (the trimmed sum would be empty)")
    eps = draw_eps(config, workers)
    full, trimmed, _ = _laws(config, eps)
    diag = diagnostics(config.ys, config.k, config.p) if config.k >= 2 else None
    return CltRun(
        config,
        EmpiricalLaw.of(full, "FULL"),
        EmpiricalLaw.of(trimmed, "TRIMMED") if trim else None,
        diag,
    )


def ks_to_normal(law: EmpiricalLaw) -> float:
    """sup_x |F_M(x) - Phi(x)|, checking both sides of every jump."""
    x = law.values
    M = x.size
    if M == 0:
        raise DomainError("empty law")
    cdf = ndtr(x)
    i = np.arange(1, M + 1)
    return float(max(np.max(i / M - cdf), np.max(cdf - (i - 1) / M)))


def ks_two_sample(a: EmpiricalLaw, b: EmpiricalLaw) -> float:
    xa, xb = a.values, b.values
    if xa.size == 0 or xb.size == 0:
        raise DomainError("empty law")
    pts = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, pts, side="right") / xa.size
    fb = np.searchsorted(xb, pts, side="right") / xb.size
    return float(np.max(np.abs(fa - fb)))


def two_point_atoms(p: float) -> tuple[float, float]:
    s = np.sqrt(p * (1 - p))
    return (1 - p) / s, -p / s


@dataclass(frozen=True)
class TwoPointFit:
    mass_near_upper: float
    mass_near_lower: float
    escaped_mass: float


def two_point_fit(law: EmpiricalLaw, p: float, atom_tolerance: float = 0.05) -> TwoPointFit:
    if atom_tolerance <= 0:
        raise DomainError("atom tolerance must be positive")
    up, low = two_point_atoms(p)
    x = law.values
    near_up = np.abs(x - up) <= atom_tolerance
    near_low = np.abs(x - low) <= atom_tolerance
    M = x.size
    upper, lower = near_up.sum() / M, near_low.sum() / M
    return TwoPointFit(float(upper), float(lower), float(1 - (near_up | near_low).sum() / M))


@dataclass(frozen=True)
class ReinsertionResult:
    distance: float
    ratio_reinsert: float


def reinsertion_check(config: CltConfig, workers: int = 1) -> ReinsertionResult:
    """KS distance between (S - mu)/sigma_trim and the trimmed law, same eps draws."""
    if config.k < 2:
        raise DomainError("reinsertion needs k >= 2")
    eps = draw_eps(config, workers)
    _, trimmed, by_trim = _laws(config, eps)
    d = ks_two_sample(EmpiricalLaw.of(by_trim, "FULL_BY_TRIM"), EmpiricalLaw.of(trimmed, "TRIMMED"))
    return ReinsertionResult(d, diagnostics(config.ys, config.k, config.p).ratio_reinsert)


@dataclass(frozen=True)
class AtomsReport:
    k: int
    patterns_checked: int
    violations: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def atoms_in_fs_check(x: Sequence[int], indices: Sequence[int]) -> AtomsReport:
    """Check every realized sum over nonempty eps-patterns of ys = x[indices] lies in FS(x).

    ``indices`` are 1-based positions into the parent ``x``.
    """
    if len(x) > 20:
        raise SizeError(f"parent sequence limited to 20 entries, got {len(x)}")
    k = len(indices)
    if not 1 <= k <= 12:
        raise SizeError(f"k must lie in [1, 12], got {k}")
    if len(set(indices)) != k or any(not 1 <= i <= len(x) for i in indices):
        raise DomainError("indices must be distinct positions inside the parent sequence")
    ys = [x[i - 1] for i in indices]
    parent = fs(list(x))
    bad = []
    checked = 0
    for pattern in itertools.product((0, 1), repeat=k):
        if not any(pattern):
            continue
        checked += 1
        total = sum(y for e, y in zip(pattern, ys) if e)
        if total not in parent:
            bad.append(total)
    return AtomsReport(k, checked, tuple(bad))
