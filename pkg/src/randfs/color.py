"""Finite colorings of [1..N]: monochromatic FS witnesses and Hindman quadruples."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .detect import _fs_search, MAX_FS_SEARCH_L
from .errors import DomainError
from .model import MASK64, hash_grid

COLOR_TAG = 0x636F6C6F72696E67  # separates the coloring stream from subset membership
DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"
MAX_SCAN_N = 30


@dataclass(frozen=True, eq=False)
class Coloring:
    N: int
    c: int
    colors: np.ndarray  # colors[n - 1] is the color of n

    def __post_init__(self):
        if self.c < 2:
            raise DomainError(f"need at least two colors, got {self.c}")
        if self.colors.shape != (self.N,):
            raise DomainError(f"expected {self.N} colors, got shape {self.colors.shape}")
        if self.N and (self.colors.min() < 0 or self.colors.max() >= self.c):
            raise DomainError(f"colors must lie in [0, {self.c})")

    @classmethod
    def from_list(cls, colors, c: Optional[int] = None) -> "Coloring":
        arr = np.asarray(colors, dtype=np.int64)
        return cls(arr.size, c if c is not None else max(2, int(arr.max()) + 1), arr)

    def __getitem__(self, n: int) -> int:
        return int(self.colors[n - 1])

    def __eq__(self, other):
        if not isinstance(other, Coloring):
            return NotImplemented
        return self.N == other.N and self.c == other.c and np.array_equal(self.colors, other.colors)

    def class_mask(self, color: int) -> np.ndarray:
        mask = np.zeros(self.N + 1, dtype=bool)
        mask[1:] = self.colors == color
        return mask

    def to_line(self) -> str:
        if self.c > len(DIGITS):
            raise DomainError(f"line format supports at most {len(DIGITS)} colors")
        return "".join(DIGITS[v] for v in self.colors.tolist())

    @classmethod
    def from_line(cls, line: str, c: int) -> "Coloring":
        try:
            values = [DIGITS.index(ch) for ch in line.strip()]
        except ValueError:
            raise DomainError(f"unexpected character in coloring line {line!r}")
        return cls(len(values), c, np.array(values, dtype=np.int64))


def random_coloring(N: int, c: int, seed: int) -> Coloring:
    """Each n in [1..N] gets an independent uniform color from the hash stream."""
    if N < 1 or c < 2:
        raise DomainError(f"need N >= 1 and c >= 2, got N={N}, c={c}")
    if c > 1 << 32:
        raise DomainError("at most 2**32 colors")
    h = hash_grid(np.array((seed ^ COLOR_TAG) & MASK64, dtype=np.uint64), np.arange(1, N + 1, dtype=np.uint64))
    colors = ((h >> np.uint64(32)) * np.uint64(c)) >> np.uint64(32)
    return Coloring(N, c, colors.astype(np.int64))


def find_mono_fs(coloring: Coloring, L: int) -> Optional[tuple[tuple[int, ...], int]]:
    """Least increasing L-tuple whose whole finite sumset is one color and inside [1..N]."""
    if not 1 <= L <= MAX_FS_SEARCH_L:
        raise DomainError(f"L must lie in [1, {MAX_FS_SEARCH_L}], got {L}")
    best = None
    for color in range(coloring.c):
        w = _fs_search(coloring.class_mask(color), L, coloring.N)
        if w is not None and (best is None or w < best[0]):
            best = (w, color)
    return best


def _is_strict(x: int, y: int) -> bool:
    return len({x, y, x + y, x * y}) == 4


def find_mono_quadruple(coloring: Coloring, strict: bool = False) -> Optional[tuple[int, int, int]]:
    """Least (x, y) with {x, y, x+y, xy} inside [1..N] and monochromatic.

    With ``strict`` the four values must be distinct; otherwise coincident
    values collapse and the distinct-element set is what must be one color.
    """
    N = coloring.N
    col = coloring.colors
    for x in range(1, N + 1):
        if 2 * x > N and x * x > N and x > 1:
            break
        for y in range(1, N + 1):
            if x + y > N or x * y > N:
                break
            if strict and not _is_strict(x, y):
                continue
            c = col[x - 1]
            if col[y - 1] == c and col[x + y - 1] == c and col[x * y - 1] == c:
                return x, y, int(c)
    return None


def quadruple_constraints(N: int, strict: bool = False) -> list[tuple[int, ...]]:
    """Distinct-element sets of every in-range quadruple (x <= y by symmetry), deduplicated."""
    seen = set()
    out = []
    for x in range(1, N + 1):
        for y in range(x, N + 1):
            if x + y > N or x * y > N:
                break
            if strict and not _is_strict(x, y):
                continue
            key = tuple(sorted({x, y, x + y, x * y}))
            if key not in seen:
                seen.add(key)
                out.append(key)
    return out


@dataclass(frozen=True)
class ScanResult:
    N: int
    strict: bool
    witness: Optional[Coloring]  # a coloring avoiding the pattern, if one exists
    nodes: int

    @property
    def forced(self) -> bool:
        """True when every 2-coloring of [1..N] contains the pattern."""
        return self.witness is None


def exhaustive_2coloring_scan(N: int, strict: bool = False) -> ScanResult:
    """Backtracking over 2-colorings of [1..N] looking for one with no monochromatic quadruple.

    Elements are assigned in decreasing order of how many quadruples involve
    them; after each assignment, a quadruple with one free element whose other
    elements share a color forces the free element to the other color.  The
    first assigned element is fixed to color 0 (color-swap symmetry).
    """
    if not 1 <= N <= MAX_SCAN_N:
        raise DomainError(f"exhaustive scan supports 1 <= N <= {MAX_SCAN_N}, got {N}")
    witness, nodes = two_color_search(N, quadruple_constraints(N, strict))
    return ScanResult(N, strict, witness, nodes)


def two_color_search(N: int, cons: list[tuple[int, ...]]) -> tuple[Optional[Coloring], int]:
    """Find a 2-coloring of [1..N] leaving no constraint set monochromatic.

    Returns the coloring (or None if none exists) and the number of search nodes.
    """
    touching: list[list[tuple[int, ...]]] = [[] for _ in range(N + 1)]
    for q in cons:
        for e in q:
            touching[e].append(q)
    order = sorted(range(1, N + 1), key=lambda e: (-len(touching[e]), e))
    color = [-1] * (N + 1)
    nodes = 0

    def assign(v: int, c: int, trail: list[int]) -> bool:
        queue = [(v, c)]
        while queue:
            u, cu = queue.pop()
            if color[u] != -1:
                if color[u] != cu:
                    return False
                continue
            color[u] = cu
            trail.append(u)
            for q in touching[u]:
                free = [e for e in q if color[e] == -1]
                used = {color[e] for e in q if color[e] != -1}
                if len(used) == 1:
                    if not free:
                        return False
                    if len(free) == 1:
                        queue.append((free[0], 1 - next(iter(used))))
        return True

    def undo(trail: list[int]) -> None:
        for u in trail:
            color[u] = -1

    def solve(pos: int) -> bool:
        nonlocal nodes
        while pos < N and color[order[pos]] != -1:
            pos += 1
        if pos == N:
            return True
        v = order[pos]
        for c in ((0,) if pos == 0 else (0, 1)):
            nodes += 1
            trail: list[int] = []
            if assign(v, c, trail) and solve(pos + 1):
                return True
            undo(trail)
        return False

    if solve(0):
        return Coloring(N, 2, np.array(color[1:], dtype=np.int64)), nodes
    return None, nodes


@dataclass(frozen=True)
class HindmanSequence:
    x: tuple[int, ...]
    color: Optional[int]

    def __bool__(self):
        return bool(self.x)

    def as_record(self) -> dict:
        return {"x": list(self.x), "color": self.color}


def hindman_sequence(coloring: Coloring, L: int) -> HindmanSequence:
    """Monochromatic FS witness packaged for use as CLT weights (empty if none)."""
    found = find_mono_fs(coloring, L)
    if found is None:
        return HindmanSequence((), None)
    return HindmanSequence(found[0], found[1])
