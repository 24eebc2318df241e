import itertools
import random

import numpy as np
import pytest

from randfs.color import (
    Coloring, exhaustive_2coloring_scan, find_mono_fs, find_mono_quadruple, hindman_sequence, two_color_search,
    random_coloring,
)
from randfs.errors import DomainError
from randfs.patterns import fs


def naive_mono_fs(coloring, L):
    N = coloring.N
    for combo in itertools.combinations(range(1, N + 1), L):
        sums = fs(combo)
        if max(sums) > N:
            continue
        cols = {coloring[s] for s in sums}
        if len(cols) == 1:
            return combo, cols.pop()
    return None


def naive_mono_quadruple(coloring, strict=False):
    N = coloring.N
    for x in range(1, N + 1):
        for y in range(1, N + 1):
            q = {x, y, x + y, x * y}
            if max(q) > N or (strict and len(q) < 4):
                continue
            cols = {coloring[e] for e in q}
            if len(cols) == 1:
                return x, y, cols.pop()
    return None


def test_random_coloring_frequencies():
    col = random_coloring(10**5, 2, 1)
    assert abs(np.mean(col.colors == 0) - 0.5) <= 0.005


def test_random_coloring_uses_all_colors_evenly():
    col = random_coloring(60000, 3, 2)
    freqs = np.bincount(col.colors, minlength=3) / 60000
    assert np.all(np.abs(freqs - 1 / 3) <= 4 * np.sqrt(2 / 9 / 60000))


def test_random_coloring_deterministic():
    assert random_coloring(500, 3, 9) == random_coloring(500, 3, 9)


def test_random_coloring_seeds_differ():
    # sanity probe, not a guarantee
    assert random_coloring(64, 2, 1) != random_coloring(64, 2, 2)


def test_coloring_stream_differs_from_membership():
    from randfs.model import SubsetModel, materialize

    col = random_coloring(2000, 2, 5)
    mask = materialize(SubsetModel(0.5, 5), 2000).mask[1:]
    assert not np.array_equal(col.colors == 0, mask) and not np.array_equal(col.colors == 1, mask)


def test_mono_fs_constant():
    col = Coloring.from_list([0] * 30, 2)
    assert find_mono_fs(col, 2) == ((1, 2), 0)
    assert find_mono_fs(col, 3) == ((1, 2, 3), 0)


def test_mono_fs_parity():
    col = Coloring.from_list([n % 2 for n in range(1, 41)])
    assert find_mono_fs(col, 2) == ((2, 4), 0)


@pytest.mark.parametrize("seed", range(100))
def test_mono_fs_matches_naive(seed):
    rng = random.Random(seed)
    N = rng.randint(3, 30)
    col = Coloring.from_list([rng.randrange(2) for _ in range(N)], 2)
    assert find_mono_fs(col, 2) == naive_mono_fs(col, 2)


@pytest.mark.parametrize("seed", range(20))
def test_mono_fs_L3_matches_naive(seed):
    rng = random.Random(1000 + seed)
    col = Coloring.from_list([rng.randrange(3) for _ in range(30)], 3)
    w = find_mono_fs(col, 3)
    assert w == naive_mono_fs(col, 3)
    if w is not None:
        assert len({col[s] for s in fs(w[0])}) == 1


def test_mono_fs_random_exploratory():
    found = sum(find_mono_fs(random_coloring(1000, 2, s), 3) is not None for s in range(100))
    # recorded observation: witnesses are plentiful at this size
    assert found >= 95


def test_mono_quadruple_constant():
    assert find_mono_quadruple(Coloring.from_list([0] * 12, 2)) == (1, 1, 0)
    assert find_mono_quadruple(Coloring.from_list([0] * 12, 2), strict=True) == (2, 3, 0)


def test_mono_quadruple_parity():
    col = Coloring.from_list([n % 2 for n in range(1, 21)])
    x, y, c = find_mono_quadruple(col)
    assert len({col[e] for e in {x, y, x + y, x * y}}) == 1
    assert col[2] == col[4]


@pytest.mark.parametrize("strict", [False, True])
def test_mono_quadruple_matches_naive_all_colorings_of_10(strict):
    for bits in range(1 << 10):
        col = Coloring.from_list([(bits >> i) & 1 for i in range(10)], 2)
        assert find_mono_quadruple(col, strict) == naive_mono_quadruple(col, strict)


def test_scan_small_witness():
    res = exhaustive_2coloring_scan(4)
    assert not res.forced
    assert find_mono_quadruple(res.witness) is None
    assert naive_mono_quadruple(res.witness) is None


@pytest.mark.parametrize("strict", [False, True])
def test_scan_witnesses_verify(strict):
    for N in range(1, 31):
        res = exhaustive_2coloring_scan(N, strict)
        if not res.forced:
            assert res.witness.N == N
            assert naive_mono_quadruple(res.witness, strict) is None


def test_scan_finds_forcing_when_pattern_unavoidable():
    # cross-check the search engine on N small enough to enumerate directly
    for N in range(1, 13):
        res = exhaustive_2coloring_scan(N)
        all_forced = all(
            naive_mono_quadruple(Coloring.from_list([(b >> i) & 1 for i in range(N)], 2)) is not None
            for b in range(1 << N)
        )
        assert res.forced == all_forced


def test_scan_monotone_and_deterministic():
    results = [exhaustive_2coloring_scan(N) for N in range(1, 31)]
    forced = [r.forced for r in results]
    first = forced.index(True) if True in forced else len(forced)
    assert all(forced[first:])
    assert [r.nodes for r in results] == [exhaustive_2coloring_scan(N).nodes for N in range(1, 31)]


def test_scan_cap():
    with pytest.raises(DomainError):
        exhaustive_2coloring_scan(31)


def test_hindman_sequence():
    col = Coloring.from_list([n % 2 for n in range(1, 41)])
    seq = hindman_sequence(col, 2)
    assert seq.x == (2, 4) and seq.color == 0
    assert seq.as_record() == {"x": [2, 4], "color": 0}
    empty = hindman_sequence(Coloring.from_list([0, 1], 2), 2)
    assert not empty and empty.x == ()


def test_line_roundtrip():
    col = random_coloring(100, 5, 3)
    line = col.to_line()
    assert len(line) == 100 and set(line) <= set("01234")
    assert Coloring.from_line(line, 5) == col


def test_coloring_validation():
    with pytest.raises(DomainError):
        Coloring.from_list([0, 3], 2)
    with pytest.raises(DomainError):
        random_coloring(10, 1, 0)


def schur_constraints(N):
    return sorted({tuple(sorted({x, y, x + y})) for x in range(1, N + 1) for y in range(x, N + 1 - x)})


def test_search_engine_on_schur_triples():
    # every 2-coloring of [1..5] has a monochromatic x + y = z; [1..4] does not
    for N in range(1, 9):
        witness, _ = two_color_search(N, schur_constraints(N))
        assert (witness is None) == (N >= 5)
        if witness is not None:
            assert all(len({witness[e] for e in c}) == 2 for c in schur_constraints(N))
