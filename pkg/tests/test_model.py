from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randfs.errors import DomainError, ResourceError
from randfs.model import (
    GOLDEN, MASK64, DenseSample, SubsetModel, contains, hash_grid, hash_int, hash_seeds,
    materialize, member_matrix, splitmix64, splitmix64_np,
)

U64 = st.integers(0, MASK64)


def reference_u(seed, n):
    """Straight transcription of the membership hash, no shortcuts."""
    def mix(x):
        z = (x + 0x9E3779B97F4A7C15) % 2**64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) % 2**64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) % 2**64
        return z ^ (z >> 31)

    s = seed
    while True:
        n, limb = divmod(n, 2**64)
        s = mix(s ^ (limb * 0x9E3779B97F4A7C15 % 2**64))
        if n == 0:
            return mix(s)


def test_splitmix64_reference_stream():
    # the standard splitmix64 generator seeded with 0 emits mix(k * golden)
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(GOLDEN) == 0x6E789E6AA1B965F4
    assert splitmix64(2 * GOLDEN & MASK64) == 0x06C45D188009454F


@given(st.lists(U64, min_size=1, max_size=50))
def test_vector_splitmix_matches_scalar(xs):
    out = splitmix64_np(np.array(xs, dtype=np.uint64)).tolist()
    assert out == [splitmix64(x) for x in xs]


@given(U64, st.integers(1, 2**300))
def test_hash_matches_reference(seed, n):
    assert hash_int(seed, n) == reference_u(seed, n)
    assert SubsetModel(0.5, seed).hash(n) == reference_u(seed, n)


@given(U64, st.integers(1, 2**70), st.integers(0, 3000))
@settings(max_examples=60)
def test_zero_limb_shortcut_matches_reference(seed, odd, shift):
    # dilated probe elements have long runs of zero low limbs
    n = odd << shift
    m = SubsetModel(0.3, seed)
    assert m.hash(n) == reference_u(seed, n)
    assert m.hash(n) == m.hash(n)


@given(st.lists(U64, min_size=1, max_size=20), st.integers(1, 2**200))
def test_hash_seeds_matches_scalar(seeds, n):
    assert hash_seeds(np.array(seeds, dtype=np.uint64), n).tolist() == [hash_int(s, n) for s in seeds]


def test_hash_grid_matches_scalar():
    seeds = np.array([0, 1, 42, MASK64], dtype=np.uint64)
    ns = np.array([1, 2, 1000, 2**63, MASK64], dtype=np.uint64)
    grid = hash_grid(seeds, ns)
    for a, s in enumerate(seeds.tolist()):
        for b, n in enumerate(ns.tolist()):
            assert int(grid[a, b]) == hash_int(s, n)


def test_contains_is_pure():
    m = SubsetModel(0.37, 99)
    for n in (1, 17, 2**64, 3**200):
        assert contains(m, n) == contains(m, n)
    assert SubsetModel(0.37, 99).contains(12345) == m.contains(12345)


def test_probability_one_limit():
    m = SubsetModel(1 - Fraction(1, 2**70), 5)
    assert all(m.contains(n) for n in range(1, 2000))
    assert all(m.contains(7 << (64 * k)) for k in range(20))
    assert materialize(m, 5000).popcount() == 5000


def test_frequency_half():
    s = materialize(SubsetModel(0.5, 42), 10**6)
    assert abs(s.popcount() / 10**6 - 0.5) <= 0.002


@pytest.mark.parametrize("bad", [0, -1, -(2**70)])
def test_contains_domain(bad):
    with pytest.raises(DomainError):
        SubsetModel(0.5, 1).contains(bad)


@pytest.mark.parametrize("p", [0, 1, -0.1, 1.5])
def test_p_domain(p):
    with pytest.raises(DomainError):
        SubsetModel(p, 1)


def test_materialize_single_bit():
    for seed in range(20):
        m = SubsetModel(0.5, seed)
        s = materialize(m, 1)
        assert s.bound == 1 and (1 in s) == m.contains(1)


def test_materialize_64_bits_agree_with_lazy():
    m = SubsetModel(0.5, 7)
    s = materialize(m, 64)
    assert [n in s for n in range(1, 65)] == [m.contains(n) for n in range(1, 65)]


@pytest.mark.parametrize("N", [1, 7, 8, 9, 1000, 10**4])
def test_dense_lazy_agreement_exhaustive(N):
    m = SubsetModel(0.41, 3)
    s = materialize(m, N)
    lazy = [m.contains(n) for n in range(1, N + 1)]
    assert s.mask[1:].tolist() == lazy
    assert s.mask[0] == False  # noqa: E712
    assert s.popcount() == sum(lazy)


def test_materialize_popcount_band():
    s = materialize(SubsetModel(0.3, 1), 10**5)
    assert abs(s.popcount() - 30000) <= 435


@pytest.mark.parametrize("seed", [1, 2, 3, 4])
@pytest.mark.parametrize("p", [0.05, 0.5, 0.9])
def test_frequency_property(seed, p):
    N = 50000
    freq = materialize(SubsetModel(p, seed), N).popcount() / N
    assert abs(freq - p) <= 4 * np.sqrt(p * (1 - p) / N)


@given(U64, st.integers(1, 2**130), st.floats(0.001, 0.999), st.floats(0.001, 0.999))
def test_monotone_coupling(seed, n, p1, p2):
    lo, hi = sorted((p1, p2))
    if SubsetModel(lo, seed).contains(n):
        assert SubsetModel(hi, seed).contains(n)


def test_member_matrix_rows_are_materializations():
    seeds = [11, 12, 13]
    mat = member_matrix(0.4, seeds, 300)
    for row, seed in zip(mat, seeds):
        assert row[1:].tolist() == materialize(SubsetModel(0.4, seed), 300).mask[1:].tolist()


def test_memory_budget(monkeypatch):
    monkeypatch.setenv("RANDFS_MEMORY_BUDGET", "100")
    with pytest.raises(ResourceError, match="100 bytes"):
        materialize(SubsetModel(0.5, 1), 10_000)
    assert materialize(SubsetModel(0.5, 1), 800).bound == 800


def test_dense_sample_from_set_roundtrip():
    s = DenseSample.from_set({1, 3, 4}, 10)
    assert [n for n in range(0, 12) if n in s] == [1, 3, 4]
    assert s.members().tolist() == [1, 3, 4]
    assert s == DenseSample.from_mask([True, False, True, True] + [False] * 6)
