import numpy as np
import pytest

from boson_owf import (Binning, BinningScheme, ConfigSpace, CoarseTable, UnitaryMatrix, coarse_grain,
                       eps_close_fraction, exact_output_distribution, haar_random_unitary,
                       permanent_naive, submatrix)
from boson_owf.distribution import CoarseDistribution, coarse_distribution, gap_census
from boson_owf.errors import CapacityError


def test_identity_concentrates_on_input():
    I = UnitaryMatrix.identity(8)
    dist = exact_output_distribution(I, (1, 4, 6))
    k = dist.space.rank((1, 4, 6))
    assert dist.probs[k] == 1.0
    assert dist.probs.sum() == 1.0
    assert dist.raw_mass == pytest.approx(1.0)


@pytest.mark.parametrize("scheme", [BinningScheme(7), BinningScheme(7, Binning.MODULO)])
def test_identity_mpb_is_bin_of_input(scheme):
    I = UnitaryMatrix.identity(10)
    space = ConfigSpace(10, 3)
    for k in (0, 17, 119):
        c = coarse_distribution(I, k, 3, scheme)
        assert c.mpb_label == scheme.labels(space.size)[k]


def test_matches_naive_oracle():
    U = haar_random_unitary(8, 21)
    psi = (2, 5)
    dist = exact_output_distribution(U, psi)
    raw = np.array([abs(permanent_naive(submatrix(U, psi, phi))) ** 2
                    for phi in dist.space.configurations()])
    assert dist.raw_mass == pytest.approx(raw.sum(), rel=1e-12)
    assert np.max(np.abs(dist.probs - raw / raw.sum())) <= 1e-12


@pytest.mark.parametrize("M,N,k", [(10, 4, 77), (15, 3, 0), (26, 3, 2090)])
def test_normalization(M, N, k):
    U = haar_random_unitary(M, M)
    space = ConfigSpace(M, N)
    dist = exact_output_distribution(U, space.unrank(k))
    assert abs(dist.probs.sum() - 1) <= 1e-12
    assert np.all(dist.probs >= 0)
    assert 0 < dist.raw_mass <= 1 + 1e-12


def test_threads_do_not_change_result(u15):
    a = exact_output_distribution(u15, (0, 3, 9), threads=1)
    b = exact_output_distribution(u15, (0, 3, 9), threads=3)
    assert np.array_equal(a.probs, b.probs)


def test_coarse_grain_against_loop(u26):
    space = ConfigSpace(26, 3)
    dist = exact_output_distribution(u26, space.unrank(16))
    for scheme in (BinningScheme(51), BinningScheme(51, Binning.MODULO)):
        coarse = coarse_grain(dist, scheme)
        acc = [0.0] * 51
        for r in range(space.size):
            if scheme.strategy is Binning.CONTIGUOUS:
                b = r * 51 // space.size
            else:
                b = r % 51
            acc[b] += dist.probs[r]
        assert abs(coarse.probs.sum() - 1) <= 1e-12
        assert np.max(np.abs(coarse.probs - np.array(acc))) <= 1e-14
        assert coarse.p_max == pytest.approx(max(acc), abs=1e-15)
        assert coarse.probs[coarse.mpb_label] == coarse.p_max


def test_coarse_extremes(u15):
    dist = exact_output_distribution(u15, (1, 2, 3))
    one = coarse_grain(dist, BinningScheme(1))
    assert one.probs.tolist() == [pytest.approx(1.0)]
    assert one.gap == 1.0 and one.mpb_label == 0
    full = coarse_grain(dist, BinningScheme(dist.space.size))
    assert np.allclose(full.probs, dist.probs, atol=1e-16)


def test_tie_break_smallest_label():
    c = CoarseDistribution.from_probs([0.2, 0.4, 0.4])
    assert c.mpb_label == 1 and c.gap == 0.0
    c = CoarseDistribution.from_probs([0.1, 0.6, 0.3])
    assert c.gap == pytest.approx(0.3)


def test_table_rows_match_direct(u15):
    table = CoarseTable(u15, 3, BinningScheme(31))
    for k in (0, 100, 454):
        direct = coarse_distribution(u15, k, 3, BinningScheme(31))
        assert np.allclose(table[k].probs, direct.probs, atol=1e-15)
    full = CoarseTable(u15, 3, BinningScheme(31)).fill(threads=2)
    assert np.array_equal(full.mpb_labels()[[0, 100, 454]],
                          [table[k].mpb_label for k in (0, 100, 454)])


def test_table_cache(tmp_path, u15):
    a = CoarseTable.cached(u15, 3, BinningScheme(51), tmp_path)
    assert len(list(tmp_path.glob("*.npy"))) == 1
    b = CoarseTable.cached(u15, 3, BinningScheme(51), tmp_path)
    assert np.array_equal(a.probs, b.probs)


def test_capacity_error():
    U = haar_random_unitary(60, 0)
    with pytest.raises(CapacityError, match="sampled mode"):
        exact_output_distribution(U, (0, 1, 2, 3))


def test_eps_census(u15):
    scheme = BinningScheme(31)
    gaps = gap_census(u15, 3, scheme)
    assert np.all(gaps >= 0)
    assert eps_close_fraction(u15, 3, scheme, 0.0) == 0.0
    assert eps_close_fraction(u15, 3, scheme, 1.0) == 1.0
    eps = [1e-5, 1e-4, 1e-3, 1e-2, 0.1]
    fr = [eps_close_fraction(u15, 3, scheme, e) for e in eps]
    assert fr == sorted(fr)
