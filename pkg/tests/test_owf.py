import math

import numpy as np
import pytest

from boson_owf import (Algo1Params, BinningScheme, ConfigSpace, OwfParams, RngStream, evaluate,
                       evaluate_exact_full_domain, fisher_yates_map, next_kappa)
from boson_owf.distribution import CoarseDistribution, CoarseTable
from boson_owf.errors import EvaluationError
from boson_owf.owf import full_domain_from_mpbs, kappa_offset, output_rank


def test_schedule_vectors():
    assert next_kappa(123, 1, 2600) == 123
    assert kappa_offset(2, 2600) == 2187
    assert next_kappa(0, 2, 2600) == 2187
    assert next_kappa(2599, 2, 2600) == 2186
    assert kappa_offset(3, 2600) == int(2600 * abs(math.sin(2)))


@pytest.mark.parametrize("size", [210, 455, 2600, 4845])
def test_offsets_match_float_truncation(size):
    for j in range(1, 30):
        assert kappa_offset(j, size) == int(size * abs(math.sin(j - 1)))
        assert 0 <= next_kappa(size - 1, j, size) < size


def test_table_one():
    assert fisher_yates_map((3, 7, 6, 9), 10) == (3, 8, 7, 2)
    space = ConfigSpace(10, 4)
    phi, y = output_rank((3, 7, 6, 9), space)
    assert y == space.rank((2, 3, 7, 8))


def test_zero_labels_pick_lowest_ports():
    assert fisher_yates_map((0, 0, 0, 0, 0), 12) == (0, 1, 2, 3, 4)


def test_labels_wrap_modulo_free_ports():
    # 25 mod 10 = 5, then 25 mod 9 = 7 among (0..4, 6..9)
    assert fisher_yates_map((25, 25), 10) == (5, 8)


def test_ports_always_distinct():
    rng = np.random.default_rng(0)
    for _ in range(200):
        M = int(rng.integers(4, 30))
        N = int(rng.integers(1, M + 1))
        phi = fisher_yates_map(rng.integers(0, 200, N), M)
        assert len(set(phi)) == N and all(0 <= p < M for p in phi)


@pytest.fixture(scope="module")
def exact15(u15):
    return OwfParams(u15, 3, 51)


def test_exact_trace(exact15):
    y, trace = evaluate(17, exact15)
    assert [r.scheduled_kappa for r in trace.rounds] == [r.kappa for r in trace.rounds]
    assert trace.rounds[0].kappa == 17
    assert all(r.aborts == 0 for r in trace.rounds)
    table = CoarseTable(exact15.unitary, 3, BinningScheme(51))
    assert trace.mu_tilde == tuple(table[r.kappa].mpb_label for r in trace.rounds)
    # recomputing y from the trace alone
    assert output_rank(trace.mu_tilde, exact15.space)[1] == y == trace.y
    assert sorted(trace.phi) == list(exact15.space.unrank(y))
    assert evaluate(17, exact15)[0] == y


def test_full_domain(exact15):
    ys = evaluate_exact_full_domain(exact15)
    assert ys.shape == (455,)
    assert ys.min() >= 0 and ys.max() < 455
    for x in (0, 1, 200, 454):
        assert ys[x] == evaluate(x, exact15)[0]
    assert np.array_equal(ys, evaluate_exact_full_domain(exact15, threads=3))
    nu = np.bincount(ys, minlength=455)
    assert (nu == 0).any() and (nu == 1).any() and (nu > 1).any()


def test_full_domain_on_synthetic_mpbs():
    space = ConfigSpace(10, 4)
    mpb = np.arange(space.size) % 7
    ys = full_domain_from_mpbs(mpb, space)
    for x in (0, 5, 209):
        kappa, mus = x, []
        for j in range(1, 5):
            kappa = next_kappa(kappa, j, space.size)
            mus.append(int(mpb[kappa]))
        assert ys[x] == output_rank(mus, space)[1]


def test_range_checks(exact15):
    with pytest.raises(ValueError):
        evaluate(455, exact15)
    with pytest.raises(ValueError):
        evaluate(-1, exact15)
    with pytest.raises(ValueError):
        OwfParams(exact15.unitary, 3, 456)
    with pytest.raises(ValueError):
        evaluate(0, OwfParams(exact15.unitary, 3, 51, mode="sampled"))


GENEROUS = Algo1Params(num_bootstraps=1000, delta_n=10_000_000, max_rounds=50, xi=1e-2)


def test_sampled_agrees_with_exact(exact15, u15):
    full = evaluate_exact_full_domain(exact15)
    sampled = OwfParams(u15, 3, 51, mode="sampled", algo1=GENEROUS)
    table = CoarseTable(u15, 3, BinningScheme(51)).fill()
    xs = np.random.default_rng(0).choice(455, 100, replace=False)
    agree = sum(evaluate(int(x), sampled, RngStream(7).derive("x", int(x)), table)[0] == full[x] for x in xs)
    assert agree >= 98


def test_sampled_is_seed_deterministic(u15):
    params = OwfParams(u15, 3, 51, mode="sampled", algo1=Algo1Params(500, 20_000, 3))
    a = evaluate(3, params, RngStream(1))
    b = evaluate(3, params, RngStream(1))
    assert a[0] == b[0] and a[1].to_dict() == b[1].to_dict()


class TieTable:
    """Every input has two exactly tied bins, so the estimator always aborts."""

    def __getitem__(self, kappa):
        return CoarseDistribution.from_probs([0.5, 0.5] + [0.0] * 49)


def test_retry_cap(u15):
    params = OwfParams(u15, 3, 51, mode="sampled", algo1=Algo1Params(200, 2000, 1), retry_cap=4)
    with pytest.raises(EvaluationError):
        evaluate(0, params, RngStream(0), table=TieTable())


class AbortOnce:
    """Ties at one scheduled input; a clear peak everywhere else."""

    def __init__(self, bad):
        self.bad = bad

    def __getitem__(self, kappa):
        if kappa == self.bad:
            return CoarseDistribution.from_probs([0.5, 0.5] + [0.0] * 49)
        p = np.zeros(51)
        p[kappa % 51] = 1.0
        return CoarseDistribution.from_probs(p)


def test_abort_substitution_chains(u15):
    size = 455
    params = OwfParams(u15, 3, 51, mode="sampled", algo1=Algo1Params(200, 2000, 1))
    k2 = next_kappa(10, 2, size)
    y, trace = evaluate(10, params, RngStream(0), table=AbortOnce(k2))
    r2, r3 = trace.rounds[1], trace.rounds[2]
    assert r2.scheduled_kappa == k2 and r2.aborts == 1 and r2.kappa == k2 + 1
    assert r2.mu_tilde == (k2 + 1) % 51
    assert r3.scheduled_kappa == next_kappa(k2 + 1, 3, size)
    assert trace.to_dict()["chain_from"] == "substituted"
