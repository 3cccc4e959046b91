"""Data generators behind the `experiment` subcommands (fig1 ... fig10).

Each function returns plain rows (lists of dicts) or small dicts so callers can
write them to CSV/JSON or plot them.  Nothing here plots.
"""

from __future__ import annotations

import math

import numpy as np

from ._workers import pmap
from .bootstrap import bootstrap_counts
from .configs import BinningScheme
from .distribution import CoarseTable
from .matrix import haar_random_unitary
from .mpb import Algo1Params, rounds_to_end
from .owf import OwfParams, evaluate_exact_full_domain
from .sampling import RngStream, build_sampler, draw_bins
from .security import birthday_thetas, collision_census, fit_birthday, t_min


def fit_power_law(sizes, widths) -> tuple[float, float]:
    """Least-squares fit of ``width = alpha * size**(-beta)`` in log-log space."""
    x = np.log(np.asarray(sizes, dtype=np.float64))
    y = np.log(np.asarray(widths, dtype=np.float64))
    slope, intercept = np.polyfit(x, y, 1)
    return float(math.exp(intercept)), float(-slope)


def bin_intervals(counts, num_bootstraps: int, gamma: float, rng: RngStream):
    """Basic bootstrap CIs for every bin probability (the error bars of a histogram)."""
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.sum()
    p = counts / n
    boot = rng.generator().multinomial(n, p, size=num_bootstraps) / n
    delta = np.sort(boot - p, axis=0)
    lo_idx = min(num_bootstraps - 1, max(0, math.ceil(round((1 - gamma / 2) * num_bootstraps, 9)) - 1))
    hi_idx = min(num_bootstraps - 1, max(0, math.ceil(round(gamma / 2 * num_bootstraps, 9)) - 1))
    return p - delta[lo_idx], p - delta[hi_idx]


def ci_histograms(coarse, sample_sizes, rng: RngStream, *, num_bootstraps=10_000, gamma=1e-3) -> list[dict]:
    """Exact bin probabilities with bootstrap CIs per bin and for P_max, per sample size."""
    sampler = build_sampler(coarse)
    rows = []
    for n in sample_sizes:
        rec = draw_bins(sampler, n, rng.derive("record", n))
        counts = rec.counts()
        lo, hi = bin_intervals(counts, num_bootstraps, gamma, rng.derive("bins", n))
        summ = bootstrap_counts(counts, num_bootstraps, gamma, rng.derive("max", n))
        for b in range(coarse.d):
            rows.append({
                "sample_size": n, "bin": b, "exact": float(coarse.probs[b]),
                "freq": counts[b] / n, "ci_low": float(lo[b]), "ci_high": float(hi[b]),
                "pmax_ci_low": summ.ci_low, "pmax_ci_high": summ.ci_high,
                "true_mpb": coarse.mpb_label,
            })
    return rows


def ci_width_runs(coarse, sample_size: int, runs: int, rng: RngStream, *,
                  num_bootstraps=10_000, gamma=1e-3, threads=1) -> list:
    """Bootstrap summaries of ``runs`` independent records of one size."""
    sampler = build_sampler(coarse)

    def one(r):
        counts = sampler.counts(sample_size, rng.derive("record", sample_size, r).generator())
        s = bootstrap_counts(counts, num_bootstraps, gamma, rng.derive("boot", sample_size, r))
        s.mpb_sequence = None
        return s

    return pmap(one, range(runs), threads)


def ci_width_scaling(coarse, sample_sizes, runs: int, rng: RngStream, *,
                     num_bootstraps=10_000, gamma=1e-3, threads=1) -> dict:
    """Min / median / max CI width per sample size and a power-law fit to the medians."""
    rows = []
    for n in sample_sizes:
        w = np.array([s.ci_width for s in ci_width_runs(coarse, n, runs, rng, num_bootstraps=num_bootstraps,
                                                         gamma=gamma, threads=threads)])
        rows.append({"sample_size": n, "min": float(w.min()), "median": float(np.median(w)),
                     "max": float(w.max())})
    alpha, beta = fit_power_law([r["sample_size"] for r in rows], [r["median"] for r in rows])
    return {"rows": rows, "alpha": alpha, "beta": beta}


def omega_boxes(coarse, sample_sizes, runs: int, rng: RngStream, *,
                num_bootstraps=10_000, threads=1) -> list[dict]:
    """Quartiles of Omega_beta over independent runs, for every bin that ever wins."""
    rows = []
    for n in sample_sizes:
        summaries = ci_width_runs(coarse, n, runs, rng, num_bootstraps=num_bootstraps, threads=threads)
        bins = sorted({b for s in summaries for b in s.omega})
        for b in bins:
            vals = np.array([s.omega.get(b, 0.0) for s in summaries])
            q1, med, q3 = np.percentile(vals, [25, 50, 75])
            rows.append({"sample_size": n, "bin": b, "min": float(vals.min()), "q1": float(q1),
                         "median": float(med), "q3": float(q3), "max": float(vals.max()),
                         "is_mpb": b == coarse.mpb_label})
    return rows


def status_curves(coarse, params: Algo1Params, repetitions: int, rng: RngStream, *, threads=1) -> list[dict]:
    """p_s, p_f, p_? as functions of the total budget ``L * delta_n`` for ``L <= max_rounds``."""
    runs = rounds_to_end(coarse, params, repetitions, rng, threads=threads)
    mu = coarse.mpb_label
    rows = []
    for L in range(1, params.max_rounds + 1):
        s = sum(1 for rnd, m in runs if m is not None and rnd <= L and m == mu)
        f = sum(1 for rnd, m in runs if m is not None and rnd <= L and m != mu)
        rows.append({"budget": L * params.delta_n, "p_s": s / repetitions, "p_f": f / repetitions,
                     "p_inconclusive": (repetitions - s - f) / repetitions})
    return rows


def budget_for_success(coarse, params: Algo1Params, repetitions: int, rng: RngStream, *, threads=1):
    """Smallest budget at which every repetition ends on the true MPB, or None."""
    runs = rounds_to_end(coarse, params, repetitions, rng, threads=threads)
    if any(m != coarse.mpb_label for _, m in runs):
        return None
    return max(r for r, _ in runs) * params.delta_n


def eps_census(M: int, N: int, d: int, unitaries: int, eps_values, seed: int, *, threads=1) -> list[dict]:
    """Largest fraction, over Haar unitaries, of inputs with an eps-close runner-up."""
    fractions = {e: [] for e in eps_values}
    for u in range(unitaries):
        U = haar_random_unitary(M, seed + u)
        gaps = CoarseTable(U, N, BinningScheme(d)).fill(threads).gaps()
        for e in eps_values:
            fractions[e].append(float(np.mean(gaps <= e)))
    return [{"eps": e, "q_max": max(fractions[e]), "q_mean": float(np.mean(fractions[e])),
             "bound": 2 * d * e**0.8} for e in eps_values]


def census_over_unitaries(M: int, N: int, d: int, unitaries: int, seed: int, *, threads=1,
                          etas=(1e-1, 1e-2)) -> list[dict]:
    """|Y|, nu_max and t_min per unitary."""
    rows = []
    for u in range(unitaries):
        U = haar_random_unitary(M, seed + u)
        rep = collision_census(evaluate_exact_full_domain(OwfParams(U, N, d), threads=threads))
        row = {"unitary_seed": seed + u, "space_size": rep.space_size, "Y_size": rep.Y_size,
               "nu_max": rep.nu_max}
        for eta in etas:
            row[f"t_min_eta_{eta:g}"] = t_min(rep.space_size, rep.nu_max, eta)
        rows.append(row)
    return rows


def birthday_over_unitaries(M: int, N: int, d: int, unitaries: int, repetitions: int, seed: int,
                            *, threads=1):
    """Pooled birthday-attack statistics over several unitaries, with the fitted law."""
    thetas = []
    size = None
    for u in range(unitaries):
        U = haar_random_unitary(M, seed + u)
        outputs = evaluate_exact_full_domain(OwfParams(U, N, d), threads=threads)
        size = outputs.size
        thetas.append(birthday_thetas(outputs, repetitions, RngStream(seed + u, 1)))
    return fit_birthday(np.concatenate(thetas), size)


def bin_sweep(U, N: int, input_rank: int, d_values, params: Algo1Params, repetitions: int,
              rng: RngStream, *, threads=1) -> list[dict]:
    """Gap of the coarse distribution and the budget needed for p_s = 1, per number of bins."""
    rows = []
    for d in d_values:
        coarse = CoarseTable(U, N, BinningScheme(d))[input_rank]
        budget = budget_for_success(coarse, params, repetitions, rng.derive("d", d), threads=threads)
        rows.append({"d": d, "gap": coarse.gap, "budget_for_success": budget})
    return rows
