"""
Estimating the MPB from samples
===============================

A device only hands out samples.  The bootstrap turns one record into a
confidence interval for P_max and a vote over which bin is largest; the
adaptive estimator keeps adding samples until that vote is decisive.
"""

from boson_owf import (Algo1Params, BinningScheme, RngStream, build_sampler, draw_bins, estimate_mpb,
                       haar_random_unitary)
from boson_owf.bootstrap import bootstrap_analyze
from boson_owf.distribution import CoarseTable
from boson_owf.mpb import recommended_budget, status_probabilities

table = CoarseTable(haar_random_unitary(26, seed=1), 3, BinningScheme(51))
coarse = table[2090]
print(f"true MPB {coarse.mpb_label}, P_max {coarse.p_max:.4f}, gap {coarse.gap:.2e}")
sampler = build_sampler(coarse)

###############################################################################
# One record, several sizes.  The interval narrows roughly like 1/sqrt(N).
for n in (10**4, 10**5, 10**6):
    rec = draw_bins(sampler, n, RngStream(1).derive("record", n))
    s = bootstrap_analyze(rec, 2000, 1e-3, RngStream(1).derive("boot", n))
    print(f"N={n:>8}: CI [{s.ci_low:.4f}, {s.ci_high:.4f}]  Omega_max={s.omega_max:.3f} on bin {s.mu_tilde}")

###############################################################################
# The adaptive estimator: rounds of 1e5 samples, stop once 99% of the
# bootstrap votes agree.
params = Algo1Params(num_bootstraps=2000, delta_n=100_000, max_rounds=50, xi=1e-2)
out = estimate_mpb(sampler, coarse.d, params, RngStream(2))
print(f"{out.status.value} after {out.rounds_used} rounds ({out.total_samples:,} samples), mu~={out.mu_tilde}")

###############################################################################
# Repeating it gives the success / failure / inconclusive rates.
res = status_probabilities(coarse, params, 20, RngStream(3))
print(f"p_s={res.p_s:.2f} p_f={res.p_f:.2f} p_?={res.p_inconclusive:.2f}")
print(f"for comparison, the worst-case budget formula asks for {recommended_budget(51):.2e} samples")
