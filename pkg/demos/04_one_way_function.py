"""
The one-way function
====================

Each input x seeds N rounds.  Round j looks up the MPB of the input
configuration with rank kappa_j, and the N labels are turned into a fresh
configuration by striking out free ports.  The output is that configuration's
rank.
"""

import numpy as np

from boson_owf import (Algo1Params, OwfParams, RngStream, evaluate, evaluate_exact_full_domain, fisher_yates_map,
                       haar_random_unitary)

###############################################################################
# The post-processing step on its own: labels (3, 7, 6, 9) with 10 ports.
print("strike-out of (3, 7, 6, 9) over 10 ports ->", fisher_yates_map((3, 7, 6, 9), 10))

U = haar_random_unitary(15, seed=1)
exact = OwfParams(U, N=3, d=51)

###############################################################################
# Exact mode uses the true MPBs, so it is a deterministic function.
y, trace = evaluate(17, exact)
for j, r in enumerate(trace.rounds, start=1):
    print(f"round {j}: kappa={r.kappa:3d}  MPB={r.mu_tilde}")
print(f"phi={trace.phi}  ->  y={y}")

###############################################################################
# Sampled mode estimates each MPB from simulated samples; with a generous
# budget it almost always reproduces the exact value.
sampled = OwfParams(U, N=3, d=51, mode="sampled", algo1=Algo1Params(1000, 1_000_000, 50))
ys, aborts = [], 0
for x in range(17, 27):
    yx, tr = evaluate(x, sampled, RngStream(5).derive("x", x))
    ys.append(yx)
    aborts += sum(r.aborts for r in tr.rounds)
full = evaluate_exact_full_domain(exact)
print(f"sampled vs exact on x=17..26: {np.sum(np.array(ys) == full[17:27])}/10 agree, {aborts} aborts")
