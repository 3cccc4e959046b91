"""
Coarse-grained output distributions
===================================

The |S| = C(M, N) collision-free outcomes are split into d bins of nearly equal
size.  The most probable bin (MPB) of the resulting d-bin distribution is the
quantity the one-way function is built on.
"""

import numpy as np

from boson_owf import BinningScheme, ConfigSpace, coarse_grain, exact_output_distribution, haar_random_unitary
from boson_owf.distribution import gap_census

U = haar_random_unitary(26, seed=1)
space = ConfigSpace(26, 3)
print(f"|S| = {space.size}; input rank 16 is ports {space.unrank(16)}")

###############################################################################
# Exact distribution for one input, then its 51-bin coarse version.
dist = exact_output_distribution(U, space.unrank(16))
print(f"collision-free mass before renormalising: {dist.raw_mass:.4f}")
coarse = coarse_grain(dist, BinningScheme(51))
top = np.argsort(coarse.probs)[::-1][:3]
print("three largest bins:", ", ".join(f"{b}: {coarse.probs[b]:.4f}" for b in top))
print(f"MPB = {coarse.mpb_label}, P_max = {coarse.p_max:.4f}, gap to runner-up = {coarse.gap:.2e}")

###############################################################################
# Over all inputs, how often is the runner-up within eps of the peak?  Those
# inputs are the ones where estimating the MPB from samples is hard.
gaps = gap_census(U, 3, BinningScheme(51))
for eps in (1e-4, 1e-3, 1e-2):
    print(f"fraction of inputs with gap <= {eps:g}: {np.mean(gaps <= eps):.3f}   (2 d eps^0.8 = {2 * 51 * eps ** 0.8:.3f})")
