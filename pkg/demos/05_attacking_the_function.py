"""
How hard is it to invert?
=========================

At desk scale the whole function table fits in memory, so the preimage
structure can be counted directly and compared with what random-guess and
birthday attackers achieve.
"""

import math

from boson_owf import OwfParams, RngStream, evaluate_exact_full_domain, haar_random_unitary
from boson_owf.security import (SECONDS_PER_YEAR, birthday_simulate, collision_census, cost_estimates,
                                exhaustive_failure_prob, t_min)

U = haar_random_unitary(15, seed=1)
params = OwfParams(U, N=3, d=51)

###############################################################################
# Preimage census: how many inputs land on each output.
rep = collision_census(evaluate_exact_full_domain(params))
print(f"|S|={rep.space_size}  |Y|={rep.Y_size} ({rep.Y_size / rep.space_size:.2f} of |S|)  nu_max={rep.nu_max}")
print("outputs by preimage count:", dict(sorted(rep.histogram.items())))

###############################################################################
# Guessing without replacement: chance of still having no preimage after t
# guesses, and the fewest guesses that could bring it under eta.
for eta in (1e-1, 1e-2):
    tm = t_min(rep.space_size, rep.nu_max, eta)
    print(f"eta={eta:g}: t_min={tm} ({tm / rep.space_size:.2f} |S|); "
          f"P_f(t_min) at nu_max = {exhaustive_failure_prob(tm, rep.nu_max, rep.space_size):.3f}")

###############################################################################
# Birthday attack: evaluate random inputs until two outputs repeat.
b = birthday_simulate(params, 1000, RngStream(4))
print(f"birthday: theta* = {b.theta_star:.0f} (fit {b.theta_star_fit:.1f}), sigma = {b.sigma:.3f}, "
      f"fit residual {b.max_residual:.3f}, sqrt|S| = {math.sqrt(rep.space_size):.1f}")

###############################################################################
# Extrapolated cost at N=21 on a very large classical machine.
N = 21
est = cost_estimates(N * N, N, 51, omega_flops=1e21, n_cpu=10_000, nu_max=100)
print(f"N=21 exhaustive search, leading term: {est.exhaustive_leading / SECONDS_PER_YEAR:.0f} years; "
      f"Grover queries ~ {est.grover_queries:.1e}")
