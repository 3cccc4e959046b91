"""Desk-scale security analysis: preimage census, exhaustive search, birthday attack, costs."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .configs import space_size
from .owf import OwfParams, evaluate_exact_full_domain
from .sampling import as_generator


@dataclass(eq=False)
class CollisionReport:
    space_size: int
    occurrence: np.ndarray  # nu(y) for every y
    Y_size: int
    nu_max: int
    histogram: dict  # preimage count -> number of outputs with that count

    def to_dict(self) -> dict:
        return {
            "space_size": self.space_size,
            "Y_size": self.Y_size,
            "Y_fraction": self.Y_size / self.space_size,
            "nu_max": self.nu_max,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def collision_census(outputs, space_size: int | None = None) -> CollisionReport:
    """Preimage counts of a full-domain output table."""
    outputs = np.asarray(outputs, dtype=np.int64)
    size = outputs.size if space_size is None else space_size
    if outputs.size != size:
        raise ValueError(f"need {size} outputs, got {outputs.size}")
    if outputs.size and (outputs.min() < 0 or outputs.max() >= size):
        raise ValueError("outputs outside the domain")
    nu = np.bincount(outputs, minlength=size)
    hist = Counter(nu.tolist())
    return CollisionReport(size, nu, int(np.count_nonzero(nu)), int(nu.max()), dict(hist))


def exhaustive_failure_prob(t: int, nu: int, space_size: int) -> float:
    """Probability that ``t`` distinct random guesses all miss ``nu`` preimages."""
    S = space_size
    if not 1 <= nu < S:
        raise ValueError("need 1 <= nu < |S|")
    if t < 1:
        raise ValueError("t must be >= 1")
    if t > S - nu:
        return 0.0
    if t <= 1_000_000:
        j = np.arange(1, t + 1, dtype=np.float64)
        return float(np.exp(np.sum(np.log1p(-nu / (S - j + 1)))))
    # product telescopes to (S-nu)! (S-t)! / (S! (S-nu-t)!)
    lg = math.lgamma
    return math.exp(lg(S - nu + 1) + lg(S - t + 1) - lg(S + 1) - lg(S - nu - t + 1))


def t_min(space_size: int, nu_max: int, eta: float) -> int:
    """Fewest guesses that push the failure probability below ``eta``."""
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if not 1 <= nu_max < space_size:
        raise ValueError("need 1 <= nu_max < |S|")
    L = abs(math.log(eta))
    return math.ceil((space_size + 1 - nu_max) * L / (nu_max + L))


def simulate_exhaustive_search(space_size: int, nu: int, t_values, runs: int, rng) -> dict:
    """Monte-Carlo failure frequency of guessing without replacement.

    ``nu`` preimages are planted; each run walks a uniformly random ordering of
    the domain and records how many misses precede the first preimage.
    """
    gen = as_generator(rng)
    first_hit = np.empty(runs, dtype=np.int64)
    chunk = max(1, 4_000_000 // space_size)
    for start in range(0, runs, chunk):
        n = min(chunk, runs - start)
        keys = gen.random((n, space_size))
        planted_min = keys[:, :nu].min(axis=1)
        first_hit[start : start + n] = (keys[:, nu:] < planted_min[:, None]).sum(axis=1)
    return {int(t): float(np.mean(first_hit >= t)) for t in t_values}


@dataclass(eq=False)
class BirthdayReport:
    space_size: int
    thetas: np.ndarray  # per repetition; inf when no collision exists
    theta_grid: np.ndarray
    success_curve: np.ndarray
    sigma: float
    W_size: float
    max_residual: float
    theta_star: float
    theta_star_fit: float

    def to_dict(self) -> dict:
        return {
            "space_size": self.space_size,
            "repetitions": int(self.thetas.size),
            "sigma": self.sigma,
            "W_size": self.W_size,
            "max_residual": self.max_residual,
            "theta_star": self.theta_star,
            "theta_star_fit": self.theta_star_fit,
            "curve": [[int(t), float(p)] for t, p in zip(self.theta_grid, self.success_curve)],
        }


def birthday_success(theta, W: float):
    theta = np.asarray(theta, dtype=np.float64)
    return 1.0 - np.exp(-theta * (theta - 1.0) / (2.0 * W))


def birthday_thetas(outputs, repetitions: int, rng) -> np.ndarray:
    """Database size at the first collision, one value per attack run.

    Inputs are drawn uniformly with replacement and repeats are discarded,
    which is the same as walking a uniformly random permutation of the domain.
    """
    outputs = np.asarray(outputs)
    gen = as_generator(rng)
    S = outputs.size
    thetas = np.full(repetitions, np.inf)
    for r in range(repetitions):
        seen = set()
        order = gen.permutation(S)
        for k, x in enumerate(order.tolist(), start=1):
            y = outputs[x]
            if y in seen:
                thetas[r] = k
                break
            seen.add(y)
    return thetas


def fit_birthday(thetas, space_size: int) -> BirthdayReport:
    thetas = np.asarray(thetas, dtype=np.float64)
    finite = np.sort(thetas[np.isfinite(thetas)])
    R = thetas.size
    if finite.size == 0:
        return BirthdayReport(space_size, thetas, np.array([]), np.array([]), math.inf, math.inf,
                              0.0, math.inf, math.inf)
    grid = np.unique(finite)
    curve = np.searchsorted(finite, grid, side="right") / R

    def loss(log_sigma):
        return float(np.sum((curve - birthday_success(grid, math.exp(log_sigma) * space_size)) ** 2))

    res = minimize_scalar(loss, bounds=(math.log(1e-6), math.log(1e3)), method="bounded",
                          options={"xatol": 1e-10})
    sigma = math.exp(res.x)
    W = sigma * space_size
    resid = float(np.max(np.abs(curve - birthday_success(grid, W))))
    half = np.flatnonzero(curve >= 0.5)
    theta_star = float(grid[half[0]]) if half.size else math.inf
    theta_star_fit = 0.5 * (1.0 + math.sqrt(1.0 + 8.0 * W * math.log(2.0)))
    return BirthdayReport(space_size, thetas, grid, curve, sigma, W, resid, theta_star, theta_star_fit)


def birthday_simulate(params: OwfParams, repetitions: int, rng, *, threads: int = 1,
                      cache_dir=None) -> BirthdayReport:
    """Generic birthday attack on the exact-mode function, with a one-parameter fit."""
    outputs = evaluate_exact_full_domain(params, threads=threads, cache_dir=cache_dir)
    return fit_birthday(birthday_thetas(outputs, repetitions, rng), outputs.size)


@dataclass
class CostEstimate:
    classical_eval_ops: float
    exhaustive_ops: float
    exhaustive_leading: float
    grover_queries: float
    t_min: int
    omega_flops: float
    n_cpu: int

    def to_dict(self) -> dict:
        return dict(vars(self))


SECONDS_PER_YEAR = 365.25 * 24 * 3600


def cost_estimates(M: int, N: int, d: int, omega_flops: float, n_cpu: int, nu_max: int,
                   eta: float = 1e-2) -> CostEstimate:
    """Run-time scalings, in seconds, for evaluation and brute-force inversion.

    ``classical_eval_ops`` is ``d^3.5 N^2 2^N / (omega n_cpu)``, ``exhaustive_ops``
    multiplies it by ``t_min``, ``exhaustive_leading`` keeps only the leading
    ``(2N)^N / (omega n_cpu)`` growth, and ``grover_queries`` is ``sqrt(|S|/nu_max)``.
    """
    if min(M, N, d, omega_flops, n_cpu, nu_max) <= 0:
        raise ValueError("all inputs must be positive")
    S = space_size(M, N)
    per_eval = d**3.5 * N**2 * 2.0**N / (omega_flops * n_cpu)
    tm = t_min(S, nu_max, eta) if nu_max < S else 1
    return CostEstimate(
        classical_eval_ops=per_eval,
        exhaustive_ops=tm * per_eval,
        exhaustive_leading=float(2 * N) ** N / (omega_flops * n_cpu),
        grover_queries=math.sqrt(S / nu_max),
        t_min=tm,
        omega_flops=omega_flops,
        n_cpu=n_cpu,
    )
