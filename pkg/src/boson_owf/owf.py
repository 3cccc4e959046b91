"""The coarse-grained boson-sampling one-way function.

``evaluate`` maps ``x`` in ``Z_|S|`` to ``y`` in ``Z_|S|``:

1. seed schedule: ``kappa_0 = x``, ``kappa_j = kappa_{j-1} + int(|S| |sin(j-1)|) mod |S|``;
2. for each round find the most probable bin of the coarse distribution of
   input configuration ``kappa_j`` (exactly, or by the adaptive estimator, in
   which case an ABORT moves on to ``kappa_j + 1``);
3. turn the ``N`` bin labels into ``N`` distinct ports by striking labels out
   of the ascending list of free ports, and rank the sorted result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .configs import Binning, BinningScheme, ConfigSpace
from .distribution import ENUMERATION_CAP, CoarseTable
from .errors import EvaluationError
from .matrix import UnitaryMatrix
from .mpb import Algo1Params, estimate_mpb
from .sampling import RngStream, build_sampler


@dataclass(frozen=True, eq=False)
class OwfParams:
    unitary: UnitaryMatrix
    N: int
    d: int
    strategy: Binning = Binning.CONTIGUOUS
    mode: str = "exact"
    algo1: Algo1Params | None = None
    retry_cap: int | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if self.mode == "sampled" and self.algo1 is None:
            object.__setattr__(self, "algo1", Algo1Params())
        if self.d > self.space.size:
            raise ValueError(f"d={self.d} exceeds |S|={self.space.size}")

    @property
    def M(self) -> int:
        return self.unitary.M

    @property
    def space(self) -> ConfigSpace:
        return ConfigSpace(self.unitary.M, self.N)

    @property
    def scheme(self) -> BinningScheme:
        return BinningScheme(self.d, self.strategy)

    @property
    def max_retries(self) -> int:
        return self.space.size if self.retry_cap is None else self.retry_cap


@dataclass
class RoundTrace:
    scheduled_kappa: int
    aborts: int
    kappa: int
    mu_tilde: int


@dataclass
class OwfTrace:
    rounds: list[RoundTrace] = field(default_factory=list)
    phi: tuple[int, ...] = ()
    y: int = -1

    @property
    def mu_tilde(self) -> tuple[int, ...]:
        return tuple(r.mu_tilde for r in self.rounds)

    def to_dict(self) -> dict:
        return {
            "rounds": [vars(r).copy() for r in self.rounds],
            "mu_tilde": list(self.mu_tilde),
            "phi": list(self.phi),
            "y": self.y,
            # chaining rule after an abort: next round starts from the substituted kappa
            "chain_from": "substituted",
        }


def kappa_offset(j: int, size: int) -> int:
    """``int(|S| * |sin(j - 1)|)``, using the exact value of the double ``sin``."""
    return math.floor(Fraction(abs(math.sin(j - 1))) * size)


def next_kappa(kappa_prev: int, j: int, size: int) -> int:
    if not 0 <= kappa_prev < size:
        raise ValueError(f"kappa {kappa_prev} outside [0, {size})")
    if j < 1:
        raise ValueError("round index starts at 1")
    return (kappa_prev + kappa_offset(j, size)) % size


def fisher_yates_map(mu_tilde, M: int) -> tuple[int, ...]:
    """Occupied ports, in order of occupation, selected by the bin labels.

    Round ``j`` removes the ``(mu_j mod M_f)``-th free port (zero-based, counting
    from the lowest) where ``M_f = M - j + 1`` ports are still free.
    """
    if len(mu_tilde) > M:
        raise ValueError("more bosons than ports")
    free = list(range(M))
    phi = []
    for mu in mu_tilde:
        if mu < 0:
            raise ValueError("bin labels must be non-negative")
        phi.append(free.pop(int(mu) % len(free)))
    return tuple(phi)


def output_rank(mu_tilde, space: ConfigSpace) -> tuple[tuple[int, ...], int]:
    phi = fisher_yates_map(mu_tilde, space.M)
    return phi, space.rank(sorted(phi))


def evaluate(x: int, params: OwfParams, rng: RngStream | None = None,
             table: CoarseTable | None = None) -> tuple[int, OwfTrace]:
    """Evaluate the one-way function at ``x``; returns ``(y, trace)``.

    ``table`` memoises coarse distributions across calls.  ``rng`` is required
    in sampled mode and ignored in exact mode.
    """
    space = params.space
    size = space.size
    if not 0 <= x < size:
        raise ValueError(f"input {x} outside [0, {size})")
    if params.mode == "sampled" and rng is None:
        raise ValueError("sampled mode needs an RngStream")
    if table is None:
        table = CoarseTable(params.unitary, params.N, params.scheme)

    trace = OwfTrace()
    kappa = x
    for j in range(1, params.N + 1):
        kappa = next_kappa(kappa, j, size)
        scheduled = kappa
        aborts = 0
        while True:
            coarse = table[kappa]
            if params.mode == "exact":
                mu = coarse.mpb_label
                break
            outcome = estimate_mpb(build_sampler(coarse), params.d, params.algo1,
                                   rng.derive("round", j, "attempt", aborts))
            if outcome.ended:
                mu = outcome.mu_tilde
                break
            aborts += 1
            if aborts > params.max_retries:
                raise EvaluationError(f"round {j}: {aborts} consecutive aborts (cap {params.max_retries})")
            kappa = (kappa + 1) % size
        trace.rounds.append(RoundTrace(scheduled, aborts, kappa, int(mu)))

    trace.phi, trace.y = output_rank(trace.mu_tilde, space)
    return trace.y, trace


def evaluate_exact_full_domain(params: OwfParams, *, threads: int = 1, cache_dir=None,
                               cap: int = ENUMERATION_CAP) -> np.ndarray:
    """``F(x)`` for every ``x`` in exact mode, computing each distribution once."""
    if params.mode != "exact":
        raise ValueError("full-domain evaluation requires exact mode")
    table = CoarseTable.cached(params.unitary, params.N, params.scheme, cache_dir,
                               threads=threads, cap=cap)
    return full_domain_from_mpbs(table.mpb_labels(), params.space)


def full_domain_from_mpbs(mpb: np.ndarray, space: ConfigSpace) -> np.ndarray:
    """Exact-mode outputs given the MPB label of every input configuration.

    Without aborts the schedule offsets do not depend on ``x``, so round ``j``
    reads ``mpb[(x + c_j) mod |S|]`` for a fixed shift ``c_j``.
    """
    size = space.size
    xs = np.arange(size)
    shift = 0
    cols = []
    for j in range(1, space.N + 1):
        shift = (shift + kappa_offset(j, size)) % size
        cols.append(mpb[(xs + shift) % size])
    mus = np.stack(cols, axis=1).tolist()
    return np.array([output_rank(m, space)[1] for m in mus], dtype=np.int64)
