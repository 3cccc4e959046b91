"""Adaptive most-probable-bin estimation with END/ABORT semantics.

The estimator grows a record of coarse-grained labels by ``delta_n`` draws
per round, bootstraps the cumulative record, and stops as soon as a single
bin wins at least a ``1 - xi`` share of the bootstrap samples.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from ._workers import pmap
from .bootstrap import BootstrapSummary, bootstrap_counts
from .errors import CapacityError, SourceError
from .sampling import RngStream, build_sampler

BinSource = Callable[[int, np.random.Generator], np.ndarray]


class Status(enum.Enum):
    END = "END"
    ABORT = "ABORT"


@dataclass(frozen=True)
class Algo1Params:
    num_bootstraps: int = 10_000
    delta_n: int = 100_000
    max_rounds: int = 10
    xi: float = 1e-2
    ci_gamma: float = 1e-3

    def __post_init__(self):
        if self.num_bootstraps < 100:
            raise ValueError("num_bootstraps must be >= 100")
        if self.delta_n <= self.num_bootstraps:
            raise ValueError("delta_n must exceed num_bootstraps")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if not 0 < self.xi < 0.5:
            raise ValueError("xi must lie in (0, 0.5)")

    @property
    def budget(self) -> int:
        return self.max_rounds * self.delta_n


@dataclass(eq=False)
class Algo1Outcome:
    status: Status
    mu_tilde: int | None
    rounds_used: int
    total_samples: int
    omega_max: float
    final_summary: BootstrapSummary | None
    votes: dict | None = field(default=None)

    @property
    def ended(self) -> bool:
        return self.status is Status.END

    def to_dict(self) -> dict:
        out = {
            "status": self.status.value,
            "mu_tilde": self.mu_tilde,
            "rounds_used": self.rounds_used,
            "total_samples": self.total_samples,
            "omega_max": self.omega_max,
            "final_summary": self.final_summary.to_dict() if self.final_summary else None,
        }
        if self.votes is not None:
            out["votes"] = {str(k): v for k, v in self.votes.items()}
        return out


def _accepted(omega_max: float, xi: float) -> bool:
    return omega_max >= 1.0 - xi - 1e-12


def _draw_round(bin_source, d: int, n: int, rng: RngStream, round_: int) -> np.ndarray:
    # the bootstrap only sees label counts, so a source that can produce counts
    # directly (a multinomial draw) skips materialising the labels
    fast = getattr(bin_source, "counts", None)
    try:
        if fast is not None:
            counts = np.asarray(fast(n, rng.generator()))
            if counts.shape != (d,) or counts.min() < 0 or counts.sum() != n:
                raise SourceError(f"bin source returned malformed counts in round {round_}")
            return counts.astype(np.int64)
        labels = np.asarray(bin_source(n, rng.generator()))
    except SourceError:
        raise
    except Exception as exc:
        raise SourceError(f"bin source failed in round {round_}: {exc}") from exc
    if labels.shape != (n,):
        raise SourceError(f"bin source returned {labels.shape}, expected ({n},)")
    if labels.size and (labels.min() < 0 or labels.max() >= d):
        raise SourceError(f"bin source returned labels outside [0, {d})")
    return np.bincount(labels.astype(np.int64), minlength=d)


def estimate_mpb(bin_source: BinSource, d: int, params: Algo1Params, rng: RngStream,
                 *, threads: int = 1) -> Algo1Outcome:
    """Run the adaptive estimator against ``bin_source``.

    ``bin_source(count, generator)`` must return ``count`` labels in ``range(d)``;
    a source with a ``counts(count, generator)`` method is asked for label counts
    instead.  Anything it raises (or any label it returns out of range) surfaces as
    :class:`SourceError`; ABORT is reserved for inconclusive statistics.
    """
    counts = np.zeros(d, dtype=np.int64)
    summary = None
    for round_ in range(1, params.max_rounds + 1):
        counts += _draw_round(bin_source, d, params.delta_n, rng.derive("round", round_), round_)
        summary = bootstrap_counts(counts, params.num_bootstraps, params.ci_gamma,
                                   rng.derive("bootstrap", round_), threads=threads)
        summary.mpb_sequence = None
        if _accepted(summary.omega_max, params.xi):
            return Algo1Outcome(Status.END, summary.mu_tilde, round_,
                                round_ * params.delta_n, summary.omega_max, summary)
    return Algo1Outcome(Status.ABORT, None, params.max_rounds, params.budget,
                        summary.omega_max, summary)


def estimate_mpb_majority(bin_source: BinSource, d: int, params: Algo1Params, r: int,
                          rng: RngStream, *, threads: int = 1) -> Algo1Outcome:
    """Repeat the estimator ``r`` times and take a strict majority vote.

    The result is END with label ``b`` only if more than ``r / 2`` of the runs
    ended with ``b``.  Sample and round counts are totals over all runs; the
    ``omega_max`` and ``final_summary`` reported are those of a representative
    run (the first vote for the winner, else the first run).
    """
    if r < 3 or r % 2 == 0:
        raise ValueError("r must be an odd integer >= 3")
    runs = pmap(lambda i: estimate_mpb(bin_source, d, params, rng.derive("majority", i)),
                range(r), threads)
    votes = Counter(o.mu_tilde for o in runs if o.ended)
    winner = None
    if votes:
        label, n = votes.most_common(1)[0]
        if n > r // 2:
            winner = label
    rep = next((o for o in runs if o.ended and o.mu_tilde == winner), runs[0])
    return Algo1Outcome(
        Status.END if winner is not None else Status.ABORT,
        winner,
        sum(o.rounds_used for o in runs),
        sum(o.total_samples for o in runs),
        rep.omega_max,
        rep.final_summary,
        votes=dict(sorted(votes.items())),
    )


def recommended_budget(d: int) -> int:
    """Total sample budget ``ceil(1.8e5 * d**3.5)``, computed exactly in integers."""
    if d < 1:
        raise ValueError("d must be >= 1")
    # 1.8e5 * d^3.5 = sqrt(1.8e5^2 * d^7)
    v = 180_000**2 * d**7
    root = math.isqrt(v)
    budget = root if root * root == v else root + 1
    if budget.bit_length() > 128:
        raise CapacityError(f"recommended budget for d={d} exceeds 128 bits")
    return budget


class StatusProbabilities(NamedTuple):
    p_s: float
    p_f: float
    p_inconclusive: float
    successes: int
    failures: int
    aborts: int


def status_probabilities(coarse, params: Algo1Params, repetitions: int, rng: RngStream,
                         *, threads: int = 1) -> StatusProbabilities:
    """Success / failure / inconclusive rates of the estimator on a known distribution."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    sampler = build_sampler(coarse)
    mu = coarse.mpb_label
    outcomes = pmap(lambda i: estimate_mpb(sampler, coarse.d, params, rng.derive("rep", i)),
                    range(repetitions), threads)
    s = sum(1 for o in outcomes if o.ended and o.mu_tilde == mu)
    f = sum(1 for o in outcomes if o.ended and o.mu_tilde != mu)
    a = repetitions - s - f
    return StatusProbabilities(s / repetitions, f / repetitions, a / repetitions, s, f, a)


def rounds_to_end(coarse, params: Algo1Params, repetitions: int, rng: RngStream,
                  *, threads: int = 1) -> list[tuple[int, int | None]]:
    """``(rounds_used, mu_tilde)`` per repetition, ``mu_tilde=None`` on ABORT.

    Round ``l`` of a run draws from a stream keyed only by ``l``, so a run that
    ends at round ``l`` under ``max_rounds = L`` ends identically for every
    ``L >= l``.  One run with a large ``max_rounds`` therefore gives the success
    rate at every smaller budget.
    """
    sampler = build_sampler(coarse)
    outcomes = pmap(lambda i: estimate_mpb(sampler, coarse.d, params, rng.derive("rep", i)),
                    range(repetitions), threads)
    return [(o.rounds_used, o.mu_tilde) for o in outcomes]
