"""Bootstrap analysis of a coarse-grained sample record.

Every bootstrap sample is ``N`` draws with replacement from the recorded
labels.  Only the label counts of a resample matter, and the counts of ``N``
uniform index draws from a record with counts ``n_beta`` are exactly
``Multinomial(N, n_beta / N)``; the default ``method="multinomial"`` draws
those counts directly, ``method="indices"`` performs the literal index
resampling.  Both see nothing but the record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._workers import pmap
from .sampling import RngStream, SampleRecord

CHUNK = 1000


def frequencies(sample: SampleRecord) -> np.ndarray:
    """Empirical frequencies ``n_beta / N``."""
    if len(sample) == 0:
        raise ValueError("empty sample")
    return sample.counts() / len(sample)


def percentile(sorted_values, zeta: float) -> float:
    """Nearest-rank percentile: element ``ceil(zeta * n) - 1``, clamped to the list."""
    n = len(sorted_values)
    if n == 0:
        raise ValueError("percentile of an empty list")
    # round first so that e.g. 0.9995 * 10000 lands on 9995, not 9995.000000001
    k = math.ceil(round(zeta * n, 9)) - 1
    return float(sorted_values[min(max(k, 0), n - 1)])


@dataclass(eq=False)
class BootstrapSummary:
    p_max: float
    mpb_empirical: int
    ci_low: float
    ci_high: float
    ci_width: float
    omega: dict
    omega_max: float
    mu_tilde: int
    num_bootstraps: int
    gamma: float
    sample_size: int
    mpb_sequence: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self, emit_mpb_sequence: bool = False) -> dict:
        out = {
            "p_max": self.p_max,
            "mpb_empirical": self.mpb_empirical,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "ci_width": self.ci_width,
            "omega": {str(k): v for k, v in sorted(self.omega.items())},
            "omega_max": self.omega_max,
            "mu_tilde": self.mu_tilde,
            "num_bootstraps": self.num_bootstraps,
            "gamma": self.gamma,
            "sample_size": self.sample_size,
        }
        if emit_mpb_sequence and self.mpb_sequence is not None:
            out["mpb_sequence"] = self.mpb_sequence.tolist()
        return out


def _resample_chunk(counts, labels, size, method, rng: RngStream):
    gen = rng.generator()
    n = int(counts.sum())
    if method == "multinomial":
        # draw in a label-independent order so relabeling bins permutes the result
        order = np.argsort(-counts, kind="stable")
        boot = np.empty((size, counts.size), dtype=np.int64)
        boot[:, order] = gen.multinomial(n, counts[order] / n, size=size)
    else:
        boot = np.empty((size, counts.size), dtype=np.int64)
        for b in range(size):
            idx = gen.integers(0, n, size=n)
            boot[b] = np.bincount(labels[idx], minlength=counts.size)
    return boot.max(axis=1), boot.argmax(axis=1)


def bootstrap_counts(counts, num_bootstraps: int, gamma: float, rng: RngStream, *,
                     method: str = "multinomial", labels=None, threads: int = 1) -> BootstrapSummary:
    """Bootstrap analysis driven by the label counts of a record.

    ``labels`` is only needed for ``method="indices"``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if num_bootstraps < 1:
        raise ValueError("num_bootstraps must be positive")
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if method not in ("multinomial", "indices"):
        raise ValueError(f"unknown resampling method {method!r}")
    if method == "indices" and labels is None:
        raise ValueError("index resampling needs the label record")
    n = int(counts.sum())
    if n < 1:
        raise ValueError("empty sample")
    d = counts.size

    c_max = int(counts.max())
    mu_hat = int(counts.argmax())
    sizes = [min(CHUNK, num_bootstraps - s) for s in range(0, num_bootstraps, CHUNK)]
    parts = pmap(
        lambda item: _resample_chunk(counts, labels, item[1], method, rng.derive("bootstrap", item[0])),
        list(enumerate(sizes)),
        threads,
    )
    star_max = np.concatenate([p[0] for p in parts])
    mpb_seq = np.concatenate([p[1] for p in parts])

    deltas = np.sort((star_max - c_max) / n)
    p_max = c_max / n
    lo_q = percentile(deltas, 1 - gamma / 2)
    hi_q = percentile(deltas, gamma / 2)
    omega_counts = np.bincount(mpb_seq, minlength=d)
    mu_tilde = int(omega_counts.argmax())
    omega = {int(b): c / num_bootstraps for b, c in enumerate(omega_counts.tolist()) if c}
    return BootstrapSummary(
        p_max=p_max,
        mpb_empirical=mu_hat,
        ci_low=p_max - lo_q,
        ci_high=p_max - hi_q,
        ci_width=lo_q - hi_q,
        omega=omega,
        omega_max=int(omega_counts[mu_tilde]) / num_bootstraps,
        mu_tilde=mu_tilde,
        num_bootstraps=num_bootstraps,
        gamma=gamma,
        sample_size=n,
        mpb_sequence=mpb_seq,
    )


def bootstrap_analyze(sample: SampleRecord, num_bootstraps: int, gamma: float, rng: RngStream,
                      *, method: str = "multinomial", threads: int = 1) -> BootstrapSummary:
    """Percentile CI for P_max and most-frequent-bin statistics of ``sample``."""
    if num_bootstraps < 100:
        raise ValueError("num_bootstraps must be >= 100")
    return bootstrap_counts(sample.counts(), num_bootstraps, gamma, rng, method=method,
                            labels=sample.labels, threads=threads)
