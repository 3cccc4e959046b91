"""Exact output distributions of the interferometer and their coarse-grained form."""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._workers import pmap
from .configs import BinningScheme, ConfigSpace
from .errors import CapacityError
from .matrix import UnitaryMatrix, ryser_columns

ENUMERATION_CAP = 100_000
_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class OutputDistribution:
    space: ConfigSpace
    input_rank: int
    probs: np.ndarray
    raw_mass: float


@dataclass(frozen=True, eq=False)
class CoarseDistribution:
    d: int
    probs: np.ndarray
    mpb_label: int
    p_max: float
    gap: float

    @classmethod
    def from_probs(cls, probs) -> "CoarseDistribution":
        p = np.asarray(probs, dtype=np.float64)
        mu = int(np.argmax(p))  # first maximum -> smallest label on ties
        p_max = float(p[mu])
        if p.size == 1:
            gap = 1.0
        else:
            gap = p_max - float(np.partition(p, -2)[-2])
        p.setflags(write=False)
        return cls(p.size, p, mu, p_max, gap)


def _check_cap(size: int, cap: int) -> None:
    if size > cap:
        raise CapacityError(
            f"|S|={size} exceeds the enumeration cap {cap}; use sampled mode for spaces this large"
        )


def _weights(U: UnitaryMatrix, outputs: np.ndarray, input_cfg: np.ndarray) -> np.ndarray:
    # cols[j, i, s] = U[outputs[s, i], input_cfg[j]]
    cols = U.matrix.T[input_cfg][:, outputs.T]
    per = ryser_columns(cols)
    return per.real**2 + per.imag**2


def exact_output_distribution(
    U: UnitaryMatrix, input_cfg, *, cap: int = ENUMERATION_CAP, threads: int = 1
) -> OutputDistribution:
    """|Per|^2 over every collision-free output, renormalized on that subspace."""
    N = len(input_cfg)
    space = ConfigSpace(U.M, N)
    _check_cap(space.size, cap)
    cfg = np.asarray(space.validate(input_cfg), dtype=np.intp)
    outputs = space.configurations()
    chunks = [outputs[i : i + _CHUNK] for i in range(0, len(outputs), _CHUNK)]
    weights = np.concatenate(pmap(lambda c: _weights(U, c, cfg), chunks, threads))
    raw = float(weights.sum())
    return OutputDistribution(space, space.rank(tuple(cfg.tolist())), weights / raw, raw)


def coarse_grain(dist: OutputDistribution, scheme: BinningScheme) -> CoarseDistribution:
    labels = scheme.labels(dist.space.size)
    return CoarseDistribution.from_probs(np.bincount(labels, weights=dist.probs, minlength=scheme.d))


def coarse_distribution(U: UnitaryMatrix, input_rank: int, N: int, scheme: BinningScheme,
                        *, cap: int = ENUMERATION_CAP) -> CoarseDistribution:
    space = ConfigSpace(U.M, N)
    return coarse_grain(exact_output_distribution(U, space.unrank(input_rank), cap=cap), scheme)


def exact_mpb(U: UnitaryMatrix, input_rank: int, N: int, scheme: BinningScheme) -> int:
    return coarse_distribution(U, input_rank, N, scheme).mpb_label


class CoarseTable:
    """Coarse distributions for every input configuration of a fixed unitary.

    Rows are computed on demand and memoised; ``fill`` computes the whole table.
    Inserts are idempotent, so concurrent fills produce identical tables.
    """

    def __init__(self, U: UnitaryMatrix, N: int, scheme: BinningScheme,
                 *, cap: int = ENUMERATION_CAP):
        self.U = U
        self.N = N
        self.scheme = scheme
        self.space = ConfigSpace(U.M, N)
        _check_cap(self.space.size, cap)
        self.cap = cap
        self._labels = scheme.labels(self.space.size)
        self.probs = np.full((self.space.size, scheme.d), np.nan)
        self._done = np.zeros(self.space.size, dtype=bool)

    def _compute(self, kappa: int) -> None:
        cfg = np.asarray(self.space.unrank(kappa), dtype=np.intp)
        w = _weights(self.U, self.space.configurations(), cfg)
        self.probs[kappa] = np.bincount(self._labels, weights=w / w.sum(), minlength=self.scheme.d)
        self._done[kappa] = True

    def __getitem__(self, kappa: int) -> CoarseDistribution:
        kappa = int(kappa)
        if not self._done[kappa]:
            self._compute(kappa)
        return CoarseDistribution.from_probs(self.probs[kappa].copy())

    def fill(self, threads: int = 1) -> "CoarseTable":
        todo = np.flatnonzero(~self._done).tolist()
        pmap(self._compute, todo, threads)
        return self

    def mpb_labels(self) -> np.ndarray:
        self.fill()
        return np.argmax(self.probs, axis=1)

    def gaps(self) -> np.ndarray:
        self.fill()
        if self.scheme.d == 1:
            return np.ones(self.space.size)
        top2 = np.partition(self.probs, -2, axis=1)[:, -2:]
        return top2[:, 1] - top2[:, 0]

    # -- disk cache ------------------------------------------------------

    def cache_key(self) -> str:
        h = hashlib.sha256()
        h.update(self.U.checksum().encode())
        h.update(f"|{self.N}|{self.scheme.d}|{self.scheme.strategy.value}".encode())
        return h.hexdigest()[:32]

    @classmethod
    def cached(cls, U: UnitaryMatrix, N: int, scheme: BinningScheme, cache_dir=None,
               *, threads: int = 1, cap: int = ENUMERATION_CAP) -> "CoarseTable":
        """Full table, loaded from / stored to ``cache_dir`` (or ``$BOSON_OWF_CACHE_DIR``)."""
        table = cls(U, N, scheme, cap=cap)
        cache_dir = cache_dir or os.environ.get("BOSON_OWF_CACHE_DIR")
        if not cache_dir:
            return table.fill(threads)
        path = Path(cache_dir) / f"coarse-{table.cache_key()}.npy"
        if path.exists():
            probs = np.load(path)
            if probs.shape == table.probs.shape:
                table.probs = probs
                table._done[:] = True
                return table
        table.fill(threads)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp.npy")
        np.save(tmp, table.probs)
        os.replace(tmp, path)
        return table


def gap_census(U: UnitaryMatrix, N: int, scheme: BinningScheme, *, threads: int = 1,
               cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Gap between the two largest bin probabilities, for every input configuration."""
    return CoarseTable(U, N, scheme, cap=cap).fill(threads).gaps()


def eps_close_fraction(U: UnitaryMatrix, N: int, scheme: BinningScheme, eps: float,
                       *, threads: int = 1, cap: int = ENUMERATION_CAP) -> float:
    """Fraction of inputs whose coarse distribution has two maxima within ``eps``."""
    gaps = gap_census(U, N, scheme, threads=threads, cap=cap)
    return float(np.mean(gaps <= eps))
