"""Coarse-grained sample generation.

Records of bin labels are what the bootstrap and the MPB estimator consume.
Here they are drawn from an exact coarse distribution with Vose's alias
method; records produced elsewhere (e.g. by hardware) can be read from disk
and analysed the same way.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream.

    ``(seed, stream_id)`` fully determines the stream.  ``derive`` builds child
    streams from arbitrary keys so that every logical task (round, bootstrap
    chunk, repetition, ...) owns its randomness regardless of scheduling.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64 or not 0 <= self.stream_id <= _MASK64:
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")

    def derive(self, *keys) -> "RngStream":
        h = hashlib.blake2b(digest_size=8)
        h.update(self.stream_id.to_bytes(8, "little"))
        for key in keys:
            h.update(b"\x1f")
            h.update(str(key).encode())
        return RngStream(self.seed, int.from_bytes(h.digest(), "little"))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


@dataclass(frozen=True, eq=False)
class SampleRecord:
    """Sequence of recorded bin labels ``a_1 ... a_N``."""

    d: int
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size < 1:
            raise ValueError("a sample record needs at least one label")
        if self.d < 1 or labels.min() < 0 or labels.max() >= self.d:
            raise ValueError(f"labels must lie in [0, {self.d})")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.labels.size

    def counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.d)

    def save(self, path) -> None:
        body = "\n".join(map(str, self.labels.tolist()))
        Path(path).write_text(f"# d={self.d}\n{body}\n")

    @classmethod
    def load(cls, path, d: int | None = None) -> "SampleRecord":
        labels = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                if key.strip() == "d" and d is None:
                    d = int(value)
                continue
            labels.append(int(line))
        if d is None:
            d = max(labels) + 1 if labels else 1
        return cls(d, np.array(labels, dtype=np.int64))


class AliasSampler:
    """O(1)-per-draw sampler over ``range(d)`` (Vose's alias method).

    Calling the sampler as ``sampler(count, generator)`` returns ``count`` i.i.d.
    labels, which is the bin-source protocol expected by the MPB estimator.
    """

    def __init__(self, probs):
        p = np.asarray(probs, dtype=np.float64)
        if p.ndim != 1 or p.size < 1 or np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be a non-empty, non-negative vector")
        total = math.fsum(p.tolist())
        if total <= 0:
            raise ValueError("probabilities sum to zero")
        d = p.size
        scaled = [x * d / total for x in p.tolist()]
        prob = [1.0] * d
        alias = list(range(d))
        small = [i for i, w in enumerate(scaled) if w < 1.0]
        large = [i for i, w in enumerate(scaled) if w >= 1.0]
        while small and large:
            s = small.pop()
            g = large.pop()
            prob[s] = scaled[s]
            alias[s] = g
            # (w_g + w_s) - 1 loses less precision than w_g - (1 - w_s)
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            (small if scaled[g] < 1.0 else large).append(g)
        # leftovers are 1 up to rounding
        self.d = d
        self.probs = p / total
        self.prob = np.array(prob)
        self.alias = np.array(alias, dtype=np.int64)

    def probabilities(self) -> np.ndarray:
        """Per-label probability implied by the table."""
        out = self.prob.copy()
        np.add.at(out, self.alias, 1.0 - self.prob)
        return out / self.d

    def __call__(self, count: int, generator: np.random.Generator) -> np.ndarray:
        idx = generator.integers(0, self.d, size=count)
        keep = generator.random(count) < self.prob[idx]
        return np.where(keep, idx, self.alias[idx])

    def counts(self, count: int, generator: np.random.Generator) -> np.ndarray:
        """Label counts of ``count`` draws, without materialising the labels."""
        return generator.multinomial(count, self.probs)


def build_sampler(coarse) -> AliasSampler:
    """Alias sampler for a :class:`CoarseDistribution` (or a raw probability vector)."""
    probs = getattr(coarse, "probs", coarse)
    return AliasSampler(probs)


def draw_bins(sampler: AliasSampler, count: int, rng) -> SampleRecord:
    if count < 1:
        raise ValueError("count must be >= 1")
    labels = sampler(int(count), as_generator(rng))
    return SampleRecord(sampler.d, labels)


def chernoff_sample_size(d: int, eps: float, gamma: float) -> int:
    """Sample size ``ceil(12 d ln(2/gamma) / eps^2)`` for a width-``eps`` CI on P_max."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not 0 < eps < 1 / d:
        raise ValueError(f"eps must lie in (0, 1/d) = (0, {1 / d:.4g})")
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    return math.ceil(12 * d * math.log(2 / gamma) / eps**2)
