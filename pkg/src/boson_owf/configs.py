"""Collision-free boson configurations: enumeration, ranking and binning.

A configuration is a strictly increasing tuple of ``N`` ports drawn from
``range(M)``.  The configuration space is ordered lexicographically and
ranked with the combinatorial number system, so ``rank``/``unrank`` cost
``O(N)`` binomial evaluations and never enumerate the space.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import BoundsError, CapacityError, ConfigurationError

Configuration = tuple[int, ...]

CAPACITY_BITS = 128


def space_size(M: int, N: int) -> int:
    """Number of collision-free configurations, ``C(M, N)``."""
    if not 1 <= N <= M:
        raise ValueError(f"need 1 <= N <= M, got M={M}, N={N}")
    size = math.comb(M, N)
    if size.bit_length() > CAPACITY_BITS:
        raise CapacityError(f"C({M}, {N}) does not fit in {CAPACITY_BITS} bits")
    return size


def bit_length(M: int, N: int) -> int:
    """Bits needed to spell out the occupied ports, ``N * (floor(log2 M) + 1)``."""
    if M < 1 or N < 1:
        raise ValueError("M and N must be positive")
    return N * M.bit_length()


@dataclass(frozen=True)
class ConfigSpace:
    M: int
    N: int

    def __post_init__(self):
        space_size(self.M, self.N)

    @property
    def size(self) -> int:
        return space_size(self.M, self.N)

    def __len__(self) -> int:
        return self.size

    def validate(self, cfg) -> Configuration:
        ports = tuple(int(p) for p in cfg)
        if len(ports) != self.N:
            raise ConfigurationError(f"expected {self.N} ports, got {len(ports)}")
        if any(not 0 <= p < self.M for p in ports):
            raise ConfigurationError(f"ports {ports} not all in [0, {self.M})")
        if any(a >= b for a, b in zip(ports, ports[1:])):
            raise ConfigurationError(f"ports {ports} are not strictly increasing")
        return ports

    def rank(self, cfg) -> int:
        return rank(cfg, self)

    def unrank(self, index: int) -> Configuration:
        return unrank(index, self)

    def configurations(self) -> np.ndarray:
        """All configurations as a read-only ``(size, N)`` array in rank order."""
        return _enumerate(self.M, self.N)


def rank(cfg, space: ConfigSpace) -> int:
    """Lexicographic position of ``cfg`` among all sorted N-subsets of ``range(M)``."""
    ports = space.validate(cfg)
    M, N = space.M, space.N
    tail = sum(math.comb(M - 1 - p, N - i) for i, p in enumerate(ports))
    return space.size - 1 - tail


def unrank(index: int, space: ConfigSpace) -> Configuration:
    """Inverse of :func:`rank`."""
    size = space.size
    index = int(index)
    if not 0 <= index < size:
        raise BoundsError(f"index {index} outside [0, {size})")
    M, N = space.M, space.N
    # complement index in the colex-style sum used by ``rank``
    remaining = size - 1 - index
    ports = []
    lo = 0
    for i in range(N):
        k = N - i
        # largest p >= lo with C(M-1-p, k) <= remaining, i.e. smallest such p
        p = lo
        while math.comb(M - 1 - p, k) > remaining:
            p += 1
        remaining -= math.comb(M - 1 - p, k)
        ports.append(p)
        lo = p + 1
    return tuple(ports)


@lru_cache(maxsize=16)
def _enumerate(M: int, N: int) -> np.ndarray:
    arr = np.array(list(combinations(range(M), N)), dtype=np.intp).reshape(-1, N)
    arr.setflags(write=False)
    return arr


class Binning(enum.Enum):
    CONTIGUOUS = "contiguous"
    MODULO = "modulo"


@dataclass(frozen=True)
class BinningScheme:
    """Partition of ``Z_|S|`` into ``d`` bins of near-equal size."""

    d: int
    strategy: Binning = Binning.CONTIGUOUS

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        object.__setattr__(self, "strategy", Binning(self.strategy))

    def labels(self, size: int) -> np.ndarray:
        """Bin label of every rank in ``range(size)``."""
        if self.d > size:
            raise ValueError(f"d={self.d} exceeds space size {size}")
        idx = np.arange(size, dtype=np.int64)
        if self.strategy is Binning.CONTIGUOUS:
            return (idx * self.d) // size
        return idx % self.d


def bin_of(index: int, space: ConfigSpace, scheme: BinningScheme) -> int:
    size = space.size
    if not 0 <= index < size:
        raise BoundsError(f"index {index} outside [0, {size})")
    if scheme.strategy is Binning.CONTIGUOUS:
        return index * scheme.d // size
    return index % scheme.d
