"""Haar-random unitaries, submatrices and matrix permanents.

Complex matrices are plain ``numpy`` arrays of dtype ``complex128``.  The
permanent routines accept either a single ``(N, N)`` matrix or a stack
``(..., N, N)``; stacks are evaluated in one vectorized pass, which is what
makes enumerating whole output distributions cheap at desk scale.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from itertools import permutations
from pathlib import Path

import numpy as np

from .errors import BoundsError, DimensionError, IntegrityError, SizeLimitError

MAX_RYSER_SIZE = 32
MAX_NAIVE_SIZE = 9
UNITARITY_TOLERANCE = 1e-10


def unitarity_defect(matrix: np.ndarray) -> float:
    """Max-norm of ``U^H U - I``."""
    m = matrix.shape[0]
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(m))))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """An ``M x M`` unitary together with the seed that generated it."""

    matrix: np.ndarray
    seed: int
    unitarity_defect: float

    @property
    def M(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_array(cls, matrix, seed: int = 0) -> "UnitaryMatrix":
        mat = np.array(matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"unitary must be square, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("unitary entries must be finite")
        mat.setflags(write=False)
        return cls(mat, int(seed), unitarity_defect(mat))

    @classmethod
    def identity(cls, M: int) -> "UnitaryMatrix":
        return cls.from_array(np.eye(M), seed=0)

    def checksum(self) -> str:
        return hashlib.sha256(_canonical_entries(self.matrix).encode("ascii")).hexdigest()

    def save(self, path) -> None:
        Path(path).write_text(dumps_unitary(self))

    @classmethod
    def load(cls, path) -> "UnitaryMatrix":
        return loads_unitary(Path(path).read_text())


def haar_random_unitary(M: int, seed: int) -> UnitaryMatrix:
    """Draw a Haar-distributed ``M x M`` unitary, deterministic in ``seed``.

    Uses the Ginibre construction: QR-factorize a matrix of i.i.d. standard
    complex Gaussians and rescale the columns of Q by the phases of diag(R).
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    return UnitaryMatrix.from_array(q, seed=seed)


def _check_square(a: np.ndarray) -> int:
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"permanent needs square matrices, got shape {a.shape}")
    return a.shape[-1]


def permanent_ryser(a) -> complex | np.ndarray:
    """Permanent by Ryser's formula, visiting column subsets in Gray-code order.

    Each Gray-code step flips exactly one column in or out of the subset, so the
    row sums are updated with a single vector add.  Works on a single matrix or
    on a stack of matrices (leading axes are batch axes).
    """
    a = np.asarray(a, dtype=np.complex128)
    n = _check_square(a)
    if n < 1:
        raise DimensionError("permanent of an empty matrix is not defined here")
    if n > MAX_RYSER_SIZE:
        raise SizeLimitError(f"N={n} exceeds the Ryser limit of {MAX_RYSER_SIZE}")

    # cols[j, i] is the batch of entries a[..., i, j]
    total = ryser_columns(np.ascontiguousarray(np.moveaxis(a, (-1, -2), (0, 1))))
    return complex(total) if total.ndim == 0 else total


def ryser_columns(cols: np.ndarray) -> np.ndarray:
    """Gray-code Ryser kernel on column-major input ``cols[j, i, ...] = A[..., i, j]``."""
    n = cols.shape[0]
    batch = cols.shape[2:]
    rowsums = np.zeros((n,) + batch, dtype=np.complex128)
    total = np.zeros(batch, dtype=np.complex128)
    term = np.empty(batch, dtype=np.complex128)
    in_subset = [False] * n
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        if in_subset[j]:
            rowsums -= cols[j]
        else:
            rowsums += cols[j]
        in_subset[j] = not in_subset[j]
        np.copyto(term, rowsums[0])
        for i in range(1, n):
            term *= rowsums[i]
        # subset size parity equals parity of k along a Gray code
        if k & 1:
            total -= term
        else:
            total += term
    if n & 1:
        total = -total
    return total


def permanent_naive(a) -> complex:
    """Permanent as the explicit sum over all ``N!`` permutations (test oracle)."""
    a = np.asarray(a, dtype=np.complex128)
    n = _check_square(a)
    if a.ndim != 2:
        raise DimensionError("permanent_naive takes a single matrix")
    if n > MAX_NAIVE_SIZE:
        raise SizeLimitError(f"N={n} too large for the factorial expansion (max {MAX_NAIVE_SIZE})")
    perms = np.array(list(permutations(range(n))), dtype=np.intp)
    rows = np.arange(n)
    return complex(a[rows, perms].prod(axis=1).sum())


def submatrix(U: UnitaryMatrix, input_cfg, output_cfg) -> np.ndarray:
    """Rows are the output ports, columns the input ports."""
    inp = np.asarray(input_cfg, dtype=np.intp)
    out = np.asarray(output_cfg, dtype=np.intp)
    if inp.shape != out.shape or inp.ndim != 1:
        raise DimensionError("input and output configurations must have the same length")
    M = U.M
    for port in (*inp.tolist(), *out.tolist()):
        if not 0 <= port < M:
            raise BoundsError(f"port {port} outside [0, {M})")
    return U.matrix[np.ix_(out, inp)]


# -- persistence -------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _canonical_entries(matrix: np.ndarray) -> str:
    return ";".join(f"{_fmt(z.real)},{_fmt(z.imag)}" for z in matrix.ravel())


def dumps_unitary(U: UnitaryMatrix) -> str:
    entries = ", ".join(f"[{_fmt(z.real)}, {_fmt(z.imag)}]" for z in U.matrix.ravel())
    return (
        "{"
        f'"M": {U.M}, "seed": {U.seed}, '
        f'"entries": [{entries}], '
        f'"checksum": "{U.checksum()}"'
        "}\n"
    )


def loads_unitary(text: str, *, check_unitarity: bool = True) -> UnitaryMatrix:
    data = json.loads(text)
    try:
        M = int(data["M"])
        entries = np.asarray(data["entries"], dtype=np.float64)
        checksum = data["checksum"]
        seed = int(data.get("seed", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"malformed unitary file: {exc}") from exc
    if entries.shape != (M * M, 2):
        raise IntegrityError(f"expected {M * M} [re, im] entries, got shape {entries.shape}")
    mat = (entries[:, 0] + 1j * entries[:, 1]).reshape(M, M)
    U = UnitaryMatrix.from_array(mat, seed=seed)
    if U.checksum() != checksum:
        raise IntegrityError("checksum mismatch")
    if check_unitarity and (not math.isfinite(U.unitarity_defect) or U.unitarity_defect > UNITARITY_TOLERANCE):
        raise IntegrityError(f"matrix is not unitary (defect {U.unitarity_defect:.3g})")
    return U
