"""Dense complex linear algebra and quantum-state primitives.

Matrices are plain ``numpy`` complex arrays.  :class:`DensityMatrix` and
:class:`PureBipartiteState` wrap them with subsystem metadata and validate
on construction; after that they are treated as immutable values.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimMismatch,
    IndexOutOfRange,
    InvalidState,
    NotHermitian,
    NotNormalized,
    NotSquare,
)

HERM_TOL = 1e-10
STATE_TOL = 1e-10
NORM_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive, unit-trace Hermitian matrix on a product of subsystems."""

    mat: np.ndarray
    dims: tuple

    def __post_init__(self):
        mat = _frozen(self.mat)
        dims = tuple(int(d) for d in self.dims)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise NotSquare(f"density matrix must be square, got {mat.shape}")
        if int(np.prod(dims)) != mat.shape[0]:
            raise DimMismatch(f"dims {dims} do not multiply to {mat.shape[0]}")
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > HERM_TOL:
            raise NotHermitian("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > STATE_TOL:
            raise InvalidState(f"trace {np.trace(mat).real!r} differs from 1")
        if np.linalg.eigvalsh(mat)[0] < -STATE_TOL:
            raise InvalidState("density matrix has a negative eigenvalue")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)


@dataclass(frozen=True, eq=False)
class PureBipartiteState:
    """Unit vector on R (x) A, stored with R as the leading factor."""

    vec: np.ndarray
    dimR: int
    dimA: int

    def __post_init__(self):
        vec = _frozen(np.ravel(self.vec))
        if vec.size != self.dimR * self.dimA:
            raise DimMismatch(f"vector of size {vec.size} is not {self.dimR}x{self.dimA}")
        if abs(np.linalg.norm(vec) - 1.0) > NORM_TOL:
            raise NotNormalized(f"state norm {np.linalg.norm(vec)!r}")
        object.__setattr__(self, "vec", vec)

    def matrix(self) -> np.ndarray:
        """Coefficients as a dimR x dimA matrix."""
        return self.vec.reshape(self.dimR, self.dimA)

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.vec, self.vec.conj()), (self.dimR, self.dimA))


def as_matrix(x) -> np.ndarray:
    if isinstance(x, DensityMatrix):
        return x.mat
    return np.asarray(x, dtype=complex)


def as_density(x, dims: Sequence[int] | None = None) -> DensityMatrix:
    """Coerce an array (or an existing DensityMatrix) to a DensityMatrix."""
    if isinstance(x, DensityMatrix):
        if dims is not None and tuple(dims) != x.dims:
            return DensityMatrix(x.mat, tuple(dims))
        return x
    m = np.asarray(x, dtype=complex)
    if m.ndim == 1:
        m = np.outer(m, m.conj())
    if dims is None:
        dims = (m.shape[0],)
    return DensityMatrix(m, tuple(dims))


def hermitize(m) -> np.ndarray:
    m = as_matrix(m)
    return 0.5 * (m + m.conj().T)


def kron(*ops) -> np.ndarray:
    """Tensor product of any number of matrices (or vectors)."""
    return reduce(np.kron, [as_matrix(o) for o in ops])


def eigh(m, tol: float = HERM_TOL):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrized before diagonalization; deviations from
    Hermiticity larger than ``tol`` raise :class:`NotHermitian`.
    """
    m = as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got {m.shape}")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def trace_norm(m) -> float:
    """Sum of singular values."""
    m = as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got {m.shape}")
    if np.allclose(m, m.conj().T, atol=1e-13, rtol=0):
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T)))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def partial_trace(rho, keep: Iterable[int], dims: Sequence[int] | None = None) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems appear in ascending index order in the result.
    """
    if isinstance(rho, DensityMatrix):
        mat, dims = rho.mat, rho.dims
    else:
        mat = as_matrix(rho)
        dims = tuple(dims) if dims is not None else (mat.shape[0],)
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep:
        raise IndexOutOfRange("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexOutOfRange(f"keep={keep} outside subsystems 0..{n - 1}")
    t = mat.reshape(tuple(dims) * 2)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    kd = tuple(dims[i] for i in keep)
    size = int(np.prod(kd))
    red = red.reshape(size, size)
    return DensityMatrix(0.5 * (red + red.conj().T), kd)


def purify(rho) -> PureBipartiteState:
    """Purification sum_i sqrt(l_i) |i>_R |e_i>_A with dimR = dim(rho)."""
    rho = as_density(rho)
    d = rho.dim
    w, v = eigh(rho.mat)
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    coeffs = np.sqrt(w)[:, None] * v.T
    vec = coeffs.ravel()
    vec = vec / np.linalg.norm(vec)
    return PureBipartiteState(vec, d, d)


def ket_to_dm(vec, dims: Sequence[int] | None = None) -> DensityMatrix:
    vec = np.asarray(vec, dtype=complex).ravel()
    vec = vec / np.linalg.norm(vec)
    return as_density(np.outer(vec, vec.conj()), dims or (vec.size,))


def maximally_entangled(d: int) -> np.ndarray:
    """The vector sum_i |ii> / sqrt(d)."""
    return np.eye(d, dtype=complex).ravel() / np.sqrt(d)


def maximally_mixed(d: int) -> DensityMatrix:
    return DensityMatrix(np.eye(d, dtype=complex) / d, (d,))


def psd_power(m, power: float, cutoff: float = 1e-12) -> np.ndarray:
    """Power of a PSD matrix restricted to its support (pseudo-inverse for power < 0)."""
    w, v = eigh(m)
    keep = w > cutoff * max(1.0, float(np.max(np.abs(w), initial=0.0)))
    wp = np.zeros_like(w)
    wp[keep] = w[keep] ** power
    return (v * wp) @ v.conj().T


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry (orthonormal columns) of shape rows x cols."""
    z = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
