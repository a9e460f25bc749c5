"""Entanglement of formation.

``eof`` minimizes the average pure-state entanglement over ensemble
decompositions, parameterized as phi_i = sum_j U_ij sqrt(l_j) e_j with U an
m x rank isometry.  Every iterate is a valid decomposition, so the result
is an upper bound on E_f.  ``wootters_eof`` is the closed form for two
qubits and serves as the oracle.

The descent loop runs in the compiled ``_eofcore`` extension when it is
importable and falls back to ``_eofcore_py`` otherwise.  Set
``ENTLOSS_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import _eofcore_py, qcore
from .entropy import entropy_of_spectrum
from .errors import BadParam, DimMismatch, DimTooLarge, NotNormalized
from .qcore import DensityMatrix

try:
    from . import _eofcore as _compiled
except ImportError:  # extension not built
    _compiled = None

MAX_DIM = 9
RANK_CUT = 1e-12


def available_backends() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]


def default_backend() -> str:
    if _compiled is None or os.environ.get("ENTLOSS_PURE_PYTHON", "") not in ("", "0"):
        return "python"
    return "compiled"


def _core(backend: str | None):
    backend = backend or default_backend()
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled backend requested but _eofcore is not built")
        return _compiled
    if backend == "python":
        return _eofcore_py
    raise BadParam(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class EofConfig:
    restarts: int = 32
    max_iter: int = 2000
    tol: float = 1e-8
    seed: int = 0
    ensemble_size: int | None = None
    backend: str | None = None


@dataclass(frozen=True, eq=False)
class EnsembleDecomposition:
    weights: np.ndarray
    pure_states: np.ndarray  # one unit vector on A (x) B per row

    def reconstruct(self) -> np.ndarray:
        return (self.pure_states.T * self.weights) @ self.pure_states.conj()

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True, eq=False)
class EofResult:
    value: float
    decomposition: EnsembleDecomposition
    restarts_used: int
    converged: bool
    restart_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def saturated(self, tol: float = 1e-6) -> bool:
        """At least two restarts agree with the best value within ``tol``."""
        return int(np.sum(self.restart_values <= self.value + tol)) >= 2


def pure_entanglement(phi, dims) -> float:
    """Entropy of entanglement S(Tr_B |phi><phi|) in bits."""
    phi = np.asarray(phi, dtype=complex).ravel()
    dA, dB = dims
    if phi.size != dA * dB:
        raise DimMismatch(f"vector of size {phi.size} is not {dA}x{dB}")
    if abs(np.linalg.norm(phi) - 1.0) > 1e-10:
        raise NotNormalized(f"vector norm {np.linalg.norm(phi)!r}")
    s = np.linalg.svd(phi.reshape(dA, dB), compute_uv=False)
    return entropy_of_spectrum(s**2)


def _spanning_rows(tau: DensityMatrix):
    """Rows sqrt(l_j) e_j of the eigen-ensemble, in original (A, B) layout."""
    w, v = qcore.eigh(tau.mat)
    keep = w > RANK_CUT * max(w[-1], 1e-300)
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    return np.sqrt(w)[:, None] * v.T


def _small_first(rows, dA, dB):
    """Reorder vector components so the smaller factor comes first."""
    if dA <= dB:
        return rows, dA, dB
    r = rows.reshape(-1, dA, dB).transpose(0, 2, 1).reshape(rows.shape[0], -1)
    return r, dB, dA


def _from_small_first(rows, dA, dB):
    if dA <= dB:
        return rows
    return rows.reshape(-1, dB, dA).transpose(0, 2, 1).reshape(rows.shape[0], -1)


def ensemble_value(U, V, ds, dl, backend=None) -> float:
    return float(_core(backend).objective(np.ascontiguousarray(U), np.ascontiguousarray(V), ds, dl))


def eof(tau, config: EofConfig | None = None) -> EofResult:
    """Variational upper bound on the entanglement of formation of ``tau``."""
    config = config or EofConfig()
    if not isinstance(tau, DensityMatrix) or len(tau.dims) != 2:
        raise DimMismatch("eof needs a bipartite DensityMatrix")
    dA, dB = tau.dims
    if dA * dB > MAX_DIM:
        raise DimTooLarge(f"eof supports dA*dB <= {MAX_DIM}, got {dA}x{dB}")
    core = _core(config.backend)
    rows = _spanning_rows(tau)
    V, ds, dl = _small_first(rows, dA, dB)
    V = np.ascontiguousarray(V)
    r = V.shape[0]
    m = config.ensemble_size or min(r * r, (dA * dB) ** 2)
    m = max(m, r)

    best = None
    values = []
    any_converged = False
    for idx in range(max(1, config.restarts)):
        if idx == 0:
            U0 = np.zeros((m, r), dtype=complex)
            U0[:r, :r] = np.eye(r)
        else:
            rng = np.random.default_rng(np.random.SeedSequence([config.seed, idx]))
            U0 = qcore.haar_isometry(m, r, rng)
        U, val, _, conv, _ = core.descend(np.ascontiguousarray(U0), V, ds, dl,
                                          config.max_iter, config.tol)
        values.append(val)
        members = int(np.sum(np.sum(np.abs(U @ V) ** 2, axis=1) > 1e-12))
        key = (val, members)
        if best is None or val < best[0][0] - 1e-10 or (
            abs(val - best[0][0]) <= 1e-10 and members < best[0][1]
        ):
            best = (key, U, conv)
        any_converged = any_converged or conv
    _, U, conv = best

    phis = _from_small_first(U @ V, dA, dB)
    p = np.sum(np.abs(phis) ** 2, axis=1)
    keep = p > 1e-14
    phis, p = phis[keep], p[keep]
    states = phis / np.sqrt(p)[:, None]
    weights = p / p.sum()
    value = float(sum(wi * pure_entanglement(s, (dA, dB)) for wi, s in zip(weights, states)))
    return EofResult(
        value=value,
        decomposition=EnsembleDecomposition(weights, states),
        restarts_used=max(1, config.restarts),
        converged=bool(conv),
        restart_values=np.array(values),
    )


def concurrence(tau) -> float:
    """Two-qubit concurrence from the spin-flipped spectrum."""
    tau = qcore.as_density(tau, (2, 2)) if not isinstance(tau, DensityMatrix) else tau
    if tau.dims != (2, 2):
        raise DimMismatch(f"concurrence needs a two-qubit state, got dims {tau.dims}")
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    flipped = yy @ tau.mat.conj() @ yy
    ev = np.linalg.eigvals(tau.mat @ flipped)
    lam = np.sort(np.sqrt(np.clip(ev.real, 0.0, None)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def binary_entropy(p: float) -> float:
    return entropy_of_spectrum(np.array([p, 1.0 - p]))


def wootters_eof(tau) -> float:
    """Closed-form two-qubit entanglement of formation in bits."""
    c = concurrence(tau)
    return binary_entropy(0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c))))
