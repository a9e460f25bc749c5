"""CPTP maps: Kraus and Choi representations, composition, zoo, sampling."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qcore
from .errors import BadParam, DimMismatch, NotCPTP, ParseError, UnknownChannel
from .qcore import DensityMatrix, PureBipartiteState

CPTP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Channel A -> B given by Kraus operators of shape (dimB, dimA)."""

    kraus_ops: np.ndarray
    dimA: int
    dimB: int

    def __post_init__(self):
        ops = np.array(self.kraus_ops, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[1:] != (self.dimB, self.dimA):
            raise DimMismatch(
                f"Kraus operators of shape {ops.shape[1:]} do not map {self.dimA} -> {self.dimB}"
            )
        if not 1 <= ops.shape[0] <= self.dimA * self.dimB:
            raise NotCPTP(f"{ops.shape[0]} Kraus operators for a {self.dimA}->{self.dimB} map")
        tp = np.einsum("kba,kbc->ac", ops.conj(), ops)
        if np.max(np.abs(tp - np.eye(self.dimA))) > CPTP_TOL:
            raise NotCPTP("Kraus operators are not trace preserving")
        ops.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def rank(self) -> int:
        return self.kraus_ops.shape[0]

    def choi(self) -> "ChoiMatrix":
        return kraus_to_choi(self)

    def adjoint_apply(self, op) -> np.ndarray:
        """Heisenberg-picture map X -> sum_k A_k^dag X A_k."""
        op = qcore.as_matrix(op)
        return np.einsum("kba,bc,kcd->ad", self.kraus_ops.conj(), op, self.kraus_ops)

    def to_dict(self) -> dict:
        return {
            "dimA": self.dimA,
            "dimB": self.dimB,
            "kraus": [_encode_matrix(k) for k in self.kraus_ops],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KrausChannel":
        try:
            ops = [_decode_matrix(k) for k in data["kraus"]]
            return cls(np.array(ops), int(data["dimA"]), int(data["dimB"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, (NotCPTP, DimMismatch)):
                raise
            raise ParseError(f"malformed channel JSON: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "KrausChannel":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """J = sum_ij |i><j| (x) N(|i><j|) on A (x) B, trace dimA."""

    mat: np.ndarray
    dimA: int
    dimB: int

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex)
        n = self.dimA * self.dimB
        if m.shape != (n, n):
            raise DimMismatch(f"Choi matrix shape {m.shape} is not {n}x{n}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def validate(self, tol: float = CPTP_TOL) -> None:
        if np.max(np.abs(self.mat - self.mat.conj().T)) > tol:
            raise NotCPTP("Choi matrix is not Hermitian")
        if np.linalg.eigvalsh(qcore.hermitize(self.mat))[0] < -tol:
            raise NotCPTP("Choi matrix is not positive semidefinite")
        red = np.einsum("abcb->ac", self.mat.reshape(self.dimA, self.dimB, self.dimA, self.dimB))
        if np.max(np.abs(red - np.eye(self.dimA))) > tol:
            raise NotCPTP("Choi matrix is not trace preserving")

    def to_dict(self) -> dict:
        return {"dimA": self.dimA, "dimB": self.dimB, "choi": _encode_matrix(self.mat)}

    @classmethod
    def from_dict(cls, data: dict) -> "ChoiMatrix":
        try:
            return cls(_decode_matrix(data["choi"]), int(data["dimA"]), int(data["dimB"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed Choi JSON: {exc}") from exc


def _encode_matrix(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _decode_matrix(rows) -> np.ndarray:
    arr = np.array(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ParseError("matrix entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def apply(ch: KrausChannel, rho) -> DensityMatrix:
    rho = qcore.as_density(rho)
    if rho.dim != ch.dimA:
        raise DimMismatch(f"state of dimension {rho.dim} fed to a channel on {ch.dimA}")
    out = np.einsum("kab,bc,kdc->ad", ch.kraus_ops, rho.mat, ch.kraus_ops.conj())
    out = qcore.hermitize(out)
    return DensityMatrix(out / np.trace(out).real, (ch.dimB,))


def apply_to_subsystem(ch: KrausChannel, state: PureBipartiteState) -> DensityMatrix:
    """(id_R (x) N)(|psi><psi|) as a density matrix on R (x) B."""
    if state.dimA != ch.dimA:
        raise DimMismatch(f"A-dimension {state.dimA} does not match channel input {ch.dimA}")
    m = state.matrix()
    # each Kraus branch maps the coefficient matrix M -> M A_k^T
    branches = np.einsum("ra,kba->krb", m, ch.kraus_ops).reshape(ch.rank, -1)
    out = branches.T @ branches.conj()
    out = qcore.hermitize(out)
    return DensityMatrix(out / np.trace(out).real, (state.dimR, ch.dimB))


def kraus_to_choi(ch: KrausChannel) -> ChoiMatrix:
    # column vectors vec(A_k) in |a>|b> ordering
    vecs = np.transpose(ch.kraus_ops, (0, 2, 1)).reshape(ch.rank, -1)
    return ChoiMatrix(vecs.T @ vecs.conj(), ch.dimA, ch.dimB)


def choi_to_kraus(choi: ChoiMatrix, tol: float = 1e-12) -> KrausChannel:
    """Kraus operators from the eigendecomposition of the Choi matrix."""
    choi.validate()
    w, v = np.linalg.eigh(qcore.hermitize(choi.mat))
    cut = tol * max(1.0, w[-1])
    keep = np.where(w > cut)[0][::-1]
    if keep.size == 0:
        raise NotCPTP("Choi matrix has no positive spectrum")
    ops = [np.sqrt(w[i]) * v[:, i].reshape(choi.dimA, choi.dimB).T for i in keep]
    return KrausChannel(np.array(ops), choi.dimA, choi.dimB)


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """The channel ``second o first``."""
    if first.dimB != second.dimA:
        raise DimMismatch(f"cannot compose {first.dimA}->{first.dimB} with {second.dimA}->{second.dimB}")
    ops = np.einsum("kab,lbc->klac", second.kraus_ops, first.kraus_ops)
    ops = ops.reshape(-1, second.dimB, first.dimA)
    if ops.shape[0] <= first.dimA * second.dimB:
        # drop exactly-zero branches, keep the rest verbatim
        norms = np.linalg.norm(ops.reshape(ops.shape[0], -1), axis=1)
        ops = ops[norms > 1e-15] if np.any(norms > 1e-15) else ops[:1]
        return KrausChannel(ops, first.dimA, second.dimB)
    vecs = np.transpose(ops, (0, 2, 1)).reshape(ops.shape[0], -1)
    choi = ChoiMatrix(vecs.T @ vecs.conj(), first.dimA, second.dimB)
    return choi_to_kraus(choi)


def choi_distance(ch1: KrausChannel, ch2: KrausChannel) -> float:
    return float(np.max(np.abs(kraus_to_choi(ch1).mat - kraus_to_choi(ch2).mat)))


def is_cptp(ch: KrausChannel, tol: float = CPTP_TOL) -> bool:
    tp = np.einsum("kba,kbc->ac", ch.kraus_ops.conj(), ch.kraus_ops)
    if np.max(np.abs(tp - np.eye(ch.dimA))) > tol:
        return False
    return np.linalg.eigvalsh(qcore.hermitize(kraus_to_choi(ch).mat))[0] >= -tol


# ---------------------------------------------------------------------------
# channel zoo

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise BadParam(f"{name}={value} outside [0, 1]")
    return value


def weyl_operators(d: int) -> list:
    """The d^2 clock-and-shift unitaries X^a Z^b, identity first."""
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            for a in range(d) for b in range(d)]


def identity(d: int = 2) -> KrausChannel:
    return KrausChannel(np.eye(d, dtype=complex)[None], d, d)


def unitary(U) -> KrausChannel:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise BadParam("unitary channel needs a square matrix")
    if not np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-10):
        raise BadParam("matrix is not unitary")
    return KrausChannel(U[None], U.shape[0], U.shape[0])


def depolarizing(p: float, d: int = 2) -> KrausChannel:
    """rho -> (1 - p) rho + p Tr(rho) I/d."""
    p = _check_prob("p", p)
    weights = np.full(d * d, p / d**2)
    weights[0] += 1.0 - p
    ops = [np.sqrt(w) * W for w, W in zip(weights, weyl_operators(d)) if w > 0]
    return KrausChannel(np.array(ops), d, d)


def dephasing(p: float) -> KrausChannel:
    """Qubit dephasing rho -> (1 - p) rho + p Z rho Z; p = 1/2 is full dephasing."""
    p = _check_prob("p", p)
    ops = [np.sqrt(1 - p) * PAULI["I"], np.sqrt(p) * PAULI["Z"]]
    return KrausChannel(np.array([o for o, w in zip(ops, (1 - p, p)) if w > 0]), 2, 2)


def amplitude_damping(gamma: float) -> KrausChannel:
    gamma = _check_prob("gamma", gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel(np.array([k0, k1] if gamma > 0 else [k0]), 2, 2)


def erasure(p: float, d: int = 2) -> KrausChannel:
    """With probability p replace the input by the flag state |d> of a (d+1)-level output."""
    p = _check_prob("p", p)
    embed = np.vstack([np.eye(d), np.zeros((1, d))])
    ops = []
    if p < 1:
        ops.append(np.sqrt(1 - p) * embed)
    if p > 0:
        for i in range(d):
            k = np.zeros((d + 1, d))
            k[d, i] = np.sqrt(p)
            ops.append(k)
    return KrausChannel(np.array(ops, dtype=complex), d, d + 1)


def replace_with_state(sigma, dimA: int) -> KrausChannel:
    """rho -> Tr(rho) sigma."""
    sigma = qcore.as_density(sigma)
    w, v = qcore.eigh(sigma.mat)
    ops = []
    for lam, vec in zip(w, v.T):
        if lam <= 1e-14:
            continue
        for i in range(dimA):
            k = np.zeros((sigma.dim, dimA), dtype=complex)
            k[:, i] = np.sqrt(lam) * vec
            ops.append(k)
    return KrausChannel(np.array(ops), dimA, sigma.dim)


def channel_zoo(name: str, **params) -> KrausChannel:
    """Build a named canonical channel."""
    name = name.lower().replace("-", "_")
    try:
        if name in ("identity", "id"):
            return identity(int(params.get("d", 2)))
        if name == "unitary":
            return unitary(params["U"])
        if name in ("z", "pauli_z"):
            return unitary(PAULI["Z"])
        if name == "phase":
            theta = float(params["theta"])
            return unitary(np.diag([1.0, np.exp(1j * theta)]))
        if name == "depolarizing":
            return depolarizing(params.get("p", 1.0), int(params.get("d", 2)))
        if name == "dephasing":
            return dephasing(params.get("p", 0.5))
        if name == "amplitude_damping":
            return amplitude_damping(params.get("gamma", params.get("p", 1.0)))
        if name == "erasure":
            return erasure(params.get("p", 0.5), int(params.get("d", 2)))
        if name in ("replace", "replace_with_state"):
            return replace_with_state(params["sigma"], int(params.get("d", 2)))
    except KeyError as exc:
        raise BadParam(f"channel {name!r} needs parameter {exc}") from exc
    raise UnknownChannel(name)


# ---------------------------------------------------------------------------
# sampling


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_channel(dimA: int, dimB: int, rank: int, seed) -> KrausChannel:
    """Stinespring sample: Haar isometry A -> B (x) E with dim E = rank."""
    if not 1 <= rank <= dimA * dimB:
        raise BadParam(f"rank {rank} outside [1, {dimA * dimB}]")
    if dimB * rank < dimA:
        raise BadParam("isometry needs dimB * rank >= dimA")
    V = qcore.haar_isometry(dimB * rank, dimA, _rng(seed))
    ops = V.reshape(dimB, rank, dimA).transpose(1, 0, 2)
    return KrausChannel(ops, dimA, dimB)


def random_state(dims: Sequence[int] | int, rank: int | None = None, seed=None) -> DensityMatrix:
    """Induced-measure sample: trace out a rank-dimensional ancilla from a Haar pure state."""
    dims = (int(dims),) if np.isscalar(dims) else tuple(int(d) for d in dims)
    d = int(np.prod(dims))
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise BadParam(f"rank {rank} outside [1, {d}]")
    rng = _rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho = qcore.hermitize(rho / np.trace(rho).real)
    return DensityMatrix(rho, dims)
