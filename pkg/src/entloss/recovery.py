"""Entanglement fidelity, recovery channels, the correction function g and the bound curve."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import channels, qcore
from .channels import KrausChannel
from .entropy import LossKind
from .errors import DimMismatch, DimTooLarge, DomainError, GridOutOfRange

MAX_DIM = 9


@dataclass(frozen=True)
class RecoveryConfig:
    restarts: int = 16
    max_iter: int = 500
    tol: float = 1e-12
    seed: int = 0
    sweep: int = 5


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    channel: KrausChannel  # B -> A
    fidelity: float
    method: str
    iterations: int
    history: np.ndarray = field(default_factory=lambda: np.zeros(0))


def entanglement_fidelity(rho, ch: KrausChannel) -> float:
    """F_e = sum_k |Tr(rho A_k)|^2 for a channel A -> A."""
    if ch.dimA != ch.dimB:
        raise DimMismatch(f"entanglement fidelity needs a channel A -> A, got {ch.dimA}->{ch.dimB}")
    rho = qcore.as_density(rho)
    if rho.dim != ch.dimA:
        raise DimMismatch(f"state of dimension {rho.dim} fed to a channel on {ch.dimA}")
    t = np.einsum("ab,kba->k", rho.mat, ch.kraus_ops)
    return float(min(1.0, np.sum(np.abs(t) ** 2)))


def corrected_fidelity(rho, recovery: KrausChannel, ch: KrausChannel) -> float:
    return entanglement_fidelity(rho, channels.compose(recovery, ch))


def _channel_from_ops(ops, dimA: int, dimB: int) -> KrausChannel:
    """KrausChannel from a possibly redundant operator list (re-factorized if needed)."""
    ops = np.asarray(ops, dtype=complex)
    norms = np.linalg.norm(ops.reshape(ops.shape[0], -1), axis=1)
    ops = ops[norms > 1e-14]
    if ops.shape[0] <= dimA * dimB:
        return KrausChannel(ops, dimA, dimB)
    vecs = np.transpose(ops, (0, 2, 1)).reshape(ops.shape[0], -1)
    choi = channels.ChoiMatrix(vecs.T @ vecs.conj(), dimA, dimB)
    return channels.choi_to_kraus(choi)


def transpose_channel(rho, ch: KrausChannel, cutoff: float = 1e-12) -> KrausChannel:
    """R_k = rho^{1/2} A_k^dag N(rho)^{-1/2} on supp N(rho); replace-with-rho off support."""
    rho = qcore.as_density(rho)
    if rho.dim != ch.dimA:
        raise DimMismatch(f"state of dimension {rho.dim} fed to a channel on {ch.dimA}")
    sigma = channels.apply(ch, rho).mat
    root = qcore.psd_power(rho.mat, 0.5, cutoff)
    inv_root = qcore.psd_power(sigma, -0.5, cutoff)
    ops = np.array([root @ a.conj().T @ inv_root for a in ch.kraus_ops])

    # sum R_k^dag R_k is the support projector up to rounding amplified by
    # N(rho)^{-1/2}; a polar correction restores trace preservation exactly
    gram = qcore.hermitize(np.einsum("kab,kac->bc", ops.conj(), ops))
    w, v = qcore.eigh(gram)
    on = w > 0.5
    fix = (v[:, on] / np.sqrt(w[on])) @ v[:, on].conj().T
    ops = list(ops @ fix)
    off = v[:, ~on]
    if off.shape[1]:
        mu, f = qcore.eigh(rho.mat)
        for lam, vec in zip(mu, f.T):
            if lam <= 1e-15:
                continue
            for b in off.T:
                ops.append(np.sqrt(lam) * np.outer(vec, b.conj()))
    return _channel_from_ops(ops, ch.dimB, ch.dimA)


# ---------------------------------------------------------------------------
# optimized recovery


def _isometry_from_channel(rec: KrausChannel, n_env: int) -> np.ndarray:
    """Stack Kraus operators (dA x dB each) into a (n_env*dA) x dB isometry."""
    ops = rec.kraus_ops
    if ops.shape[0] > n_env:
        rec = channels.choi_to_kraus(channels.kraus_to_choi(rec))
        ops = rec.kraus_ops
    W = np.zeros((n_env, rec.dimB, rec.dimA), dtype=complex)
    W[: ops.shape[0]] = ops
    return W.reshape(n_env * rec.dimB, rec.dimA)


def polar(X: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(X, full_matrices=False)
    return u @ vh


class _FidelityObjective:
    """F_e(rho, R o N) as a function of the Stinespring isometry of R."""

    def __init__(self, rho, ch: KrausChannel):
        self.dA, self.dB = ch.dimA, ch.dimB
        # C_l = A_l rho (dB x dA); Tr(R_k C_l) = <vec R_k, vec C_l^T> without conjugation
        C = np.einsum("lba,ac->lbc", ch.kraus_ops, rho.mat)
        self.c = np.transpose(C, (0, 2, 1)).reshape(C.shape[0], -1)

    def value(self, W) -> float:
        R = W.reshape(-1, self.dA * self.dB)
        T = R @ self.c.T
        return float(np.sum(np.abs(T) ** 2))

    def value_grad(self, W):
        R = W.reshape(-1, self.dA * self.dB)
        T = R @ self.c.T
        return float(np.sum(np.abs(T) ** 2)), (2.0 * T @ self.c.conj()).reshape(W.shape)


def _ascend(obj: _FidelityObjective, W, config: RecoveryConfig):
    f, G = obj.value_grad(W)
    history = [f]
    t = 1.0
    it = 0
    for it in range(1, config.max_iter + 1):
        A = W.conj().T @ G
        rg = G - W @ (0.5 * (A + A.conj().T))
        gn2 = float(np.vdot(rg, rg).real)
        if gn2 < 1e-26:
            break
        step = t / math.sqrt(gn2)
        accepted = False
        for _ in range(40):
            Wn = polar(W + step * rg)
            fn = obj.value(Wn)
            if fn >= f + 1e-4 * step * gn2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        t = min(2.0 * step * math.sqrt(gn2), 1e6)
        W = Wn
        f, G = obj.value_grad(W)
        history.append(f)
        if len(history) > config.sweep and history[-1] - history[-1 - config.sweep] < config.tol:
            break
    return W, f, it, history


def optimize_recovery(rho, ch: KrausChannel, config: RecoveryConfig | None = None,
                      init: KrausChannel | None = None) -> RecoveryResult:
    """Lower bound on the optimal corrected fidelity by ascent over recovery isometries.

    Restart 0 starts from the transpose channel (or ``init``), so the result
    is never worse than that witness.
    """
    config = config or RecoveryConfig()
    rho = qcore.as_density(rho)
    if ch.dimA * ch.dimB > MAX_DIM:
        raise DimTooLarge(f"optimize_recovery supports dA*dB <= {MAX_DIM}")
    dA, dB = ch.dimA, ch.dimB
    n_env = dA * dB
    obj = _FidelityObjective(rho, ch)
    witness = init if init is not None else transpose_channel(rho, ch)
    best = None
    history = []
    total_iter = 0
    for idx in range(max(1, config.restarts)):
        if idx == 0:
            W0 = _isometry_from_channel(witness, n_env)
        else:
            rng = np.random.default_rng(np.random.SeedSequence([config.seed, 7919, idx]))
            W0 = qcore.haar_isometry(n_env * dA, dB, rng)
        W, f, iters, hist = _ascend(obj, W0, config)
        history.extend(hist)
        total_iter += iters
        if best is None or f > best[0] + 1e-13:
            best = (f, W)
    W = best[1]
    rec = _channel_from_ops(W.reshape(n_env, dA, dB), dB, dA)
    fid = corrected_fidelity(rho, rec, ch)
    return RecoveryResult(rec, fid, "optimized", total_iter, np.array(history))


def transpose_recovery(rho, ch: KrausChannel) -> RecoveryResult:
    rec = transpose_channel(rho, ch)
    fid = corrected_fidelity(rho, rec, ch)
    return RecoveryResult(rec, fid, "transpose_channel", 0, np.array([fid]))


# ---------------------------------------------------------------------------
# minimum entanglement fidelity over input states (convex problem)


@dataclass(frozen=True, eq=False)
class MinFidelity:
    value: float        # F_e at the returned state (>= true infimum)
    lower: float        # certified lower bound from the Frank-Wolfe gap
    rho: np.ndarray
    iterations: int


def _project_to_states(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(qcore.hermitize(h))
    # Euclidean projection of the spectrum onto the probability simplex
    u = np.sort(w)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(u) + 1)
    cond = u - (css - 1.0) / k > 0
    r = k[cond][-1]
    theta = (css[r - 1] - 1.0) / r
    w = np.clip(w - theta, 0.0, None)
    return (v * w) @ v.conj().T


def minimize_entanglement_fidelity(ch: KrausChannel, max_iter: int = 5000,
                                   gap_tol: float = 1e-11) -> MinFidelity:
    """inf over all input states of F_e(rho, ch), via accelerated projected gradient.

    F_e is a convex quadratic in rho, so the Frank-Wolfe gap certifies the result.
    """
    if ch.dimA != ch.dimB:
        raise DimMismatch("entanglement fidelity needs a channel A -> A")
    K = ch.kraus_ops
    d = ch.dimA

    def fval(r):
        t = np.einsum("ab,kba->k", r, K)
        return float(np.sum(np.abs(t) ** 2)), t

    def grad(t):
        g = np.einsum("k,kab->ab", t.conj(), K)
        return g + g.conj().T

    L = 2.0 * float(np.sum(np.abs(K) ** 2)) + 1e-12
    rho = np.eye(d, dtype=complex) / d
    y = rho.copy()
    tk = 1.0
    best = (np.inf, rho, -np.inf)
    it = 0
    for it in range(1, max_iter + 1):
        _, ty = fval(y)
        rho_new = _project_to_states(y - grad(ty) / L)
        f, t = fval(rho_new)
        g = grad(t)
        gap = float(np.real(np.trace(g @ rho_new)) - np.linalg.eigvalsh(g)[0])
        if f < best[0]:
            best = (f, rho_new, f - max(gap, 0.0))
        elif f - max(gap, 0.0) > best[2]:
            best = (best[0], best[1], max(best[2], f - max(gap, 0.0)))
        tn = 0.5 * (1 + math.sqrt(1 + 4 * tk * tk))
        y = rho_new + ((tk - 1) / tn) * (rho_new - rho)
        rho, tk = rho_new, tn
        if gap < gap_tol:
            break
    f, r, lo = best
    return MinFidelity(value=f, lower=min(lo, f), rho=r, iterations=it)


# ---------------------------------------------------------------------------
# the correction function g


def g_eval(x: float, d_A: int) -> float:
    """g(x) = 4 x log2(d_A / x) on (0, 1/2], continuous at 0."""
    x = float(x)
    if x == 0.0:
        return 0.0
    if not 0.0 < x <= 0.5:
        raise DomainError(f"g is only defined on (0, 1/2], got {x!r}")
    return 4.0 * x * math.log2(d_A / x)


def g_max(d_A: int) -> float:
    return g_eval(0.5, d_A)


def g_inverse(y: float, d_A: int, tol: float = 1e-12) -> float:
    """Unique preimage of y under g restricted to (0, 1/2], by bisection."""
    y = float(y)
    if y == 0.0:
        return 0.0
    if not 0.0 < y <= g_max(d_A):
        raise DomainError(f"g_inverse needs 0 < y <= {g_max(d_A)}, got {y!r}")
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g_eval(mid, d_A) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def g_applicable(x: float) -> bool:
    return 0.0 <= x <= 0.5


# ---------------------------------------------------------------------------
# lower bound on coherent information from E_f


def ic_lower_bound_from_ef(ef: float, d_A: int = 3, d_B: int = 3, s_a: float | None = None) -> float:
    """max{0, S_A - g(sqrt(2 K_f (S_A - E_f)))}; zero where the g argument exceeds 1/2."""
    s_a = math.log2(d_A) if s_a is None else s_a
    k_f = LossKind.f.K(d_A, d_B)
    delta_f = max(s_a - ef, 0.0)
    x = math.sqrt(2.0 * k_f * delta_f)
    if x > 0.5:
        return 0.0
    return max(0.0, s_a - g_eval(x, d_A))


def fig2_curve(grid=1001, d_A: int = 3, d_B: int = 3, s_a: float | None = None):
    """Normalized (E_f, bound) pairs; both axes divided by log2(d_A)."""
    s_a = math.log2(d_A) if s_a is None else s_a
    if np.isscalar(grid):
        if int(grid) < 2:
            raise GridOutOfRange("grid needs at least two points")
        efs = np.linspace(0.0, s_a, int(grid))
    else:
        efs = np.asarray(grid, dtype=float)
        if efs.size and (efs.min() < -1e-12 or efs.max() > s_a + 1e-12):
            raise GridOutOfRange(f"E_f grid must lie in [0, {s_a}]")
        efs = np.clip(efs, 0.0, s_a)
    norm = math.log2(d_A)
    return [(float(e / norm), ic_lower_bound_from_ef(float(e), d_A, d_B, s_a) / norm) for e in efs]


def fig2_threshold(d_A: int = 3, d_B: int = 3, s_a: float | None = None) -> float:
    """Largest E_f-loss delta_f for which the curve's bound is nonzero."""
    s_a = math.log2(d_A) if s_a is None else s_a
    x = g_inverse(s_a, d_A)
    return x * x / (2.0 * LossKind.f.K(d_A, d_B))


def write_fig2_csv(path, grid=1001, d_A: int = 3, d_B: int = 3) -> list:
    rows = fig2_curve(grid, d_A, d_B)
    with open(path, "w", newline="\n") as fh:
        fh.write("ef_norm,bound_norm\n")
        for ef, b in rows:
            fh.write(f"{ef:.12f},{b:.12f}\n")
    return rows
