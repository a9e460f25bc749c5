"""cb-norm (diamond) distance estimates and channel-level invertibility quantities.

All suprema and infima here are estimated by local search, so every value
carries a direction: ``diamond_distance`` and ``big_delta_x`` return lower
bounds, ``q_cb`` and ``big_phi`` return feasible-point proxies.  The
verification helpers at the bottom turn these into
:class:`~entloss.bounds.BoundCheckRecord` objects with rigorous brackets
where one is available.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _eofcore_py, channels, checks, entropy, eof, qcore, recovery
from .bounds import BoundCheckRecord, skipped
from .channels import KrausChannel
from .entropy import LossKind
from .errors import DimMismatch, DimTooLarge, NotComputable
from .qcore import PureBipartiteState

MAX_DIM = 9


@dataclass(frozen=True)
class DiamondConfig:
    restarts: int = 64
    max_iter: int = 500
    tol: float = 1e-13
    seed: int = 0


@dataclass(frozen=True, eq=False)
class DiamondEstimate:
    lower: float
    achieving_input: PureBipartiteState
    restarts: int
    converged: bool
    sign: np.ndarray = field(repr=False, default=None)


def _lifted(ops: np.ndarray, d_ref: int) -> np.ndarray:
    eye = np.eye(d_ref)
    return np.array([np.kron(eye, a) for a in ops])


def choi_trace_norm_bound(ch1: KrausChannel, ch2: KrausChannel) -> float:
    """Rigorous upper bound min(2, ||J1 - J2||_1) on the diamond distance."""
    diff = channels.kraus_to_choi(ch1).mat - channels.kraus_to_choi(ch2).mat
    return min(2.0, qcore.trace_norm(diff))


def diamond_distance(ch1: KrausChannel, ch2: KrausChannel, config: DiamondConfig | None = None,
                     starts=None) -> DiamondEstimate:
    """Lower bound on ||ch1 - ch2||_cb by multi-start ascent over pure inputs on A (x) A.

    For a fixed input the trace norm equals Tr[S X] with S the sign of the
    output difference X; alternating S and the top eigenvector of the
    induced operator never decreases the objective.
    """
    config = config or DiamondConfig()
    if (ch1.dimA, ch1.dimB) != (ch2.dimA, ch2.dimB):
        raise DimMismatch("diamond distance needs channels with matching dimensions")
    d = ch1.dimA
    K1 = _lifted(ch1.kraus_ops, d)
    K2 = _lifted(ch2.kraus_ops, d)

    def output(psi):
        a = np.einsum("kij,j->ki", K1, psi)
        b = np.einsum("kij,j->ki", K2, psi)
        return a.T @ a.conj() - b.T @ b.conj()

    def ascend(psi):
        X = output(psi)
        w, v = np.linalg.eigh(qcore.hermitize(X))
        f = float(np.sum(np.abs(w)))
        conv = False
        for _ in range(config.max_iter):
            S = (v * np.sign(w)) @ v.conj().T
            H = (np.einsum("kji,jl,klm->im", K1.conj(), S, K1)
                 - np.einsum("kji,jl,klm->im", K2.conj(), S, K2))
            _, hv = np.linalg.eigh(qcore.hermitize(H))
            cand = hv[:, -1]
            Xn = output(cand)
            wn, vn = np.linalg.eigh(qcore.hermitize(Xn))
            fn = float(np.sum(np.abs(wn)))
            if fn <= f + config.tol:
                conv = True
                if fn > f:
                    psi, w, v, f = cand, wn, vn, fn
                break
            psi, w, v, f = cand, wn, vn, fn
        S = (v * np.sign(w)) @ v.conj().T
        return f, psi, S, conv

    inits = [np.asarray(s, dtype=complex).ravel() for s in (starts or [])]
    inits.append(qcore.maximally_entangled(d))
    n_random = max(0, config.restarts - len(inits))
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 31337]))
    for _ in range(n_random):
        z = rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)
        inits.append(z)

    best = None
    for psi0 in inits:
        psi0 = psi0 / np.linalg.norm(psi0)
        res = ascend(psi0)
        if best is None or res[0] > best[0]:
            best = res
    f, psi, S, conv = best
    psi = psi / np.linalg.norm(psi)
    state = PureBipartiteState(psi, d, d)
    lower = qcore.trace_norm(output(psi))
    return DiamondEstimate(lower, state, len(inits), conv, S)


# ---------------------------------------------------------------------------
# Q_cb: best recovery in diamond distance


@dataclass(frozen=True)
class QcbConfig:
    outer_iter: int = 40
    inner_restarts: int = 8
    final_restarts: int = 64
    seed: int = 0


@dataclass(frozen=True, eq=False)
class QcbEstimate:
    value: float                # diamond estimate of the best recovery found
    recovery: KrausChannel
    diamond: DiamondEstimate
    choi_upper: float           # rigorous upper bound on Q_cb
    iterations: int
    direction: str = "proxy"

    def __float__(self):
        return float(self.value)


def _danskin_grad(W, ch: KrausChannel, est: DiamondEstimate, dA: int, dB: int) -> np.ndarray:
    """Gradient of Tr[S (id (x) R o N)(psi)] with respect to the recovery Kraus operators."""
    sigma = channels.apply_to_subsystem(ch, est.achieving_input).mat
    R = W.reshape(-1, dA, dB)
    S4 = est.sign.reshape(dA, dA, dA, dA)
    s4 = sigma.reshape(dA, dB, dA, dB)
    G = 2.0 * np.einsum("xpya,kab,ybxq->kpq", S4, R, s4)
    return G.reshape(W.shape)


def q_cb(ch: KrausChannel, config: QcbConfig | None = None) -> QcbEstimate:
    """Proxy for inf_R ||R o N - id||_cb by descent over recovery isometries."""
    config = config or QcbConfig()
    dA, dB = ch.dimA, ch.dimB
    if dA * dB > MAX_DIM:
        raise DimTooLarge(f"q_cb supports dA*dB <= {MAX_DIM}")
    ident = channels.identity(dA)
    n_env = dA * dB
    inner = DiamondConfig(restarts=config.inner_restarts, seed=config.seed)

    def rec_of(W):
        return recovery._channel_from_ops(W.reshape(n_env, dA, dB), dB, dA)

    def evaluate(W, warm):
        est = diamond_distance(channels.compose(rec_of(W), ch), ident, inner, starts=warm)
        return est.lower, est

    W = recovery._isometry_from_channel(
        recovery.transpose_channel(qcore.maximally_mixed(dA), ch), n_env)
    f, est = evaluate(W, None)
    step = 0.1
    it = 0
    for it in range(1, config.outer_iter + 1):
        if f < 1e-12:
            break
        G = _danskin_grad(W, ch, est, dA, dB)
        A = W.conj().T @ G
        rg = G - W @ (0.5 * (A + A.conj().T))
        gn = float(np.linalg.norm(rg))
        if gn < 1e-12:
            break
        accepted = False
        for _ in range(20):
            Wn = recovery.polar(W - (step / gn) * rg)
            fn, estn = evaluate(Wn, [est.achieving_input.vec])
            if fn < f - 1e-4 * step * gn:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        W, f, est = Wn, fn, estn
        step = min(2 * step, 1.0)
    rec = rec_of(W)
    comp = channels.compose(rec, ch)
    final = diamond_distance(comp, ident, DiamondConfig(restarts=config.final_restarts,
                                                        seed=config.seed),
                             starts=[est.achieving_input.vec])
    upper = choi_trace_norm_bound(comp, ident)
    return QcbEstimate(final.lower, rec, final, upper, it)


# ---------------------------------------------------------------------------
# Delta_x: worst-case loss over input states


@dataclass(frozen=True)
class DeltaConfig:
    restarts: int = 16
    f_candidates: int = 4
    f_rounds: int = 8
    seed: int = 0
    eof_config: eof.EofConfig = eof.EofConfig(restarts=8)


@dataclass(frozen=True, eq=False)
class DeltaEstimate:
    value: float
    rho: np.ndarray
    kind: LossKind
    direction: str = "lower"

    def __float__(self):
        return float(self.value)


def _log2_psd(m, floor=1e-300):
    w, v = np.linalg.eigh(qcore.hermitize(m))
    return (v * np.log2(np.clip(w, floor, None))) @ v.conj().T


def _complementary(ops, rho):
    return np.einsum("kab,bc,lac->kl", ops, rho, ops.conj())


def _delta_c_value_grad(M, ops):
    t = float(np.vdot(M, M).real)
    rho = M @ M.conj().T / t
    out = np.einsum("kab,bc,kdc->ad", ops, rho, ops.conj())
    env = _complementary(ops, rho)
    val = (entropy.von_neumann_entropy(rho) - entropy.von_neumann_entropy(out)
           + entropy.von_neumann_entropy(env))
    L_out = _log2_psd(out)
    L_env = _log2_psd(env)
    G = (-_log2_psd(rho)
         + np.einsum("kba,bc,kcd->ad", ops.conj(), L_out, ops)
         - np.einsum("lk,lba,kbd->ad", L_env, ops.conj(), ops))
    G = qcore.hermitize(G)
    gM = (2.0 / t) * (G - np.real(np.trace(G @ rho)) * np.eye(rho.shape[0])) @ M
    return val, gM


def _maximize_delta_c(ch: KrausChannel, config: DeltaConfig):
    d = ch.dimA
    ops = ch.kraus_ops

    def fun(x):
        M = (x[: d * d] + 1j * x[d * d:]).reshape(d, d)
        val, g = _delta_c_value_grad(M, ops)
        return -val, -np.concatenate([g.real.ravel(), g.imag.ravel()])

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 4242]))
    starts = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for _ in range(max(0, config.restarts - 1)):
        starts.append(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    best = None
    for M0 in starts:
        x0 = np.concatenate([M0.real.ravel(), M0.imag.ravel()])
        res = minimize(fun, x0, jac=True, method="L-BFGS-B", options={"maxiter": 500})
        M = (res.x[: d * d] + 1j * res.x[d * d:]).reshape(d, d)
        rho = qcore.hermitize(M @ M.conj().T)
        rho /= np.trace(rho).real
        val = entropy.delta_c(rho, ch)
        if best is None or val > best[0]:
            best = (val, rho)
    return best


def _kraus_rows(M, ops):
    """Rows vec(M A_k^T): the Kraus-generated decomposition of sigma^{RB}."""
    return np.einsum("ra,kba->krb", M, ops).reshape(ops.shape[0], -1)


def _joint_delta_f(M, ch: KrausChannel, config: DeltaConfig):
    """Ascent of S(rho) - avg entanglement jointly over the input and the ensemble.

    Any (input, ensemble) pair gives a lower bound on delta_f at that input.
    """
    dA, dB = ch.dimA, ch.dimB
    ops = ch.kraus_ops
    core = eof._core(config.eof_config.backend)
    K = ops.shape[0]
    m = min(max(K, K * K), (dA * dB) ** 2)
    U = np.zeros((m, K), dtype=complex)
    U[:K, :K] = np.eye(K)
    M = M / np.linalg.norm(M)

    def J(M, U):
        V = _kraus_rows(M, ops)
        Vs, ds, dl = eof._small_first(V, dA, dB)
        s = entropy.von_neumann_entropy(M @ M.conj().T)
        return s - float(core.objective(np.ascontiguousarray(U), np.ascontiguousarray(Vs), ds, dl))

    val = J(M, U)
    for _ in range(config.f_rounds):
        Vs, ds, dl = eof._small_first(_kraus_rows(M, ops), dA, dB)
        U, _, _, _, _ = core.descend(np.ascontiguousarray(U), np.ascontiguousarray(Vs), ds, dl,
                                     300, 1e-10)
        val_u = J(M, U)
        step = 0.05
        for _ in range(10):
            V = _kraus_rows(M, ops)
            _, X = _eofcore_py.member_gradients((U @ V).reshape(-1, dA, dB))
            gV = U.conj().T @ X.reshape(X.shape[0], -1)
            gf = np.einsum("krb,kba->ra", gV.reshape(K, dA, dB), ops.conj())
            gS = -2.0 * _log2_psd(M @ M.conj().T, 1e-18) @ M
            g = gS - gf
            g = g - np.real(np.vdot(M, g)) * M
            gn = float(np.linalg.norm(g))
            if gn < 1e-10:
                break
            improved = False
            for _ in range(20):
                Mn = M + (step / gn) * g
                Mn /= np.linalg.norm(Mn)
                vn = J(Mn, U)
                if vn > val_u + 1e-4 * step * gn:
                    M, val_u, improved = Mn, vn, True
                    break
                step *= 0.5
            if not improved:
                break
            step = min(2 * step, 0.5)
        if val_u - val < 1e-9:
            val = max(val, val_u)
            break
        val = val_u
    return M, val


def _rho_of_purification(M):
    # psi = sum M[r, a] |r>|a>; the A marginal is M^T conj(M)
    rho = M.T @ M.conj()
    rho = qcore.hermitize(rho)
    return rho / np.trace(rho).real


def big_delta_x(ch: KrausChannel, x, config: DeltaConfig | None = None) -> DeltaEstimate:
    """Lower bound on sup_rho delta_x(rho, ch) by multi-start ascent."""
    config = config or DeltaConfig()
    x = LossKind(x)
    if x is LossKind.sq:
        raise NotComputable("squashed entanglement loss is not computed")
    if ch.dimA * ch.dimB > MAX_DIM and x is LossKind.f:
        raise DimTooLarge(f"delta_f needs dA*dB <= {MAX_DIM}")
    best_c = _maximize_delta_c(ch, config)
    if x is LossKind.c:
        return DeltaEstimate(best_c[0], best_c[1], x)

    d = ch.dimA
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 777]))
    candidates = [np.eye(d) / d, best_c[1]]
    for _ in range(max(0, config.f_candidates - 2)):
        candidates.append(channels.random_state(d, seed=rng).mat)
    best = None
    for rho in candidates:
        # purification coefficient matrix with the A index second
        M0 = qcore.purify(rho).matrix()
        M, jval = _joint_delta_f(M0, ch, config)
        rho_m = _rho_of_purification(M)
        val = max(jval, entropy.delta_f(rho_m, ch, config.eof_config))
        if best is None or val > best[0]:
            best = (val, rho_m)
    return DeltaEstimate(max(best[0], 0.0), best[1], x)


# ---------------------------------------------------------------------------
# Phi: worst-case optimal corrected fidelity


@dataclass(frozen=True)
class PhiConfig:
    candidates: int = 6
    rounds: int = 2
    seed: int = 0
    recovery_config: recovery.RecoveryConfig = recovery.RecoveryConfig(restarts=8)


@dataclass(frozen=True, eq=False)
class PhiEstimate:
    value: float
    rho: np.ndarray
    recovery: KrausChannel
    direction: str = "proxy"

    def __float__(self):
        return float(self.value)


def big_phi(ch: KrausChannel, config: PhiConfig | None = None) -> PhiEstimate:
    """Estimate of inf_rho sup_R F_e(rho, R o N).

    The inner sup is a lower bound (optimize_recovery), the outer inf a
    feasible point, so the estimate is not a rigorous bound either way.
    """
    config = config or PhiConfig()
    if ch.dimA * ch.dimB > MAX_DIM:
        raise DimTooLarge(f"big_phi supports dA*dB <= {MAX_DIM}")
    d = ch.dimA
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 99]))
    candidates = [np.eye(d, dtype=complex) / d]
    for _ in range(max(0, config.candidates - 1)):
        candidates.append(channels.random_state(d, seed=rng).mat)
    best = None
    for rho in candidates:
        for _ in range(config.rounds + 1):
            res = recovery.optimize_recovery(qcore.as_density(rho), ch, config.recovery_config)
            if best is None or res.fidelity < best[0]:
                best = (res.fidelity, rho, res.channel)
            # the optimal input for the current recovery is a convex problem
            mf = recovery.minimize_entanglement_fidelity(channels.compose(res.channel, ch))
            rho = qcore.hermitize(mf.rho)
            rho = rho / np.trace(rho).real
            if mf.value >= best[0] - 1e-12:
                break
    value, rho, rec = best
    value = recovery.corrected_fidelity(qcore.as_density(rho), rec, ch)
    return PhiEstimate(value, rho, rec)


# ---------------------------------------------------------------------------
# bound verification


def _g_or_none(x: float, d_A: int):
    return recovery.g_eval(x, d_A) if recovery.g_applicable(x) else None


def verify_theorem3(ch: KrausChannel, diamond_config: DiamondConfig | None = None,
                    tolerance: float = 1e-7, instance: str = ""):
    """Both inequalities relating inf F_e and ||N - id||_cb for a channel A -> A."""
    if ch.dimA != ch.dimB:
        raise DimMismatch("the fidelity/diamond comparison needs equal input and output dimensions")
    ident = channels.identity(ch.dimA)
    dist = diamond_distance(ch, ident, diamond_config)
    upper = choi_trace_norm_bound(ch, ident)
    lower = max(dist.lower, 0.0)
    mf = recovery.minimize_entanglement_fidelity(ch)
    f_hi, f_lo = mf.value, max(mf.lower, 0.0)

    # 1 - inf F_e <= 4 sqrt(||N - id||)
    rec_a = BoundCheckRecord(
        "thm3_a", 1.0 - f_hi, 4.0 * math.sqrt(lower), tolerance, instance,
        lhs_lo=1.0 - f_hi, lhs_hi=1.0 - f_lo,
        rhs_lo=4.0 * math.sqrt(lower), rhs_hi=4.0 * math.sqrt(upper),
    )
    # ||N - id|| <= 4 sqrt(1 - inf F_e)
    rec_b = BoundCheckRecord(
        "thm3_b", lower, 4.0 * math.sqrt(max(1.0 - f_hi, 0.0)), tolerance, instance,
        lhs_lo=lower, lhs_hi=upper,
        rhs_lo=4.0 * math.sqrt(max(1.0 - f_hi, 0.0)), rhs_hi=4.0 * math.sqrt(max(1.0 - f_lo, 0.0)),
    )
    return rec_a, rec_b


def _delta_ceiling(x: LossKind, d_A: int) -> float:
    # delta_c <= 2 S(rho), delta_f <= S(rho)
    return (2.0 if x is LossKind.c else 1.0) * math.log2(d_A)


def verify_final_bounds(ch: KrausChannel, x, q: QcbEstimate | None = None,
                        delta: DeltaEstimate | None = None, tolerance: float = 1e-7,
                        instance: str = ""):
    """Delta_x <= g(4 sqrt(Q_cb)) and Q_cb <= 4 (2 K_x Delta_x)^(1/4)."""
    x = LossKind(x)
    if x is LossKind.sq:
        raise NotComputable("squashed entanglement loss is not computed")
    q = q if q is not None else q_cb(ch)
    delta = delta if delta is not None else big_delta_x(ch, x)
    dA, dB = ch.dimA, ch.dimB
    k = x.K(dA, dB)
    name = f"[{x.value}] {instance}".strip()

    arg = 4.0 * math.sqrt(max(q.value, 0.0))
    arg_hi = 4.0 * math.sqrt(q.choi_upper)
    if recovery.g_applicable(arg):
        g_hi = _g_or_none(arg_hi, dA)
        rec_a = BoundCheckRecord(
            "final_a", delta.value, recovery.g_eval(arg, dA), tolerance, name,
            lhs_lo=delta.value, lhs_hi=_delta_ceiling(x, dA),
            rhs_lo=0.0, rhs_hi=g_hi if g_hi is not None else math.inf,
        )
    else:
        rec_a = skipped("final_a", name, f"g argument {arg:.3g} > 1/2")
    dval = max(delta.value, 0.0)
    rhs = 4.0 * (2.0 * k * dval) ** 0.25
    rec_b = BoundCheckRecord(
        "final_b", q.value, rhs, tolerance, name,
        lhs_lo=0.0, lhs_hi=q.choi_upper,
        rhs_lo=rhs, rhs_hi=4.0 * (2.0 * k * _delta_ceiling(x, dA)) ** 0.25,
    )
    return rec_a, rec_b


def verify_phi_chain(ch: KrausChannel, x, phi: PhiEstimate, delta: DeltaEstimate,
                     tolerance: float = 1e-7, instance: str = ""):
    """Delta_x <= g(1 - Phi) and Phi >= 1 - sqrt(2 K_x Delta_x)."""
    x = LossKind(x)
    dA = ch.dimA
    k = x.K(ch.dimA, ch.dimB)
    name = f"[{x.value}] {instance}".strip()
    gap = 1.0 - phi.value
    if recovery.g_applicable(gap):
        rec_a = BoundCheckRecord(
            "phi_chain_a", delta.value, recovery.g_eval(max(gap, 0.0), dA), tolerance, name,
            lhs_lo=delta.value, lhs_hi=_delta_ceiling(x, dA),
        )
    else:
        rec_a = skipped("phi_chain_a", name, f"1 - Phi = {gap:.3g} > 1/2")
    lhs = 1.0 - math.sqrt(2.0 * k * max(delta.value, 0.0))
    rec_b = BoundCheckRecord(
        "phi_chain_b", lhs, phi.value, tolerance, name,
        lhs_lo=1.0 - math.sqrt(2.0 * k * _delta_ceiling(x, dA)), lhs_hi=lhs, rhs_hi=1.0,
    )
    return rec_a, rec_b


# ---------------------------------------------------------------------------
# per-channel report


@dataclass(frozen=True, eq=False)
class ChannelReport:
    channel_descriptor: str
    q_cb_upper: float
    delta_c_lower: float
    delta_f_lower: float
    phi_lower: float
    bound_records: list

    def to_dict(self) -> dict:
        return {
            "channel_descriptor": self.channel_descriptor,
            "q_cb_upper": float(self.q_cb_upper),
            "delta_c_lower": float(self.delta_c_lower),
            "delta_f_lower": float(self.delta_f_lower),
            "phi_lower": float(self.phi_lower),
            "bounds": [r.to_dict() for r in self.bound_records],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


@dataclass(frozen=True)
class ReportConfig:
    seed: int = 0
    quick: bool = False
    tolerance: float = 1e-7
    eof_tolerance: float = 1e-6

    def diamond(self):
        return DiamondConfig(restarts=8 if self.quick else 64, seed=self.seed)

    def qcb(self):
        return QcbConfig(outer_iter=10 if self.quick else 40, seed=self.seed,
                         final_restarts=8 if self.quick else 64)

    def delta(self):
        return DeltaConfig(restarts=4 if self.quick else 16, seed=self.seed,
                           f_candidates=2 if self.quick else 4,
                           eof_config=eof.EofConfig(restarts=4 if self.quick else 8, seed=self.seed))

    def phi(self):
        return PhiConfig(candidates=2 if self.quick else 6, seed=self.seed,
                         recovery_config=recovery.RecoveryConfig(restarts=4 if self.quick else 8,
                                                                 seed=self.seed))

    def eof(self):
        return eof.EofConfig(restarts=8 if self.quick else 32, seed=self.seed)

    def recovery(self):
        return recovery.RecoveryConfig(restarts=8 if self.quick else 16, seed=self.seed)


def state_records(rho, ch: KrausChannel, config: ReportConfig | None = None, instance: str = ""):
    """All state-level bound records for one (state, channel) pair.

    Returns ``(records, summary)`` where summary holds the computed losses
    and fidelities.
    """
    config = config or ReportConfig()
    rho = qcore.as_density(rho)
    recs = checks.dpi(rho, ch, instance)
    r, summary = checks.thm1(rho, ch, config.recovery(), instance, config.tolerance)
    recs.extend(r)
    if ch.dimA * ch.dimB <= MAX_DIM:
        fbar = summary.get("optimized_fidelity", summary["transpose_fidelity"])
        r, extra = checks.thm2(rho, ch, fbar, summary["delta_c"], config.eof(),
                               instance=instance, tol=config.eof_tolerance)
        recs.extend(r)
        summary.update(extra)
    return recs, summary


def channel_report(ch: KrausChannel, descriptor: str = "", state=None,
                   config: ReportConfig | None = None) -> ChannelReport:
    """Single-channel deep dive: losses, fidelities, Q_cb, Delta, Phi and all bound records."""
    config = config or ReportConfig()
    dA, dB = ch.dimA, ch.dimB
    rho = qcore.maximally_mixed(dA) if state is None else qcore.as_density(state)
    inst = descriptor or f"channel {dA}->{dB}"
    records, summary = state_records(rho, ch, config, inst)

    q = q_cb(ch, config.qcb())
    phi = big_phi(ch, config.phi())
    dc_est = big_delta_x(ch, "c", config.delta())
    df_est = big_delta_x(ch, "f", config.delta())
    for x, est in (("c", dc_est), ("f", df_est)):
        records.extend(verify_final_bounds(ch, x, q, est, config.tolerance, inst))
        records.extend(verify_phi_chain(ch, x, phi, est, config.tolerance, inst))
    if dA == dB:
        records.extend(verify_theorem3(ch, config.diamond(), config.tolerance, inst))

    if state is None:
        dcl, dfl = dc_est.value, df_est.value
    else:
        dcl, dfl = summary["delta_c"], summary.get("delta_f", 0.0)
    return ChannelReport(inst, q.value, dcl, dfl, phi.value, records)
