"""Per-instance inequality checks shared by the verification suites and channel reports.

Every function returns a list of :class:`~entloss.bounds.BoundCheckRecord`.
Quantities obtained from the variational E_f solver are upper bounds on
E_f, so derived losses delta_f are lower bounds; the brackets attached to
each record use ``S(rho) - max(I_c, 0)`` as the matching rigorous upper
bound on delta_f (E_f >= I_c and E_f >= 0).
"""
from __future__ import annotations

import math

import numpy as np

from . import entropy, eof, qcore, recovery
from .bounds import BoundCheckRecord, exact, skipped
from .channels import KrausChannel
from .entropy import LossKind

FID_TOL = 1e-7
EOF_TOL = 1e-6


def dpi(rho, ch: KrausChannel, instance: str = "", tol: float = 1e-9):
    """delta_c >= 0 on the raw (unclipped) value."""
    return [exact("dpi_nonneg", 0.0, entropy.delta_c_raw(rho, ch), tol, instance)]


def _g_safe(x: float, d_A: int) -> float:
    return recovery.g_eval(max(x, 0.0), d_A)


def converse_records(dc: float, fidelities, d_A: int, instance: str = "", tol: float = FID_TOL):
    """delta_c <= g(1 - F_e) over every evaluated recovery with 1 - F_e <= 1/2.

    One record per call: the evaluated recovery with the smallest slack.
    The note counts evaluations and those outside the domain of g.
    """
    fids = np.asarray(fidelities, dtype=float).ravel()
    gaps = 1.0 - fids
    ok = np.array([recovery.g_applicable(max(x, 0.0)) for x in gaps], dtype=bool)
    note = f"{fids.size} recoveries evaluated, {int(np.sum(~ok))} outside the domain of g"
    if not np.any(ok):
        return [skipped("thm1_converse", instance, note)]
    rhs = np.array([_g_safe(x, d_A) for x in gaps[ok]])
    worst = int(np.argmin(rhs - dc))
    return [exact("thm1_converse", dc, float(rhs[worst]), tol, instance, note=note)]


def thm1(rho, ch: KrausChannel, recovery_config=None, instance: str = "",
         tol: float = FID_TOL, optimize: bool = True):
    """Transpose-channel witness, converse, and the optimized-recovery round trip.

    Returns ``(records, summary)``.
    """
    rho = qcore.as_density(rho)
    dA = ch.dimA
    dc = entropy.delta_c(rho, ch)
    tr = recovery.transpose_recovery(rho, ch)
    direct = 1.0 - math.sqrt(2.0 * dc)
    recs = [exact("thm1_direct", direct, tr.fidelity, tol, instance)]
    summary = {"delta_c": dc, "transpose_fidelity": tr.fidelity}
    fids = [tr.fidelity]
    if optimize and ch.dimA * ch.dimB <= recovery.MAX_DIM:
        opt = recovery.optimize_recovery(rho, ch, recovery_config)
        fids.extend(opt.history)
        fids.append(opt.fidelity)
        fbar = opt.fidelity
        summary["optimized_fidelity"] = fbar
        recs.extend(converse_records(dc, fids, dA, instance, tol))
        # 1 - sqrt(2 delta_c) <= Fbar, with Fbar known only from below
        recs.append(BoundCheckRecord("miao", direct, fbar, tol, instance,
                                     lhs_lo=direct, lhs_hi=direct, rhs_lo=fbar, rhs_hi=1.0))
        gap = 1.0 - fbar
        if recovery.g_applicable(max(gap, 0.0)):
            # g(1 - Fbar) is overstated by a lower bound on Fbar
            recs.append(BoundCheckRecord("miao2", dc, _g_safe(gap, dA), tol, instance,
                                         lhs_lo=dc, lhs_hi=dc, rhs_lo=0.0,
                                         rhs_hi=_g_safe(gap, dA)))
        else:
            recs.append(skipped("miao2", instance, "1 - F_e > 1/2"))
    else:
        recs.extend(converse_records(dc, fids, dA, instance, tol))
    return recs, summary


def _eof_bracket(tau, config: eof.EofConfig):
    """(delta_f estimate, rigorous upper bound on delta_f, E_f result)."""
    res = eof.eof(tau, config)
    s_a = entropy.von_neumann_entropy(qcore.partial_trace(tau, [0]))
    ic = entropy.coherent_information(tau)
    df = entropy.clip_loss(s_a - res.value, "delta_f")
    return df, max(s_a - max(ic, 0.0), df), res


def thm2(rho, ch: KrausChannel, fbar: float, dc: float, eof_config=None,
         prescreen_config=None, instance: str = "", tol: float = EOF_TOL):
    """converse2 (delta_f <= delta_c) and direct2 (Fbar >= 1 - sqrt(2 K_f delta_f)).

    A cheap E_f solve is tried first; its delta_f is a lower bound, so when
    it already makes direct2 trivial the full solve is skipped.
    """
    eof_config = eof_config or eof.EofConfig()
    prescreen_config = prescreen_config or eof.EofConfig(restarts=1, max_iter=200,
                                                         seed=eof_config.seed,
                                                         backend=eof_config.backend)
    sigma = entropy.output_state(rho, ch)
    k = LossKind.f.K(ch.dimA, ch.dimB)
    df, df_hi, res = _eof_bracket(sigma, prescreen_config)
    full = False
    if 2.0 * k * df < 1.0:
        df, df_hi, res = _eof_bracket(sigma, eof_config)
        full = True
    recs = [BoundCheckRecord("converse2", df, dc, tol, instance,
                             lhs_lo=df, lhs_hi=df_hi, rhs_lo=dc, rhs_hi=dc)]
    if 2.0 * k * df < 1.0:
        lhs = 1.0 - math.sqrt(2.0 * k * df)
        note = "E_f restarts saturated" if res.saturated() else "E_f restarts not saturated"
        recs.append(BoundCheckRecord("thm2_direct2", lhs, fbar, tol, instance,
                                     lhs_lo=1.0 - math.sqrt(2.0 * k * df_hi), lhs_hi=lhs,
                                     rhs_lo=fbar, rhs_hi=1.0, note=note))
    else:
        recs.append(skipped("thm2_direct2", instance, "right-hand side <= 0"))
    recs.append(skipped("thm2_direct1", instance, "squashed entanglement is not computed"))
    return recs, {"delta_f": df, "eof": res.value, "full_eof": full}


def corollary_gap(tau, eof_config=None, prescreen_config=None, instance: str = "",
                  tol: float = EOF_TOL):
    """delta_c <= g(sqrt(2 K_f delta_f)) for a bipartite state, oriented so S(A) <= S(B)."""
    tau = qcore.as_density(tau)
    dA, dB = tau.dims
    s_a = entropy.von_neumann_entropy(qcore.partial_trace(tau, [0]))
    s_b = entropy.von_neumann_entropy(qcore.partial_trace(tau, [1]))
    if s_a > s_b:
        tau = swap(tau)
        dA, dB = dB, dA
    eof_config = eof_config or eof.EofConfig()
    prescreen_config = prescreen_config or eof.EofConfig(restarts=1, max_iter=200,
                                                         seed=eof_config.seed,
                                                         backend=eof_config.backend)
    k = LossKind.f.K(dA, dB)
    dc = entropy.delta_c_state(tau)
    df, df_hi, _ = _eof_bracket(tau, prescreen_config)
    arg = math.sqrt(2.0 * k * df)
    if not recovery.g_applicable(arg):
        return [skipped("corollary_gap", instance, f"g argument {arg:.3g} > 1/2")]
    df, df_hi, _ = _eof_bracket(tau, eof_config)
    arg = math.sqrt(2.0 * k * df)
    if not recovery.g_applicable(arg):
        return [skipped("corollary_gap", instance, f"g argument {arg:.3g} > 1/2")]
    arg_hi = math.sqrt(2.0 * k * df_hi)
    rhs_hi = _g_safe(arg_hi, dA) if recovery.g_applicable(arg_hi) else math.inf
    rhs = _g_safe(arg, dA)
    return [BoundCheckRecord("corollary_gap", dc, rhs, tol, instance,
                             lhs_lo=dc, lhs_hi=dc, rhs_lo=rhs, rhs_hi=rhs_hi)]


def swap(tau) -> qcore.DensityMatrix:
    """Exchange the two subsystems of a bipartite state."""
    dA, dB = tau.dims
    m = tau.mat.reshape(dA, dB, dA, dB).transpose(1, 0, 3, 2).reshape(dA * dB, dA * dB)
    return qcore.DensityMatrix(m, (dB, dA))


def hashing(tau, eof_config=None, instance: str = "", tol_ef: float = 1e-4,
            tol_mi: float = 1e-9, wootters: bool = False):
    """Computable consequences of the entanglement-measure chain for one state."""
    tau = qcore.as_density(tau)
    ic = max(entropy.coherent_information(tau), 0.0)
    mi = entropy.mutual_information(tau)
    recs = [exact("mutualinfo_half", ic, mi / 2.0, tol_mi, instance)]
    res = eof.eof(tau, eof_config)
    s_min = min(entropy.von_neumann_entropy(qcore.partial_trace(tau, [0])),
                entropy.von_neumann_entropy(qcore.partial_trace(tau, [1])))
    # res.value is an upper bound on E_f; the brackets do not assume the chain itself
    recs.append(BoundCheckRecord("hashing_lower", ic, res.value, tol_ef, instance,
                                 lhs_lo=ic, lhs_hi=ic, rhs_lo=0.0, rhs_hi=res.value))
    recs.append(BoundCheckRecord("hashing_upper", res.value, s_min, tol_ef, instance,
                                 lhs_lo=0.0, lhs_hi=res.value, rhs_lo=s_min, rhs_hi=s_min))
    if wootters and tau.dims == (2, 2):
        w = eof.wootters_eof(tau)
        recs.append(exact("eof_wootters", abs(res.value - w), 0.0, tol_ef, instance))
    return recs
