import math

import cvxpy as cp
import numpy as np
import pytest

from entloss import channels, entropy, qcore, recovery
from entloss.errors import DimMismatch, DimTooLarge, DomainError, GridOutOfRange
from entloss.recovery import RecoveryConfig

X = channels.PAULI["X"]


def best_recovery_sdp(rho, ch):
    """Optimal corrected fidelity as an SDP over the recovery Choi matrix."""
    dA, dB = ch.dimA, ch.dimB
    psi = qcore.purify(rho)
    Psi = psi.matrix()
    dR = Psi.shape[0]
    sigma = channels.apply_to_subsystem(ch, psi).mat.reshape(dR, dB, dR, dB)
    C = np.zeros((dB, dA, dB, dA), dtype=complex)
    for b in range(dB):
        for bp in range(dB):
            C[b, :, bp, :] = Psi.conj().T @ sigma[:, b, :, bp] @ Psi
    C = C.reshape(dB * dA, dB * dA)
    J = cp.Variable((dB * dA, dB * dA), hermitian=True)
    cons = [J >> 0, cp.partial_trace(J, [dB, dA], axis=1) == np.eye(dB)]
    prob = cp.Problem(cp.Maximize(cp.real(cp.sum(cp.multiply(C, J)))), cons)
    prob.solve()
    return prob.value


def min_fidelity_sdp(ch):
    """inf over states of sum_k |Tr(rho C_k)|^2 as a convex program."""
    d = ch.dimA
    rho = cp.Variable((d, d), hermitian=True)
    terms = cp.hstack([cp.trace(rho @ k) for k in ch.kraus_ops])
    prob = cp.Problem(cp.Minimize(cp.sum_squares(cp.abs(terms))), [rho >> 0, cp.trace(rho) == 1])
    prob.solve()
    return prob.value


def test_entanglement_fidelity_examples():
    rho = channels.random_state(3, seed=0)
    assert np.isclose(recovery.entanglement_fidelity(rho, channels.identity(3)), 1.0)
    for p in (0.0, 0.3, 0.7, 1.0):
        f = recovery.entanglement_fidelity(np.eye(2) / 2, channels.depolarizing(p))
        assert abs(f - (1 - 3 * p / 4)) <= 1e-10
    assert np.isclose(recovery.entanglement_fidelity(np.eye(2) / 2, channels.unitary(X)), 0.0)
    with pytest.raises(DimMismatch):
        recovery.entanglement_fidelity(np.eye(2) / 2, channels.random_channel(2, 3, 2, seed=0))


def test_entanglement_fidelity_is_purification_overlap():
    rng = np.random.default_rng(1)
    rho = channels.random_state(3, seed=rng)
    ch = channels.random_channel(3, 3, 4, rng)
    psi = qcore.purify(rho)
    out = channels.apply_to_subsystem(ch, psi).mat
    overlap = np.vdot(psi.vec, out @ psi.vec).real
    assert np.isclose(recovery.entanglement_fidelity(rho, ch), overlap, atol=1e-12)


def test_transpose_channel_examples():
    rng = np.random.default_rng(2)
    rho = channels.random_state(3, seed=rng)
    U = qcore.haar_unitary(3, rng)
    rec = recovery.transpose_channel(rho, channels.unitary(U))
    assert channels.choi_distance(rec, channels.unitary(U.conj().T)) <= 1e-8
    assert np.isclose(recovery.corrected_fidelity(rho, rec, channels.unitary(U)), 1.0)
    rec = recovery.transpose_channel(rho, channels.identity(3))
    assert channels.choi_distance(rec, channels.identity(3)) <= 1e-8


def test_transpose_channel_on_half_dephasing():
    mixed = qcore.maximally_mixed(2)
    ch = channels.dephasing(0.5)
    fid = recovery.transpose_recovery(mixed, ch).fidelity
    dc = entropy.delta_c(mixed, ch)
    assert np.isclose(dc, 1.0)
    # the recovery is the dephasing itself, so R o N keeps |Tr(rho I)|^2 / 2 only
    assert np.isclose(fid, 0.5)
    assert fid >= 1 - math.sqrt(2 * dc)
    assert np.isclose(best_recovery_sdp(mixed, ch), 0.5, atol=1e-6)


def test_transpose_channel_is_cptp_for_rank_deficient_output():
    rho = np.diag([1.0, 0.0]).astype(complex)
    rec = recovery.transpose_channel(rho, channels.amplitude_damping(0.4))
    assert channels.is_cptp(rec)
    rng = np.random.default_rng(3)
    for eps in (1e-3, 1e-7, 1e-10):
        V = qcore.haar_isometry(3, 2, rng)
        noise = channels.random_channel(2, 3, 1, rng)
        ops = np.concatenate([math.sqrt(1 - eps) * V[None], math.sqrt(eps) * noise.kraus_ops])
        ch = channels.KrausChannel(ops, 2, 3)
        assert channels.is_cptp(recovery.transpose_channel(np.eye(2) / 2, ch))


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2)])
def test_optimized_recovery_matches_sdp(dims):
    rng = np.random.default_rng(4)
    dA, dB = dims
    for _ in range(3):
        rho = channels.random_state(dA, seed=rng)
        ch = channels.random_channel(dA, dB, int(rng.integers(2, dA * dB + 1)), rng)
        res = recovery.optimize_recovery(rho, ch, RecoveryConfig(restarts=16))
        best = best_recovery_sdp(rho, ch)
        witness = recovery.transpose_recovery(rho, ch).fidelity
        assert res.fidelity >= witness - 1e-9
        assert res.fidelity <= best + 1e-6
        assert res.fidelity >= best - 1e-4


def test_recovery_result_self_consistency():
    rho = channels.random_state(2, seed=5)
    ch = channels.random_channel(2, 2, 3, seed=5)
    res = recovery.optimize_recovery(rho, ch, RecoveryConfig(restarts=4))
    assert res.method == "optimized"
    assert np.isclose(res.fidelity, recovery.corrected_fidelity(rho, res.channel, ch), atol=1e-9)
    assert (res.channel.dimA, res.channel.dimB) == (2, 2)


def test_optimize_recovery_examples():
    rng = np.random.default_rng(6)
    U = qcore.haar_unitary(2, rng)
    rho = channels.random_state(2, seed=rng)
    res = recovery.optimize_recovery(rho, channels.unitary(U), RecoveryConfig(restarts=2))
    assert np.isclose(res.fidelity, 1.0)
    mixed = qcore.maximally_mixed(2)
    dep = channels.depolarizing(1.0)
    res = recovery.optimize_recovery(mixed, dep)
    assert np.isclose(res.fidelity, best_recovery_sdp(mixed, dep), atol=1e-6)
    dc = entropy.delta_c(mixed, dep)
    x = 1 - res.fidelity
    assert np.isclose(x, 0.75) and not recovery.g_applicable(x)
    with pytest.raises(DomainError):
        recovery.g_eval(x, 2)
    assert dc <= 4 * x * math.log2(2 / x)
    ad = channels.amplitude_damping(0.1)
    res = recovery.optimize_recovery(mixed, ad)
    assert res.fidelity >= 1 - math.sqrt(2 * entropy.delta_c(mixed, ad))


def test_dimension_limit():
    with pytest.raises(DimTooLarge):
        recovery.optimize_recovery(np.eye(3) / 3, channels.random_channel(3, 4, 2, seed=0))


def test_min_entanglement_fidelity_matches_convex_oracle():
    rng = np.random.default_rng(7)
    for d in (2, 3):
        for _ in range(3):
            ch = channels.random_channel(d, d, int(rng.integers(1, d * d + 1)), rng)
            mf = recovery.minimize_entanglement_fidelity(ch)
            ref = min_fidelity_sdp(ch)
            assert mf.lower <= mf.value
            assert abs(mf.value - ref) <= 1e-6
            assert np.isclose(recovery.entanglement_fidelity(mf.rho, ch), mf.value, atol=1e-9)


def test_min_entanglement_fidelity_of_z_is_zero():
    mf = recovery.minimize_entanglement_fidelity(channels.unitary(channels.PAULI["Z"]))
    assert mf.value <= 1e-9


def test_g_examples():
    assert recovery.g_eval(0.0, 3) == 0.0
    assert recovery.g_eval(1e-300, 2) < 1e-290
    assert np.isclose(recovery.g_eval(0.5, 2), 4.0)
    assert abs(recovery.g_inverse(recovery.g_eval(0.3, 3), 3) - 0.3) <= 1e-10
    with pytest.raises(DomainError):
        recovery.g_eval(0.6, 2)
    with pytest.raises(DomainError):
        recovery.g_inverse(5.0, 2)


def test_g_is_increasing_on_its_domain():
    xs = np.linspace(1e-6, 0.5, 500)
    for d in (2, 3, 4):
        ys = [recovery.g_eval(x, d) for x in xs]
        assert np.all(np.diff(ys) > 0)


def test_fig2_curve_examples():
    rows = recovery.fig2_curve(1001)
    assert rows[-1] == (1.0, 1.0)
    assert rows[0] == (0.0, 0.0)
    ys = [y for _, y in rows]
    assert np.all(np.diff(ys) >= 0)
    s = math.log2(3)
    assert recovery.fig2_curve([0.99 * s])[0][1] == 0.0
    with pytest.raises(GridOutOfRange):
        recovery.fig2_curve([2.0])
    with pytest.raises(GridOutOfRange):
        recovery.fig2_curve(1)


def bisect(f, lo, hi, n=200):
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_fig2_threshold_against_bisection():
    s = math.log2(3)

    def gap(delta_f):
        x = math.sqrt(578 * delta_f)
        return s - 4 * x * math.log2(3 / x)

    ref = bisect(gap, 1e-12, 4e-4)
    thr = recovery.fig2_threshold()
    assert abs(thr - ref) <= 1e-9 * ref + 1e-15
    assert abs(thr - 9.6e-6) <= 0.2 * 9.6e-6
    assert recovery.ic_lower_bound_from_ef(s - 0.99 * thr) > 0
    assert recovery.ic_lower_bound_from_ef(s - 1.01 * thr) == 0


def test_write_fig2_csv(tmp_path):
    path = tmp_path / "fig2.csv"
    recovery.write_fig2_csv(path, grid=11)
    lines = path.read_text().splitlines()
    assert lines[0] == "ef_norm,bound_norm"
    assert lines[-1] == "1.000000000000,1.000000000000"
    assert len(lines) == 12
