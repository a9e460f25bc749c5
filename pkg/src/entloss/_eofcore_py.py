"""Pure-numpy ensemble-entropy descent (fallback for the compiled ``_eofcore``).

The unnormalized ensemble members are the rows of ``U @ V``; each row,
reshaped to ``(ds, dl)``, is the coefficient matrix of one member with the
smaller subsystem first.  ``U`` has orthonormal columns, so every ``U``
yields a valid decomposition of ``V.T @ V.conj()``.
"""
import numpy as np

EIG_CUT = 1e-15
ARMIJO = 1e-4
MAX_BACKTRACK = 40


def objective(U, V, ds, dl):
    """Average pure-state entanglement (bits) of the ensemble generated by U."""
    phi = (U @ V).reshape(U.shape[0], ds, dl)
    rho = phi @ np.conj(np.transpose(phi, (0, 2, 1)))
    lam = np.linalg.eigvalsh(rho)
    p = np.einsum("ijj->i", rho).real
    total = 0.0
    for li, pi in zip(lam, p):
        if pi <= 0.0:
            continue
        li = li[li > EIG_CUT * pi]
        total -= float(np.sum(li * np.log2(li / pi)))
    return total


def member_gradients(phi):
    """Objective and per-member gradients ``2 G M`` for coefficient matrices ``phi``.

    ``phi`` has shape (m, d1, d2); entropies are taken on the d1 side.
    """
    rho = phi @ np.conj(np.transpose(phi, (0, 2, 1)))
    lam, vec = np.linalg.eigh(rho)
    p = np.einsum("ijj->i", rho).real
    X = np.zeros_like(phi)
    total = 0.0
    for i in range(phi.shape[0]):
        pi = p[i]
        if pi <= 0.0:
            continue
        keep = lam[i] > EIG_CUT * pi
        li = lam[i][keep]
        ui = vec[i][:, keep]
        logs = np.log2(li / pi)
        total -= float(np.sum(li * logs))
        # 2 G M with G = -(log rho - log p) on the support
        X[i] = -2.0 * (ui * logs) @ (ui.conj().T @ phi[i])
    return total, X


def objective_grad(U, V, ds, dl):
    """Objective and its Euclidean gradient for the inner product Re Tr(A^H B)."""
    m = U.shape[0]
    total, X = member_gradients((U @ V).reshape(m, ds, dl))
    return total, X.reshape(m, -1) @ V.conj().T


def retract(X):
    """QR retraction onto the Stiefel manifold, R with positive diagonal."""
    q, r = np.linalg.qr(X)
    d = np.diag(r)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * ph


def _riemannian(U, G):
    A = U.conj().T @ G
    return G - U @ (0.5 * (A + A.conj().T))


def descend(U0, V, ds, dl, max_iter, tol, sweep=10):
    """Monotone retracted gradient descent with Armijo backtracking and BB steps.

    Returns ``(U, value, iterations, converged, history)``.
    """
    U = np.array(U0, dtype=complex)
    V = np.asarray(V, dtype=complex)
    f, G = objective_grad(U, V, ds, dl)
    grad = _riemannian(U, G)
    gn2 = float(np.vdot(grad, grad).real)
    t = 0.1 / max(np.sqrt(gn2), 1e-12)
    history = [f]
    converged = False
    it = 0
    while it < max_iter:
        if gn2 < 1e-24:
            converged = True
            break
        accepted = False
        for _ in range(MAX_BACKTRACK):
            Un = retract(U - t * grad)
            fn = objective(Un, V, ds, dl)
            if fn <= f - ARMIJO * t * gn2:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = True
            break
        fn, Gn = objective_grad(Un, V, ds, dl)
        gradn = _riemannian(Un, Gn)
        s = Un - U
        y = gradn - grad
        sy = abs(float(np.vdot(s, y).real))
        ss = float(np.vdot(s, s).real)
        t = ss / sy if sy > 1e-300 else 2.0 * t
        t = min(max(t, 1e-12), 1e12)
        U, f, grad = Un, fn, gradn
        gn2 = float(np.vdot(grad, grad).real)
        it += 1
        history.append(f)
        if it >= sweep and history[-1 - sweep] - history[-1] < tol:
            converged = True
            break
    return U, f, it, converged, np.array(history)
