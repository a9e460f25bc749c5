# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled ensemble-entropy descent; same algorithm as ``_eofcore_py``."""
import numpy as np

from libc.math cimport log2, sqrt, fabs
from scipy.linalg.cython_lapack cimport zheev

ctypedef double complex dc

cdef double EIG_CUT = 1e-15
cdef double ARMIJO = 1e-4
cdef int MAX_BACKTRACK = 40


cdef inline dc conj(dc z) nogil:
    return z.real - 1j * z.imag


cdef class _Work:
    cdef dc[::1] phi
    cdef dc[::1] a
    cdef dc[::1] x
    cdef dc[::1] work
    cdef double[::1] w
    cdef double[::1] rwork
    cdef int lwork

    def __init__(self, int ds, int dl):
        self.phi = np.zeros(ds * dl, dtype=complex)
        self.a = np.zeros(ds * ds, dtype=complex)
        self.x = np.zeros(ds * dl, dtype=complex)
        self.lwork = max(1, 4 * ds)
        self.work = np.zeros(self.lwork, dtype=complex)
        self.w = np.zeros(ds, dtype=float)
        self.rwork = np.zeros(max(1, 3 * ds - 2), dtype=float)


cdef double _objgrad(dc[:, ::1] U, dc[:, ::1] V, int ds, int dl, dc[:, ::1] G,
                     bint want_grad, _Work wk):
    cdef int m = U.shape[0]
    cdef int r = U.shape[1]
    cdef int D = ds * dl
    cdef int i, j, d, a, b, l, k, info
    cdef double p, lam, lg, total = 0.0
    cdef dc s, y
    cdef char jobz = b'V' if want_grad else b'N'
    cdef char uplo = b'U'
    cdef int n = ds
    cdef int lwork = wk.lwork

    for i in range(m):
        for d in range(D):
            s = 0
            for j in range(r):
                s = s + U[i, j] * V[j, d]
            wk.phi[d] = s
        p = 0.0
        for d in range(D):
            p += wk.phi[d].real * wk.phi[d].real + wk.phi[d].imag * wk.phi[d].imag
        if want_grad:
            for j in range(r):
                G[i, j] = 0
        if p <= 0.0:
            continue
        # rho = M M^H, column-major for LAPACK
        for a in range(ds):
            for b in range(ds):
                s = 0
                for l in range(dl):
                    s = s + wk.phi[a * dl + l] * conj(wk.phi[b * dl + l])
                wk.a[a + b * ds] = s
        zheev(&jobz, &uplo, &n, &wk.a[0], &n, &wk.w[0], &wk.work[0], &lwork, &wk.rwork[0], &info)
        if info != 0:
            raise RuntimeError("zheev failed")
        if want_grad:
            for d in range(D):
                wk.x[d] = 0
        for k in range(ds):
            lam = wk.w[k]
            if lam <= EIG_CUT * p:
                continue
            lg = log2(lam / p)
            total -= lam * lg
            if want_grad:
                # X += -2 lg u_k (u_k^H M)
                for l in range(dl):
                    y = 0
                    for a in range(ds):
                        y = y + conj(wk.a[a + k * ds]) * wk.phi[a * dl + l]
                    for a in range(ds):
                        wk.x[a * dl + l] = wk.x[a * dl + l] - 2.0 * lg * wk.a[a + k * ds] * y
        if want_grad:
            for j in range(r):
                s = 0
                for d in range(D):
                    s = s + wk.x[d] * conj(V[j, d])
                G[i, j] = s
    return total


def objective(U, V, int ds, int dl):
    cdef dc[:, ::1] Uv = np.ascontiguousarray(U, dtype=complex)
    cdef dc[:, ::1] Vv = np.ascontiguousarray(V, dtype=complex)
    cdef dc[:, ::1] G = np.zeros((1, 1), dtype=complex)
    return _objgrad(Uv, Vv, ds, dl, G, False, _Work(ds, dl))


def objective_grad(U, V, int ds, int dl):
    cdef dc[:, ::1] Uv = np.ascontiguousarray(U, dtype=complex)
    cdef dc[:, ::1] Vv = np.ascontiguousarray(V, dtype=complex)
    G = np.zeros((Uv.shape[0], Uv.shape[1]), dtype=complex)
    cdef dc[:, ::1] Gv = G
    f = _objgrad(Uv, Vv, ds, dl, Gv, True, _Work(ds, dl))
    return f, G


cdef void _retract(dc[:, ::1] X, dc[:, ::1] out):
    """Modified Gram-Schmidt QR; columns of ``out`` orthonormal, R diag > 0."""
    cdef int m = X.shape[0]
    cdef int r = X.shape[1]
    cdef int i, j, c
    cdef dc proj
    cdef double nrm
    for i in range(m):
        for j in range(r):
            out[i, j] = X[i, j]
    for j in range(r):
        for c in range(j):
            proj = 0
            for i in range(m):
                proj = proj + conj(out[i, c]) * out[i, j]
            for i in range(m):
                out[i, j] = out[i, j] - proj * out[i, c]
        nrm = 0.0
        for i in range(m):
            nrm += out[i, j].real * out[i, j].real + out[i, j].imag * out[i, j].imag
        nrm = sqrt(nrm)
        if nrm > 0:
            for i in range(m):
                out[i, j] = out[i, j] / nrm


def retract(X):
    Xv = np.ascontiguousarray(X, dtype=complex)
    out = np.empty_like(Xv)
    _retract(Xv, out)
    return out


cdef void _riemannian(dc[:, ::1] U, dc[:, ::1] G, dc[:, ::1] A, dc[:, ::1] out):
    cdef int m = U.shape[0]
    cdef int r = U.shape[1]
    cdef int i, j, k
    cdef dc s
    for j in range(r):
        for k in range(r):
            s = 0
            for i in range(m):
                s = s + conj(U[i, j]) * G[i, k]
            A[j, k] = s
    for i in range(m):
        for k in range(r):
            s = G[i, k]
            for j in range(r):
                s = s - U[i, j] * 0.5 * (A[j, k] + conj(A[k, j]))
            out[i, k] = s


cdef double _dot_re(dc[:, ::1] a, dc[:, ::1] b):
    cdef int i, j
    cdef double s = 0.0
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            s += a[i, j].real * b[i, j].real + a[i, j].imag * b[i, j].imag
    return s


def descend(U0, V, int ds, int dl, int max_iter, double tol, int sweep=10):
    """Monotone retracted gradient descent with Armijo backtracking and BB steps.

    Returns ``(U, value, iterations, converged, history)``.
    """
    cdef dc[:, ::1] U = np.array(U0, dtype=complex, order="C")
    cdef dc[:, ::1] Vv = np.ascontiguousarray(V, dtype=complex)
    cdef int m = U.shape[0]
    cdef int r = U.shape[1]
    cdef dc[:, ::1] G = np.zeros((m, r), dtype=complex)
    cdef dc[:, ::1] Gn = np.zeros((m, r), dtype=complex)
    cdef dc[:, ::1] grad = np.zeros((m, r), dtype=complex)
    cdef dc[:, ::1] gradn = np.zeros((m, r), dtype=complex)
    cdef dc[:, ::1] Un = np.zeros((m, r), dtype=complex)
    cdef dc[:, ::1] trial = np.zeros((m, r), dtype=complex)
    cdef dc[:, ::1] A = np.zeros((r, r), dtype=complex)
    cdef dc[:, ::1] swap
    cdef _Work wk = _Work(ds, dl)
    cdef double f, fn, gn2, t, sy, ss, sr, si, yr, yi
    cdef int it = 0, bt, i, j
    cdef bint accepted, converged = False
    history = np.zeros(max_iter + 1, dtype=float)
    cdef double[::1] hist = history

    f = _objgrad(U, Vv, ds, dl, G, True, wk)
    _riemannian(U, G, A, grad)
    gn2 = _dot_re(grad, grad)
    t = 0.1 / max(sqrt(gn2), 1e-12)
    hist[0] = f
    while it < max_iter:
        if gn2 < 1e-24:
            converged = True
            break
        accepted = False
        for bt in range(MAX_BACKTRACK):
            for i in range(m):
                for j in range(r):
                    trial[i, j] = U[i, j] - t * grad[i, j]
            _retract(trial, Un)
            fn = _objgrad(Un, Vv, ds, dl, Gn, False, wk)
            if fn <= f - ARMIJO * t * gn2:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = True
            break
        fn = _objgrad(Un, Vv, ds, dl, Gn, True, wk)
        _riemannian(Un, Gn, A, gradn)
        sy = 0.0
        ss = 0.0
        for i in range(m):
            for j in range(r):
                sr = Un[i, j].real - U[i, j].real
                si = Un[i, j].imag - U[i, j].imag
                yr = gradn[i, j].real - grad[i, j].real
                yi = gradn[i, j].imag - grad[i, j].imag
                sy += sr * yr + si * yi
                ss += sr * sr + si * si
        sy = fabs(sy)
        if sy > 1e-300:
            t = ss / sy
        else:
            t = 2.0 * t
        t = min(max(t, 1e-12), 1e12)
        swap = U; U = Un; Un = swap
        swap = grad; grad = gradn; gradn = swap
        f = fn
        gn2 = _dot_re(grad, grad)
        it += 1
        hist[it] = f
        if it >= sweep and hist[it - sweep] - hist[it] < tol:
            converged = True
            break
    return np.asarray(U).copy(), f, it, converged, history[: it + 1].copy()
