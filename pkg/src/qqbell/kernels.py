"""Numeric kernels with a numba path and a vectorised numpy path.

Both paths implement the same algorithms with the same branch rules; they
agree to rounding. ``backend=None`` picks numba unless
``QQBELL_DISABLE_NUMBA`` is set.

Bob-ket chart (4 reals per ket, global phase removed)::

    n = (cos p0, sin p0 cos p1 e^{i p2}, sin p0 sin p1 e^{i p3})
"""
import math

import numpy as np

from ._accel import njit, resolve_backend

SQRT3 = math.sqrt(3.0)
HALF_SQRT3 = 0.5 * SQRT3

JACOBI_MAX_SWEEPS = 60


# ----------------------------------------------------------------- Jacobi


@njit
def _jacobi_one(A, V, max_sweeps):
    n = A.shape[0]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += A[i, j] * A[i, j]
    eps = 1e-32 * scale
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += A[p, q] * A[p, q]
        if off <= eps:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
    return max_sweeps


@njit
def _jacobi_batch_numba(M, max_sweeps):
    N, n, _ = M.shape
    w = np.empty((N, n))
    V = np.empty((N, n, n))
    for b in range(N):
        A = M[b].copy()
        Vb = np.eye(n)
        _jacobi_one(A, Vb, max_sweeps)
        for i in range(n):
            w[b, i] = A[i, i]
        V[b] = Vb
    return w, V


def _jacobi_batch_numpy(M, max_sweeps):
    A = np.array(M, dtype=float, copy=True)
    N, n, _ = A.shape
    V = np.broadcast_to(np.eye(n), A.shape).copy()
    eps = 1e-32 * np.einsum("bij,bij->b", A, A)
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = (A[:, iu[0], iu[1]] ** 2).sum(axis=1)
        todo = off > eps
        if not todo.any():
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                rot = todo & (apq != 0.0)
                if not rot.any():
                    continue
                safe = np.where(rot, apq, 1.0)
                theta = (A[:, q, q] - A[:, p, p]) / (2.0 * safe)
                t = 1.0 / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta < 0.0, -t, t)
                c = np.where(rot, 1.0 / np.sqrt(t * t + 1.0), 1.0)
                s = np.where(rot, t * c, 0.0)
                cc, ss = c[:, None], s[:, None]
                colp, colq = A[:, :, p].copy(), A[:, :, q].copy()
                A[:, :, p] = cc * colp - ss * colq
                A[:, :, q] = ss * colp + cc * colq
                rowp, rowq = A[:, p, :].copy(), A[:, q, :].copy()
                A[:, p, :] = cc * rowp - ss * rowq
                A[:, q, :] = ss * rowp + cc * rowq
                A[rot, p, q] = 0.0
                A[rot, q, p] = 0.0
                vp, vq = V[:, :, p].copy(), V[:, :, q].copy()
                V[:, :, p] = cc * vp - ss * vq
                V[:, :, q] = ss * vp + cc * vq
    return np.diagonal(A, axis1=1, axis2=2).copy(), V


def jacobi_eigh(M, backend=None, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigen-decompose a stack of real symmetric matrices by cyclic Jacobi.

    Returns ``(w, V)`` with eigenvalues in descending order along the last
    axis and eigenvectors in the matching columns of ``V``.
    """
    M = np.asarray(M, dtype=float)
    single = M.ndim == 2
    if single:
        M = M[None]
    M = 0.5 * (M + np.swapaxes(M, 1, 2))
    if resolve_backend(backend) == "numba":
        w, V = _jacobi_batch_numba(np.ascontiguousarray(M), max_sweeps)
    else:
        w, V = _jacobi_batch_numpy(M, max_sweeps)
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    if single:
        return w[0], V[0]
    return w, V


# ------------------------------------------------------- chart & objective


def kets_from_chart(P):
    """Kets from chart parameters, shape (..., 4) -> (..., 3) complex."""
    P = np.asarray(P, dtype=float)
    c0, s0 = np.cos(P[..., 0]), np.sin(P[..., 0])
    c1, s1 = np.cos(P[..., 1]), np.sin(P[..., 1])
    return np.stack(
        [
            c0 + 0j,
            s0 * c1 * np.exp(1j * P[..., 2]),
            s0 * s1 * np.exp(1j * P[..., 3]),
        ],
        axis=-1,
    )


def betas_from_kets(K):
    """``sqrt(3)/2 <n|lambda_i|n>`` for a stack of normalised kets."""
    K = np.asarray(K, dtype=complex)
    n0, n1, n2 = K[..., 0], K[..., 1], K[..., 2]
    z01 = n0.conj() * n1
    z02 = n0.conj() * n2
    z12 = n1.conj() * n2
    q0, q1, q2 = np.abs(n0) ** 2, np.abs(n1) ** 2, np.abs(n2) ** 2
    out = np.stack(
        [
            2 * z01.real,
            2 * z01.imag,
            q0 - q1,
            2 * z02.real,
            2 * z02.imag,
            2 * z12.real,
            2 * z12.imag,
            (q0 + q1 - 2 * q2) / SQRT3,
        ],
        axis=-1,
    )
    return HALF_SQRT3 * out


def _betas_from_chart_numpy(P):
    """Same as ``betas_from_kets(kets_from_chart(P))`` in real arithmetic."""
    c0, s0 = np.cos(P[..., 0]), np.sin(P[..., 0])
    c1, s1 = np.cos(P[..., 1]), np.sin(P[..., 1])
    m0 = c0
    m1 = s0 * c1
    m2 = s0 * s1
    x1, x2 = P[..., 2], P[..., 3]
    q0, q1, q2 = m0 * m0, m1 * m1, m2 * m2
    out = np.stack(
        [
            2 * m0 * m1 * np.cos(x1),
            2 * m0 * m1 * np.sin(x1),
            q0 - q1,
            2 * m0 * m2 * np.cos(x2),
            2 * m0 * m2 * np.sin(x2),
            2 * m1 * m2 * np.cos(x2 - x1),
            2 * m1 * m2 * np.sin(x2 - x1),
            (q0 + q1 - 2 * q2) / SQRT3,
        ],
        axis=-1,
    )
    return HALF_SQRT3 * out


def objective_batch(X, r, T):
    """Best-Alice E value for rows of 8 chart parameters (two kets)."""
    X = np.asarray(X, dtype=float)
    b1 = _betas_from_chart_numpy(X[..., :4])
    b2 = _betas_from_chart_numpy(X[..., 4:])
    v1 = (b1[..., None, :] * T).sum(axis=-1)
    v2 = (b2[..., None, :] * T).sum(axis=-1)
    p = v1 + v2 - HALF_SQRT3 * r
    q = v1 - v2
    return np.sqrt((p * p).sum(axis=-1)) + np.sqrt((q * q).sum(axis=-1))


@njit
def _beta_from_chart_numba(x, off, out):
    c0 = math.cos(x[off])
    s0 = math.sin(x[off])
    c1 = math.cos(x[off + 1])
    s1 = math.sin(x[off + 1])
    m0 = c0
    m1 = s0 * c1
    m2 = s0 * s1
    x1 = x[off + 2]
    x2 = x[off + 3]
    q0 = m0 * m0
    q1 = m1 * m1
    q2 = m2 * m2
    out[0] = HALF_SQRT3 * 2 * m0 * m1 * math.cos(x1)
    out[1] = HALF_SQRT3 * 2 * m0 * m1 * math.sin(x1)
    out[2] = HALF_SQRT3 * (q0 - q1)
    out[3] = HALF_SQRT3 * 2 * m0 * m2 * math.cos(x2)
    out[4] = HALF_SQRT3 * 2 * m0 * m2 * math.sin(x2)
    out[5] = HALF_SQRT3 * 2 * m1 * m2 * math.cos(x2 - x1)
    out[6] = HALF_SQRT3 * 2 * m1 * m2 * math.sin(x2 - x1)
    out[7] = HALF_SQRT3 * (q0 + q1 - 2 * q2) / SQRT3


@njit
def _objective_numba(x, r, T, b1, b2):
    _beta_from_chart_numba(x, 0, b1)
    _beta_from_chart_numba(x, 4, b2)
    pp = 0.0
    qq = 0.0
    for i in range(3):
        v1 = 0.0
        v2 = 0.0
        for j in range(8):
            v1 += T[i, j] * b1[j]
            v2 += T[i, j] * b2[j]
        p = v1 + v2 - HALF_SQRT3 * r[i]
        q = v1 - v2
        pp += p * p
        qq += q * q
    return math.sqrt(pp) + math.sqrt(qq)


def objective(x, r, T, backend=None):
    x = np.ascontiguousarray(x, dtype=float)
    if resolve_backend(backend) == "numba":
        return float(_objective_numba(x, np.asarray(r, float), np.asarray(T, float), np.empty(8), np.empty(8)))
    return float(objective_batch(x, r, T))


# ------------------------------------------------------------ Nelder-Mead
# Maximises the objective (minimises g = -objective). Standard coefficients:
# reflection 1, expansion 2, contraction 1/2, shrink 1/2. A simplex stops
# once g_worst - g_best <= tol.


@njit
def _nelder_mead_numba(r, T, x0s, step, max_iters, tol):
    S, n = x0s.shape
    m = n + 1
    x_out = np.empty((S, n))
    f_out = np.empty(S)
    iters = np.zeros(S, dtype=np.int64)
    conv = np.zeros(S, dtype=np.bool_)
    b1 = np.empty(8)
    b2 = np.empty(8)
    X = np.empty((m, n))
    G = np.empty(m)
    Xs = np.empty((m, n))
    Gs = np.empty(m)
    c = np.empty(n)
    xr = np.empty(n)
    xe = np.empty(n)
    xc = np.empty(n)
    for s in range(S):
        for i in range(m):
            for k in range(n):
                X[i, k] = x0s[s, k]
            if i > 0:
                X[i, i - 1] += step
            G[i] = -_objective_numba(X[i], r, T, b1, b2)
        it = 0
        while True:
            order = np.argsort(G, kind="mergesort")
            for i in range(m):
                Gs[i] = G[order[i]]
                for k in range(n):
                    Xs[i, k] = X[order[i], k]
            for i in range(m):
                G[i] = Gs[i]
                for k in range(n):
                    X[i, k] = Xs[i, k]
            if G[n] - G[0] <= tol:
                conv[s] = True
                break
            if it >= max_iters:
                break
            it += 1
            for k in range(n):
                acc = 0.0
                for i in range(n):
                    acc += X[i, k]
                c[k] = acc / n
            for k in range(n):
                xr[k] = c[k] + (c[k] - X[n, k])
            gr = -_objective_numba(xr, r, T, b1, b2)
            shrink = False
            if gr < G[0]:
                for k in range(n):
                    xe[k] = c[k] + 2.0 * (c[k] - X[n, k])
                ge = -_objective_numba(xe, r, T, b1, b2)
                if ge < gr:
                    for k in range(n):
                        X[n, k] = xe[k]
                    G[n] = ge
                else:
                    for k in range(n):
                        X[n, k] = xr[k]
                    G[n] = gr
            elif gr < G[n - 1]:
                for k in range(n):
                    X[n, k] = xr[k]
                G[n] = gr
            elif gr < G[n]:
                for k in range(n):
                    xc[k] = c[k] + 0.5 * (xr[k] - c[k])
                gc = -_objective_numba(xc, r, T, b1, b2)
                if gc <= gr:
                    for k in range(n):
                        X[n, k] = xc[k]
                    G[n] = gc
                else:
                    shrink = True
            else:
                for k in range(n):
                    xc[k] = c[k] + 0.5 * (X[n, k] - c[k])
                gc = -_objective_numba(xc, r, T, b1, b2)
                if gc < G[n]:
                    for k in range(n):
                        X[n, k] = xc[k]
                    G[n] = gc
                else:
                    shrink = True
            if shrink:
                for i in range(1, m):
                    for k in range(n):
                        X[i, k] = X[0, k] + 0.5 * (X[i, k] - X[0, k])
                    G[i] = -_objective_numba(X[i], r, T, b1, b2)
        iters[s] = it
        for k in range(n):
            x_out[s, k] = X[0, k]
        f_out[s] = -G[0]
    return x_out, f_out, iters, conv


def _nelder_mead_numpy(r, T, x0s, step, max_iters, tol):
    S, n = x0s.shape
    m = n + 1

    def g(P):
        return -objective_batch(P, r, T)

    X = np.repeat(x0s[:, None, :], m, axis=1)
    X[:, 1:, :] += step * np.eye(n)
    G = g(X)
    iters = np.zeros(S, dtype=np.int64)
    conv = np.zeros(S, dtype=bool)
    active = np.ones(S, dtype=bool)
    while True:
        order = np.argsort(G, axis=1, kind="stable")
        G = np.take_along_axis(G, order, axis=1)
        X = np.take_along_axis(X, order[:, :, None], axis=1)
        done = active & (G[:, n] - G[:, 0] <= tol)
        conv |= done
        active &= ~done
        active &= iters < max_iters
        if not active.any():
            break
        idx = np.flatnonzero(active)
        iters[idx] += 1
        Xa, Ga = X[idx], G[idx]
        xw, gw = Xa[:, n], Ga[:, n]
        c = Xa[:, :n].sum(axis=1) / n
        xr = c + (c - xw)
        gr = g(xr)
        xe = c + 2.0 * (c - xw)
        ge = g(xe)
        xoc = c + 0.5 * (xr - c)
        goc = g(xoc)
        xic = c + 0.5 * (xw - c)
        gic = g(xic)

        expand = gr < Ga[:, 0]
        reflect = ~expand & (gr < Ga[:, n - 1])
        outside = ~expand & ~reflect & (gr < gw)
        inside = ~expand & ~reflect & ~outside
        use_e = expand & (ge < gr)

        new_x = np.where(use_e[:, None], xe, xr)
        new_g = np.where(use_e, ge, gr)
        oc_ok = outside & (goc <= gr)
        ic_ok = inside & (gic < gw)
        new_x = np.where(oc_ok[:, None], xoc, new_x)
        new_g = np.where(oc_ok, goc, new_g)
        new_x = np.where(ic_ok[:, None], xic, new_x)
        new_g = np.where(ic_ok, gic, new_g)
        shrink = (outside & ~oc_ok) | (inside & ~ic_ok)
        keep = ~shrink
        Xa[keep, n] = new_x[keep]
        Ga[keep, n] = new_g[keep]
        if shrink.any():
            Xs = Xa[shrink]
            Xs[:, 1:] = Xs[:, :1] + 0.5 * (Xs[:, 1:] - Xs[:, :1])
            Ga_s = Ga[shrink]
            Ga_s[:, 1:] = g(Xs[:, 1:])
            Xa[shrink] = Xs
            Ga[shrink] = Ga_s
        X[idx] = Xa
        G[idx] = Ga
    return X[:, 0].copy(), -G[:, 0], iters, conv


def nelder_mead_starts(r, T, x0s, step=0.25, max_iters=500, tol=1e-9, backend=None):
    """Run one Nelder-Mead search per row of ``x0s``.

    Returns ``(x_best, f_best, iterations, converged)`` per start.
    """
    r = np.ascontiguousarray(r, dtype=float)
    T = np.ascontiguousarray(T, dtype=float)
    x0s = np.ascontiguousarray(x0s, dtype=float)
    if resolve_backend(backend) == "numba":
        return _nelder_mead_numba(r, T, x0s, float(step), int(max_iters), float(tol))
    return _nelder_mead_numpy(r, T, x0s, float(step), int(max_iters), float(tol))


# ---------------------------------------------------------------- see-saw


def _unit_rows(V):
    norms = np.linalg.norm(V, axis=-1, keepdims=True)
    fallback = np.zeros_like(V)
    fallback[..., 0] = 1.0
    return np.where(norms > 0, V / np.where(norms > 0, norms, 1.0), fallback)


def kets_value(K1, K2, r, T):
    b1, b2 = betas_from_kets(K1), betas_from_kets(K2)
    v1, v2 = b1 @ T.T, b2 @ T.T
    p = v1 + v2 - HALF_SQRT3 * r
    q = v1 - v2
    return np.linalg.norm(p, axis=-1) + np.linalg.norm(q, axis=-1)


def seesaw_polish(K1, K2, r, T, max_iters=200, tol=1e-12):
    """Alternate exact Alice and exact Bob maximisation on stacks of kets.

    With Alice fixed, ``(a + a')^T T beta`` is maximised over pure-qutrit
    ``beta`` by the top eigenvector of ``sum_i w_i lambda_i`` with
    ``w = T^T (a + a')``. Every step is an exact block maximisation so the
    value never decreases; rows stop once a step gains less than ``tol``.
    """
    from .algebra import GELLMANN

    K1 = np.array(K1, dtype=complex)
    K2 = np.array(K2, dtype=complex)
    val = kets_value(K1, K2, r, T)
    active = np.ones(len(val), dtype=bool)
    for _ in range(max_iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        b1, b2 = betas_from_kets(K1[idx]), betas_from_kets(K2[idx])
        v1, v2 = b1 @ T.T, b2 @ T.T
        a = _unit_rows(v1 + v2 - HALF_SQRT3 * r)
        ap = _unit_rows(v1 - v2)
        w1 = (a + ap) @ T
        w2 = (a - ap) @ T
        H1 = np.einsum("si,ijk->sjk", w1, GELLMANN)
        H2 = np.einsum("si,ijk->sjk", w2, GELLMANN)
        N1 = np.linalg.eigh(H1)[1][:, :, -1]
        N2 = np.linalg.eigh(H2)[1][:, :, -1]
        new = kets_value(N1, N2, r, T)
        better = new > val[idx]
        upd = idx[better]
        K1[upd] = N1[better]
        K2[upd] = N2[better]
        gain = np.where(better, new - val[idx], 0.0)
        val[upd] = new[better]
        active[idx[gain < tol]] = False
    return K1, K2, val
