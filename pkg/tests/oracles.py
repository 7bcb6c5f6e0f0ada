"""Independent reference implementations used as test oracles.

Nothing here imports the package; every quantity is rebuilt from its
textbook definition so the tests compare two separate derivations.
"""
import itertools
import math

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

SQ2, SQ3 = math.sqrt(2), math.sqrt(3)
THRESHOLD = 1.5 * SQ3


def elementary(j, k, n=3):
    E = np.zeros((n, n), dtype=complex)
    E[j, k] = 1
    return E


def gellmann_reference():
    """Generalised Gell-Mann construction: symmetric, antisymmetric and
    diagonal generators in the conventional numbering."""
    sym = lambda j, k: elementary(j, k) + elementary(k, j)
    anti = lambda j, k: -1j * (elementary(j, k) - elementary(k, j))
    return np.array(
        [
            sym(0, 1),
            anti(0, 1),
            np.diag([1, -1, 0]).astype(complex),
            sym(0, 2),
            anti(0, 2),
            sym(1, 2),
            anti(1, 2),
            np.diag([1, 1, -2]).astype(complex) / SQ3,
        ]
    )


PAULI_REF = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
S2_REF = 1j / SQ2 * np.array([[0, -1, 0], [1, 0, -1], [0, 1, 0]])


def structure_constants_reference():
    """``f_ijk = -i/4 tr([l_i, l_j] l_k)``, ``d_ijk = 1/4 tr({l_i, l_j} l_k)``."""
    L = gellmann_reference()
    f = np.zeros((8, 8, 8))
    d = np.zeros((8, 8, 8))
    for i, j, k in itertools.product(range(8), repeat=3):
        c = L[i] @ L[j] - L[j] @ L[i]
        a = L[i] @ L[j] + L[j] @ L[i]
        f[i, j, k] = (-0.25j * np.trace(c @ L[k])).real
        d[i, j, k] = (0.25 * np.trace(a @ L[k])).real
    return f, d


def fano_reference(rho):
    """Fano coefficients from explicit Kronecker products."""
    L = gellmann_reference()
    r = np.array([np.trace(rho @ np.kron(s, np.eye(3))).real for s in PAULI_REF])
    R = np.array([1.5 * np.trace(rho @ np.kron(np.eye(2), l)).real for l in L])
    T = np.array([[1.5 * np.trace(rho @ np.kron(s, l)).real for l in L] for s in PAULI_REF])
    return r, R, T


def symmetric_eigs_cubic(A):
    """Eigenvalues (descending) of a real symmetric 3x3 matrix from the
    trigonometric solution of its characteristic cubic."""
    A = np.asarray(A, dtype=float)
    p1 = A[0, 1] ** 2 + A[0, 2] ** 2 + A[1, 2] ** 2
    q = np.trace(A) / 3
    p2 = sum((A[i, i] - q) ** 2 for i in range(3)) + 2 * p1
    if p2 == 0:
        return np.array([q, q, q])
    p = math.sqrt(p2 / 6)
    B = (A - q * np.eye(3)) / p
    rr = np.clip(np.linalg.det(B) / 2, -1.0, 1.0)
    phi = math.acos(rr) / 3
    e1 = q + 2 * p * math.cos(phi)
    e3 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    return np.array([e1, 3 * q - e1 - e3, e3])


def singular_values_cubic(T):
    w = symmetric_eigs_cubic(T @ T.T)
    return np.sqrt(np.clip(w, 0, None))


# ----------------------------------------------------------- the families


def example1_matrix(x, y):
    z = 1 - x - y
    M = np.array(
        [
            [x, 0, 0, 0, x, 0],
            [0, y, 0, 0, 0, y],
            [0, 0, z, z, 0, 0],
            [0, 0, z, z, 0, 0],
            [x, 0, 0, 0, x, 0],
            [0, y, 0, 0, 0, y],
        ]
    )
    return 0.5 * M.astype(complex)


def example1_fano(x, y):
    r = np.zeros(3)
    R = 0.25 * np.array([0, 0, 3 * (1 - x - 2 * y), 0, 0, 0, 0, SQ3 * (-1 + 3 * x)])
    z = 1 - x - y
    T = 1.5 * np.array(
        [
            [x, 0, 0, z, 0, y, 0, 0],
            [0, -x, 0, 0, z, 0, -y, 0],
            [0, 0, 0.5 * (-1 + 3 * x), 0, 0, 0, 0, SQ3 / 2 * (-1 + x + 2 * y)],
        ]
    )
    return r, R, T


def example1_mus(x, y):
    m12 = 1.5 * math.sqrt(1 + 2 * x**2 + 2 * x * (-1 + y) + 2 * (-1 + y) * y)
    m3 = 1.5 * math.sqrt(1 + 3 * x**2 + 3 * x * (-1 + y) + 3 * (-1 + y) * y)
    return m12, m3


def example2_matrix(theta, gamma):
    """Equal mixture of ``|f>`` and ``(I (x) exp(i theta S2)) |f>`` with
    ``|f> = sin(g)|0,-1> + cos(g)|1,+1>``."""
    f = np.zeros(6, dtype=complex)
    f[2] = math.sin(gamma)  # qubit 0, m = -1
    f[3] = math.cos(gamma)  # qubit 1, m = +1
    U = expm(1j * theta * S2_REF)
    g = np.kron(np.eye(2), U) @ f
    return 0.5 * (np.outer(f, f.conj()) + np.outer(g, g.conj()))


def example2_fano(theta, gamma):
    """Closed forms, with the 3-8 entry in its corrected form
    ``sqrt(3)/16 [(1 + 3 cos^2 t) cos 2g - 12 cos^2(t/2)]``."""
    c, s = math.cos(theta), math.sin(theta)
    c2g, s2g = math.cos(2 * gamma), math.sin(2 * gamma)
    ch2 = math.cos(theta / 2) ** 2
    r = np.array([0, 0, -c2g])
    R = 0.75 * np.array(
        [
            -(c + c2g) * s / SQ2,
            0,
            0.25 * (1 + 3 * c**2 + 2 * c2g * (1 + c)),
            0.5 * s**2,
            0,
            (c - c2g) * s / SQ2,
            0,
            (-1 - 3 * c**2 + 6 * c2g * (1 + c)) / (4 * SQ3),
        ]
    )
    T = np.zeros((3, 8))
    T[0, 0] = 3 / (8 * SQ2) * s2g * math.sin(2 * theta)
    T[0, 2] = 9 / 16 * s2g * s**2
    T[0, 3] = 3 / 16 * (7 + math.cos(2 * theta)) * s2g
    T[0, 5] = -3 / (8 * SQ2) * s2g * math.sin(2 * theta)
    T[0, 7] = -3 * SQ3 / 16 * s2g * s**2
    T[1, 1] = 3 / (4 * SQ2) * s2g * s
    T[1, 4] = 1.5 * s2g * ch2
    T[1, 6] = -3 / (4 * SQ2) * s2g * s
    T[2, 0] = 3 / (4 * SQ2) * (1 + c2g * c) * s
    T[2, 2] = -3 / 16 * (4 * ch2 + (1 + 3 * c**2) * c2g)
    T[2, 3] = -3 / 8 * c2g * s**2
    T[2, 5] = 3 / (4 * SQ2) * (1 - c2g * c) * s
    T[2, 7] = SQ3 / 16 * ((1 + 3 * c**2) * c2g - 12 * ch2)
    return r, R, T


def example2_t38_as_printed(theta, gamma):
    return SQ3 / 16 * ((2 + math.cos(theta) ** 2) * math.cos(2 * gamma) - 12 * math.cos(theta / 2) ** 2)


def tgx_matrix(p1, t1, t2):
    p2 = 1 - p1
    c1, s1, c2, s2 = math.cos(t1), math.sin(t1), math.cos(t2), math.sin(t2)
    M = np.zeros((6, 6))
    M[0, 0] = 2 * p1 * c1**2
    M[5, 5] = 2 * p1 * s1**2
    M[0, 5] = M[5, 0] = p1 * math.sin(2 * t1)
    M[1, 1] = 2 * p2 * c2**2
    M[3, 3] = 2 * p2 * s2**2
    M[1, 3] = M[3, 1] = p2 * math.sin(2 * t2)
    return 0.5 * M.astype(complex)


def tgx_fano(p1, t1, t2):
    p2 = 1 - p1
    c21, c22 = math.cos(2 * t1), math.cos(2 * t2)
    r = np.array([0, 0, p1 * c21 + p2 * c22])
    R = np.zeros(8)
    R[2] = 0.75 * (p1 + p1 * c21 - 2 * p2 * c22)
    R[7] = SQ3 / 4 * (2 - 3 * p1 + 3 * p1 * c21)
    T = np.zeros((3, 8))
    T[0, 0] = T[1, 1] = 3 * p2 * math.cos(t2) * math.sin(t2)
    T[0, 3] = 3 * p1 * math.cos(t1) * math.sin(t1)
    T[1, 4] = -T[0, 3]
    T[2, 2] = 0.75 * (-2 + 3 * p1 + p1 * c21)
    T[2, 7] = -SQ3 / 4 * (-3 * p1 + p1 * c21 - 2 * p2 * c22)
    return r, R, T


def tgx_negativity(p1, t1, t2):
    p2 = 1 - p1
    c1, s1, s2 = math.cos(t1), math.sin(t1), math.sin(t2)
    return (
        -p1 * c1**2
        - p2 * s2**2
        + math.sqrt(p1**2 * c1**4 + p2**2 * math.sin(2 * t2) ** 2)
        + math.sqrt(p2**2 * s2**4 + p1**2 * math.sin(2 * t1) ** 2)
    )


# ------------------------------------------------------ brute-force Alice


def _sphere(u, v):
    return np.stack([np.sin(u) * np.cos(v), np.sin(u) * np.sin(v), np.cos(u)], axis=-1)


def brute_force_alice_max(r, mu1, mu2, rng, samples=1_000_000, chunk=250_000):
    """Monte Carlo over pairs of unit vectors followed by a local Nelder-Mead
    refinement in spherical angles."""

    def value(a, ap):
        return (
            -SQ3 / 2 * (a @ r)
            + mu1 * np.linalg.norm(a + ap, axis=-1)
            + mu2 * np.linalg.norm(a - ap, axis=-1)
        )

    best, best_pair = -np.inf, None
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        g = rng.normal(size=(2, n, 3))
        g /= np.linalg.norm(g, axis=-1, keepdims=True)
        vals = value(g[0], g[1])
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_pair = vals[k], (g[0, k], g[1, k])
        done += n

    def neg(x):
        return -float(value(_sphere(x[0], x[1]), _sphere(x[2], x[3])))

    def angles(v):
        return [math.acos(np.clip(v[2], -1, 1)), math.atan2(v[1], v[0])]

    x0 = angles(best_pair[0]) + angles(best_pair[1])
    res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
    return max(best, -res.fun)
