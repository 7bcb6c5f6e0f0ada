"""Pauli, Gell-Mann and spin-1 matrices, su(3) structure constants, the
star/wedge products on R^8 and the adjoint representation of SU(3).

Indices in the public API are 1-based to match the usual physics labels
(``basis("gellmann", 8)``); the stacked arrays ``PAULI`` and ``GELLMANN``
are 0-based.
"""
from functools import lru_cache

import numpy as np

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)

STRUCTURAL_TOL = 1e-9


def _frozen(a):
    a = np.array(a)
    a.flags.writeable = False
    return a


PAULI = _frozen(
    np.array(
        [
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )
)

_gm = np.zeros((8, 3, 3), dtype=complex)
_gm[0][0, 1] = _gm[0][1, 0] = 1
_gm[1][0, 1], _gm[1][1, 0] = -1j, 1j
_gm[2] = np.diag([1, -1, 0])
_gm[3][0, 2] = _gm[3][2, 0] = 1
_gm[4][0, 2], _gm[4][2, 0] = -1j, 1j
_gm[5][1, 2] = _gm[5][2, 1] = 1
_gm[6][1, 2], _gm[6][2, 1] = -1j, 1j
_gm[7] = np.diag([1, 1, -2]) / SQRT3
GELLMANN = _frozen(_gm)
del _gm

SPIN1 = _frozen(
    np.array(
        [
            np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]) / SQRT2,
            1j * np.array([[0, -1, 0], [1, 0, -1], [0, 1, 0]]) / SQRT2,
            np.diag([1, 0, -1]),
        ],
        dtype=complex,
    )
)

_BASES = {"pauli": PAULI, "gellmann": GELLMANN, "spin1": SPIN1}


def basis(kind, index):
    """Return basis matrix ``index`` (1-based) of ``kind``.

    ``kind`` is one of ``"pauli"`` (1..3), ``"gellmann"`` (1..8) or
    ``"spin1"`` (1..3). A fresh writable copy is returned.
    """
    try:
        stack = _BASES[kind]
    except KeyError:
        raise ValueError(f"unknown basis kind {kind!r}") from None
    if not 1 <= index <= len(stack):
        raise ValueError(f"{kind} index must be in 1..{len(stack)}, got {index}")
    return stack[index - 1].copy()


# independent components, 1-based
_F_COMPONENTS = {
    (1, 2, 3): 1.0,
    (4, 5, 8): SQRT3 / 2,
    (6, 7, 8): SQRT3 / 2,
    (1, 4, 7): 0.5,
    (2, 4, 6): 0.5,
    (2, 5, 7): 0.5,
    (3, 4, 5): 0.5,
    (5, 1, 6): 0.5,
    (6, 3, 7): 0.5,
}

_D_COMPONENTS = {
    (1, 1, 8): 1 / SQRT3,
    (2, 2, 8): 1 / SQRT3,
    (3, 3, 8): 1 / SQRT3,
    (8, 8, 8): -1 / SQRT3,
    (4, 4, 8): -1 / (2 * SQRT3),
    (5, 5, 8): -1 / (2 * SQRT3),
    (6, 6, 8): -1 / (2 * SQRT3),
    (7, 7, 8): -1 / (2 * SQRT3),
    (1, 4, 6): 0.5,
    (1, 5, 7): 0.5,
    (2, 4, 7): -0.5,
    (2, 5, 6): 0.5,
    (3, 4, 4): 0.5,
    (3, 5, 5): 0.5,
    (3, 6, 6): -0.5,
    (3, 7, 7): -0.5,
}

_PERMS = [
    ((0, 1, 2), 1),
    ((1, 2, 0), 1),
    ((2, 0, 1), 1),
    ((1, 0, 2), -1),
    ((0, 2, 1), -1),
    ((2, 1, 0), -1),
]


@lru_cache(maxsize=None)
def structure_constants():
    """Dense ``(f, d)`` tensors, shape (8, 8, 8), 0-based, read-only.

    ``f`` is totally antisymmetric, ``d`` totally symmetric; both are filled
    from the independent components by running over index permutations.
    """
    f = np.zeros((8, 8, 8))
    d = np.zeros((8, 8, 8))
    for idx, val in _F_COMPONENTS.items():
        base = tuple(i - 1 for i in idx)
        for perm, sign in _PERMS:
            f[tuple(base[p] for p in perm)] = sign * val
    for idx, val in _D_COMPONENTS.items():
        base = tuple(i - 1 for i in idx)
        for perm, _ in _PERMS:
            d[tuple(base[p] for p in perm)] = val
    f.flags.writeable = False
    d.flags.writeable = False
    return f, d


def wedge(alpha, beta, f=None):
    """Antisymmetric product ``(alpha ^ beta)_k = sum_ij f_kij alpha_i beta_j``."""
    if f is None:
        f = structure_constants()[0]
    return np.einsum("kij,i,j->k", f, np.asarray(alpha, float), np.asarray(beta, float))


def star(alpha, beta, d=None):
    """Symmetric product ``(alpha * beta)_k = sqrt(3) sum_ij d_kij alpha_i beta_j``."""
    if d is None:
        d = structure_constants()[1]
    return SQRT3 * np.einsum("kij,i,j->k", d, np.asarray(alpha, float), np.asarray(beta, float))


def is_special_unitary(U, tol=STRUCTURAL_TOL):
    U = np.asarray(U)
    if U.shape != (3, 3):
        return False
    unitary = np.abs(U @ U.conj().T - np.eye(3)).max() <= tol
    return bool(unitary and abs(np.linalg.det(U) - 1.0) <= tol)


def adjoint_rep(U, tol=STRUCTURAL_TOL):
    """8x8 real orthogonal matrix ``g_ij = tr(lambda_i U lambda_j U^dag) / 2``.

    With this index order ``U lambda_j U^dag = sum_i g_ij lambda_i``, so the
    coefficient vector of ``U X U^dag`` is ``g @ coeffs(X)`` and
    ``adjoint_rep(U1 @ U2) == adjoint_rep(U1) @ adjoint_rep(U2)``.
    """
    U = np.asarray(U, dtype=complex)
    if not is_special_unitary(U, tol):
        raise ValueError("adjoint_rep requires a 3x3 special-unitary matrix")
    conj = np.einsum("ab,jbc,dc->jad", U, GELLMANN, U.conj())
    g = 0.5 * np.einsum("iba,jab->ij", GELLMANN, conj)
    return g.real.copy()


def su3_from_params(params):
    """``exp(i sum_k params_k lambda_k / 2)`` via the spectral decomposition."""
    params = np.asarray(params, dtype=float)
    if params.shape != (8,):
        raise ValueError("su3_from_params expects 8 real parameters")
    H = 0.5 * np.einsum("k,kij->ij", params, GELLMANN)
    w, V = np.linalg.eigh(H)
    U = (V * np.exp(1j * w)) @ V.conj().T
    # tr H = 0 makes det U = 1 up to rounding; strip the residual phase.
    return U / np.linalg.det(U) ** (1 / 3)


def random_su3(rng):
    return su3_from_params(rng.uniform(-np.pi, np.pi, size=8))


def in_set_S(alpha, tol=STRUCTURAL_TOL):
    """Unit norm and idempotent under the star product (pure-qutrit data)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    alpha = np.asarray(alpha, dtype=float)
    if abs(alpha @ alpha - 1.0) > tol:
        return False
    return bool(np.linalg.norm(star(alpha, alpha) - alpha) <= tol)


def _check_unit(b, name="b", tol=STRUCTURAL_TOL):
    b = np.asarray(b, dtype=float)
    if b.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    if abs(np.linalg.norm(b) - 1.0) > tol:
        raise ValueError(f"{name} must be a unit vector (|{name}| = {np.linalg.norm(b):.12g})")
    return b


def spin_component(b):
    """``b . S`` for the spin-1 matrices."""
    return np.einsum("i,ijk->jk", np.asarray(b, dtype=float), SPIN1)


def beta_tilde(b):
    """Coherence data ``-sqrt(3)/2 tr[lambda_i (b.S)^2]`` of the trace-2
    projector ``(b.S)^2``, in closed form."""
    b1, b2, b3 = _check_unit(b)
    s = SQRT3 / SQRT2
    return np.array(
        [
            -s * b1 * b3,
            -s * b2 * b3,
            SQRT3 / 4 * (1 - 3 * b3**2),
            SQRT3 / 2 * (b2**2 - b1**2),
            -SQRT3 * b1 * b2,
            s * b1 * b3,
            s * b2 * b3,
            0.25 * (3 * b3**2 - 1),
        ]
    )


def spin_projectors(b):
    """Eigenprojectors ``(P_minus, P_zero, P_plus)`` of ``b . S``."""
    bS = spin_component(_check_unit(b))
    bS2 = bS @ bS
    return 0.5 * (bS2 - bS), np.eye(3) - bS2, 0.5 * (bS2 + bS)


def coherence_vector(ket):
    """``N_i = sqrt(3)/2 <n|lambda_i|n>`` for a normalised qutrit ket."""
    n = np.asarray(ket, dtype=complex)
    n = n / np.linalg.norm(n)
    return SQRT3 / 2 * np.einsum("a,kab,b->k", n.conj(), GELLMANN, n).real


def gellmann_coefficients(X):
    """Coefficients ``tr(lambda_i X) / 2`` of a 3x3 matrix (traceless part)."""
    return 0.5 * np.einsum("kab,ba->k", GELLMANN, np.asarray(X))
