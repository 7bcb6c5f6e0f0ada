"""Qubit-qutrit density matrices and their Fano decomposition.

Basis ordering is ``|qubit> (x) |qutrit>`` with the qubit index major, so
index ``3*q + t`` holds qubit level ``q`` and qutrit level ``t``. The
qutrit levels of the spin-1 examples are ordered m = +1, 0, -1.
"""
import json
import math
from dataclasses import dataclass
from functools import singledispatch

import numpy as np

from .algebra import GELLMANN, PAULI, SPIN1, SQRT2, SQRT3

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGEN_TOL = 1e-9

# 36 operators sigma_mu (x) lambda_nu with sigma_0 = I2, lambda_0 = I3
_S4 = np.concatenate([np.eye(2, dtype=complex)[None], PAULI])
_L9 = np.concatenate([np.eye(3, dtype=complex)[None], GELLMANN])
_PRODUCT_BASIS = np.einsum("iab,jcd->ijacbd", _S4, _L9).reshape(4, 9, 6, 6)
_PRODUCT_BASIS.flags.writeable = False


@dataclass(frozen=True)
class FanoDecomposition:
    """``rho = (I + r.sigma (x) I + I (x) R.lambda + T_ij sigma_i (x) lambda_j) / 6``.

    ``r`` is the qubit Bloch vector, ``R`` the (scaled) qutrit coherence
    vector and ``T`` the 3x8 correlation matrix. Nothing here guarantees
    positivity; check ``is_physical(reconstruct(f))``.
    """

    r: np.ndarray
    R: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        for name, shape in (("r", (3,)), ("R", (8,)), ("T", (3, 8))):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def zero(cls):
        return cls(np.zeros(3), np.zeros(8), np.zeros((3, 8)))


def as_density_matrix(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (6, 6):
        raise ValueError(f"qubit-qutrit state must be 6x6, got {rho.shape}")
    return rho


def hermiticity_error(rho):
    return float(np.abs(rho - rho.conj().T).max())


def _product_traces(rhos):
    """``tr(rho sigma_mu (x) lambda_nu)`` for a stack, shape (n, 4, 9).

    The qubit index is contracted first so that cancellations such as those
    of the fully mixed state come out exactly zero.
    """
    r4 = rhos.reshape(-1, 2, 3, 2, 3)
    X = np.einsum("iba,naxby->nixy", _S4, r4)
    # Hermiticity makes every trace real
    return np.einsum("jyx,nixy->nij", _L9, X).real


def decompose(rho, tol=HERMITIAN_TOL):
    """Fano coefficients from traces against the product basis."""
    rho = as_density_matrix(rho)
    if hermiticity_error(rho) > tol:
        raise ValueError("density matrix is not Hermitian")
    c = _product_traces(rho[None])[0]
    return FanoDecomposition(r=c[1:, 0], R=1.5 * c[0, 1:], T=1.5 * c[1:, 1:])


def decompose_batch(rhos):
    """Vectorised ``decompose`` returning ``(r, R, T)`` stacks."""
    c = _product_traces(np.asarray(rhos, dtype=complex))
    return c[:, 1:, 0], 1.5 * c[:, 0, 1:], 1.5 * c[:, 1:, 1:]


def reconstruct(f):
    coeffs = np.zeros((4, 9))
    coeffs[0, 0] = 1.0
    coeffs[1:, 0] = f.r
    coeffs[0, 1:] = f.R
    coeffs[1:, 1:] = f.T
    return np.einsum("ij,ijab->ab", coeffs, _PRODUCT_BASIS) / 6.0


@dataclass(frozen=True)
class PhysicalityReport:
    physical: bool
    min_eigenvalue: float
    trace_error: float
    hermiticity_error: float

    def __bool__(self):
        return self.physical

    def describe(self):
        return (
            f"min eigenvalue {self.min_eigenvalue:.3e}, trace error {self.trace_error:.3e}, "
            f"hermiticity error {self.hermiticity_error:.3e}"
        )


def is_physical(rho, tol=EIGEN_TOL):
    if tol <= 0:
        raise ValueError("tol must be positive")
    rho = as_density_matrix(rho)
    herm = hermiticity_error(rho)
    tr_err = abs(np.trace(rho) - 1.0)
    min_ev = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    ok = herm <= tol and tr_err <= tol and min_ev >= -tol
    return PhysicalityReport(bool(ok), min_ev, float(tr_err), herm)


def purity(rho):
    rho = as_density_matrix(rho)
    return float(np.einsum("ab,ba->", rho, rho).real)


def partial_transpose(rho):
    """Transpose on the qubit factor."""
    return as_density_matrix(rho).reshape(2, 3, 2, 3).transpose(2, 1, 0, 3).reshape(6, 6)


def negativity(rho):
    """Trace norm of the partial transpose minus one."""
    ev = np.linalg.eigvalsh(partial_transpose(rho))
    return float(max(np.abs(ev).sum() - 1.0, 0.0))


def random_state(rng, rank=6):
    """``A A^dag / tr`` for a complex Gaussian 6 x rank matrix ``A``."""
    A = rng.normal(size=(6, rank)) + 1j * rng.normal(size=(6, rank))
    rho = A @ A.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def pure_state(psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


# ---------------------------------------------------------------- families

_TWO_PI = 2 * math.pi


def _check_angle(name, value):
    if not 0.0 <= value <= _TWO_PI + 1e-12:
        raise ValueError(f"{name} must lie in [0, 2pi], got {value}")


@dataclass(frozen=True)
class Example1:
    x: float
    y: float

    def __post_init__(self):
        if not (0 <= self.x <= 1 and 0 <= self.y <= 1 and self.x + self.y <= 1 + 1e-12):
            raise ValueError(f"Example1 needs x, y in [0, 1] with x + y <= 1, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Example2:
    theta: float
    gamma: float

    def __post_init__(self):
        _check_angle("theta", self.theta)
        _check_angle("gamma", self.gamma)


@dataclass(frozen=True)
class TGX:
    p1: float
    theta1: float
    theta2: float

    def __post_init__(self):
        if not 0 <= self.p1 <= 1:
            raise ValueError(f"p1 must lie in [0, 1], got {self.p1}")
        _check_angle("theta1", self.theta1)
        _check_angle("theta2", self.theta2)

    @property
    def p2(self):
        return 1.0 - self.p1


FAMILIES = {"example1": Example1, "example2": Example2, "tgx": TGX}


@singledispatch
def make_state(params):
    raise TypeError(f"unknown state family {type(params).__name__}")


@make_state.register
def _(params: Example1):
    x, y = params.x, params.y
    w = 1 - x - y
    rho = np.zeros((6, 6))
    rho[np.ix_([0, 4], [0, 4])] = x
    rho[np.ix_([1, 5], [1, 5])] = y
    rho[np.ix_([2, 3], [2, 3])] = w
    return 0.5 * rho.astype(complex)


def example2_rotation(theta):
    """``I + i S2 sin(theta) - 2 S2^2 sin^2(theta/2)`` on the qutrit."""
    S2 = SPIN1[1]
    return np.eye(3) + 1j * S2 * math.sin(theta) - 2 * (S2 @ S2) * math.sin(theta / 2) ** 2


@make_state.register
def _(params: Example2):
    f = np.zeros(6, dtype=complex)
    f[2] = math.sin(params.gamma)  # |0, m=-1>
    f[3] = math.cos(params.gamma)  # |1, m=+1>
    f_rot = np.kron(np.eye(2), example2_rotation(params.theta)) @ f
    return 0.5 * (np.outer(f, f.conj()) + np.outer(f_rot, f_rot.conj()))


@make_state.register
def _(params: TGX):
    p1, p2 = params.p1, params.p2
    t1, t2 = params.theta1, params.theta2
    rho = np.zeros((6, 6))
    rho[0, 0] = 2 * p1 * math.cos(t1) ** 2
    rho[5, 5] = 2 * p1 * math.sin(t1) ** 2
    rho[0, 5] = rho[5, 0] = p1 * math.sin(2 * t1)
    rho[1, 1] = 2 * p2 * math.cos(t2) ** 2
    rho[3, 3] = 2 * p2 * math.sin(t2) ** 2
    rho[1, 3] = rho[3, 1] = p2 * math.sin(2 * t2)
    return 0.5 * rho.astype(complex)


def family_params(family, values):
    """Build a family parameter object from a name and a field mapping."""
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    return cls(**values)


# ------------------------------------------------------------- state JSON


def state_to_json(rho):
    rho = as_density_matrix(rho)
    return {"dims": [2, 3], "re": rho.real.tolist(), "im": rho.imag.tolist()}


def state_from_json(obj):
    if obj.get("dims", [2, 3]) != [2, 3]:
        raise ValueError(f"only dims [2, 3] are supported, got {obj.get('dims')}")
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    return as_density_matrix(re + 1j * im)


def load_state(path):
    with open(path) as fh:
        return state_from_json(json.load(fh))


def save_state(path, rho):
    with open(path, "w") as fh:
        json.dump(state_to_json(rho), fh)
