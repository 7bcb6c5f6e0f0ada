"""Singular-value bounds on E and the locality certificate built from them."""
from dataclasses import dataclass

import numpy as np

from .bell import LOCAL_THRESHOLD
from .kernels import HALF_SQRT3, jacobi_eigh

CERTIFY_TOL = 1e-12
LEMMA_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-9


@dataclass(frozen=True)
class SingularSpectrum:
    """Singular values (descending) with ``T @ right[:, i] == values[i] * left[:, i]``.

    For a 3x8 matrix ``left`` is 3x3 and ``right`` is 8x3.
    """

    values: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def mu1(self):
        return float(self.values[0])

    @property
    def mu2(self):
        return float(self.values[1]) if len(self.values) > 1 else 0.0

    @property
    def mu3(self):
        return float(self.values[2]) if len(self.values) > 2 else 0.0


def _complete_orthonormal(cols, dim):
    """Extend orthonormal columns to ``dim`` columns by Gram-Schmidt on the
    canonical basis."""
    basis = [c for c in cols.T]
    for e in np.eye(dim):
        if len(basis) == dim:
            break
        v = e - sum((b @ e) * b for b in basis)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
    return np.array(basis).T


def singular_spectrum(T, backend=None):
    """Singular values/vectors of a real matrix via Jacobi on ``T T^T``.

    Assumes ``rows <= cols`` (as for the 3x8 correlation matrix); taller
    matrices are handled through the transpose.
    """
    T = np.asarray(T, dtype=float)
    m, n = T.shape
    if m > n:
        s = singular_spectrum(T.T, backend)
        return SingularSpectrum(s.values, s.right[:, :n], s.left)
    w, W = jacobi_eigh(T @ T.T, backend=backend)
    mu = np.sqrt(np.clip(w, 0.0, None))
    right = np.zeros((n, m))
    scale = max(mu[0], 1.0)
    good = mu > 1e-12 * scale
    right[:, good] = (T.T @ W[:, good]) / mu[good]
    if not good.all():
        k = int(good.sum())
        right[:, :] = _complete_orthonormal(right[:, :k], n)[:, :m]
    return SingularSpectrum(mu, W, right)


def singular_values_batch(Ts, backend=None):
    """``(N, 3)`` descending singular values for a stack of 3x8 matrices."""
    Ts = np.asarray(Ts, dtype=float)
    w, _ = jacobi_eigh(np.einsum("nij,nkj->nik", Ts, Ts), backend=backend)
    return np.sqrt(np.clip(w, 0.0, None))


@dataclass(frozen=True)
class LemmaCheck:
    lhs: float
    rhs: float
    holds: bool


def lemma1_check(T, x, z, y, u):
    """``x^T T y + z^T T u <= mu1 |x||y| + mu2 |z||u|`` for ``y`` orthogonal to ``u``."""
    T = np.asarray(T, dtype=float)
    x, z, y, u = (np.asarray(v, dtype=float) for v in (x, z, y, u))
    if abs(y @ u) > ORTHOGONALITY_TOL * np.linalg.norm(y) * np.linalg.norm(u):
        raise ValueError("y and u must be orthogonal")
    spec = singular_spectrum(T)
    lhs = float(x @ T @ y + z @ T @ u)
    rhs = float(
        spec.mu1 * np.linalg.norm(x) * np.linalg.norm(y) + spec.mu2 * np.linalg.norm(z) * np.linalg.norm(u)
    )
    return LemmaCheck(lhs, rhs, lhs <= rhs + LEMMA_TOL)


def _orthonormal_pair(r):
    """Unit ``rhat`` along ``r`` (e3 if r = 0) and a unit vector orthogonal to it."""
    nr = np.linalg.norm(r)
    rhat = r / nr if nr > 0 else np.array([0.0, 0.0, 1.0])
    trial = np.eye(3)[int(np.argmin(np.abs(rhat)))]
    p = trial - (trial @ rhat) * rhat
    return rhat, p / np.linalg.norm(p)


@dataclass(frozen=True)
class AliceMaximum:
    value: float
    a: np.ndarray
    a_prime: np.ndarray


def bound_objective(a, a_prime, r, mu1, mu2):
    """``-sqrt(3)/2 a.r + mu1 |a + a'| + mu2 |a - a'|``."""
    a, ap = np.asarray(a, float), np.asarray(a_prime, float)
    return float(
        -HALF_SQRT3 * (a @ r) + mu1 * np.linalg.norm(a + ap) + mu2 * np.linalg.norm(a - ap)
    )


def appendix_c_max(r, mu1, mu2):
    """Closed-form maximum of ``bound_objective`` over unit ``a, a'``.

    Writing ``a + a' = 2 cos(t) c`` and ``a - a' = 2 sin(t) c'`` with
    orthonormal ``c, c'``, the optimum has ``c.rhat = -mu1/rho``,
    ``c'.rhat = -mu2/rho`` (``rho = sqrt(mu1^2 + mu2^2)``), which gives
    ``sqrt(3)/2 |r| + 2 rho``.
    """
    if mu2 < 0 or mu1 < mu2:
        raise ValueError("need mu1 >= mu2 >= 0")
    r = np.asarray(r, dtype=float)
    nr = float(np.linalg.norm(r))
    rho = float(np.hypot(mu1, mu2))
    if rho > 0:
        x, y = mu1 / rho, mu2 / rho
    else:
        x, y = 1.0, 0.0
    rhat, p = _orthonormal_pair(r)
    c = -x * rhat + y * p
    cp = -y * rhat - x * p
    A = HALF_SQRT3 * nr * x + 2 * mu1
    B = HALF_SQRT3 * nr * y + 2 * mu2
    t = np.arctan2(B, A)
    a = np.cos(t) * c + np.sin(t) * cp
    ap = np.cos(t) * c - np.sin(t) * cp
    return AliceMaximum(HALF_SQRT3 * nr + 2 * rho, a, ap)


def correlation_part(mu1, mu2):
    return 2.0 * np.hypot(mu1, mu2)


def theorem2_bound(f, spectrum=None):
    """Upper bound ``sqrt(3)/2 |r| + 2 sqrt(mu1^2 + mu2^2)`` on E."""
    spec = spectrum or singular_spectrum(f.T)
    return float(HALF_SQRT3 * np.linalg.norm(f.r) + correlation_part(spec.mu1, spec.mu2))


@dataclass(frozen=True)
class LocalityVerdict:
    bound: float
    threshold: float
    certified_local: bool

    @property
    def margin(self):
        """``threshold - bound``; positive inside the certified region."""
        return self.threshold - self.bound

    def to_json(self):
        return {
            "bound": self.bound,
            "threshold": self.threshold,
            "certified_local": self.certified_local,
            "margin": self.margin,
        }


def certify_bound(bound):
    return LocalityVerdict(float(bound), LOCAL_THRESHOLD, bool(bound <= LOCAL_THRESHOLD + CERTIFY_TOL))


def theorem3_certify(f, spectrum=None):
    return certify_bound(theorem2_bound(f, spectrum))
