"""CH experiment: measurement settings, probabilities and the CH / CHSH /
canonical-E evaluators.

Bob's effective two-outcome measurement is a projector on C^3 of rank 1
(``|n><n|``) or rank 2 (``I - |n><n|``); both are fixed by the ket ``n``.
Its coherence vector ``beta_i = sqrt(3)/2 <n|lambda_i|n>`` is the same for
both ranks.
"""
from dataclasses import dataclass

import numpy as np

from .algebra import GELLMANN, PAULI, SQRT3, STRUCTURAL_TOL, coherence_vector, in_set_S
from .states import as_density_matrix, decompose

PROB_CLAMP_TOL = 1e-10

# E = 3 sqrt(3) (I_CH + 1/2)
E_SCALE = 3 * SQRT3
LOCAL_THRESHOLD = 1.5 * SQRT3
QUANTUM_E_CEILING = 3 * SQRT3 / np.sqrt(2)
QUANTUM_ICH_CEILING = 1 / np.sqrt(2) - 0.5


def _unit(v, name, tol=STRUCTURAL_TOL):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"{name} must be a unit vector")
    return v


@dataclass(frozen=True)
class AliceSettings:
    a: np.ndarray
    a_prime: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _unit(self.a, "a"))
        object.__setattr__(self, "a_prime", _unit(self.a_prime, "a_prime"))


@dataclass(frozen=True)
class BobProjectorSpec:
    rank: int
    ket: np.ndarray

    def __post_init__(self):
        if self.rank not in (1, 2):
            raise ValueError(f"Bob projector rank must be 1 or 2, got {self.rank}")
        ket = np.asarray(self.ket, dtype=complex)
        if ket.shape != (3,):
            raise ValueError("Bob ket must have 3 components")
        if abs(np.linalg.norm(ket) - 1.0) > STRUCTURAL_TOL:
            raise ValueError("Bob ket must be normalised")
        object.__setattr__(self, "ket", ket)

    @property
    def projector(self):
        P = np.outer(self.ket, self.ket.conj())
        return P if self.rank == 1 else np.eye(3) - P

    def to_json(self):
        return {"rank": self.rank, "ket_re": self.ket.real.tolist(), "ket_im": self.ket.imag.tolist()}

    @classmethod
    def from_json(cls, obj):
        re = np.asarray(obj["ket_re"], dtype=float)
        im = np.asarray(obj.get("ket_im", np.zeros(3)), dtype=float)
        return cls(int(obj["rank"]), re + 1j * im)


@dataclass(frozen=True)
class MeasurementSettings:
    alice: AliceSettings
    bob: BobProjectorSpec
    bob_prime: BobProjectorSpec

    @classmethod
    def build(cls, a, a_prime, bob_ket, bob_prime_ket, ranks=(2, 2)):
        return cls(
            AliceSettings(a, a_prime),
            BobProjectorSpec(ranks[0], bob_ket),
            BobProjectorSpec(ranks[1], bob_prime_ket),
        )

    def to_json(self):
        return {
            "a": self.alice.a.tolist(),
            "a_prime": self.alice.a_prime.tolist(),
            "bob": self.bob.to_json(),
            "bob_prime": self.bob_prime.to_json(),
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            AliceSettings(obj["a"], obj["a_prime"]),
            BobProjectorSpec.from_json(obj["bob"]),
            BobProjectorSpec.from_json(obj["bob_prime"]),
        )


def alice_projector(a):
    a = _unit(a, "a")
    return 0.5 * (np.eye(2) + np.einsum("i,ijk->jk", a, PAULI))


def beta_of(spec):
    """Set-S vector of Bob's projector (rank-independent)."""
    return coherence_vector(spec.ket)


@dataclass(frozen=True)
class CHProbabilities:
    """Raw quantum probabilities entering the CH expression (A1 uses ``a``,
    B1 uses ``bob``)."""

    a1b1: float
    a2b1: float
    a1b2: float
    a2b2: float
    a1: float
    b1: float

    def clamped(self):
        def c(p):
            if -PROB_CLAMP_TOL <= p < 0:
                return 0.0
            if 1 < p <= 1 + PROB_CLAMP_TOL:
                return 1.0
            return p

        return CHProbabilities(*(c(p) for p in self.astuple()))

    def astuple(self):
        return (self.a1b1, self.a2b1, self.a1b2, self.a2b2, self.a1, self.b1)

    def i_ch(self):
        return self.a1b1 + self.a2b1 + self.a1b2 - self.a2b2 - self.a1 - self.b1


def _joint(rho, PA, PB):
    return float(np.einsum("ab,ba->", rho, np.kron(PA, PB)).real)


def ch_probabilities(rho, settings):
    rho = as_density_matrix(rho)
    PA1 = alice_projector(settings.alice.a)
    PA2 = alice_projector(settings.alice.a_prime)
    PB1 = settings.bob.projector
    PB2 = settings.bob_prime.projector
    return CHProbabilities(
        a1b1=_joint(rho, PA1, PB1),
        a2b1=_joint(rho, PA2, PB1),
        a1b2=_joint(rho, PA1, PB2),
        a2b2=_joint(rho, PA2, PB2),
        a1=_joint(rho, PA1, np.eye(3)),
        b1=_joint(rho, np.eye(2), PB1),
    )


def fano_joint_probability(f, a, Pi):
    """``P(AB)`` from the Fano coefficients and a qutrit projector ``Pi``."""
    lam_tr = np.einsum("jab,ba->j", GELLMANN, Pi).real
    tr_pi = np.trace(Pi).real
    return (1 + a @ f.r) * tr_pi / 6 + (f.R @ lam_tr) / 6 + (a @ f.T @ lam_tr) / 6


def ch_probabilities_from_fano(f, settings):
    """Same probabilities as ``ch_probabilities``, evaluated from ``(r, R, T)``."""
    a, ap = settings.alice.a, settings.alice.a_prime
    PB1, PB2 = settings.bob.projector, settings.bob_prime.projector
    lam_tr = np.einsum("jab,ba->j", GELLMANN, PB1).real
    return CHProbabilities(
        a1b1=fano_joint_probability(f, a, PB1),
        a2b1=fano_joint_probability(f, ap, PB1),
        a1b2=fano_joint_probability(f, a, PB2),
        a2b2=fano_joint_probability(f, ap, PB2),
        a1=0.5 * (1 + a @ f.r),
        b1=(np.trace(PB1).real + f.R @ lam_tr) / 3,
    )


def i_ch(rho, settings):
    return ch_probabilities(rho, settings).i_ch()


def correlator(rho, a, Pi):
    """``<(a.sigma) (x) (2 Pi - I)>``."""
    A = np.einsum("i,ijk->jk", _unit(a, "a"), PAULI)
    B = 2 * Pi - np.eye(3)
    return _joint(as_density_matrix(rho), A, B)


def i_chsh(rho, settings):
    a, ap = settings.alice.a, settings.alice.a_prime
    PB1, PB2 = settings.bob.projector, settings.bob_prime.projector
    return (
        correlator(rho, a, PB1)
        + correlator(rho, ap, PB1)
        + correlator(rho, a, PB2)
        - correlator(rho, ap, PB2)
    )


def _check_S(beta, name):
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (8,) or not in_set_S(beta, STRUCTURAL_TOL):
        raise ValueError(f"{name} is not in the set S (unit norm, beta * beta = beta)")
    return beta


def e_value(f, a, a_prime, beta, beta_prime):
    """``-sqrt(3)/2 a.r + (a + a')^T T beta + (a - a')^T T beta'``.

    The state is local iff this never exceeds ``LOCAL_THRESHOLD``.
    """
    a, ap = _unit(a, "a"), _unit(a_prime, "a_prime")
    beta, bp = _check_S(beta, "beta"), _check_S(beta_prime, "beta_prime")
    return float(-0.5 * SQRT3 * (a @ f.r) + (a + ap) @ f.T @ beta + (a - ap) @ f.T @ bp)


def canonical_i_ch(f, a, a_prime, beta, beta_prime):
    """The single form every rank case reduces to (no set-S check)."""
    a, ap = np.asarray(a, float), np.asarray(a_prime, float)
    return float(
        -(3 + a @ f.r) / 6
        + ((a + ap) @ f.T @ beta) / E_SCALE
        + ((a - ap) @ f.T @ beta_prime) / E_SCALE
    )


def reduce_to_canonical(settings):
    """Map settings of any rank case to canonical ``(a, a', beta, beta')``.

    ``i_ch(rho, s) == canonical_i_ch(decompose(rho), *reduce_to_canonical(s))``
    holds identically. Rank-1/rank-1 is already canonical; the other cases
    flip and/or swap Alice's vectors.
    """
    a, ap = settings.alice.a, settings.alice.a_prime
    beta, bp = beta_of(settings.bob), beta_of(settings.bob_prime)
    ranks = (settings.bob.rank, settings.bob_prime.rank)
    if ranks == (1, 1):
        return a, ap, beta, bp
    if ranks == (2, 2):
        return -a, -ap, beta, bp
    if ranks == (1, 2):
        return ap, a, beta, bp
    return -ap, -a, beta, bp


def canonical_settings(a, a_prime, ket, ket_prime):
    """Rank-2/rank-2 settings realising canonical ``(a, a', ket, ket')``.

    Their direct CH value equals ``E / (3 sqrt 3) - 1/2``.
    """
    return MeasurementSettings.build(-np.asarray(a, float), -np.asarray(a_prime, float), ket, ket_prime, (2, 2))


def i_ch_from_fano(f, settings):
    """Eq.-level CH value straight from the Fano coefficients."""
    return ch_probabilities_from_fano(f, settings).i_ch()


def settings_e_value(rho, settings):
    """E of the canonical data reached from ``settings``; equals
    ``E_SCALE * (i_ch(rho, settings) + 1/2)``."""
    f = decompose(rho)
    return e_value(f, *reduce_to_canonical(settings))
