"""Invariant batteries run by ``qqbell selftest``.

Each suite is a sequence of named checks. A check draws its random inputs
from a generator seeded by ``(seed, suite, check)``, so the report is a pure
function of the seed. The first failing instance is kept as a JSON
counterexample.
"""
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import algebra, bell, bounds, states
from .algebra import GELLMANN

FAULTS = ("f-constant", "d-constant")

ALGEBRA_TOL = 1e-12
ADJOINT_TOL = 1e-10
ROUNDTRIP_TOL = 1e-12
CH_TOL = 1e-12


class CheckFailed(Exception):
    def __init__(self, check, detail):
        super().__init__(check)
        self.check = check
        self.detail = detail


@dataclass
class SuiteReport:
    name: str
    checks: list = field(default_factory=list)  # (check name, instances, max error)
    seconds: float = 0.0
    failure: dict = None

    @property
    def passed(self):
        return self.failure is None


def _jsonable(x):
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return {"re": x.real.tolist(), "im": x.imag.tolist()}
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


class _Context:
    def __init__(self, seed, fault=None):
        if fault is not None and fault not in FAULTS:
            raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")
        self.seed = seed
        f, d = structure_constants_copy()
        if fault == "f-constant":
            f[0, 1, 2] *= -1.0
            f[1, 0, 2] *= -1.0
        elif fault == "d-constant":
            d[0, 0, 7] *= 2.0
        self.f, self.d = f, d

    def rng(self, suite, check):
        key = [self.seed, *(ord(c) for c in f"{suite}/{check}")]
        return np.random.default_rng(np.random.SeedSequence(key))


def structure_constants_copy():
    f, d = algebra.structure_constants()
    return f.copy(), d.copy()


def _run_check(report, name, n, fn):
    """Run ``fn(i)`` for ``i < n``; ``fn`` returns ``(error, tol, detail)``."""
    worst = 0.0
    for i in range(n):
        err, tol, detail = fn(i)
        if not err <= tol:
            raise CheckFailed(name, {"instance": i, "error": err, "tolerance": tol, **detail})
        worst = max(worst, err)
    report.checks.append((name, n, worst))


# --------------------------------------------------------------- algebra


def _algebra(ctx, report):
    f, d = ctx.f, ctx.d
    L = GELLMANN
    I3 = np.eye(3)

    def orth(k):
        i, j = divmod(k, 8)
        err = abs(np.trace(L[i] @ L[j]) - 2.0 * (i == j))
        return err, ALGEBRA_TOL, {"i": i + 1, "j": j + 1}

    def comm(k):
        i, j = divmod(k, 8)
        lhs = L[i] @ L[j] - L[j] @ L[i]
        rhs = 2j * np.einsum("k,kab->ab", f[i, j], L)
        return float(np.abs(lhs - rhs).max()), ALGEBRA_TOL, {"i": i + 1, "j": j + 1}

    def anticomm(k):
        i, j = divmod(k, 8)
        lhs = L[i] @ L[j] + L[j] @ L[i]
        rhs = (4.0 / 3.0) * (i == j) * I3 + 2 * np.einsum("k,kab->ab", d[i, j], L)
        return float(np.abs(lhs - rhs).max()), ALGEBRA_TOL, {"i": i + 1, "j": j + 1}

    def product(k):
        i, j = divmod(k, 8)
        rhs = (2.0 / 3.0) * (i == j) * I3 + np.einsum("k,kab->ab", d[i, j] + 1j * f[i, j], L)
        return float(np.abs(L[i] @ L[j] - rhs).max()), ALGEBRA_TOL, {"i": i + 1, "j": j + 1}

    _run_check(report, "trace orthogonality tr(l_i l_j) = 2 delta_ij", 64, orth)
    _run_check(report, "commutator identity [l_i, l_j] = 2i f_ijk l_k", 64, comm)
    _run_check(report, "anticommutator identity {l_i, l_j} = 4/3 delta_ij + 2 d_ijk l_k", 64, anticomm)
    _run_check(report, "product expansion l_i l_j", 64, product)

    rng = ctx.rng("algebra", "adjoint")
    Us = [(algebra.random_su3(rng), algebra.random_su3(rng)) for _ in range(100)]
    vecs = rng.normal(size=(100, 2, 8))

    def orthogonal(k):
        g = algebra.adjoint_rep(Us[k][0])
        err = max(np.abs(g @ g.T - np.eye(8)).max(), abs(np.linalg.det(g) - 1.0))
        return float(err), ADJOINT_TOL, {"U": Us[k][0]}

    def homomorphism(k):
        U1, U2 = Us[k]
        err = np.abs(algebra.adjoint_rep(U1 @ U2) - algebra.adjoint_rep(U1) @ algebra.adjoint_rep(U2)).max()
        return float(err), ADJOINT_TOL, {"U1": U1, "U2": U2}

    def equivariance(k):
        g = algebra.adjoint_rep(Us[k][0])
        x, y = vecs[k]
        e1 = np.abs(algebra.wedge(g @ x, g @ y, f) - g @ algebra.wedge(x, y, f)).max()
        e2 = np.abs(algebra.star(g @ x, g @ y, d) - g @ algebra.star(x, y, d)).max()
        scale = 1.0 + np.linalg.norm(x) * np.linalg.norm(y)
        return float(max(e1, e2) / scale), ADJOINT_TOL, {"U": Us[k][0], "x": x, "y": y}

    _run_check(report, "adjoint representation is orthogonal with det 1", 100, orthogonal)
    _run_check(report, "adjoint representation is a homomorphism", 100, homomorphism)
    _run_check(report, "wedge and star products are equivariant", 100, equivariance)

    rng = ctx.rng("algebra", "set-S")
    bs = rng.normal(size=(1000, 3))
    kets = rng.normal(size=(1000, 3)) + 1j * rng.normal(size=(1000, 3))

    def s_tilde(k):
        b = bs[k] / np.linalg.norm(bs[k])
        beta = algebra.beta_tilde(b)
        err = max(abs(beta @ beta - 1), np.linalg.norm(algebra.star(beta, beta, d) - beta))
        return float(err), 1e-9, {"b": b}

    def s_ket(k):
        beta = algebra.coherence_vector(kets[k])
        err = max(abs(beta @ beta - 1), np.linalg.norm(algebra.star(beta, beta, d) - beta))
        return float(err), 1e-9, {"ket": kets[k]}

    _run_check(report, "spin-1 projector data lies in S", 1000, s_tilde)
    _run_check(report, "qutrit ket coherence vectors lie in S", 1000, s_ket)


# ---------------------------------------------------------------- states


def _states(ctx, report):
    rng = ctx.rng("states", "roundtrip")
    rhos = [states.random_state(rng, rank=int(rng.integers(1, 7))) for _ in range(1000)]

    def roundtrip(k):
        err = np.abs(states.reconstruct(states.decompose(rhos[k])) - rhos[k]).max()
        return float(err), ROUNDTRIP_TOL, {"rho": rhos[k]}

    _run_check(report, "reconstruct(decompose(rho)) = rho", 1000, roundtrip)

    grid = np.linspace(0, 2 * np.pi, 9)
    params = [states.Example1(x, y) for x in np.linspace(0, 1, 9) for y in np.linspace(0, 1, 9) if x + y <= 1]
    params += [states.Example2(t, g) for t in grid for g in grid]
    params += [states.TGX(p, t1, t2) for p in np.linspace(0, 1, 5) for t1 in grid for t2 in grid]

    def family(k):
        rep = states.is_physical(states.make_state(params[k]))
        err = max(-rep.min_eigenvalue, rep.trace_error, rep.hermiticity_error, 0.0)
        return float(err), 1e-9, {"params": repr(params[k])}

    _run_check(report, "example families are physical states", len(params), family)

    tgx = [states.TGX(p, t1, t2) for p in np.linspace(0, 1, 5) for t1 in grid for t2 in grid]

    def tgx_purity(k):
        p = tgx[k]
        err = abs(states.purity(states.make_state(p)) - (p.p1**2 + p.p2**2))
        return float(err), 1e-12, {"params": repr(p)}

    _run_check(report, "TGX purity equals p1^2 + p2^2", len(tgx), tgx_purity)


# ------------------------------------------------------------------ bell


def _random_settings(rng, ranks):
    a, ap = (v / np.linalg.norm(v) for v in rng.normal(size=(2, 3)))
    k1, k2 = (k / np.linalg.norm(k) for k in rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)))
    return bell.MeasurementSettings.build(a, ap, k1, k2, ranks)


def _bell(ctx, report):
    rng = ctx.rng("bell", "ch-chsh")
    rank_cases = [(1, 1), (1, 2), (2, 1), (2, 2)]
    cases = [(states.random_state(rng), _random_settings(rng, rank_cases[k % 4])) for k in range(1000)]

    def chsh(k):
        rho, s = cases[k]
        err = abs(bell.i_chsh(rho, s) - (4 * bell.i_ch(rho, s) + 2))
        return float(err), CH_TOL, {"rho": rho, "settings": s.to_json()}

    def canonical(k):
        rho, s = cases[k]
        err = abs(bell.settings_e_value(rho, s) - bell.E_SCALE * (bell.i_ch(rho, s) + 0.5))
        return float(err), 1e-10, {"rho": rho, "settings": s.to_json()}

    def fano(k):
        rho, s = cases[k]
        err = abs(bell.i_ch_from_fano(states.decompose(rho), s) - bell.i_ch(rho, s))
        return float(err), CH_TOL, {"rho": rho, "settings": s.to_json()}

    def probabilities(k):
        rho, s = cases[k]
        p = np.array(bell.ch_probabilities(rho, s).astuple())
        err = max(0.0, -p.min(), p.max() - 1.0)
        return float(err), bell.PROB_CLAMP_TOL, {"rho": rho, "settings": s.to_json()}

    _run_check(report, "I_CHSH = 4 I_CH + 2 in every Bob rank case", 1000, chsh)
    _run_check(report, "E = 3 sqrt(3) (I_CH + 1/2) after rank reduction", 1000, canonical)
    _run_check(report, "CH value from Fano coefficients matches the trace", 1000, fano)
    _run_check(report, "CH probabilities lie in [0, 1]", 1000, probabilities)


# ---------------------------------------------------------------- bounds


def _bounds(ctx, report):
    rng = ctx.rng("bounds", "spectrum")
    Ts = rng.normal(size=(200, 3, 8))

    def spectrum(k):
        mu = bounds.singular_spectrum(Ts[k]).values
        ref = np.sqrt(np.clip(np.linalg.eigvalsh(Ts[k] @ Ts[k].T)[::-1], 0, None))
        return float(np.abs(mu - ref).max()), 1e-10, {"T": Ts[k]}

    _run_check(report, "singular values match the symmetric eigensolver", 200, spectrum)

    rng = ctx.rng("bounds", "lemma")
    data = rng.normal(size=(10000, 4, 8))
    Tl = rng.normal(size=(10000, 3, 8))

    def lemma(k):
        x, z = data[k, 0, :3], data[k, 1, :3]
        y, u = data[k, 2], data[k, 3]
        u = u - (u @ y) / (y @ y) * y
        chk = bounds.lemma1_check(Tl[k], x, z, y, u)
        return max(0.0, chk.lhs - chk.rhs), bounds.LEMMA_TOL, {"T": Tl[k], "x": x, "z": z, "y": y, "u": u}

    _run_check(report, "x.T y + z.T u <= mu1 |x||y| + mu2 |z||u|", 10000, lemma)

    rng = ctx.rng("bounds", "alice")
    cases = []
    for _ in range(200):
        r = rng.normal(size=3) * rng.uniform(0, 1)
        mu = np.sort(rng.uniform(0, 1, size=2))[::-1]
        cases.append((r, mu[0], mu[1]))

    def closed_form(k):
        r, m1, m2 = cases[k]
        best = bounds.appendix_c_max(r, m1, m2)
        attained = bounds.bound_objective(best.a, best.a_prime, r, m1, m2)
        return abs(attained - best.value), 1e-10, {"r": r, "mu1": m1, "mu2": m2}

    _run_check(report, "closed-form Alice maximiser attains the bound", 200, closed_form)


SUITES = (("algebra", _algebra), ("states", _states), ("bell", _bell), ("bounds", _bounds))


def run_selftest(seed=0, fault=None, suites=None):
    """Run the batteries; returns the list of ``SuiteReport``. Stops at the
    first failing suite."""
    ctx = _Context(seed, fault)
    reports = []
    for name, fn in SUITES:
        if suites is not None and name not in suites:
            continue
        report = SuiteReport(name)
        t0 = time.perf_counter()
        try:
            fn(ctx, report)
        except CheckFailed as exc:
            report.failure = {"suite": name, "check": exc.check, "counterexample": _jsonable(exc.detail)}
        report.seconds = time.perf_counter() - t0
        reports.append(report)
        if not report.passed:
            break
    return reports


def format_report(reports, seed):
    """Deterministic text report (no timings)."""
    lines = [f"qqbell selftest seed={seed}"]
    for rep in reports:
        for name, n, worst in rep.checks:
            lines.append(f"  [{rep.name}] {name}: ok ({n} instances, max error {worst:.1e})")
        if rep.passed:
            lines.append(f"suite {rep.name}: PASS")
        else:
            lines.append(f"suite {rep.name}: FAIL in check '{rep.failure['check']}'")
            lines.append("counterexample: " + json.dumps(rep.failure, sort_keys=True))
    ok = all(r.passed for r in reports)
    lines.append("selftest: " + ("PASS" if ok else "FAIL"))
    return "\n".join(lines) + "\n"
