import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qqbell import bounds, states
from qqbell.algebra import coherence_vector
from qqbell.bell import LOCAL_THRESHOLD, e_value

finite = st.floats(-3, 3, allow_nan=False)
mat38 = st.lists(finite, min_size=24, max_size=24).map(lambda v: np.array(v).reshape(3, 8))
vec = lambda n: st.lists(finite, min_size=n, max_size=n).map(np.array)


@given(mat38)
def test_singular_values_match_cubic_oracle(T):
    spec = bounds.singular_spectrum(T)
    # the trigonometric cubic loses about sqrt(eps) near a double root, so
    # compare squared values at that accuracy; svd pins the rest
    ref = oracles.symmetric_eigs_cubic(T @ T.T)
    np.testing.assert_allclose(spec.values**2, ref, atol=1e-7 * (1 + abs(ref).max()))
    np.testing.assert_allclose(spec.values, np.linalg.svd(T, compute_uv=False), atol=1e-10)


@given(mat38)
def test_singular_vectors(T):
    spec = bounds.singular_spectrum(T)
    np.testing.assert_allclose(spec.left.T @ spec.left, np.eye(3), atol=1e-10)
    np.testing.assert_allclose(spec.right.T @ spec.right, np.eye(3), atol=1e-10)
    np.testing.assert_allclose(T @ spec.right, spec.left * spec.values, atol=1e-9)


def test_rank_deficient_and_zero():
    spec = bounds.singular_spectrum(np.zeros((3, 8)))
    assert spec.values.tolist() == [0.0, 0.0, 0.0]
    np.testing.assert_allclose(spec.right.T @ spec.right, np.eye(3), atol=1e-12)
    T = np.zeros((3, 8))
    T[0, 4] = 2.0
    spec = bounds.singular_spectrum(T)
    assert (spec.mu1, spec.mu2, spec.mu3) == (2.0, 0.0, 0.0)
    np.testing.assert_allclose(spec.right.T @ spec.right, np.eye(3), atol=1e-12)


def test_tall_matrix_goes_through_transpose(rng):
    A = rng.normal(size=(8, 3))
    spec = bounds.singular_spectrum(A)
    np.testing.assert_allclose(spec.values, np.linalg.svd(A, compute_uv=False), atol=1e-12)
    np.testing.assert_allclose(A @ spec.right, spec.left * spec.values, atol=1e-10)


def test_batch_matches_single(rng):
    Ts = rng.normal(size=(50, 3, 8))
    batch = bounds.singular_values_batch(Ts)
    for T, mu in zip(Ts, batch):
        np.testing.assert_allclose(mu, bounds.singular_spectrum(T).values, atol=1e-12)


@given(mat38, vec(3), vec(3), vec(8), vec(8))
def test_lemma1_inequality(T, x, z, y, u):
    if np.linalg.norm(y) < 1e-6:
        y = np.eye(8)[0]
    u = u - (u @ y) / (y @ y) * y
    assert bounds.lemma1_check(T, x, z, y, u).holds


def test_lemma1_equality_cases(rng):
    for _ in range(100):
        T = rng.normal(size=(3, 8))
        spec = bounds.singular_spectrum(T)
        nx, nz, ny, nu = rng.uniform(0.1, 2, size=4)
        chk = bounds.lemma1_check(
            T, nx * spec.left[:, 0], nz * spec.left[:, 1], ny * spec.right[:, 0], nu * spec.right[:, 1]
        )
        assert chk.lhs == pytest.approx(chk.rhs, abs=1e-9)


def test_lemma1_requires_orthogonality():
    with pytest.raises(ValueError):
        bounds.lemma1_check(np.eye(3, 8), np.ones(3), np.ones(3), np.eye(8)[0], np.eye(8)[0])


def test_closed_form_alice_maximum_against_brute_force(rng):
    for _ in range(5):
        r = rng.normal(size=3) * rng.uniform(0, 1)
        mu1, mu2 = np.sort(rng.uniform(0, 1.5, size=2))[::-1]
        best = bounds.appendix_c_max(r, mu1, mu2)
        brute = oracles.brute_force_alice_max(r, mu1, mu2, rng, samples=100_000)
        assert best.value == pytest.approx(brute, abs=1e-6)
        assert bounds.bound_objective(best.a, best.a_prime, r, mu1, mu2) == pytest.approx(best.value, abs=1e-12)
        assert np.linalg.norm(best.a) == pytest.approx(1.0)
        assert np.linalg.norm(best.a_prime) == pytest.approx(1.0)


def test_closed_form_degenerate_inputs():
    assert bounds.appendix_c_max(np.zeros(3), 0.0, 0.0).value == 0.0
    assert bounds.appendix_c_max(np.array([0, 0, 1.0]), 1.0, 1.0).value == pytest.approx(
        math.sqrt(3) / 2 + 2 * math.sqrt(2)
    )
    with pytest.raises(ValueError):
        bounds.appendix_c_max(np.zeros(3), 0.5, 1.0)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_bound_dominates_every_setting(seed):
    rng = np.random.default_rng(seed)
    f = states.decompose(states.random_state(rng, rank=int(rng.integers(1, 7))))
    bound = bounds.theorem2_bound(f)
    for _ in range(20):
        a, ap = (v / np.linalg.norm(v) for v in rng.normal(size=(2, 3)))
        b1, b2 = (coherence_vector(k) for k in rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)))
        assert e_value(f, a, ap, b1, b2) <= bound + 1e-12


def test_certificate_threshold_edges():
    assert bounds.certify_bound(LOCAL_THRESHOLD).certified_local
    assert bounds.certify_bound(LOCAL_THRESHOLD + 5e-13).certified_local
    assert not bounds.certify_bound(LOCAL_THRESHOLD + 1e-11).certified_local
    v = bounds.certify_bound(2.0)
    assert v.margin == pytest.approx(LOCAL_THRESHOLD - 2.0)
    assert set(v.to_json()) == {"bound", "threshold", "certified_local", "margin"}


def test_example_points():
    f = states.decompose(states.make_state(states.Example1(1 / 3, 1 / 3)))
    assert bounds.theorem2_bound(f) == pytest.approx(math.sqrt(6), abs=1e-12)
    assert bounds.theorem3_certify(f).certified_local
    f = states.decompose(states.make_state(states.Example1(1.0, 0.0)))
    assert bounds.theorem2_bound(f) == pytest.approx(3 * math.sqrt(2), abs=1e-12)
    assert not bounds.theorem3_certify(f).certified_local
