import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qqbell import states
from qqbell.states import TGX, Example1, Example2, decompose, make_state

TWO_PI = 2 * math.pi
angle = st.floats(0, TWO_PI, allow_nan=False)
prob = st.floats(0, 1, allow_nan=False)


@given(prob, prob)
def test_example1_matrix_and_fano(x, y):
    if x + y > 1:
        x, y = 1 - x, 1 - y
    rho = make_state(Example1(x, y))
    np.testing.assert_allclose(rho, oracles.example1_matrix(x, y), atol=1e-15)
    f = decompose(rho)
    r, R, T = oracles.example1_fano(x, y)
    np.testing.assert_allclose(f.r, r, atol=1e-14)
    np.testing.assert_allclose(f.R, R, atol=1e-14)
    np.testing.assert_allclose(f.T, T, atol=1e-14)


@given(angle, angle)
def test_example2_matrix_and_fano(theta, gamma):
    rho = make_state(Example2(theta, gamma))
    np.testing.assert_allclose(rho, oracles.example2_matrix(theta, gamma), atol=1e-13)
    f = decompose(rho)
    r, R, T = oracles.example2_fano(theta, gamma)
    np.testing.assert_allclose(f.r, r, atol=1e-13)
    np.testing.assert_allclose(f.R, R, atol=1e-13)
    np.testing.assert_allclose(f.T, T, atol=1e-13)


def test_example2_printed_t38_differs_by_cos2gamma_cos2theta():
    # the printed 3-8 entry misses sqrt(3)/16 cos(2g) cos(2t); the
    # corrected one agrees with the state itself
    for theta, gamma in [(0.3, 0.2), (4 * math.pi / 3, math.pi / 12), (2.0, 1.1)]:
        t38 = decompose(make_state(Example2(theta, gamma))).T[2, 7]
        gap = t38 - oracles.example2_t38_as_printed(theta, gamma)
        assert gap == pytest.approx(math.sqrt(3) / 16 * math.cos(2 * gamma) * math.cos(2 * theta), abs=1e-14)


@given(prob, angle, angle)
def test_tgx_matrix_and_fano(p1, t1, t2):
    rho = make_state(TGX(p1, t1, t2))
    np.testing.assert_allclose(rho, oracles.tgx_matrix(p1, t1, t2), atol=1e-15)
    f = decompose(rho)
    r, R, T = oracles.tgx_fano(p1, t1, t2)
    np.testing.assert_allclose(f.r, r, atol=1e-14)
    np.testing.assert_allclose(f.R, R, atol=1e-14)
    np.testing.assert_allclose(f.T, T, atol=1e-14)


@given(prob, angle, angle)
def test_tgx_purity_and_negativity(p1, t1, t2):
    rho = make_state(TGX(p1, t1, t2))
    assert states.purity(rho) == pytest.approx(p1**2 + (1 - p1) ** 2, abs=1e-12)
    assert states.negativity(rho) == pytest.approx(oracles.tgx_negativity(p1, t1, t2), abs=1e-9)


def test_negativity_convention_on_embedded_bell_state():
    rho = make_state(TGX(1.0, math.pi / 4, 0.0))
    ev = np.linalg.eigvalsh(states.partial_transpose(rho))
    assert ev.min() == pytest.approx(-0.5)
    assert states.negativity(rho) == pytest.approx(1.0)
    assert states.negativity(np.eye(6) / 6) == 0.0


def test_fano_matches_kronecker_reference(rng):
    for _ in range(50):
        rho = states.random_state(rng)
        f = decompose(rho)
        r, R, T = oracles.fano_reference(rho)
        np.testing.assert_allclose(f.r, r, atol=1e-14)
        np.testing.assert_allclose(f.R, R, atol=1e-14)
        np.testing.assert_allclose(f.T, T, atol=1e-14)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_roundtrip(seed, rank):
    rho = states.random_state(np.random.default_rng(seed), rank=rank)
    np.testing.assert_allclose(states.reconstruct(decompose(rho)), rho, atol=1e-12)
    assert states.is_physical(rho)


def test_decompose_batch_matches_single(rng):
    rhos = np.array([states.random_state(rng) for _ in range(10)])
    r, R, T = states.decompose_batch(rhos)
    for k, rho in enumerate(rhos):
        f = decompose(rho)
        np.testing.assert_array_equal(r[k], f.r)
        np.testing.assert_array_equal(R[k], f.R)
        np.testing.assert_array_equal(T[k], f.T)


def test_fully_mixed_state_is_exactly_zero():
    f = decompose(np.eye(6) / 6)
    assert not f.r.any() and not f.R.any() and not f.T.any()


def test_fano_decomposition_validation():
    with pytest.raises(ValueError):
        states.FanoDecomposition(np.zeros(2), np.zeros(8), np.zeros((3, 8)))
    f = states.FanoDecomposition.zero()
    with pytest.raises(ValueError):
        f.r[0] = 1.0
    np.testing.assert_allclose(states.reconstruct(f), np.eye(6) / 6)


def test_decompose_rejects_bad_input():
    with pytest.raises(ValueError):
        decompose(np.ones((2, 2)))
    bad = np.eye(6, dtype=complex) / 6
    bad[0, 1] = 0.1j
    with pytest.raises(ValueError):
        decompose(bad)


def test_is_physical_reports():
    assert states.is_physical(np.eye(6) / 6)
    rep = states.is_physical(np.diag([1.2, -0.2, 0, 0, 0, 0]))
    assert not rep and rep.min_eigenvalue == pytest.approx(-0.2)
    assert not states.is_physical(np.eye(6) / 5)
    assert "min eigenvalue" in rep.describe()


def test_family_validation():
    with pytest.raises(ValueError):
        Example1(0.7, 0.7)
    with pytest.raises(ValueError):
        Example1(-0.1, 0.2)
    with pytest.raises(ValueError):
        Example2(7.0, 0.0)
    with pytest.raises(ValueError):
        TGX(1.5, 0.0, 0.0)
    assert TGX(0.25, 0, 0).p2 == 0.75
    with pytest.raises(ValueError):
        states.family_params("nope", {})


def test_family_states_are_physical():
    grid = np.linspace(0, TWO_PI, 7)
    for t in grid:
        for g in grid:
            assert states.is_physical(make_state(Example2(t, g)))
            assert states.is_physical(make_state(TGX(0.3, t, g)))


def test_json_roundtrip(tmp_path, rng):
    rho = states.random_state(rng)
    path = tmp_path / "s.json"
    states.save_state(path, rho)
    obj = json.loads(path.read_text())
    assert obj["dims"] == [2, 3]
    np.testing.assert_array_equal(states.load_state(path), rho)


def test_json_rejects_other_dims():
    with pytest.raises(ValueError):
        states.state_from_json({"dims": [3, 3], "re": np.eye(9).tolist()})
    with pytest.raises(ValueError):
        states.state_from_json({"re": np.eye(4).tolist()})
