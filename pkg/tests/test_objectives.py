import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csgd.exceptions import ContractViolation, DimensionError, OracleError
from csgd.objectives import LeastSquaresObjective, RegularizedLSObjective, assumption_audit, fd_wirtinger_gradient

from conftest import random_complex


def _hpsd(gen, n):
    X = random_complex(gen, n, n)
    return X @ X.conj().T


def _fd_real(f, z, h=1e-6):
    """Independent finite-difference oracle on the real and imaginary parts."""
    g = np.zeros(len(z), dtype=complex)
    for i in range(len(z)):
        e = np.zeros(len(z), dtype=complex)
        e[i] = h
        dx = (f(z + e) - f(z - e)) / (2 * h)
        dy = (f(z + 1j * e) - f(z - 1j * e)) / (2 * h)
        g[i] = dx + 1j * dy
    return g


def test_component_gradient_examples():
    obj = LeastSquaresObjective([[1.0]], [0.0], scale=1.0)
    assert obj.grad_component(0, [3 + 4j])[0] == pytest.approx(3 + 4j)
    obj = LeastSquaresObjective([[1, 1j]], [0.0], scale=2.0)
    np.testing.assert_allclose(obj.grad_component(0, [1, 1]), [2 + 2j, 2 - 2j])
    A = np.array([[1, 2j], [3, -1]])
    z = np.array([1j, 2.0])
    obj = LeastSquaresObjective(A, A @ z)
    np.testing.assert_allclose(obj.grad_component(1, z), 0)


def test_component_index_range():
    obj = LeastSquaresObjective(np.eye(2), np.zeros(2))
    with pytest.raises((IndexError, ContractViolation)):
        obj.grad_component(2, np.zeros(2))


def test_full_gradient_examples(npgen):
    obj = LeastSquaresObjective(np.eye(2), np.zeros(2))
    np.testing.assert_allclose(obj.grad_full([1j, 1]), [1j, 1])
    A, b = random_complex(npgen, 5, 3), random_complex(npgen, 5)
    obj = LeastSquaresObjective(A, b)
    z_star = np.linalg.lstsq(A, b, rcond=None)[0]
    assert np.linalg.norm(obj.grad_full(z_star)) <= 1e-10 * np.linalg.norm(A.conj().T @ b)
    z = random_complex(npgen, 3)
    np.testing.assert_allclose(obj.grad_full(z), A.conj().T @ (A @ z - b), rtol=1e-12)
    assert obj.eval_full(z) == pytest.approx(0.5 * np.linalg.norm(A @ z - b) ** 2, rel=1e-12)
    with pytest.raises(DimensionError):
        obj.grad_full(np.zeros(2))


def test_unbiasedness(npgen):
    A, b = random_complex(npgen, 5, 3), random_complex(npgen, 5)
    for weights in (None, [0.1, 0.2, 0.3, 0.25, 0.15]):
        obj = LeastSquaresObjective(A, b, sampling_weights=weights)
        p = obj.sampling_weights
        z = random_complex(npgen, 3)
        g = sum(p[j] * obj.grad_component(j, z) for j in range(5))
        f = sum(p[j] * obj.eval_component(j, z) for j in range(5))
        assert np.linalg.norm(g - obj.grad_full(z)) <= 1e-12 * np.linalg.norm(g)
        assert f == pytest.approx(obj.eval_full(z), rel=1e-12)


def test_regularized_objective_canonical_form(npgen):
    W = _hpsd(npgen, 4)
    b, z = random_complex(npgen, 4), random_complex(npgen, 4)
    lam = 0.3
    obj = RegularizedLSObjective(W, b, lam)
    expected = np.linalg.norm(b - W @ z) ** 2 + lam * np.vdot(z, W @ z).real
    assert obj.eval_full(z) == pytest.approx(expected, rel=1e-12)
    np.testing.assert_allclose(obj.grad_full(z), 2 * W @ ((W + lam * np.eye(4)) @ z - b), rtol=1e-12)
    alpha = np.linalg.solve(W + lam * np.eye(4), b)
    assert np.linalg.norm(obj.grad_full(alpha)) <= 1e-9 * np.linalg.norm(W) * np.linalg.norm(b)
    half = RegularizedLSObjective(W, b, lam, half=True)
    alpha_half = np.linalg.solve(W + 2 * lam * np.eye(4), b)
    assert np.linalg.norm(half.grad_full(alpha_half)) <= 1e-9 * np.linalg.norm(W) * np.linalg.norm(b)


def test_fd_oracle_examples():
    g = fd_wirtinger_gradient(lambda z: 0.5 * abs(z[0]) ** 2, np.array([1 + 2j]), h=1e-6)
    assert abs(g[0] - (1 + 2j)) <= 1e-8
    g = fd_wirtinger_gradient(lambda z: z[0].real, np.array([0.3 - 0.7j]))
    assert g[0] == pytest.approx(1.0)
    with pytest.raises(OracleError):
        fd_wirtinger_gradient(lambda z: np.inf, np.array([0j]))


def test_fd_oracle_matches_independent_differences(npgen):
    A, b = random_complex(npgen, 4, 3), random_complex(npgen, 4)
    obj = LeastSquaresObjective(A, b)
    z = random_complex(npgen, 3)
    np.testing.assert_allclose(fd_wirtinger_gradient(obj.eval_full, z), _fd_real(obj.eval_full, z), rtol=1e-6)


def test_component_gradient_matches_fd_both_ways(npgen):
    A, b = random_complex(npgen, 6, 3), random_complex(npgen, 6)
    obj = LeastSquaresObjective(A, b, scale=2.5)
    for j in range(6):
        z = random_complex(npgen, 3)
        g = obj.grad_component(j, z)
        fd = fd_wirtinger_gradient(lambda x: obj.eval_component(j, x), z)
        assert np.linalg.norm(g - fd) <= 1e-6 * np.linalg.norm(g)


@pytest.mark.parametrize("kind", ["ls", "reg"])
def test_gradients_at_100_points(npgen, kind):
    worst = 0.0
    for _ in range(100):
        if kind == "ls":
            obj = LeastSquaresObjective(random_complex(npgen, 5, 3), random_complex(npgen, 5))
        else:
            obj = RegularizedLSObjective(_hpsd(npgen, 3), random_complex(npgen, 3), lam=0.5)
        z = random_complex(npgen, 3)
        g = obj.grad_full(z)
        worst = max(worst, np.linalg.norm(g - fd_wirtinger_gradient(obj.eval_full, z)) / np.linalg.norm(g))
    assert worst <= 1e-6


def test_batched_components_match_single(npgen):
    A, b = random_complex(npgen, 5, 3), random_complex(npgen, 5)
    for obj in (LeastSquaresObjective(A, b), RegularizedLSObjective(_hpsd(npgen, 3), b[:3], 0.2)):
        Z = random_complex(npgen, 4, 3)
        idx = np.array([0, 2, 1, 0])
        G = obj.grad_components(idx, Z)
        for k in range(4):
            np.testing.assert_allclose(G[k], obj.grad_component(idx[k], Z[k]), rtol=1e-13, atol=1e-13)


def test_gradient_variance_definition(npgen):
    A, b = random_complex(npgen, 5, 3), random_complex(npgen, 5)
    obj = LeastSquaresObjective(A, b)
    z = random_complex(npgen, 3)
    g = obj.grad_full(z)
    expected = np.mean([np.linalg.norm(obj.grad_component(j, z) - g) ** 2 for j in range(5)])
    assert obj.gradient_variance(z) == pytest.approx(expected, rel=1e-12)
    assert np.isfinite(obj.gradient_variance(obj.minimizer()))


def test_audit_isometry():
    rep = assumption_audit(LeastSquaresObjective(np.eye(3), np.ones(3)), sample_count=100, seed=4)
    assert rep.passed
    assert rep.L == pytest.approx(1.0) and rep.mu == pytest.approx(1.0)


def test_audit_random_full_rank(npgen):
    A, b = random_complex(npgen, 10, 4), random_complex(npgen, 10)
    rep = assumption_audit(LeastSquaresObjective(A, b), sample_count=1000, seed=0)
    s = np.linalg.svd(A, compute_uv=False)
    assert rep.L == pytest.approx(s[0] ** 2, rel=1e-10)
    assert rep.mu == pytest.approx(s[-1] ** 2, rel=1e-10)
    assert rep.passed, str(rep)
    # components are rank-one: convex but not strongly convex
    assert rep.checks["A6"].passed


def test_audit_detects_wrong_constant(npgen):
    A, b = random_complex(npgen, 10, 4), random_complex(npgen, 10)
    obj = LeastSquaresObjective(A, b)
    rep = assumption_audit(obj, sample_count=200, seed=0)
    # replaying the strong convexity check with mu = 2 * sigma_max^2 must fail
    z, w = random_complex(npgen, 4), random_complex(npgen, 4)
    d = w - z
    slack = obj.eval_full(w) - obj.eval_full(z) - np.vdot(d, obj.grad_full(z)).real - rep.L * np.linalg.norm(d) ** 2
    assert slack < 0


def test_audit_rejects_bad_input():
    with pytest.raises(ContractViolation):
        assumption_audit(LeastSquaresObjective(np.eye(2), np.ones(2)), sample_count=0)


@given(st.floats(0.1, 10.0), st.integers(0, 2**32))
@settings(max_examples=25, deadline=None)
def test_scale_parameter_scales_gradient(s, seed):
    gen = np.random.default_rng(seed)
    A, b, z = random_complex(gen, 4, 2), random_complex(gen, 4), random_complex(gen, 2)
    base = LeastSquaresObjective(A, b, scale=1.0)
    scaled = LeastSquaresObjective(A, b, scale=s)
    np.testing.assert_allclose(scaled.grad_component(1, z), s * base.grad_component(1, z), rtol=1e-12)
