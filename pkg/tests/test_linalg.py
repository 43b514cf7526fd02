import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csgd.exceptions import ContractViolation, DimensionError, SolverError
from csgd.linalg import hermitian_eig, inner, inner_real, solve_hpd, svd

from conftest import random_complex


def test_inner_examples():
    assert inner([1, 1j], [1, 1j]) == pytest.approx(2)
    assert inner([1, 0], [0, 1]) == 0
    assert inner([1 + 1j, 2], [1j, 1]) == pytest.approx(3 - 1j)


def test_inner_length_mismatch():
    with pytest.raises(DimensionError):
        inner([1, 2], [1])


finite = st.floats(-1e3, 1e3, allow_nan=False)
cvec = st.lists(st.tuples(finite, finite), min_size=1, max_size=8)


@given(cvec, st.data())
@settings(max_examples=100, deadline=None)
def test_inner_conjugate_symmetry(zs, data):
    ws = data.draw(st.lists(st.tuples(finite, finite), min_size=len(zs), max_size=len(zs)))
    z = np.array([a + 1j * b for a, b in zs])
    w = np.array([a + 1j * b for a, b in ws])
    lhs, rhs = inner(z, w), np.conj(inner(w, z))
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))
    assert inner_real(z, z) == pytest.approx(np.linalg.norm(z) ** 2, rel=1e-12)
    assert inner_real(z, z) >= 0


def test_eig_diagonal_and_two_by_two():
    lam, V = hermitian_eig(np.diag([1.0, 2.0]))
    np.testing.assert_allclose(lam, [1, 2])
    lam, _ = hermitian_eig(np.array([[2, 1j], [-1j, 2]]))
    np.testing.assert_allclose(lam, [1, 3], atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 5, 12, 51])
def test_eig_reconstruction_against_numpy(npgen, n):
    X = random_complex(npgen, n, n)
    H = X + X.conj().T
    lam, V = hermitian_eig(H)
    assert np.all(np.diff(lam) >= 0)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(H), atol=1e-10 * np.linalg.norm(H))
    assert np.linalg.norm(V @ np.diag(lam) @ V.conj().T - H) <= 1e-10 * np.linalg.norm(H)
    assert np.linalg.norm(V.conj().T @ V - np.eye(n)) <= 1e-10


def test_eig_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        hermitian_eig(np.array([[1, 2], [0, 1]], dtype=complex))


def test_svd_examples():
    res = svd(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(res.singular_values, [3, 1])
    np.testing.assert_allclose(np.abs(res.right_vectors), np.eye(2), atol=1e-14)
    res = svd(np.array([[0, 2], [0, 0]], dtype=complex))
    np.testing.assert_allclose(res.singular_values, [2, 0], atol=1e-14)
    assert np.linalg.norm(res.reconstruct() - np.array([[0, 2], [0, 0]])) <= 1e-14


@pytest.mark.parametrize("shape", [(6, 3), (3, 6), (12, 8), (5, 5), (30, 4)])
def test_svd_against_numpy(npgen, shape):
    A = random_complex(npgen, *shape)
    res = svd(A)
    assert np.all(np.diff(res.singular_values) <= 0)
    np.testing.assert_allclose(res.singular_values, np.linalg.svd(A, compute_uv=False), rtol=1e-10)
    assert np.linalg.norm(A - res.reconstruct()) <= 1e-10 * np.linalg.norm(A)
    r = min(shape)
    assert np.linalg.norm(res.U.conj().T @ res.U - np.eye(r)) <= 1e-10
    assert np.linalg.norm(res.V.conj().T @ res.V - np.eye(r)) <= 1e-10
    # A v_k = sigma_k u_k: u_k is the left vector
    np.testing.assert_allclose(A @ res.V, res.U * res.singular_values, atol=1e-10 * res.singular_values[0])


def test_svd_rank_deficient_completes_left_vectors(npgen):
    u, v = random_complex(npgen, 5, 1), random_complex(npgen, 1, 3)
    A = u @ v
    res = svd(A)
    assert res.singular_values[1] == 0 and res.singular_values[2] == 0
    assert np.linalg.norm(res.U.conj().T @ res.U - np.eye(3)) <= 1e-10
    assert np.linalg.norm(A - res.reconstruct()) <= 1e-10 * np.linalg.norm(A)


def test_svd_matches_eig_of_gram(npgen):
    for m in range(1, 13):
        n = min(m, 8)
        A = random_complex(npgen, m, n)
        s = svd(A).singular_values
        lam = hermitian_eig(A.conj().T @ A)[0][::-1]
        np.testing.assert_allclose(s, np.sqrt(np.clip(lam, 0, None)), rtol=1e-8, atol=1e-8 * s[0])


def test_solve_hpd_examples(npgen):
    y = random_complex(npgen, 4)
    np.testing.assert_allclose(solve_hpd(np.eye(4), y), y)
    np.testing.assert_allclose(solve_hpd(np.array([[2.0]]), np.array([3.0])), [1.5])


@pytest.mark.parametrize("cond", [1.0, 1e2, 1e4, 1e6])
def test_solve_hpd_residual(npgen, cond):
    Q, _ = np.linalg.qr(random_complex(npgen, 8, 8))
    H = Q @ np.diag(np.geomspace(1, cond, 8)) @ Q.conj().T
    H = 0.5 * (H + H.conj().T)
    y = random_complex(npgen, 8)
    x = solve_hpd(H, y)
    assert np.linalg.norm(H @ x - y) <= 1e-10 * np.linalg.norm(y)
    np.testing.assert_allclose(x, np.linalg.solve(H, y), rtol=1e-9 * cond)


def test_solve_hpd_indefinite_reports_eigenvalue():
    H = np.diag([1.0, -2.0]).astype(complex)
    with pytest.raises(SolverError) as info:
        solve_hpd(H, np.ones(2))
    assert info.value.min_eigenvalue == pytest.approx(-2.0)
