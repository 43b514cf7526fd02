"""Dense complex linear algebra: inner products, Jacobi eigensolver, SVD, HPD solve.

Vectors and matrices are plain ``numpy.complex128`` arrays. Everything here is
a pure function of its arguments.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import (
    check_complex_matrix,
    check_complex_vector,
    check_same_length,
    check_square,
    is_hermitian,
)
from .exceptions import ContractViolation, DimensionError, NumericalError, SolverError

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
RANK_TOL = 1e-12


def inner(z, w):
    """Standard complex inner product ``sum_i z_i * conj(w_i)``.

    Linear in the first argument, conjugate-linear in the second.

    >>> inner([1 + 1j, 2], [1j, 1])
    (3-1j)
    """
    z = check_complex_vector(z, "z")
    w = check_complex_vector(w, "w")
    check_same_length(z, w)
    return complex(np.sum(z * w.conj()))


def inner_real(z, w):
    """Real inner product on C^n viewed as R^(2n): ``Re(inner(z, w))``."""
    return inner(z, w).real


def _offdiag_norm(H):
    return np.linalg.norm(H - np.diag(np.diag(H)))


def hermitian_eig(H, *, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    H : array_like, shape (n, n)
        Hermitian matrix (checked to 1e-12 relative Frobenius tolerance).
    tol : float
        Sweeps stop once the off-diagonal Frobenius mass is at most
        ``tol * ||H||_F``.
    max_sweeps : int
        Raise :class:`NumericalError` if not converged after this many sweeps.

    Returns
    -------
    eigenvalues : ndarray of float, ascending
    eigenvectors : ndarray, shape (n, n)
        Unitary; column ``k`` pairs with ``eigenvalues[k]``.
    """
    H = check_square(H, "H")
    if not is_hermitian(H):
        raise ContractViolation("hermitian_eig requires a Hermitian matrix")
    n = H.shape[0]
    A = 0.5 * (H + H.conj().T)
    V = np.eye(n, dtype=np.complex128)
    target = tol * np.linalg.norm(A)

    for _ in range(max_sweeps):
        if _offdiag_norm(A) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = A[p, q]
                b = abs(hpq)
                if b == 0.0:
                    continue
                app, aqq = A[p, p].real, A[q, q].real
                # real 2x2 rotation on [[app, b], [b, aqq]] after removing the phase
                theta = (aqq - app) / (2.0 * b)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                phase = hpq / b
                J = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ J
    else:
        if _offdiag_norm(A) > target:
            raise NumericalError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps"
            )

    evals = np.diag(A).real.copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], V[:, order]


@dataclass(frozen=True)
class SVDResult:
    """Thin SVD ``A = U diag(s) V^*`` with ``r = min(m, n)`` components."""

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    @property
    def U(self):
        return self.left_vectors

    @property
    def V(self):
        return self.right_vectors

    @property
    def s(self):
        return self.singular_values

    def reconstruct(self):
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T


def _complete_orthonormal(U, k, m):
    """Replace column k of U by a unit vector orthogonal to columns 0..k-1."""
    for e in range(m):
        v = np.zeros(m, dtype=np.complex128)
        v[e] = 1.0
        for _ in range(2):
            v -= U[:, :k] @ (U[:, :k].conj().T @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            U[:, k] = v / nv
            return
    raise NumericalError("could not complete an orthonormal basis")


def svd(A):
    """Thin singular value decomposition via the eigenpairs of ``A^* A``.

    Right vectors come from :func:`hermitian_eig`; left vectors are
    ``A v_k / sigma_k``, re-orthogonalized against earlier columns. Singular
    values below ``1e-12 * sigma_max`` count as rank deficiency and their left
    vectors are completed to an orthonormal set.
    """
    A = check_complex_matrix(A, "A")
    m, n = A.shape
    r = min(m, n)
    evals, evecs = hermitian_eig(A.conj().T @ A)
    order = np.argsort(evals)[::-1][:r]
    V = evecs[:, order]
    sigma = np.sqrt(np.clip(evals[order], 0.0, None))

    # sigma from the actual image norm is more accurate than sqrt(eig)
    images = A @ V
    sigma = np.linalg.norm(images, axis=0)
    smax = sigma.max() if r else 0.0
    U = np.zeros((m, r), dtype=np.complex128)
    for k in range(r):
        if smax > 0 and sigma[k] > RANK_TOL * smax:
            u = images[:, k] - U[:, :k] @ (U[:, :k].conj().T @ images[:, k])
            U[:, k] = u / np.linalg.norm(u)
        else:
            sigma[k] = 0.0
            _complete_orthonormal(U, k, m)
    order = np.argsort(-sigma, kind="stable")
    return SVDResult(sigma[order], U[:, order], V[:, order])


def solve_hpd(H, y):
    """Solve ``H x = y`` for Hermitian positive definite ``H`` by Cholesky.

    Raises
    ------
    SolverError
        If a pivot is not strictly positive. ``min_eigenvalue`` on the
        exception holds the smallest eigenvalue of ``H``.
    """
    H = check_square(H, "H")
    y = check_complex_vector(y, "y")
    n = H.shape[0]
    if y.shape[0] != n:
        raise DimensionError(f"H is {n}x{n} but y has length {y.shape[0]}")
    if not is_hermitian(H):
        raise ContractViolation("solve_hpd requires a Hermitian matrix")

    L = np.zeros_like(H)
    for j in range(n):
        pivot = H[j, j].real - np.sum(np.abs(L[j, :j]) ** 2)
        if not pivot > 0.0:
            lam_min = hermitian_eig(H)[0][0]
            raise SolverError(
                f"matrix is not positive definite (pivot {pivot:.3e} at row {j}, "
                f"min eigenvalue {lam_min:.3e})",
                min_eigenvalue=lam_min,
            )
        L[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            L[j + 1:, j] = (H[j + 1:, j] - L[j + 1:, :j] @ L[j, :j].conj()) / L[j, j]

    # forward then back substitution
    x = np.empty(n, dtype=np.complex128)
    for i in range(n):
        x[i] = (y[i] - L[i, :i] @ x[:i]) / L[i, i]
    LH = L.conj().T
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - LH[i, i + 1:] @ x[i + 1:]) / LH[i, i]
    return x
