"""Reproducing kernels (Fock, Gaussian RBF, Hardy), Gram systems and kernel expansions."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_complex_scalar, check_complex_vector, check_positive, is_hermitian
from .exceptions import ContractViolation, DimensionError, DomainError, IllPosedError, NumericalError
from .linalg import hermitian_eig, solve_hpd

HARDY_EDGE = 1.0 - 1e-12
NODE_SEPARATION = 1e-10
PSD_TOL = 1e-8


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice.

    ``fock``:  ``B(z, w) = exp(z conj(w))``
    ``rbf``:   ``K(z, w) = exp(-(z - conj(w))^2 / gamma^2)``
    ``hardy``: ``K(z, w) = 1 / (1 - z conj(w))`` on the unit disk
    """

    kind: str
    gamma: float = None

    def __post_init__(self):
        if self.kind not in ("fock", "rbf", "hardy"):
            raise ContractViolation(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf":
            check_positive(self.gamma, "gamma")

    @classmethod
    def fock(cls):
        return cls("fock")

    @classmethod
    def gaussian_rbf(cls, gamma=np.sqrt(2.0)):
        return cls("rbf", float(gamma))

    @classmethod
    def hardy(cls):
        return cls("hardy")

    def __call__(self, z, w):
        return kernel_matrix(self, np.atleast_1d(z), np.atleast_1d(w))


def _check_disk(points, name, edge=HARDY_EDGE):
    if np.any(np.abs(points) >= edge):
        raise DomainError(f"Hardy kernel needs |{name}| < 1; got max |{name}| = {np.max(np.abs(points)):.17g}")


def kernel_matrix(spec, z, w, *, boundary=False):
    """Matrix ``K[i, j] = kernel(z[i], w[j])``.

    With ``boundary=True`` the Hardy kernel also accepts ``|z| <= 1`` (the
    closed disk), which is finite as long as every ``w`` lies inside the disk.
    """
    z = np.asarray(z, dtype=np.complex128).ravel()
    w = np.asarray(w, dtype=np.complex128).ravel()
    if spec.kind == "fock":
        return np.exp(np.outer(z, w.conj()))
    if spec.kind == "rbf":
        d = z[:, None] - w.conj()[None, :]
        return np.exp(-(d * d) / spec.gamma**2)
    _check_disk(w, "w")
    if boundary:
        if np.any(np.abs(z) > 1.0 + 1e-12):
            raise DomainError("boundary evaluation needs |z| <= 1")
    else:
        _check_disk(z, "z")
    return 1.0 / (1.0 - np.outer(z, w.conj()))


def kernel_eval(spec, z, w):
    """Kernel value at a single pair of points."""
    z = check_complex_scalar(z, "z")
    w = check_complex_scalar(w, "w")
    return complex(kernel_matrix(spec, [z], [w])[0, 0])


@dataclass(frozen=True)
class GramSystem:
    """Gram matrix ``K`` over ``nodes`` with regularization ``lam``; ``H = K + lam I``."""

    spec: KernelSpec
    nodes: np.ndarray
    K: np.ndarray
    lam: float

    @property
    def H(self):
        return self.K + self.lam * np.eye(self.K.shape[0])


def min_separation(nodes):
    nodes = np.asarray(nodes)
    if nodes.size < 2:
        return np.inf
    d = np.abs(nodes[:, None] - nodes[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def gram(spec, nodes, lam=0.0, *, check_psd=True):
    """Assemble the Gram system and verify its Hermitian / PSD structure.

    Raises
    ------
    IllPosedError
        Two nodes closer than ``1e-10``.
    NumericalError
        ``K`` not Hermitian to 1e-12, or its minimum eigenvalue is below
        ``-1e-8 * trace(K) / n``.
    """
    nodes = check_complex_vector(nodes, "nodes")
    lam = check_positive(lam, "lam", strict=False)
    if min_separation(nodes) <= NODE_SEPARATION:
        raise IllPosedError("nodes must be pairwise distinct (separation > 1e-10)")
    K = kernel_matrix(spec, nodes, nodes)
    if not is_hermitian(K, 1e-12):
        raise NumericalError("Gram matrix is not Hermitian to 1e-12")
    K = 0.5 * (K + K.conj().T)
    if check_psd:
        n = K.shape[0]
        lam_min = hermitian_eig(K)[0][0]
        floor = -PSD_TOL * np.trace(K).real / n
        if lam_min < floor:
            raise NumericalError(f"Gram matrix not PSD: min eigenvalue {lam_min:.3e} < {floor:.3e}")
    return GramSystem(spec, nodes, K, lam)


def representer_solve(gs, y):
    """Coefficients ``alpha`` solving ``(K + lam I) alpha = y``."""
    if not gs.lam > 0:
        raise ContractViolation("representer_solve needs lam > 0")
    y = check_complex_vector(y, "y")
    if y.shape[0] != gs.K.shape[0]:
        raise DimensionError(f"y has length {y.shape[0]}, system has {gs.K.shape[0]} nodes")
    return solve_hpd(gs.H, y)


def expansion_eval(spec, nodes, coeffs, z, offset=0.0, *, boundary=False):
    """Evaluate ``offset + sum_j coeffs[j] * kernel(z, nodes[j])``.

    ``z`` may be a scalar or an array; the result has the same shape.
    ``boundary=True`` permits Hardy evaluation on the unit circle.
    """
    nodes = check_complex_vector(nodes, "nodes")
    coeffs = check_complex_vector(coeffs, "coeffs")
    if coeffs.shape != nodes.shape:
        raise DimensionError("coeffs and nodes must have equal length")
    offset = check_complex_scalar(offset, "offset")
    z_arr = np.asarray(z, dtype=np.complex128)
    vals = offset + kernel_matrix(spec, z_arr.ravel(), nodes, boundary=boundary) @ coeffs
    if z_arr.ndim == 0:
        return complex(vals[0])
    return vals.reshape(z_arr.shape)
