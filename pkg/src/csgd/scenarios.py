"""Recovery experiments with closed-form answers.

* Fock space: superoscillating ``F_n(a, z) = (cos(z/n) + i a sin(z/n))^n``
  expanded over the Fock kernel at ``z_j = -i (1 - 2j/n)``.
* Gaussian RBF (gamma = sqrt 2): the first-type supershift
  ``R_n(z, a) = exp(-z^2/2) F_n(a, z)``.
* Hardy space: finite Blaschke products expanded over the Szego kernel.

Each builder returns a :class:`ScenarioDataset` whose exact coefficients
satisfy ``(K + lam I) coeffs = targets``.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._validation import check_complex_vector, check_positive
from .exceptions import ContractViolation, DomainError, IllPosedError, NumericalError, SamplingError
from .kernels import KernelSpec, expansion_eval, kernel_matrix, min_separation
from .rng import SplitMix64

MAX_ORDER = 400
OVERFLOW_LIMIT = 1e300

DISK_R_MIN = 0.8
DISK_R_MAX = 0.9
DISK_MIN_SEP = 0.05


@dataclass(frozen=True)
class SuperoscParams:
    n: int
    a: float
    lam: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ContractViolation("n must be a positive integer")
        if self.n > MAX_ORDER:
            raise ContractViolation(f"n is capped at {MAX_ORDER}")
        if not self.a > 1:
            raise ContractViolation("a must be > 1")
        check_positive(self.lam, "lam")


@dataclass
class ScenarioDataset:
    """Nodes, targets and the exact kernel coefficients of one experiment."""

    name: str
    kernel: KernelSpec
    nodes: np.ndarray
    targets: np.ndarray
    lam: float
    exact_coeffs: np.ndarray
    offset: complex = 0.0
    reference_eval: Callable = None
    limit_eval: Optional[Callable] = None

    @property
    def gram_matrix(self):
        return kernel_matrix(self.kernel, self.nodes, self.nodes)

    @property
    def system_matrix(self):
        """``K + lam I``: rows are the least-squares rows for coefficient recovery."""
        return self.gram_matrix + self.lam * np.eye(len(self.nodes))

    def self_consistency(self):
        """``||(K + lam I) coeffs - targets|| / ||targets||``."""
        r = self.system_matrix @ self.exact_coeffs - self.targets
        return float(np.linalg.norm(r) / np.linalg.norm(self.targets))

    def expansion(self, coeffs, z, *, boundary=False):
        return expansion_eval(self.kernel, self.nodes, coeffs, z, self.offset, boundary=boundary)


def _binomial_row(n):
    """``binom(n, j)`` for ``j = 0..n`` as floats via the multiplicative recurrence."""
    out = np.empty(n + 1)
    out[0] = 1.0
    for j in range(1, n + 1):
        out[j] = out[j - 1] * (n - j + 1) / j
    return out


def superosc_nodes(n):
    j = np.arange(n + 1)
    return -1j * (1.0 - 2.0 * j / n)


def superosc_coefficients(n, a):
    """``C_j(n, a) = binom(n, j) ((1+a)/2)^(n-j) ((1-a)/2)^j`` and nodes ``z_j``."""
    p = SuperoscParams(n, a)
    n, a = p.n, float(p.a)
    up, down = (1.0 + a) / 2.0, (1.0 - a) / 2.0
    C = _binomial_row(n)
    # powers by repeated multiplication, no logs
    with np.errstate(over="ignore", invalid="ignore"):
        pw_up = np.cumprod(np.r_[1.0, np.full(n, up)])
        pw_down = np.cumprod(np.r_[1.0, np.full(n, down)])
        C = C * pw_up[::-1] * pw_down
    if not np.all(np.isfinite(C)) or np.max(np.abs(C)) > OVERFLOW_LIMIT:
        raise NumericalError("superoscillation coefficients overflow")
    return C.astype(np.complex128), superosc_nodes(n)


def eval_superosc_closed_form(n, a, z):
    """``F_n(a, z) = (cos(z/n) + i a sin(z/n))^n`` (vectorized over ``z``)."""
    z = np.asarray(z, dtype=np.complex128)
    val = (np.cos(z / n) + 1j * a * np.sin(z / n)) ** n
    return complex(val) if val.ndim == 0 else val


def eval_limit(a, z):
    """``exp(i a z)``, the pointwise limit of ``F_n(a, z)``."""
    z = np.asarray(z, dtype=np.complex128)
    val = np.exp(1j * a * z)
    return complex(val) if val.ndim == 0 else val


def superosc_frequencies(n):
    """Fourier frequencies ``1 - 2j/n`` of the terms of ``F_n``."""
    return 1.0 - 2.0 * np.arange(n + 1) / n


def superosc_targets(n, a, lam):
    """Data values ``w_k(n, a)`` for which ``F_n(a, .)`` is the regularized minimizer."""
    k = np.arange(n + 1)
    ratio = (1.0 - a) / (1.0 + a)
    lead = ((1.0 + a) / 2.0) ** n
    inner = np.exp(1.0 - 2.0 * k / n) * (1.0 + ratio * np.exp(-2.0 / n + 4.0 * k / n**2)) ** n
    reg = lam * _binomial_row(n) * ratio**k
    return (lead * (inner + reg)).astype(np.complex128)


def build_superosc(params):
    """Fock-space superoscillation recovery dataset."""
    n, a, lam = params.n, float(params.a), float(params.lam)
    C, nodes = superosc_coefficients(n, a)
    return ScenarioDataset(
        name="fock",
        kernel=KernelSpec.fock(),
        nodes=nodes,
        targets=superosc_targets(n, a, lam),
        lam=lam,
        exact_coeffs=C,
        reference_eval=lambda z: eval_superosc_closed_form(n, a, z),
        limit_eval=lambda z: eval_limit(a, z),
    )


def rbf_supershift_eval(n, a, z):
    """``R_n(z, a) = exp(-z^2/2) F_n(a, z)``."""
    z = np.asarray(z, dtype=np.complex128)
    val = np.exp(-z * z / 2.0) * eval_superosc_closed_form(n, a, z)
    return complex(val) if np.ndim(val) == 0 else val


def build_rbf_supershift(params):
    """Gaussian-RBF (gamma = sqrt 2) supershift recovery dataset.

    Coefficients are ``beta_j = C_j exp(conj(z_j)^2 / 2)``; targets
    ``w_k = exp(u_k^2/2) sum_j C_j exp(u_k u_j) + lam C_k exp(-u_k^2/2)``
    with ``u = 1 - 2j/n``. The limit handle returns ``exp(-z^2/2) exp(i a z)``,
    the pointwise limit of ``R_n``.
    """
    n, a, lam = params.n, float(params.a), float(params.lam)
    C, nodes = superosc_coefficients(n, a)
    u = superosc_frequencies(n)
    beta = C * np.exp(np.conj(nodes) ** 2 / 2.0)
    targets = np.exp(u**2 / 2.0) * (np.exp(np.outer(u, u)) @ C) + lam * C * np.exp(-(u**2) / 2.0)
    return ScenarioDataset(
        name="rbf",
        kernel=KernelSpec.gaussian_rbf(np.sqrt(2.0)),
        nodes=nodes,
        targets=targets.astype(np.complex128),
        lam=lam,
        exact_coeffs=beta,
        reference_eval=lambda z: rbf_supershift_eval(n, a, z),
        limit_eval=lambda z: np.exp(-np.asarray(z, dtype=np.complex128) ** 2 / 2.0) * eval_limit(a, z),
    )


def sample_disk_roots(count, seed=0, r_min=DISK_R_MIN, r_max=DISK_R_MAX, min_sep=DISK_MIN_SEP, *, budget=None):
    """Rejection-sample ``count`` points in the annulus ``r_min <= |z| <= r_max``.

    Candidates are area-uniform on the annulus and are accepted only when at
    least ``min_sep`` from every accepted point.
    """
    if int(count) < 1:
        raise ContractViolation("count must be >= 1")
    if not 0 < r_min < r_max < 1:
        raise ContractViolation("need 0 < r_min < r_max < 1")
    if min_sep < 0:
        raise ContractViolation("min_sep must be >= 0")
    budget = 1000 * int(count) if budget is None else int(budget)
    rng = SplitMix64(seed)
    roots = []
    for _ in range(budget):
        u = rng.uniform(2)
        r = np.sqrt(r_min**2 + u[0] * (r_max**2 - r_min**2))
        r = min(max(r, r_min), r_max)
        cand = r * np.exp(2j * np.pi * u[1])
        if all(abs(cand - q) >= min_sep for q in roots):
            roots.append(cand)
            if len(roots) == count:
                return np.array(roots, dtype=np.complex128)
    raise SamplingError(f"placed {len(roots)} of {count} roots within {budget} draws")


def _check_roots(roots):
    roots = check_complex_vector(roots, "roots")
    if np.any(np.abs(roots) >= 1.0):
        raise DomainError("Blaschke roots must lie in the open unit disk")
    return roots


def blaschke_eval(roots, z):
    """``B(z) = prod_j (z - a_j) / (1 - conj(a_j) z)`` (vectorized over ``z``)."""
    roots = _check_roots(roots)
    z = np.asarray(z, dtype=np.complex128)
    den = 1.0 - np.conj(roots)[:, None] * z.ravel()[None, :]
    if np.any(den == 0):
        raise DomainError("evaluation at a pole 1/conj(a_j)")
    val = np.prod((z.ravel()[None, :] - roots[:, None]) / den, axis=0)
    return complex(val[0]) if z.ndim == 0 else val.reshape(z.shape)


def blaschke_derivative_at_root(roots, j):
    """``B'(a_j) = 1/(1 - |a_j|^2) prod_{k != j} (a_j - a_k) / (1 - conj(a_k) a_j)``."""
    roots = _check_roots(roots)
    aj = roots[j]
    others = np.delete(roots, j)
    if np.any(others == aj):
        raise IllPosedError("derivative formula needs simple roots")
    return complex(np.prod((aj - others) / (1.0 - np.conj(others) * aj)) / (1.0 - abs(aj) ** 2))


def blaschke_coefficients(roots, conjugate=True):
    """Constant and kernel coefficients of the Szego expansion of ``B``.

    ``conjugate=True``: ``c0 = 1/conj(B(0))``, ``c_j = 1/conj(a_j B'(a_j))``.
    ``conjugate=False``: the same without conjugation (equal up to a
    unimodular factor of the whole function, so it only reproduces ``B``
    when that factor is 1).
    """
    roots = _check_roots(roots)
    B0 = blaschke_eval(roots, 0.0)
    dB = np.array([blaschke_derivative_at_root(roots, j) for j in range(len(roots))])
    if conjugate:
        return 1.0 / np.conj(B0), 1.0 / np.conj(roots * dB)
    return 1.0 / B0, 1.0 / (roots * dB)


def _expansion_error(roots, c0, c, probes):
    exp = c0 + kernel_matrix(KernelSpec.hardy(), probes, roots) @ c
    return float(np.max(np.abs(exp - blaschke_eval(roots, probes))))


def build_blaschke(roots, lam=1.0, *, convention="auto", tol=1e-6):
    """Hardy-space Blaschke recovery dataset.

    Targets are ``w_k = lam c_k - c0``. The coefficient convention is checked
    at construction by comparing the expansion with the product at interior
    probe points; ``convention="auto"`` tries the conjugated form first, then
    the plain form, and raises if neither reproduces ``B`` to ``tol``.
    """
    roots = _check_roots(roots)
    lam = check_positive(lam, "lam")
    if np.any(roots == 0):
        raise ContractViolation("Blaschke roots must be nonzero")
    if min_separation(roots) <= 1e-10:
        raise IllPosedError("Blaschke roots must be simple (pairwise distinct)")
    if np.max(np.abs(roots)) >= 1.0 - 1e-12:
        raise DomainError("Blaschke roots too close to the unit circle")

    probes = np.array([0.0, 0.3, -0.25j, 0.5 + 0.2j, -0.4 - 0.4j, 0.6j])
    options = {"auto": (True, False), "conjugate": (True,), "plain": (False,)}
    if convention not in options:
        raise ContractViolation("convention must be 'auto', 'conjugate' or 'plain'")
    errors = {}
    for conj in options[convention]:
        c0, c = blaschke_coefficients(roots, conjugate=conj)
        err = _expansion_error(roots, c0, c, probes)
        errors[conj] = err
        if err <= tol:
            break
    else:
        raise NumericalError(
            "kernel expansion does not reproduce the Blaschke product "
            f"(max error {min(errors.values()):.3e} > {tol:g}); roots are too ill-conditioned"
        )
    return ScenarioDataset(
        name="hardy",
        kernel=KernelSpec.hardy(),
        nodes=roots,
        targets=(lam * c - c0).astype(np.complex128),
        lam=lam,
        exact_coeffs=c.astype(np.complex128),
        offset=complex(c0),
        reference_eval=lambda z: blaschke_eval(roots, z),
    )
