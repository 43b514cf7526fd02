"""Real-valued objectives of complex variables and their Wirtinger gradients.

The gradient convention throughout is the complex gradient
``grad f = 2 * df/dconj(z)``, i.e. entry ``i`` is ``df/dx_i + 1j * df/dy_i``
for ``z_i = x_i + 1j * y_i``. Steepest descent steps along ``-grad f``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    check_complex_matrix,
    check_complex_vector,
    check_positive,
    check_square,
    is_hermitian,
)
from .exceptions import ContractViolation, DimensionError, OracleError
from .linalg import inner_real, svd
from .rng import SplitMix64


class SampledObjective:
    """A finite family of components ``f_j`` and their weighted mean ``F``.

    Subclasses implement :meth:`eval_component` and :meth:`grad_component`.
    ``eval_full``/``grad_full`` default to the ``sampling_weights``-weighted
    mean, so unbiasedness holds by construction. The batched
    :meth:`grad_components` is what the SGD engine calls; override it when a
    vectorized form exists.
    """

    n_components: int
    n_features: int
    sampling_weights: np.ndarray

    def eval_component(self, j, z):
        raise NotImplementedError

    def grad_component(self, j, z):
        raise NotImplementedError

    def eval_full(self, z):
        z = self._check_z(z)
        return float(sum(p * self.eval_component(j, z) for j, p in enumerate(self.sampling_weights)))

    def grad_full(self, z):
        z = self._check_z(z)
        g = np.zeros(self.n_features, dtype=np.complex128)
        for j, p in enumerate(self.sampling_weights):
            g += p * self.grad_component(j, z)
        return g

    def grad_components(self, idx, Z):
        """Component gradients for a batch: row ``b`` is ``grad f_{idx[b]}(Z[b])``."""
        return np.stack([self.grad_component(int(j), z) for j, z in zip(idx, Z)])

    def gradient_variance(self, z):
        """``E_j ||grad f_j(z) - grad F(z)||^2`` under the sampling weights."""
        z = self._check_z(z)
        g = self.grad_full(z)
        return float(
            sum(
                p * np.linalg.norm(self.grad_component(j, z) - g) ** 2
                for j, p in enumerate(self.sampling_weights)
            )
        )

    def _check_z(self, z):
        z = check_complex_vector(z, "z")
        if z.shape[0] != self.n_features:
            raise DimensionError(f"z has length {z.shape[0]}, expected {self.n_features}")
        return z

    def _check_index(self, j):
        if not 0 <= j < self.n_components:
            raise IndexError(f"component index {j} out of range [0, {self.n_components})")


def _normalize_weights(weights, m):
    if weights is None:
        return np.full(m, 1.0 / m)
    p = np.asarray(weights, dtype=np.float64)
    if p.shape != (m,) or np.any(p <= 0) or not np.all(np.isfinite(p)):
        raise ContractViolation("sampling_weights must be m positive finite numbers")
    return p / p.sum()


class LeastSquaresObjective(SampledObjective):
    """``f_j(z) = (s_j / 2) |a_j z - b_j|^2`` for the rows ``a_j`` of ``A``.

    With uniform sampling ``s_j = s`` (default ``s = m``), so that
    ``F = E f_j = (s / m) * 0.5 * ||Az - b||^2`` which is the usual least
    squares objective when ``s = m``. With non-uniform weights ``p_j`` the
    component scale becomes ``s / (m p_j)`` which keeps the same mean.
    """

    def __init__(self, A, b, *, scale=None, sampling_weights=None):
        self.A = check_complex_matrix(A, "A")
        self.b = check_complex_vector(b, "b")
        m, n = self.A.shape
        if self.b.shape[0] != m:
            raise DimensionError(f"A has {m} rows but b has length {self.b.shape[0]}")
        self.n_components, self.n_features = m, n
        self.scale = float(m) if scale is None else check_positive(scale, "scale")
        self.sampling_weights = _normalize_weights(sampling_weights, m)
        self.component_scales = self.scale / (m * self.sampling_weights)
        self.row_norms_sq = np.sum(np.abs(self.A) ** 2, axis=1)

    def residual(self, z):
        return self.A @ z - self.b

    def eval_component(self, j, z):
        self._check_index(j)
        z = self._check_z(z)
        r = self.A[j] @ z - self.b[j]
        return 0.5 * self.component_scales[j] * abs(r) ** 2

    def grad_component(self, j, z):
        self._check_index(j)
        z = self._check_z(z)
        r = self.A[j] @ z - self.b[j]
        return self.component_scales[j] * r * self.A[j].conj()

    def eval_full(self, z):
        z = self._check_z(z)
        r = self.residual(z)
        return 0.5 * float(np.sum(self.sampling_weights * self.component_scales * np.abs(r) ** 2))

    def grad_full(self, z):
        z = self._check_z(z)
        r = self.residual(z)
        return self.A.conj().T @ (self.sampling_weights * self.component_scales * r)

    def grad_components(self, idx, Z):
        rows = self.A[idx]
        r = np.einsum("bn,bn->b", rows, Z) - self.b[idx]
        return (self.component_scales[idx] * r)[:, None] * rows.conj()

    def gradient_variance(self, z):
        z = self._check_z(z)
        r = self.residual(z)
        G = (self.component_scales * r)[:, None] * self.A.conj()
        g = self.sampling_weights @ G
        return float(self.sampling_weights @ np.sum(np.abs(G - g) ** 2, axis=1))

    def minimizer(self):
        """Least-squares solution from the SVD (pseudoinverse)."""
        res = svd(self.A)
        keep = res.singular_values > 1e-12 * res.singular_values[0]
        coef = (res.left_vectors[:, keep].conj().T @ self.b) / res.singular_values[keep]
        return res.right_vectors[:, keep] @ coef

    def smoothness(self):
        """Largest component constant ``max_j s_j ||a_j||^2`` (the smoothness constant of the components)."""
        return float(np.max(self.component_scales * self.row_norms_sq))


class RegularizedLSObjective(SampledObjective):
    """Regularized least squares for Hermitian PSD ``A`` (a Gram matrix).

    Canonical form ``F(z) = ||b - Az||^2 + lam * z^* A z`` whose stationary
    points solve ``(A + lam I) z = b``; ``half=True`` selects
    ``0.5 * ||b - Az||^2 + lam * z^* A z`` (stationary at ``(A + 2 lam I) z = b``).
    Components are ``f_j = c m |a_j z - b_j|^2 + lam z^* A z`` with ``c = 1``
    (canonical) or ``c = 1/2``.
    """

    def __init__(self, A, b, lam, *, half=False):
        self.A = check_square(A, "A")
        if not is_hermitian(self.A):
            raise ContractViolation("RegularizedLSObjective requires Hermitian A")
        self.b = check_complex_vector(b, "b")
        n = self.A.shape[0]
        if self.b.shape[0] != n:
            raise DimensionError(f"A is {n}x{n} but b has length {self.b.shape[0]}")
        self.lam = check_positive(lam, "lam")
        self.half = bool(half)
        self.fit_weight = 0.5 if self.half else 1.0
        self.n_components = self.n_features = n
        self.sampling_weights = np.full(n, 1.0 / n)

    def _penalty(self, z):
        return self.lam * float(np.real(z.conj() @ self.A @ z))

    def eval_component(self, j, z):
        self._check_index(j)
        z = self._check_z(z)
        r = self.A[j] @ z - self.b[j]
        return self.fit_weight * self.n_components * abs(r) ** 2 + self._penalty(z)

    def grad_component(self, j, z):
        self._check_index(j)
        z = self._check_z(z)
        r = self.A[j] @ z - self.b[j]
        return 2.0 * self.fit_weight * self.n_components * r * self.A[j].conj() + 2.0 * self.lam * (self.A @ z)

    def eval_full(self, z):
        z = self._check_z(z)
        r = self.A @ z - self.b
        return self.fit_weight * float(np.sum(np.abs(r) ** 2)) + self._penalty(z)

    def grad_full(self, z):
        z = self._check_z(z)
        return 2.0 * self.fit_weight * (self.A @ (self.A @ z - self.b)) + 2.0 * self.lam * (self.A @ z)

    def grad_components(self, idx, Z):
        rows = self.A[idx]
        r = np.einsum("bn,bn->b", rows, Z) - self.b[idx]
        fit = (2.0 * self.fit_weight * self.n_components * r)[:, None] * rows.conj()
        return fit + 2.0 * self.lam * (Z @ self.A.T)


def fd_wirtinger_gradient(f, z, h=None):
    """Central-difference estimate of the complex gradient ``2 df/dconj(z)``.

    Entry ``i`` is ``df/dx_i + 1j * df/dy_i``. Default step is
    ``1e-6 * max(1, ||z||)``. Intended as a test oracle only.
    """
    z = check_complex_vector(z, "z")
    if h is None:
        h = 1e-6 * max(1.0, float(np.linalg.norm(z)))
    h = check_positive(h, "h")
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        parts = []
        for direction in (1.0, 1j):
            e = np.zeros_like(z)
            e[i] = direction * h
            fp, fm = f(z + e), f(z - e)
            if not (np.isfinite(fp) and np.isfinite(fm)):
                raise OracleError(f"non-finite function value near coordinate {i}")
            parts.append((fp - fm) / (2.0 * h))
        out[i] = parts[0] + 1j * parts[1]
    return out


@dataclass
class AssumptionCheck:
    name: str
    passed: bool
    worst_slack: float
    tolerance: float


@dataclass
class AssumptionReport:
    """Outcome of :func:`assumption_audit`.

    ``checks`` maps assumption label to its :class:`AssumptionCheck`; slack is
    signed (negative means violated) and a check passes when
    ``slack >= -1e-10 * scale`` for every sampled pair.
    """

    checks: dict = field(default_factory=dict)
    sample_count: int = 0
    L: float = 0.0
    mu: float = 0.0
    L_component: float = 0.0
    sigma2_at_minimizer: float = 0.0
    scale: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def __str__(self):
        lines = [f"assumption audit: {self.sample_count} pairs, L={self.L:.6g}, mu={self.mu:.6g}"]
        for c in self.checks.values():
            status = "pass" if c.passed else "FAIL"
            lines.append(f"  {c.name:<34} {status}  worst slack {c.worst_slack:+.3e}")
        return "\n".join(lines)


def assumption_audit(obj, sample_count=1000, seed=0):
    """Check smoothness and convexity assumptions for a least-squares objective on random pairs.

    With ``L = sigma_max(A)^2 * s/m`` and ``mu = sigma_min(A)^2 * s/m``
    (``sigma_max^2`` and ``sigma_min^2`` for the default ``s = m``):

    * stationarity: ``grad F(z*) = 0`` at the least-squares solution,
    * L-smoothness of ``F``:
      ``F(w) <= F(z) + <grad F(z), w - z>_R + L/2 ||w - z||^2``,
    * component convexity:
      ``f_j(w) >= f_j(z) + <grad f_j(z), w - z>_R`` for every ``j``,
    * strong convexity of ``F`` with ``mu``,
    * L-smoothness of each component with ``L_component = max_j s_j ||a_j||^2``.

    Points ``z, w`` have i.i.d. standard complex Gaussian entries scaled by
    ``||b|| / sqrt(n)``.
    """
    if not isinstance(obj, LeastSquaresObjective):
        raise ContractViolation("assumption_audit supports LeastSquaresObjective")
    if sample_count < 1:
        raise ContractViolation("sample_count must be >= 1")

    m, n = obj.A.shape
    res = svd(obj.A)
    factor = obj.scale / m
    L = factor * res.singular_values[0] ** 2
    mu = factor * res.singular_values[-1] ** 2 if m >= n else 0.0
    L_comp = obj.smoothness()
    radius = max(float(np.linalg.norm(obj.b)), 1.0) / np.sqrt(n)
    rng = SplitMix64(seed)

    z_star = obj.minimizer()
    g_star = obj.grad_full(z_star)
    grad_scale = L * max(np.linalg.norm(z_star), radius) + np.linalg.norm(obj.A.conj().T @ obj.b) * factor
    worst = {"smooth": np.inf, "convex": np.inf, "strong": np.inf, "smooth_comp": np.inf}
    scale = 0.0
    for _ in range(sample_count):
        z = radius * rng.complex_normal(n)
        w = radius * rng.complex_normal(n)
        d = w - z
        dd = float(np.linalg.norm(d) ** 2)
        Fz, Fw, gz = obj.eval_full(z), obj.eval_full(w), obj.grad_full(z)
        lin = inner_real(gz, d)
        worst["smooth"] = min(worst["smooth"], Fz + lin + 0.5 * L * dd - Fw)
        worst["strong"] = min(worst["strong"], Fw - Fz - lin - 0.5 * mu * dd)
        rz, rw = obj.residual(z), obj.residual(w)
        for j in range(m):
            sj = obj.component_scales[j]
            fz = 0.5 * sj * abs(rz[j]) ** 2
            fw = 0.5 * sj * abs(rw[j]) ** 2
            lj = inner_real(sj * rz[j] * obj.A[j].conj(), d)
            worst["convex"] = min(worst["convex"], fw - fz - lj)
            worst["smooth_comp"] = min(worst["smooth_comp"], fz + lj + 0.5 * L_comp * dd - fw)
        scale = max(scale, L_comp * dd, abs(Fz), abs(Fw))

    tol = 1e-10 * scale
    report = AssumptionReport(
        sample_count=sample_count,
        L=L,
        mu=mu,
        L_component=L_comp,
        sigma2_at_minimizer=obj.gradient_variance(z_star),
        scale=scale,
    )
    stat_slack = -float(np.linalg.norm(g_star))
    stat_tol = 1e-10 * grad_scale
    report.checks["A4"] = AssumptionCheck("A4 minimizer is stationary", stat_slack >= -stat_tol, stat_slack, stat_tol)
    report.checks["A5"] = AssumptionCheck("A5 L-smooth (F, L=sigma_max^2)", worst["smooth"] >= -tol, worst["smooth"], tol)
    report.checks["A5c"] = AssumptionCheck("A5 L-smooth (components)", worst["smooth_comp"] >= -tol, worst["smooth_comp"], tol)
    report.checks["A6"] = AssumptionCheck("A6 components convex", worst["convex"] >= -tol, worst["convex"], tol)
    report.checks["A7"] = AssumptionCheck("A7 mu-strongly convex (F)", worst["strong"] >= -tol, worst["strong"], tol)
    return report
