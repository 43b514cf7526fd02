"""Directional bias of complex SGD on least squares.

For ``z <- z - eta s (a_i z - b_i) conj(a_i)`` with ``i`` uniform over the
``m`` rows, the expected error along the k-th right singular vector evolves as

    E<z^(t) - z*, v_k> = (1 - eta s sigma_k^2 / m)^t <z^(0) - z*, v_k>

exactly for consistent systems, and within ``||eps||`` (``eps = A z* - b``)
otherwise. :func:`run_bias` estimates the left side by Monte Carlo.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_complex_matrix, check_complex_vector, check_positive
from .exceptions import ContractViolation
from .linalg import svd
from .objectives import LeastSquaresObjective
from .sgd import RunConfig, StepSchedule, monte_carlo

DEFAULT_CHECKPOINTS = (0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)


@dataclass
class BiasExperiment:
    A: np.ndarray
    b: np.ndarray
    z0: np.ndarray
    eta: float
    scale: float = None
    T: int = 100
    trials: int = 2000
    seed: int = 0
    checkpoints: tuple = None

    def __post_init__(self):
        self.A = check_complex_matrix(self.A, "A")
        self.b = check_complex_vector(self.b, "b")
        self.z0 = check_complex_vector(self.z0, "z0")
        m, n = self.A.shape
        if m < n:
            raise ContractViolation("BiasExperiment needs m >= n")
        if self.scale is None:
            self.scale = float(n)
        self.eta = check_positive(self.eta, "eta")
        self.svd = svd(self.A)
        s = self.svd.singular_values
        if s[-1] <= 1e-10 * s[0]:
            raise ContractViolation("A must have full column rank (sigma_min > 1e-10 sigma_max)")
        if not self.eta * self.scale * s[0] ** 2 / m < 1.0:
            raise ContractViolation("need eta * s * sigma_max^2 / m < 1")
        if self.checkpoints is None:
            self.checkpoints = tuple(t for t in DEFAULT_CHECKPOINTS if t <= self.T)
        if self.checkpoints[0] != 0 or list(self.checkpoints) != sorted(set(self.checkpoints)):
            raise ContractViolation("checkpoints must be strictly increasing from 0")

    @property
    def rates(self):
        m = self.A.shape[0]
        return 1.0 - self.eta * self.scale * self.svd.singular_values**2 / m


@dataclass
class BiasProfile:
    """Estimates of ``<z^(t) - z*, v_k>`` on a shared checkpoint grid.

    Arrays are indexed ``[k, c]`` (direction, checkpoint).
    """

    iterations: np.ndarray
    singular_values: np.ndarray
    rates: np.ndarray
    estimate: np.ndarray
    stderr: np.ndarray
    predicted: np.ndarray
    eps_norm: float
    trials: int

    def deviation(self):
        return np.abs(self.estimate - self.predicted)

    def within(self, n_se=3.0):
        """Mask of entries where ``|estimate - predicted| <= eps_norm + n_se * SE``.

        A rounding floor of ``1e-12 * max(1, |predicted(0)|)`` covers the
        checkpoint ``t = 0`` where the standard error vanishes.
        """
        floor = 1e-12 * np.maximum(1.0, np.abs(self.predicted[:, :1]))
        return self.deviation() <= self.eps_norm + n_se * self.stderr + floor

    def rows(self):
        for k in range(len(self.singular_values)):
            for c, t in enumerate(self.iterations):
                yield k, int(t), self.estimate[k, c], self.predicted[k, c], self.stderr[k, c]


def _solution(exp):
    res = exp.svd
    return res.right_vectors @ ((res.left_vectors.conj().T @ exp.b) / res.singular_values)


def run_bias(exp):
    """Monte Carlo estimate of the per-direction error against its predicted decay."""
    z_star = _solution(exp)
    obj = LeastSquaresObjective(exp.A, exp.b, scale=exp.scale)
    T = max(int(exp.checkpoints[-1]), 1)
    cfg = RunConfig(T=T, seed=exp.seed, schedule=StepSchedule.constant(exp.eta), update_rule="plain", grid=exp.checkpoints)
    mc = monte_carlo(obj, exp.z0, cfg, exp.trials)
    grid = np.asarray(exp.checkpoints)
    V = exp.svd.right_vectors
    # <z - z*, v_k> = v_k^* (z - z*)
    proj = np.einsum("bcn,nk->bkc", mc.iterates - z_star, V.conj())
    est = proj.mean(axis=0)
    dev = proj - est
    se = np.sqrt(np.sum(np.abs(dev) ** 2, axis=0) / (exp.trials - 1) / exp.trials)
    init = V.conj().T @ (exp.z0 - z_star)
    rates = exp.rates
    pred = init[:, None] * rates[:, None] ** grid[None, :]
    eps = exp.A @ z_star - exp.b
    eps_norm = float(np.linalg.norm(eps))
    if eps_norm <= 1e-12 * max(1.0, float(np.linalg.norm(exp.b))):
        eps_norm = 0.0
    return BiasProfile(grid, exp.svd.singular_values, rates, est, se, pred, eps_norm, exp.trials)


@dataclass
class DominanceReport:
    decay_factors: np.ndarray
    predicted_ratio: np.ndarray
    observed_ratio: np.ndarray
    passed: bool
    inconclusive: bool = False
    notes: list = field(default_factory=list)


def smallest_direction_dominance(profile, n_se=3.0):
    """Check that error along the smallest singular direction outlives the rest.

    For each direction ``k`` the ratio ``|est_k(t)| / |est_min(t)|`` is
    compared to its predicted value ``(rate_k / rate_min)^t * ratio(0)``.
    Directions whose singular value equals the minimum (to 1e-12 relative)
    are reported but not required to decay.
    """
    s = profile.singular_values
    kmin = int(np.argmin(s))
    init_min = abs(profile.predicted[kmin, 0])
    notes = []
    if init_min <= 1e-12 * max(np.max(np.abs(profile.predicted[:, 0])), 1e-300):
        return DominanceReport(profile.rates, None, None, False, True, ["initial error along v_min is numerically zero"])

    with np.errstate(divide="ignore", invalid="ignore"):
        pred_ratio = np.abs(profile.predicted) / np.abs(profile.predicted[kmin])
        obs_ratio = np.abs(profile.estimate) / np.abs(profile.estimate[kmin])

    resolved = np.abs(profile.estimate[kmin]) > n_se * profile.stderr[kmin]
    last = int(np.nonzero(resolved)[0][-1]) if resolved.any() else 0
    passed = True
    for k in range(len(s)):
        if k == kmin:
            continue
        if s[k] <= s[kmin] * (1 + 1e-12):
            notes.append(f"direction {k}: same singular value as v_min, ratio stays {pred_ratio[k, -1]:.3g}")
            continue
        if not np.all(np.diff(pred_ratio[k]) < 0):
            passed = False
            notes.append(f"direction {k}: predicted ratio not decreasing")
        if last > 0 and not obs_ratio[k, last] < obs_ratio[k, 0]:
            passed = False
            notes.append(f"direction {k}: observed ratio did not shrink by checkpoint {last}")
    return DominanceReport(profile.rates, pred_ratio, obs_ratio, passed, False, notes)


def kaczmarz_decay(A, b, z0, T, trials, seed=0, record_every=1):
    """Mean squared error ``E||z^(t) - z*||^2`` for randomized Kaczmarz (eta = 1)."""
    obj = LeastSquaresObjective(A, b)
    z_star = obj.minimizer()
    cfg = RunConfig(T=T, seed=seed, update_rule="kaczmarz", record_every=record_every)
    mc = monte_carlo(obj, z0, cfg, trials, reference=z_star)
    return mc.iterations, mc.sq_dist, mc.sq_dist_se


__all__ = [
    "BiasExperiment",
    "BiasProfile",
    "DominanceReport",
    "kaczmarz_decay",
    "run_bias",
    "smallest_direction_dominance",
]
