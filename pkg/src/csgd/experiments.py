"""Coefficient recovery runs shared by the CLI, the verify suite and the estimators."""

from dataclasses import dataclass

import numpy as np

from .exceptions import DivergenceError
from .objectives import LeastSquaresObjective
from .scenarios import ScenarioDataset
from .sgd import RunConfig, StepSchedule, run

PROBE_STEPS = 100
FALLBACK_ETA = 0.5


@dataclass
class RecoveryResult:
    dataset: ScenarioDataset
    iterations: np.ndarray
    relative_residual: np.ndarray
    relative_coefficient_error: np.ndarray
    coeffs: np.ndarray
    eta: float

    @property
    def final_error(self):
        return float(self.relative_coefficient_error[-1])


def pick_step(obj, z0, seed, eta=None):
    """Row-normalized step: ``eta`` if given, else 1.0 unless it diverges within 100 steps."""
    if eta is not None:
        return float(eta)
    probe = RunConfig(T=PROBE_STEPS, seed=seed, schedule=StepSchedule.constant(1.0), update_rule="row_normalized")
    try:
        run(obj, z0, probe)
    except DivergenceError:
        return FALLBACK_ETA
    return 1.0


def recover(dataset, T, seed=0, eta=None, record_every=None, tol=None):
    """Recover ``dataset.exact_coeffs`` by row-normalized SGD on ``(K + lam I) alpha = w``.

    Parameters
    ----------
    dataset : ScenarioDataset
    T : int
        Iteration budget.
    seed : int
    eta : float, optional
        Constant step; chosen by :func:`pick_step` when omitted.
    record_every : int, optional
        Checkpoint cadence, defaults to ``max(1, T // 1000)``.
    tol : float, optional
        Stop at the first checkpoint whose relative residual is ``<= tol``.

    Returns
    -------
    RecoveryResult
    """
    obj = LeastSquaresObjective(dataset.system_matrix, dataset.targets)
    z0 = np.zeros(len(dataset.nodes), dtype=np.complex128)
    eta = pick_step(obj, z0, seed, eta)
    cfg = RunConfig(
        T=int(T), seed=seed, schedule=StepSchedule.constant(eta), update_rule="row_normalized", record_every=record_every
    )
    w_norm = np.linalg.norm(dataset.targets)
    stop = None
    if tol is not None:
        stop = lambda z: np.linalg.norm(obj.residual(z)) <= tol * w_norm
    trace = run(obj, z0, cfg, reference=dataset.exact_coeffs, stop=stop)
    rel_res = trace.residuals / w_norm
    rel_err = trace.errors / np.linalg.norm(dataset.exact_coeffs)
    return RecoveryResult(dataset, trace.iterations, rel_res, rel_err, trace.final, eta)


def real_grid(lo=-10.0, hi=10.0, points=1001):
    return np.linspace(lo, hi, int(points))


def circle_grid(points=512):
    return 2.0 * np.pi * np.arange(int(points)) / int(points)


def superosc_grid(result, x):
    """Closed form, recovered expansion and limit on the real points ``x``."""
    ds = result.dataset
    return ds.reference_eval(x), ds.expansion(result.coeffs, x), ds.limit_eval(x)


def hardy_grid(result, theta):
    """Exact product and recovered expansion on ``e^{i theta}``, with ``||B| - |B_sgd||``."""
    ds = result.dataset
    z = np.exp(1j * theta)
    exact = ds.reference_eval(z)
    rec = ds.expansion(result.coeffs, z, boundary=True)
    return exact, rec, np.abs(np.abs(exact) - np.abs(rec))


def function_level_error(coeffs, dataset, x):
    """``max |expansion(coeffs) - reference| / max |reference|`` over ``x``."""
    ref = dataset.reference_eval(x)
    return float(np.max(np.abs(dataset.expansion(coeffs, x) - ref)) / np.max(np.abs(ref)))


__all__ = [
    "RecoveryResult",
    "circle_grid",
    "function_level_error",
    "hardy_grid",
    "pick_step",
    "real_grid",
    "recover",
    "superosc_grid",
]
