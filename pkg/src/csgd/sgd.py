"""Complex SGD iteration, step schedules, Monte Carlo estimation and bound checks.

Update rules (``i`` the sampled component, ``a_i`` the i-th row):

``plain``
    ``z <- z - eta_t * grad f_i(z)``
``row_normalized``
    ``z <- z - eta_t * (a_i z - b_i) / ||a_i||^2 * conj(a_i)``
``kaczmarz``
    ``row_normalized`` with ``eta_t = 1``: projection onto ``{a_i z = b_i}``.

Single runs and Monte Carlo trials share one batched code path, so trial
``k`` of :func:`monte_carlo` is bit-identical to :func:`run` with
``seed=derive_seed(cfg.seed, k)``.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_complex_vector, check_positive
from .exceptions import ContractViolation, DegenerateRowError, DimensionError, DivergenceError
from .rng import SplitMix64, derive_seed

UPDATE_RULES = ("plain", "row_normalized", "kaczmarz")
DIVERGENCE_FACTOR = 1e6
_INDEX_CHUNK = 1 << 14


@dataclass(frozen=True)
class StepSchedule:
    """Step sizes ``eta_t`` for ``t = 0 .. T-1``.

    Build with :meth:`constant`, :meth:`sequence` or :meth:`adaptive_sqrt`.
    """

    kind: str
    eta: float = 0.0
    etas: tuple = ()
    L: float = 0.0
    T: int = 0

    @classmethod
    def constant(cls, eta):
        return cls("constant", eta=check_positive(eta, "eta"))

    @classmethod
    def sequence(cls, etas):
        etas = tuple(float(e) for e in etas)
        if not etas or any(not (e > 0 and np.isfinite(e)) for e in etas):
            raise ContractViolation("step sequence must be non-empty and positive")
        return cls("sequence", etas=etas)

    @classmethod
    def adaptive_sqrt(cls, L, T):
        """``eta_t = 1 / (L sqrt(T))``."""
        if int(T) < 1:
            raise ContractViolation("T must be >= 1")
        return cls("adaptive_sqrt", L=check_positive(L, "L"), T=int(T))

    def steps(self, T):
        """Array of ``eta_0 .. eta_{T-1}``."""
        if self.kind == "constant":
            return np.full(T, self.eta)
        if self.kind == "sequence":
            if len(self.etas) < T:
                raise ContractViolation(f"step sequence has {len(self.etas)} entries, need {T}")
            return np.asarray(self.etas[:T])
        if self.kind == "adaptive_sqrt":
            return np.full(T, 1.0 / (self.L * np.sqrt(self.T)))
        raise ContractViolation(f"unknown schedule kind {self.kind!r}")


@dataclass(frozen=True)
class RunConfig:
    T: int
    seed: int = 0
    schedule: StepSchedule = field(default_factory=lambda: StepSchedule.constant(1.0))
    update_rule: str = "plain"
    record_every: int = None
    grid: tuple = None

    def __post_init__(self):
        if int(self.T) < 1:
            raise ContractViolation("T must be >= 1")
        if self.update_rule not in UPDATE_RULES:
            raise ContractViolation(f"update_rule must be one of {UPDATE_RULES}")
        if self.record_every is None:
            object.__setattr__(self, "record_every", max(1, int(self.T) // 1000))
        if int(self.record_every) < 1:
            raise ContractViolation("record_every must be >= 1")
        if self.grid is not None:
            g = [int(t) for t in self.grid]
            if g[0] != 0 or g != sorted(set(g)) or g[-1] > self.T:
                raise ContractViolation("grid must increase strictly from 0 and stay within T")
            object.__setattr__(self, "grid", tuple(g))

    def checkpoints(self):
        """Iterations at which iterates are recorded; ``grid`` overrides ``record_every``."""
        if self.grid is not None:
            return np.asarray(self.grid)
        t = list(range(0, self.T, self.record_every))
        if t[-1] != self.T:
            t.append(self.T)
        return np.asarray(t)


@dataclass
class Trace:
    """Checkpointed record of one SGD run.

    ``iterates[c]`` is ``z^(t)`` for ``t = iterations[c]``; ``steps[c]`` is the
    step that produced the next iterate (``nan`` at the final checkpoint).
    ``errors`` is ``||z^(t) - z*||`` when a reference was supplied.
    """

    iterations: np.ndarray
    iterates: np.ndarray
    residuals: np.ndarray
    objective: np.ndarray
    steps: np.ndarray
    errors: np.ndarray = None
    record_every: int = 1

    @property
    def final(self):
        return self.iterates[-1]


def _resolve_steps(cfg):
    if cfg.update_rule == "kaczmarz":
        return np.ones(cfg.T)
    return cfg.schedule.steps(cfg.T)


def _simulate(obj, z0, cfg, seeds, stop=None):
    """Run ``len(seeds)`` independent trajectories in lockstep.

    ``stop(z)`` is polled at each checkpoint after ``t = 0`` with the first
    trajectory's iterate; returning True ends the run there.

    Returns (checkpoints, iterates of shape (B, C, n), steps).
    """
    z0 = check_complex_vector(z0, "z0")
    if z0.shape[0] != obj.n_features:
        raise DimensionError(f"z0 has length {z0.shape[0]}, objective expects {obj.n_features}")
    B, n = len(seeds), z0.shape[0]
    steps = _resolve_steps(cfg)
    checkpoints = cfg.checkpoints()
    out = np.empty((B, len(checkpoints), n), dtype=np.complex128)

    normalized = cfg.update_rule != "plain"
    if normalized:
        if not hasattr(obj, "A") or not hasattr(obj, "row_norms_sq"):
            raise ContractViolation(f"{cfg.update_rule} updates need a row-structured objective")
        if np.any(obj.row_norms_sq == 0.0):
            raise DegenerateRowError("objective has a zero row; normalized update undefined")
        A, A_conj, b = obj.A, obj.A.conj(), obj.b
        inv_row = 1.0 / obj.row_norms_sq

    uniform = np.allclose(obj.sampling_weights, obj.sampling_weights[0], rtol=0, atol=0)
    cumulative = np.cumsum(obj.sampling_weights)
    gens = [SplitMix64(s) for s in seeds]
    m = obj.n_components

    Z = np.tile(z0, (B, 1))
    ci = 0
    r0 = None
    if hasattr(obj, "residual"):
        r0 = np.linalg.norm(obj.residual(z0))
        floor = 1e-8 * (np.linalg.norm(obj.b) + np.linalg.norm(obj.A) * np.linalg.norm(z0))
        limit = DIVERGENCE_FACTOR * max(r0, floor, 1e-300)
    guard_every = max(1, cfg.T // 100)
    rows_b = np.arange(B)

    t = 0
    while t < cfg.T:
        chunk = min(_INDEX_CHUNK, cfg.T - t)
        if uniform:
            idx_block = np.stack([g.integers(m, chunk) for g in gens])
        else:
            idx_block = np.stack([g.choice(cumulative, chunk) for g in gens])
        for k in range(chunk):
            if ci < len(checkpoints) and checkpoints[ci] == t:
                out[:, ci] = Z
                ci += 1
                if stop is not None and t > 0 and stop(Z[0]):
                    return checkpoints[:ci], out[:, :ci], steps
            idx = idx_block[:, k]
            eta = steps[t]
            if normalized:
                rows = A[idx]
                r = np.einsum("bn,bn->b", rows, Z) - b[idx]
                Z -= (eta * r * inv_row[idx])[:, None] * A_conj[idx]
            else:
                Z -= eta * obj.grad_components(idx, Z)
            t += 1
            if r0 is not None and t % guard_every == 0:
                res = np.linalg.norm(Z @ obj.A.T - obj.b, axis=1)
                if not np.all(res <= limit):
                    bad = rows_b[~(res <= limit)][0]
                    raise DivergenceError(
                        f"residual {res[bad]:.3e} exceeds {DIVERGENCE_FACTOR:g} x initial "
                        f"{r0:.3e} at iteration {t} (trial {bad})"
                    )
    if ci < len(checkpoints):
        out[:, ci] = Z
    return checkpoints, out, steps


def _make_trace(obj, iterations, iterates, steps, reference, record_every):
    res = np.array([np.linalg.norm(obj.residual(z)) for z in iterates]) if hasattr(obj, "residual") else None
    F = np.array([obj.eval_full(z) for z in iterates])
    eta = np.array([steps[t] if t < len(steps) else np.nan for t in iterations])
    errors = None
    if reference is not None:
        errors = np.linalg.norm(iterates - reference, axis=1)
    return Trace(iterations, iterates, res, F, eta, errors, record_every)


def run(obj, z0, cfg, reference=None, stop=None):
    """Run complex SGD on ``obj`` from ``z0``.

    Parameters
    ----------
    obj : SampledObjective
    z0 : array_like of complex
    cfg : RunConfig
    reference : array_like, optional
        Known minimizer; enables ``Trace.errors``.
    stop : callable, optional
        ``stop(z)`` checked at each checkpoint; True ends the run early.

    Returns
    -------
    Trace
        Deterministic for a given ``cfg`` (including the seed).

    Raises
    ------
    DegenerateRowError
        Normalized rule met a zero row.
    DivergenceError
        Residual grew past ``1e6`` times its initial value.
    """
    if reference is not None:
        reference = check_complex_vector(reference, "reference")
    iters, Z, steps = _simulate(obj, z0, cfg, [cfg.seed], stop)
    return _make_trace(obj, iters, Z[0], steps, reference, cfg.record_every)


def weighted_average(trace, schedule):
    """Step-weighted mean ``sum_t eta_t z^(t) / sum_t eta_t`` over ``t < T``.

    ``trace`` must hold every iterate ``t = 0 .. T`` (``record_every == 1``).
    """
    its = np.asarray(trace.iterations)
    T = int(its[-1])
    if trace.record_every != 1 or not np.array_equal(its, np.arange(T + 1)):
        raise ContractViolation("weighted_average needs a trace recorded at every iteration")
    eta = schedule.steps(T) if isinstance(schedule, StepSchedule) else np.asarray(schedule, dtype=float)[:T]
    return (eta[:, None] * trace.iterates[:T]).sum(axis=0) / eta.sum()


@dataclass
class MonteCarloResult:
    """Per-checkpoint statistics over independent trials.

    ``mean`` has shape (C, n). ``sq_dist``/``sq_dist_se`` are the mean and
    standard error of ``||z^(t) - z*||^2`` (present when a reference is given).
    ``iterates`` keeps the raw (trials, C, n) array.
    """

    iterations: np.ndarray
    mean: np.ndarray
    mean_se: np.ndarray
    iterates: np.ndarray
    seeds: list
    steps: np.ndarray
    record_every: int
    sq_dist: np.ndarray = None
    sq_dist_se: np.ndarray = None

    @property
    def trials(self):
        return self.iterates.shape[0]

    def trace(self, obj, k, reference=None):
        return _make_trace(obj, self.iterations, self.iterates[k], self.steps, reference, self.record_every)


def standard_error(samples, axis=0):
    """Standard error of the mean; for complex data uses ``E|x - mean|^2``."""
    x = np.asarray(samples)
    N = x.shape[axis]
    dev = x - x.mean(axis=axis, keepdims=True)
    return np.sqrt(np.sum(np.abs(dev) ** 2, axis=axis) / (N - 1) / N)


def monte_carlo(obj, z0, cfg, trials, reference=None):
    """Run ``trials`` independent SGD runs; trial ``k`` uses ``derive_seed(cfg.seed, k)``."""
    if int(trials) < 2:
        raise ContractViolation("monte_carlo needs at least 2 trials")
    seeds = [derive_seed(cfg.seed, k) for k in range(int(trials))]
    iters, Z, steps = _simulate(obj, z0, cfg, seeds)
    result = MonteCarloResult(iters, Z.mean(axis=0), standard_error(Z), Z, seeds, steps, cfg.record_every)
    if reference is not None:
        reference = check_complex_vector(reference, "reference")
        d2 = np.sum(np.abs(Z - reference) ** 2, axis=2)
        result.sq_dist = d2.mean(axis=0)
        result.sq_dist_se = standard_error(d2)
    return result


@dataclass(frozen=True)
class ProblemConstants:
    """Constants entering the convergence bounds.

    ``sigma_star`` is ``E||grad f(z*)||^2`` and ``sigma2`` a variance bound.
    """

    L: float
    mu: float = 0.0
    sigma_star: float = 0.0
    sigma2: float = 0.0
    F0: float = 0.0
    F_star: float = 0.0


THEOREM_CHECKS = ("avg_iterate", "strongly_convex", "stationary")


def theorem_bound(check, consts, schedule, z0, z_star, horizons):
    """Right-hand sides of the three convergence bounds.

    ``avg_iterate``
        ``E[F(avg_T) - F*] <= ||z0 - z*||^2 / S1 + 2 sigma_* S2 / S1`` with
        ``S1 = sum eta_t``, ``S2 = sum eta_t^2`` over ``t < T``; needs
        ``eta_t < 1/(4L)``. ``horizons`` are the values of ``T``.
    ``strongly_convex``
        ``E||z^(t) - z*||^2 <= (1 - c mu)^t ||z0 - z*||^2 + sigma_* / (2 L^2 c mu)``
        with ``c = min eta``; for a constant step the noise term is
        ``2 sigma_* eta / mu``. Needs ``c <= eta_t < 1/(2L)``. ``horizons`` are
        iteration indices ``t``.
    ``stationary``
        ``min_{t<T} E||grad F(z^(t))||^2 <= (2 (F0 - F*) + L sigma^2 S2) / S1``;
        equals ``(2 L (F0 - F*) + sigma^2) / sqrt(T)`` for ``eta = 1/(L sqrt T)``.
        Needs ``eta_t <= 1/L``.

    Raises
    ------
    ContractViolation
        The schedule breaks the bound's step-size condition.
    """
    if check not in THEOREM_CHECKS:
        raise ContractViolation(f"check must be one of {THEOREM_CHECKS}")
    horizons = np.atleast_1d(np.asarray(horizons, dtype=int))
    z0 = check_complex_vector(z0, "z0")
    z_star = check_complex_vector(z_star, "z_star")
    d0 = float(np.linalg.norm(z0 - z_star) ** 2)
    L = consts.L
    Tmax = int(horizons.max()) if check != "strongly_convex" else max(int(horizons.max()), 1)
    eta = schedule.steps(Tmax)

    if check == "avg_iterate":
        if np.any(eta >= 1.0 / (4.0 * L)):
            raise ContractViolation("avg_iterate bound needs eta_t < 1/(4L)")
        out = []
        for T in horizons:
            S1, S2 = eta[:T].sum(), (eta[:T] ** 2).sum()
            out.append(d0 / S1 + 2.0 * consts.sigma_star * S2 / S1)
        return np.array(out)

    if check == "strongly_convex":
        if consts.mu <= 0:
            raise ContractViolation("strongly_convex bound needs mu > 0")
        if np.any(eta >= 1.0 / (2.0 * L)):
            raise ContractViolation("strongly_convex bound needs eta_t < 1/(2L)")
        c = float(eta.min())
        if schedule.kind == "constant":
            noise = 2.0 * consts.sigma_star * schedule.eta / consts.mu
        else:
            noise = consts.sigma_star / (2.0 * L**2 * c * consts.mu)
        return (1.0 - c * consts.mu) ** horizons * d0 + noise

    if np.any(eta > 1.0 / L * (1 + 1e-12)):
        raise ContractViolation("stationary bound needs eta_t <= 1/L")
    out = []
    for T in horizons:
        S1, S2 = eta[:T].sum(), (eta[:T] ** 2).sum()
        out.append((2.0 * (consts.F0 - consts.F_star) + L * consts.sigma2 * S2) / S1)
    return np.array(out)


def with_seed(cfg, seed):
    return replace(cfg, seed=seed)
