"""Scikit-learn style estimators on top of the complex SGD engine."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_complex_matrix, check_complex_vector, check_positive, check_same_length
from .kernels import KernelSpec, expansion_eval, gram
from .objectives import LeastSquaresObjective
from .sgd import RunConfig, StepSchedule, run
from .experiments import pick_step


def _check_fitted(est, attr):
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


class ComplexSGDRegressor(RegressorMixin, BaseEstimator):
    """Complex linear least squares ``min ||X w - y||`` solved by SGD.

    Parameters
    ----------
    update_rule : {"row_normalized", "plain", "kaczmarz"}
    eta : float or None
        Constant step. ``None`` picks 1.0 for normalized rules, falling back
        to 0.5 if the first 100 steps diverge; for ``plain`` it uses
        ``1 / (2 L)`` with ``L`` the component smoothness.
    max_iter : int
    tol : float or None
        Stop once ``||X w - y|| <= tol ||y||`` at a checkpoint.
    random_state : int
    record_every : int or None

    Attributes
    ----------
    coef_ : ndarray of complex, shape (n_features,)
    n_iter_ : int
    eta_ : float
    trace_ : Trace
    """

    def __init__(self, update_rule="row_normalized", eta=None, max_iter=100000, tol=1e-12, random_state=0, record_every=None):
        self.update_rule = update_rule
        self.eta = eta
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state
        self.record_every = record_every

    def fit(self, X, y):
        X = check_complex_matrix(X, "X")
        y = check_complex_vector(y, "y")
        check_same_length(X, y, ("X", "y"))
        obj = LeastSquaresObjective(X, y)
        z0 = np.zeros(X.shape[1], dtype=np.complex128)
        if self.update_rule == "plain":
            eta = self.eta if self.eta is not None else 0.5 / obj.smoothness()
        elif self.update_rule == "kaczmarz":
            eta = 1.0
        else:
            eta = pick_step(obj, z0, self.random_state, self.eta)
        cfg = RunConfig(
            T=int(self.max_iter),
            seed=self.random_state,
            schedule=StepSchedule.constant(eta),
            update_rule=self.update_rule,
            record_every=self.record_every,
        )
        stop = None
        if self.tol is not None:
            limit = check_positive(self.tol, "tol") * np.linalg.norm(y)
            stop = lambda z: np.linalg.norm(obj.residual(z)) <= limit
        self.trace_ = run(obj, z0, cfg, stop=stop)
        self.coef_ = self.trace_.final
        self.n_iter_ = int(self.trace_.iterations[-1])
        self.eta_ = float(eta)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        _check_fitted(self, "coef_")
        X = check_complex_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.coef_

    def score(self, X, y, sample_weight=None):
        """Complex coefficient of determination ``1 - ||y - y_hat||^2 / ||y - mean(y)||^2``."""
        y = check_complex_vector(y, "y")
        r = y - self.predict(X)
        d = y - y.mean()
        return float(1.0 - np.vdot(r, r).real / np.vdot(d, d).real)


class KernelSGDRegressor(RegressorMixin, BaseEstimator):
    """Regularized kernel regression on complex data with an SGD solver.

    The fitted function is ``f(z) = offset + sum_j alpha_j k(z, z_j)`` with
    ``(K + lam I) alpha = y - offset``, solved row by row with normalized SGD.

    Parameters
    ----------
    kernel : {"fock", "rbf", "hardy"}
    gamma : float
        RBF width, ignored otherwise.
    lam : float
    offset : complex
        Known constant term ``c0``; targets are shifted by it before fitting.
    eta : float or None
    max_iter : int
    tol : float or None
    random_state : int

    Attributes
    ----------
    dual_coef_ : ndarray of complex
    nodes_ : ndarray of complex
    n_iter_ : int
    """

    def __init__(self, kernel="fock", gamma=np.sqrt(2.0), lam=1.0, offset=0.0, eta=None, max_iter=200000, tol=1e-14, random_state=0):
        self.kernel = kernel
        self.gamma = gamma
        self.lam = lam
        self.offset = offset
        self.eta = eta
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def _spec(self):
        if self.kernel == "rbf":
            return KernelSpec.gaussian_rbf(self.gamma)
        return KernelSpec(self.kernel)

    def fit(self, z, y):
        z = check_complex_vector(np.ravel(z), "z")
        y = check_complex_vector(y, "y")
        check_same_length(z, y, ("z", "y"))
        lam = check_positive(self.lam, "lam")
        gs = gram(self._spec(), z, lam)
        solver = ComplexSGDRegressor(
            update_rule="row_normalized", eta=self.eta, max_iter=self.max_iter, tol=self.tol, random_state=self.random_state
        )
        solver.fit(gs.H, y - complex(self.offset))
        self.nodes_ = gs.nodes
        self.dual_coef_ = solver.coef_
        self.n_iter_ = solver.n_iter_
        self.trace_ = solver.trace_
        return self

    def predict(self, z):
        _check_fitted(self, "dual_coef_")
        z = np.asarray(z, dtype=np.complex128)
        return expansion_eval(self._spec(), self.nodes_, self.dual_coef_, z.ravel(), self.offset).reshape(z.shape)

    def score(self, z, y, sample_weight=None):
        y = check_complex_vector(y, "y")
        r = y - self.predict(z)
        d = y - y.mean()
        return float(1.0 - np.vdot(r, r).real / np.vdot(d, d).real)


__all__ = ["ComplexSGDRegressor", "KernelSGDRegressor"]
