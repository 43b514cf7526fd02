"""Invariant suites run by ``csgd verify``.

Each check returns ``(passed, detail)``; :func:`run_suites` collects them into
a JSON-serializable report.
"""

import numpy as np

from .bias import BiasExperiment, run_bias
from .kernels import KernelSpec, expansion_eval, gram, kernel_matrix, representer_solve
from .linalg import hermitian_eig, inner, solve_hpd, svd
from .objectives import LeastSquaresObjective, RegularizedLSObjective, assumption_audit, fd_wirtinger_gradient
from .rng import SplitMix64
from .scenarios import (
    SuperoscParams,
    blaschke_eval,
    build_blaschke,
    build_rbf_supershift,
    build_superosc,
    sample_disk_roots,
    superosc_frequencies,
)
from .sgd import RunConfig, StepSchedule, monte_carlo, run


def _rel(x, y):
    return float(np.linalg.norm(np.asarray(x) - np.asarray(y)) / max(np.linalg.norm(y), 1e-300))


def _hermitian(rng, n):
    X = rng.complex_normal((n, n))
    return X + X.conj().T


def check_inner_symmetry(rng):
    worst = 0.0
    for _ in range(100):
        z, w = rng.complex_normal(6), rng.complex_normal(6)
        worst = max(worst, abs(inner(z, w) - np.conj(inner(w, z))))
    return worst <= 1e-14, f"max |<z,w> - conj<w,z>| = {worst:.2e}"


def check_eig_reconstruction(rng):
    worst = 0.0
    for n in (2, 5, 9):
        H = _hermitian(rng, n)
        lam, V = hermitian_eig(H)
        worst = max(worst, np.linalg.norm(V @ np.diag(lam) @ V.conj().T - H) / np.linalg.norm(H))
    return worst <= 1e-10, f"max relative reconstruction error {worst:.2e}"


def check_svd_vs_eig(rng):
    worst = 0.0
    for m, n in ((4, 3), (12, 8), (6, 6)):
        A = rng.complex_normal((m, n))
        s = svd(A).singular_values
        lam = hermitian_eig(A.conj().T @ A)[0][::-1]
        worst = max(worst, _rel(s, np.sqrt(np.clip(lam, 0, None))))
    return worst <= 1e-8, f"max relative gap {worst:.2e}"


def check_hpd_solve(rng):
    worst = 0.0
    for cond in (1.0, 1e3, 1e6):
        Q = svd(rng.complex_normal((8, 8))).left_vectors
        H = Q @ np.diag(np.geomspace(1.0, cond, 8)) @ Q.conj().T
        H = 0.5 * (H + H.conj().T)
        y = rng.complex_normal(8)
        worst = max(worst, _rel(H @ solve_hpd(H, y), y))
    return worst <= 1e-10, f"max relative residual {worst:.2e}"


def check_gradients(rng):
    worst = 0.0
    for k in range(20):
        A, b = rng.complex_normal((5, 3)), rng.complex_normal(5)
        if k % 2:
            W = A.conj().T @ A
            obj = RegularizedLSObjective(W, rng.complex_normal(3), lam=0.7)
        else:
            obj = LeastSquaresObjective(A, b)
        z = rng.complex_normal(3)
        worst = max(worst, _rel(obj.grad_full(z), fd_wirtinger_gradient(obj.eval_full, z)))
    return worst <= 1e-6, f"max relative gap to finite differences {worst:.2e}"


def check_unbiased(rng):
    A, b = rng.complex_normal((5, 3)), rng.complex_normal(5)
    obj = LeastSquaresObjective(A, b)
    z = rng.complex_normal(3)
    mean = np.mean([obj.grad_component(j, z) for j in range(5)], axis=0)
    err = _rel(mean, obj.grad_full(z))
    return err <= 1e-12, f"relative gap {err:.2e}"


def check_audit(rng):
    A, b = rng.complex_normal((10, 4)), rng.complex_normal(10)
    rep = assumption_audit(LeastSquaresObjective(A, b), sample_count=200, seed=1)
    return rep.passed, str(rep).splitlines()[0]


def check_determinism(rng):
    A, b = rng.complex_normal((8, 3)), rng.complex_normal(8)
    obj = LeastSquaresObjective(A, b)
    cfg = RunConfig(T=500, seed=11, schedule=StepSchedule.constant(0.5 / obj.smoothness()), record_every=1)
    t1, t2 = run(obj, np.zeros(3), cfg), run(obj, np.zeros(3), cfg)
    same = np.array_equal(t1.iterates, t2.iterates)
    return same, "identical iterates" if same else "iterates differ"


def check_kaczmarz_projection(rng):
    A = rng.complex_normal((6, 3))
    b = A @ rng.complex_normal(3)
    obj = LeastSquaresObjective(A, b)
    T = 40
    tr = run(obj, np.zeros(3), RunConfig(T=T, seed=5, update_rule="kaczmarz", record_every=1))
    # the engine's index stream for seed 5
    idx = SplitMix64(5).integers(6, T)
    res = [abs(A[i] @ tr.iterates[t + 1] - b[i]) for t, i in enumerate(idx)]
    worst = max(res) / np.linalg.norm(b)
    return worst <= 1e-12, f"max residual on the projected row {worst:.2e}"


def check_scalar_recursion(rng):
    obj = LeastSquaresObjective(np.array([[1.0]]), np.array([0.0]), scale=1.0)
    eta, z0 = 0.3, np.array([1.0 + 2.0j])
    tr = run(obj, z0, RunConfig(T=20, schedule=StepSchedule.constant(eta), record_every=1))
    err = _rel(tr.iterates[:, 0], z0[0] * (1 - eta) ** np.arange(21))
    return err <= 1e-14, f"relative gap {err:.2e}"


def check_gram_psd(rng):
    bad = 0
    for _ in range(20):
        zf = 2.0 * rng.complex_normal(6)
        zh = 0.9 * np.sqrt(rng.uniform(6)) * np.exp(2j * np.pi * rng.uniform(6))
        for spec, z in ((KernelSpec.fock(), zf), (KernelSpec.gaussian_rbf(), zf), (KernelSpec.hardy(), zh)):
            try:
                gram(spec, z)
            except Exception:
                bad += 1
    return bad == 0, f"{bad} node sets failed the Hermitian/PSD check"


def check_reproducing(rng):
    z = 0.8 * rng.complex_normal(7)
    alpha = rng.complex_normal(7)
    K = kernel_matrix(KernelSpec.fock(), z, z)
    err = _rel(expansion_eval(KernelSpec.fock(), z, alpha, z, 0.5), K @ alpha + 0.5)
    return err <= 1e-10, f"relative gap {err:.2e}"


def check_representer(rng):
    z = rng.complex_normal(6)
    y = rng.complex_normal(6)
    gs = gram(KernelSpec.gaussian_rbf(), z, lam=0.5)
    alpha = representer_solve(gs, y)
    g = np.linalg.norm(2.0 * gs.K @ (gs.H @ alpha - y))
    bound = 1e-9 * np.linalg.norm(gs.K) * np.linalg.norm(y)
    return g <= bound, f"gradient norm {g:.2e} (bound {bound:.2e})"


def check_scenario_identities(rng):
    p = SuperoscParams(40, 2.0, 1.0)
    sets = {
        "fock": build_superosc(p),
        "rbf": build_rbf_supershift(p),
        "hardy": build_blaschke(sample_disk_roots(50, seed=0)),
    }
    errs = {k: ds.self_consistency() for k, ds in sets.items()}
    ok = all(e <= 1e-8 for e in errs.values())
    return ok, ", ".join(f"{k} {e:.2e}" for k, e in errs.items())


def check_hardy_boundary(rng):
    ds = build_blaschke(sample_disk_roots(50, seed=0))
    z = np.exp(2j * np.pi * np.arange(512) / 512)
    dev = float(np.max(np.abs(np.abs(ds.expansion(ds.exact_coeffs, z, boundary=True)) - 1.0)))
    dev_b = float(np.max(np.abs(np.abs(blaschke_eval(ds.nodes, z)) - 1.0)))
    return max(dev, dev_b) <= 1e-9, f"max ||expansion| - 1| = {dev:.2e}, ||B| - 1| = {dev_b:.2e}"


def check_frequencies(rng):
    f = superosc_frequencies(40)
    return bool(np.all(np.abs(f) <= 1.0)), f"max |frequency| = {np.max(np.abs(f)):.3g} < a = 2"


def check_bias_consistent(rng):
    A = rng.complex_normal((10, 3))
    b = A @ rng.complex_normal(3)
    eta = 0.5 * 10 / (3 * svd(A).singular_values[0] ** 2)
    prof = run_bias(BiasExperiment(A, b, np.zeros(3), eta, T=100, trials=2000, seed=3))
    return bool(prof.within(3.0).all()), f"max deviation / SE = {np.max(prof.deviation()[:, 1:] / prof.stderr[:, 1:]):.2f}"


def check_mc_scalar(rng):
    obj = LeastSquaresObjective(np.array([[1.0]]), np.array([0.0]), scale=1.0)
    mc = monte_carlo(obj, np.array([1.0j]), RunConfig(T=10, schedule=StepSchedule.constant(0.2), record_every=1), 4)
    same = bool(np.all(mc.iterates == mc.iterates[0]))
    return same, f"trials identical: {same}, max standard error {float(np.max(mc.mean_se)):.2e}"


SUITES = {
    "core-linalg": [check_inner_symmetry, check_eig_reconstruction, check_svd_vs_eig, check_hpd_solve],
    "wirtinger-objectives": [check_gradients, check_unbiased, check_audit],
    "sgd-engine": [check_determinism, check_kaczmarz_projection, check_scalar_recursion, check_mc_scalar],
    "rkhs-kernels": [check_gram_psd, check_reproducing, check_representer],
    "scenario-lab": [check_scenario_identities, check_hardy_boundary, check_frequencies],
    "bias-lab": [check_bias_consistent],
}


def run_suites(seed=0, suites=None):
    """Run the selected suites (all by default) and return a report dict."""
    names = list(SUITES) if suites is None else list(suites)
    report = {"seed": int(seed), "suites": {}, "passed": True}
    for name in names:
        rows = []
        for i, check in enumerate(SUITES[name]):
            rng = SplitMix64(seed * 1000 + i)
            try:
                ok, detail = check(rng)
            except Exception as exc:
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            rows.append(
                {
                    "check": check.__name__.removeprefix("check_"),
                    "passed": bool(ok),
                    "detail": detail,
                }
            )
        passed = all(r["passed"] for r in rows)
        report["suites"][name] = {"passed": passed, "checks": rows}
        report["passed"] = report["passed"] and passed
    return report
