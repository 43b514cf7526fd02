"""Command-line experiment runner.

Usage::

    csgd fock  [--config FILE] [--out DIR] [--n 40 --a 2 --lam 1 --T 200000 ...]
    csgd rbf   ...
    csgd hardy [--roots 50 --root_seed 0 --T 1000000 ...]
    csgd bias  [--m 10 --n 3 --trials 2000 --noise 0 ...]
    csgd verify

Settings come from built-in defaults, then the ``[<subcommand>]`` section of
the INI file given by ``--config``, then command-line flags of the same name.
Output goes to ``--out``, else ``$CSGD_OUTPUT_DIR/<subcommand>``, else
``./csgd-output/<subcommand>``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 verification failure.
"""

import argparse
import configparser
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bias import BiasExperiment, run_bias
from .exceptions import CSGDError, ConfigError, NumericalError, SamplingError
from .experiments import circle_grid, hardy_grid, real_grid, recover, superosc_grid
from .linalg import svd
from .rng import SplitMix64
from .scenarios import SuperoscParams, build_blaschke, build_rbf_supershift, build_superosc, sample_disk_roots
from .verify import run_suites

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 2, 3, 4
ENV_OUTPUT = "CSGD_OUTPUT_DIR"


def _int(text):
    x = float(text)
    if x != int(x):
        raise ValueError(f"{text!r} is not an integer")
    return int(x)


def _opt_int(text):
    if str(text).strip().lower() in ("", "none", "auto"):
        return None
    return _int(text)


def _opt_float(text):
    if str(text).strip().lower() in ("", "none", "auto"):
        return None
    return float(text)


_RECOVERY = {
    "T": (_int, 200000),
    "seed": (_int, 0),
    "eta": (_opt_float, None),
    "record_every": (_opt_int, None),
    "tol": (_opt_float, None),
    "lam": (float, 1.0),
}
_SUPEROSC = {
    **_RECOVERY,
    "n": (_int, 40),
    "a": (float, 2.0),
    "x_min": (float, -10.0),
    "x_max": (float, 10.0),
    "points": (_int, 1001),
}

SCHEMAS = {
    "fock": _SUPEROSC,
    "rbf": {**_SUPEROSC, "T": (_int, 1000000), "tol": (_opt_float, 1e-14)},
    "hardy": {
        **_RECOVERY,
        "T": (_int, 1000000),
        "record_every": (_int, 1000),
        "tol": (_opt_float, 1e-14),
        "roots": (_int, 50),
        "root_seed": (_int, 0),
        "r_min": (float, 0.8),
        "r_max": (float, 0.9),
        "min_sep": (float, 0.05),
        "circle_points": (_int, 512),
    },
    "bias": {
        "m": (_int, 10),
        "n": (_int, 3),
        "eta": (_opt_float, None),
        "scale": (_opt_float, None),
        "T": (_int, 100),
        "trials": (_int, 2000),
        "seed": (_int, 0),
        "noise": (float, 0.0),
    },
    "verify": {"seed": (_int, 0)},
}

CONVERGENCE_HEADER = ["iteration", "relative_residual", "relative_coefficient_error"]
COEFFICIENT_HEADER = ["j", "exact_real", "exact_imag", "recovered_real", "recovered_imag"]
SUPEROSC_GRID_HEADER = ["x", "closed_real", "closed_imag", "sgd_real", "sgd_imag", "limit_real", "limit_imag"]
HARDY_GRID_HEADER = ["theta", "exact_real", "exact_imag", "recovered_real", "recovered_imag", "modulus_difference"]
BIAS_HEADER = ["k", "t", "est_real", "est_imag", "pred_real", "pred_imag", "stderr", "eps_norm"]


def fmt(x):
    """Round-trippable text for a number (17 significant digits)."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def resolve_settings(command, args):
    """Merge defaults, the config file section and explicit flags."""
    schema = SCHEMAS[command]
    raw = {key: default for key, (_, default) in schema.items()}
    if args.config is not None:
        parser = configparser.ConfigParser()
        parser.optionxform = str
        if not parser.read(args.config):
            raise ConfigError(f"cannot read config file {args.config}")
        if parser.has_section(command):
            for key, value in parser.items(command):
                if key not in schema:
                    raise ConfigError(f"unknown key {key!r} in [{command}] of {args.config}")
                raw[key] = value
    for key in schema:
        flag = getattr(args, key, None)
        if flag is not None:
            raw[key] = flag
    out = {}
    for key, value in raw.items():
        conv = schema[key][0]
        try:
            out[key] = value if value is None or not isinstance(value, str) else conv(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return out


def output_dir(command, args):
    if args.out is not None:
        path = Path(args.out)
    elif os.environ.get(ENV_OUTPUT):
        path = Path(os.environ[ENV_OUTPUT]) / command
    else:
        path = Path("csgd-output") / command
    path.mkdir(parents=True, exist_ok=True)
    return path


def _check_positive_ints(cfg, keys):
    for key in keys:
        if cfg[key] is not None and cfg[key] < 1:
            raise ConfigError(f"{key} must be >= 1, got {cfg[key]}")


def _write_recovery(out, result):
    write_csv(
        out / "convergence.csv",
        CONVERGENCE_HEADER,
        zip(result.iterations, result.relative_residual, result.relative_coefficient_error),
    )
    exact = result.dataset.exact_coeffs
    write_csv(
        out / "coefficients.csv",
        COEFFICIENT_HEADER,
        ((j, e.real, e.imag, r.real, r.imag) for j, (e, r) in enumerate(zip(exact, result.coeffs))),
    )


def _recovery_summary(result):
    return {
        "iterations": int(result.iterations[-1]),
        "eta": result.eta,
        "self_consistency": result.dataset.self_consistency(),
        "relative_residual": float(result.relative_residual[-1]),
        "relative_coefficient_error": result.final_error,
    }


def cmd_superosc(command, cfg, out):
    _check_positive_ints(cfg, ("T", "record_every", "points"))
    params = SuperoscParams(cfg["n"], cfg["a"], cfg["lam"])
    ds = build_superosc(params) if command == "fock" else build_rbf_supershift(params)
    result = recover(ds, cfg["T"], cfg["seed"], cfg["eta"], cfg["record_every"], cfg["tol"])
    _write_recovery(out, result)
    x = real_grid(cfg["x_min"], cfg["x_max"], cfg["points"])
    closed, rec, limit = superosc_grid(result, x)
    write_csv(
        out / "function_grid.csv",
        SUPEROSC_GRID_HEADER,
        zip(x, closed.real, closed.imag, rec.real, rec.imag, limit.real, limit.imag),
    )
    summary = _recovery_summary(result)
    summary["max_function_error"] = float(np.max(np.abs(rec - closed)) / np.max(np.abs(closed)))
    return summary


def cmd_hardy(command, cfg, out):
    _check_positive_ints(cfg, ("T", "record_every", "roots", "circle_points"))
    roots = sample_disk_roots(cfg["roots"], cfg["root_seed"], cfg["r_min"], cfg["r_max"], cfg["min_sep"])
    ds = build_blaschke(roots, cfg["lam"])
    result = recover(ds, cfg["T"], cfg["seed"], cfg["eta"], cfg["record_every"], cfg["tol"])
    _write_recovery(out, result)
    theta = circle_grid(cfg["circle_points"])
    exact, rec, diff = hardy_grid(result, theta)
    write_csv(out / "function_grid.csv", HARDY_GRID_HEADER, zip(theta, exact.real, exact.imag, rec.real, rec.imag, diff))
    summary = _recovery_summary(result)
    summary["max_modulus_difference"] = float(np.max(diff))
    return summary


def bias_instance(m, n, seed, noise):
    """Random complex ``m x n`` system; ``noise > 0`` adds a residual orthogonal to the range."""
    rng = SplitMix64(seed)
    A = rng.complex_normal((m, n))
    b = A @ rng.complex_normal(n)
    if noise > 0:
        U = svd(A).left_vectors
        g = rng.complex_normal(m)
        e = g - U @ (U.conj().T @ g)
        b = b + noise * e / np.linalg.norm(e)
    return A, b


def cmd_bias(command, cfg, out):
    _check_positive_ints(cfg, ("m", "n", "T"))
    if cfg["trials"] < 2:
        raise ConfigError("trials must be >= 2")
    A, b = bias_instance(cfg["m"], cfg["n"], cfg["seed"], cfg["noise"])
    scale = cfg["scale"] if cfg["scale"] is not None else float(cfg["n"])
    eta = cfg["eta"]
    if eta is None:
        eta = 0.5 * cfg["m"] / (scale * svd(A).singular_values[0] ** 2)
    exp = BiasExperiment(A, b, np.zeros(cfg["n"]), eta, scale=scale, T=cfg["T"], trials=cfg["trials"], seed=cfg["seed"])
    prof = run_bias(exp)
    rows = (
        (k, t, est.real, est.imag, pred.real, pred.imag, se, prof.eps_norm)
        for k, t, est, pred, se in prof.rows()
    )
    write_csv(out / "bias_profile.csv", BIAS_HEADER, rows)
    return {
        "eta": float(eta),
        "scale": scale,
        "eps_norm": prof.eps_norm,
        "rates": [float(r) for r in prof.rates],
        "within_3se": bool(prof.within(3.0).all()),
    }


def cmd_verify(command, cfg, out):
    report = run_suites(seed=cfg["seed"])
    with open(out / "verify_report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, suite in report["suites"].items():
        for row in suite["checks"]:
            print(f"{'PASS' if row['passed'] else 'FAIL'}  {name}/{row['check']}: {row['detail']}")
    return {"passed": report["passed"]}


COMMANDS = {"fock": cmd_superosc, "rbf": cmd_superosc, "hardy": cmd_hardy, "bias": cmd_bias, "verify": cmd_verify}


def build_parser():
    parser = argparse.ArgumentParser(prog="csgd", description="Complex SGD kernel recovery experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in SCHEMAS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI file; keys are read from the [%s] section" % name)
        p.add_argument("--out", help=f"output directory (default ${ENV_OUTPUT}/{name})")
        for key in schema:
            p.add_argument(f"--{key}", default=None, metavar=key.upper())
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_settings(args.command, args)
        out = output_dir(args.command, args)
        summary = COMMANDS[args.command](args.command, cfg, out)
    except (NumericalError, SamplingError) as exc:
        print(f"csgd {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CSGDError as exc:
        print(f"csgd {args.command}: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    summary = {"command": args.command, "settings": cfg, **summary}
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(summary, sort_keys=True))
    if args.command == "verify" and not summary["passed"]:
        return EXIT_ACCEPTANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
