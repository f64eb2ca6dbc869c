"""Command-line interface: ``thomson-vstates <command> [options]``.

Commands: ``omega``, ``points``, ``vstate-solve`` (alias ``solve``),
``vstate-validate`` and ``spectrum``.  Options may also come from a JSON
file given with ``--config``; explicit flags win.  Data files contain no
timestamps; run metadata goes to a ``.meta.json`` sidecar.  The exit code is
0 exactly when every validation passed.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import platform
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .harmonic_core import PolygonModel, make_grid
from .linear_theory import (
    gamma_coeffs,
    linearized_sqg_quadrature,
    mode_integrals_quadrature,
    spectrum_table,
)
from .point_vortex import (
    IntegrationBlowUp,
    integrate_points,
    newtonian,
    omega0,
    rotation_error,
    sqg_interaction,
    thomson_polygon,
    write_trajectory_csv,
)
from .vstate_solver import (
    ContinuationError,
    continuation,
    default_settings,
    max_epsilon,
    patch_contours,
    validate_vstate,
    vstate_from_json,
    vstate_to_json,
    write_contours_csv,
)

EXIT_OK = 0
EXIT_FAILED_VALIDATION = 1
EXIT_BAD_INPUT = 2
EXIT_DIVERGED = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_BAD_INPUT):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _write_meta(path: Path, args: argparse.Namespace, extra: dict | None = None) -> None:
    meta = {
        "command": args.command,
        "config": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")},
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "created_unix": time.time(),
        "patch_amplitude": "1/(pi eps^2)",
    }
    if extra:
        meta.update(extra)
    _write_text(path, _dump(meta))


def _model(args: argparse.Namespace) -> PolygonModel:
    try:
        return PolygonModel(args.n, args.l, args.kind, args.beta if args.kind == "sqg" else None, args.cbeta)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=None, help="number of patches / vortices")
    p.add_argument("--l", type=float, default=1.0, help="polygon radius")
    p.add_argument("--kind", choices=("euler", "sqg"), default="euler")
    p.add_argument("--beta", type=float, default=None, help="SQG exponent in (0, 1)")
    p.add_argument("--cbeta", choices=("printed", "standard"), default="printed",
                   help="normalization constant variant for the SQG kernel")


def _require_n(args: argparse.Namespace) -> None:
    if args.n is None:
        raise CliError("--n is required")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_omega(args: argparse.Namespace) -> int:
    _require_n(args)
    model = _model(args)
    doc: dict = {"N": model.N, "l": model.l, "kind": model.kind}
    if model.kind == "sqg":
        doc["beta"] = model.beta
        doc["cbeta"] = model.cbeta
    doc["omega"] = omega0(model)
    text = _dump(doc)
    sys.stdout.write(text)
    if args.output:
        out = Path(args.output)
        _write_text(out, text)
        _write_meta(out.with_suffix(".meta.json"), args)
    return EXIT_OK


def cmd_points(args: argparse.Namespace) -> int:
    _require_n(args)
    model = _model(args)
    inter = newtonian() if model.kind == "euler" else sqg_interaction(model.beta, model.cbeta)
    om = omega0(model)
    period = 2.0 * math.pi / abs(om)
    if args.divisions < 1 or args.periods <= 0:
        raise CliError("--divisions must be >= 1 and --periods > 0")
    steps = int(round(args.divisions * args.periods))
    dt = period / args.divisions
    cfg = thomson_polygon(model.N, model.l, inter)
    try:
        traj = integrate_points(cfg, dt, steps)
    except IntegrationBlowUp as exc:
        raise CliError(str(exc), EXIT_DIVERGED) from exc
    err = float(rotation_error(traj, om)[-1])
    summary = {
        "N": model.N,
        "l": model.l,
        "kind": model.kind,
        "omega": om,
        "period": period,
        "dt": dt,
        "steps": steps,
        "closure_error": err,
        "energy_drift": traj.energy_drift,
        "center_drift": traj.center_drift(),
        "closure_tol": args.closure_tol,
        "passed": err < args.closure_tol,
    }
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="\n") as fh:
        write_trajectory_csv(traj, fh, every=args.every)
    _write_text(out.with_suffix(".summary.json"), _dump(summary))
    _write_meta(out.with_suffix(".meta.json"), args)
    sys.stdout.write(_dump(summary))
    return EXIT_OK if summary["passed"] else EXIT_FAILED_VALIDATION


def cmd_solve(args: argparse.Namespace) -> int:
    _require_n(args)
    model = _model(args)
    if args.eps is None or args.eps <= 0:
        raise CliError("--eps must be given and positive")
    emax = max_epsilon(model)
    if args.eps >= emax:
        raise CliError(f"--eps {args.eps} exceeds the patch-disjointness radius {emax:.4g}")
    settings = default_settings(
        model, M=args.M, M_nodes=args.M_nodes, tol=args.tol, quadrature=args.quadrature, workers=args.workers
    )
    if settings.M > make_grid(settings.M_nodes).max_modes:
        raise CliError(f"--M {settings.M} too large for --M-nodes {settings.M_nodes}")
    try:
        run = continuation(model, args.eps, args.steps, settings)
    except ContinuationError as exc:
        raise CliError(str(exc), EXIT_DIVERGED) from exc
    final = run.states[-1]
    report = validate_vstate(final, args.validate_factor * settings.M_nodes, settings)
    validated = type(final)(**{**final.__dict__, "pointwise_residual": report.pointwise_residual})
    ok = report.passed and run.complete
    prefix = Path(args.output)
    summary = {
        "complete": run.complete,
        "halted": run.halted,
        "empirical_eps0": run.empirical_eps0,
        "validation": {
            "M_nodes": report.M_nodes,
            "pointwise_residual": report.pointwise_residual,
            "omega_drift": report.omega_drift,
            "tolerance": report.tolerance,
            "passed": report.passed,
        },
        "branch": [
            {
                "epsilon": s.epsilon,
                "omega": s.omega,
                "max_abs_coefficient": float(np.max(np.abs(s.shape.a))),
                "iterations": s.iterations,
                "projected_residual": s.projected_residual,
            }
            for s in run.states
        ],
    }
    sys.stdout.write(_dump({k: summary[k] for k in ("complete", "halted", "empirical_eps0", "validation")}))
    if not ok and not args.force:
        sys.stderr.write("final state not validated; nothing written (use --force to write anyway)\n")
        return EXIT_DIVERGED if not run.complete else EXIT_FAILED_VALIDATION
    _write_text(prefix.with_suffix(".json"), vstate_to_json(validated))
    with open(prefix.with_name(prefix.name + "_contours.csv"), "w", newline="\n") as fh:
        write_contours_csv(patch_contours(validated, args.samples), fh)
    _write_text(prefix.with_name(prefix.name + "_run.json"), _dump(summary))
    _write_meta(prefix.with_suffix(".meta.json"), args)
    if ok:
        return EXIT_OK
    return EXIT_DIVERGED if not run.complete else EXIT_FAILED_VALIDATION


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        v = vstate_from_json(Path(args.input).read_text())
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(f"cannot read V-state: {exc}") from exc
    settings = default_settings(v.model, M_nodes=args.M_nodes, quadrature=args.quadrature)
    fine = args.factor * settings.M_nodes
    rep = validate_vstate(v, fine, settings)
    doc = {
        "M_nodes": rep.M_nodes,
        "pointwise_residual": rep.pointwise_residual,
        "omega_drift": rep.omega_drift,
        "tolerance": rep.tolerance,
        "passed": rep.passed,
    }
    sys.stdout.write(_dump(doc))
    if args.output:
        _write_text(Path(args.output), _dump(doc))
    return EXIT_OK if rep.passed else EXIT_FAILED_VALIDATION


def cmd_spectrum(args: argparse.Namespace) -> int:
    if args.beta is None:
        raise CliError("--beta is required")
    try:
        table = spectrum_table(args.beta, args.n_max, args.cbeta)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    ok = table.all_positive and table.c0 > 0
    verify = None
    if args.verify:
        rows = []
        for n in range(1, min(args.n_max, 10) + 1):
            g1, g2, _ = mode_integrals_quadrature(args.beta, n, args.verify_nodes, variant=args.cbeta)
            c1, c2 = gamma_coeffs(args.beta, n, args.cbeta)
            d = linearized_sqg_quadrature(args.beta, n, args.verify_nodes, args.cbeta)
            dc = table.rows[n - 1].diagonal
            err = max(abs(g1 - c1) / abs(c1), abs(g2 - c2) / abs(c2), abs(d - dc) / abs(dc))
            rows.append({"n": n, "max_relative_error": err})
        worst = max(r["max_relative_error"] for r in rows)
        verify = {"M_nodes": args.verify_nodes, "tolerance": 1e-5, "rows": rows, "passed": worst < 1e-5}
        ok = ok and verify["passed"]
    prefix = Path(args.output)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    with open(prefix.with_suffix(".csv"), "w", newline="\n") as fh:
        table.write_csv(fh)
    doc = json.loads(table.to_json())
    if verify is not None:
        doc["verify"] = verify
    _write_text(prefix.with_suffix(".json"), _dump(doc))
    _write_meta(prefix.with_suffix(".meta.json"), args)
    sys.stdout.write(_dump({"beta": table.beta, "n_max": args.n_max, "c0": table.c0,
                            "all_positive": table.all_positive, "verify": verify}))
    return EXIT_OK if ok else EXIT_FAILED_VALIDATION


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thomson-vstates", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("omega", help="angular velocity of the point-vortex polygon")
    _add_model_args(p)
    p.add_argument("--output", default=None, help="optional JSON output file")
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("points", help="RK4 integration of the point-vortex polygon")
    _add_model_args(p)
    p.add_argument("--periods", type=float, default=1.0)
    p.add_argument("--divisions", type=int, default=4096, help="time steps per period")
    p.add_argument("--every", type=int, default=64, help="write every k-th step")
    p.add_argument("--closure-tol", type=float, default=1e-8)
    p.add_argument("--output", default="points.csv")
    p.set_defaults(func=cmd_points)

    for name, aliases in (("vstate-solve", ["solve"]),):
        p = sub.add_parser(name, aliases=aliases, help="Newton continuation for rotating patches")
        _add_model_args(p)
        p.add_argument("--eps", type=float, default=None, help="final patch size")
        p.add_argument("--steps", type=int, default=10, help="continuation steps")
        p.add_argument("--M", type=int, default=None, help="shape modes (default 32 Euler, 24 SQG)")
        p.add_argument("--M-nodes", dest="M_nodes", type=int, default=None,
                       help="collocation nodes (default 128 Euler, 512 SQG)")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--quadrature", choices=("spectral", "subtract", "plain"), default=None,
                       help="singular-integral rule for SQG")
        p.add_argument("--workers", type=int, default=None, help="threads for Jacobian columns")
        p.add_argument("--validate-factor", type=int, default=4)
        p.add_argument("--samples", type=int, default=256, help="contour points per patch")
        p.add_argument("--force", action="store_true", help="write unvalidated results")
        p.add_argument("--output", default="vstate", help="output prefix")
        p.set_defaults(func=cmd_solve, command="vstate-solve")

    p = sub.add_parser("vstate-validate", help="re-check a saved V-state on a finer grid")
    p.add_argument("--input", required=True)
    p.add_argument("--M-nodes", dest="M_nodes", type=int, default=None)
    p.add_argument("--factor", type=int, default=4)
    p.add_argument("--quadrature", choices=("spectral", "subtract", "plain"), default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("spectrum", help="diagonal of the linearized SQG functional")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=20)
    p.add_argument("--cbeta", choices=("printed", "standard"), default="printed")
    p.add_argument("--verify", action="store_true", help="compare against brute-force quadrature")
    p.add_argument("--verify-nodes", dest="verify_nodes", type=int, default=4096)
    p.add_argument("--output", default="spectrum")
    p.set_defaults(func=cmd_spectrum)

    # aliases share a parser object
    for sp in {id(v): v for v in sub.choices.values()}.values():
        sp.add_argument("--config", default=None, help="JSON file of option defaults")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliError("config file must hold a JSON object")
    known = set(vars(args))
    unknown = sorted(set(k.replace("-", "_") for k in cfg) - known)
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(unknown)}")
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sp = sub.choices[argv[[i for i, t in enumerate(argv) if t in sub.choices][0]]]
    sp.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        logging.basicConfig(
            level=logging.WARNING - 10 * min(args.verbose, 2),
            format="%(levelname)s %(name)s: %(message)s",
        )
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
