"""Command-line front end: ``tdpt-resum run | verify | fit | list-models``.

Exit codes: 0 success, 1 runtime or check failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import jsonschema
import numpy as np

from . import analysis, models
from .engine import TimeGrid, compute_coefficients, integrate_exact

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

ALL_PARAMS = ("omega", "epsilon", "e1", "e2", "e0", "gamma", "omega0", "omega1")

# defaults of the verify command
VERIFY_T_MAX = 50.0
VERIFY_POINTS = 10_000
VERIFY_MAX_ORDER = 3
COEF_TOL = 1e-6
EXACT_TOL = 1e-8
# extra parameter sets beyond each model's defaults
EXTRA_CASES = {
    models.ModelId.SPIN_RESONANCE: [dict(omega0=1.0, omega1=0.02, omega=-0.9)],
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model: str
    params: dict[str, float]
    t_max: float
    n_points: int
    order: int
    output: str
    format: str = "csv"

    def to_dict(self) -> dict:
        return {"model": self.model, "params": dict(self.params),
                "grid": {"t_max": self.t_max, "n_points": self.n_points},
                "order": self.order, "output": self.output, "format": self.format}

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        doc = dict(doc)
        if "model" in doc and isinstance(doc["model"], str):
            try:
                doc["model"] = models.ModelId.parse(doc["model"]).value
            except models.InvalidParamsError as exc:
                raise ConfigError(str(exc)) from None
        try:
            jsonschema.validate(doc, analysis.load_schema("config"))
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "config"
            raise ConfigError(f"{where}: {exc.message}") from None
        try:
            models.make_params(doc["model"], doc["params"])
        except models.InvalidParamsError as exc:
            raise ConfigError(str(exc)) from None
        return cls(doc["model"], {k: float(v) for k, v in doc["params"].items()},
                   float(doc["grid"]["t_max"]), int(doc["grid"]["n_points"]),
                   int(doc["order"]), doc["output"], doc["format"])


def _merge_config(args) -> RunConfig:
    doc: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
    doc = json.loads(json.dumps(doc))
    if args.model is not None:
        doc["model"] = args.model
    params = dict(doc.get("params", {}))
    for name in ALL_PARAMS:
        v = getattr(args, name)
        if v is not None:
            params[name] = v
    doc["params"] = params
    grid = dict(doc.get("grid", {}))
    if args.t_max is not None:
        grid["t_max"] = args.t_max
    if args.points is not None:
        grid["n_points"] = args.points
    doc["grid"] = grid
    if args.order is not None:
        doc["order"] = args.order
    if args.out is not None:
        doc["output"] = args.out
    if args.format is not None:
        doc["format"] = args.format
    if "format" not in doc and isinstance(doc.get("output"), str):
        doc["format"] = "json" if doc["output"].endswith(".json") else "csv"
    return RunConfig.from_dict(doc)


def cmd_run(args) -> int:
    try:
        cfg = _merge_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.print_config:
        print(json.dumps(cfg.to_dict(), indent=2))
        return EXIT_OK
    try:
        report = analysis.compare_methods(cfg.model, TimeGrid(cfg.t_max, cfg.n_points),
                                          cfg.order, params=cfg.params)
        emit = analysis.emit_json if cfg.format == "json" else analysis.emit_csv
        if cfg.output == "-":
            emit(report, sys.stdout)
        else:
            emit(report, cfg.output)
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit 1
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


@dataclass
class Check:
    model: str
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)


def verify_model(model, coef_tol=COEF_TOL, exact_tol=EXACT_TOL, t_max=VERIFY_T_MAX,
                 n_points=VERIFY_POINTS) -> list[Check]:
    """Engine vs closed form and RK4 vs exact amplitude, for every parameter set of ``model``.

    Coefficient errors are max-norm differences divided by
    ``max(1, max|closed form|)``.
    """
    model = models.ModelId.parse(model)
    checks = []
    cases = [models.default_params(model)]
    cases += [models.make_params(model, d) for d in EXTRA_CASES.get(model, [])]
    for p in cases:
        label = model.value if p == cases[0] else f"{model.value}*"
        checks.extend(_verify_case(model, p, label, coef_tol, exact_tol, t_max, n_points))
    return checks


def _verify_case(model, p, label, coef_tol, exact_tol, t_max, n_points):
    spec = models.build_system(model, p)
    grid = TimeGrid(t_max, n_points)
    t = grid.points
    orders = models.closed_form_orders(model) or tuple(range(1, VERIFY_MAX_ORDER + 1))
    table = compute_coefficients(spec, grid, max(orders))
    checks = []
    for r in orders:
        ref = models.closed_form_coefficients(model, p, t, r)
        scale = max(np.max(np.abs(ref)), 1.0)
        err = np.max(np.abs(table.values[r - 1] - ref)) / scale
        checks.append(Check(label, f"engine c^({r})", float(err), coef_tol))
    rk4 = integrate_exact(spec, grid)
    if models.has_exact_closed_form(model, p):
        ref = models.exact_amplitude(model, p, t).interaction
        checks.append(Check(label, "rk4 vs exact", float(np.max(np.abs(rk4 - ref))), exact_tol))
    unit = np.max(np.abs(np.sum(np.abs(rk4) ** 2, axis=1) - 1.0))
    checks.append(Check(label, "rk4 unitarity", float(unit), exact_tol))
    return checks


def cmd_verify(args) -> int:
    try:
        targets = list(models.ModelId) if args.model == "all" else [models.ModelId.parse(args.model)]
    except models.InvalidParamsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    checks = []
    for m in targets:
        checks.extend(verify_model(m, args.coef_tol, args.exact_tol))
    print(f"{'model':<22}{'check':<16}{'error':>12}{'tolerance':>12}  result")
    for c in checks:
        print(f"{c.model:<22}{c.name:<16}{c.error:>12.3e}{c.tolerance:>12.1e}  "
              f"{'PASS' if c.passed else 'FAIL'}")
    failed = [c for c in checks if not c.passed]
    if failed:
        worst = max(failed, key=lambda c: c.error / c.tolerance if c.tolerance else np.inf)
        print(f"worst offender: {worst.model} {worst.name} error={worst.error:.3e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        report = analysis.read_csv(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.state is not None and not 0 <= args.state < report.dim:
        print(f"error: state {args.state} out of range", file=sys.stderr)
        return EXIT_USAGE
    try:
        fit = analysis.secular_fit(report, args.column, args.state or 0, args.tail_fraction)
    except analysis.FitDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(analysis.fit_document(fit)))
    return EXIT_OK


def cmd_list_models(args) -> int:
    for m in models.ModelId:
        print(f"{m.cli_name:<22}{' '.join(models.param_names(m))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdpt-resum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compare naive, resummed and exact probabilities")
    run.add_argument("--config", help="JSON config file; flags override it")
    run.add_argument("--model")
    for name in ALL_PARAMS:
        run.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    run.add_argument("--t-max", type=float)
    run.add_argument("--points", type=int)
    run.add_argument("--order", type=int)
    run.add_argument("--out", help="output path, '-' for stdout")
    run.add_argument("--format", choices=("csv", "json"))
    run.add_argument("--print-config", action="store_true",
                     help="print the resolved config as JSON and exit")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run the closed-form / RK4 oracle checks")
    ver.add_argument("model", nargs="?", default="all")
    ver.add_argument("--coef-tol", type=float, default=COEF_TOL)
    ver.add_argument("--exact-tol", type=float, default=EXACT_TOL)
    ver.set_defaults(func=cmd_verify)

    fit = sub.add_parser("fit", help="log-log tail fit of a report column")
    fit.add_argument("input")
    fit.add_argument("--column", default="p_naive", choices=analysis.COLUMNS)
    fit.add_argument("--state", type=int, default=None)
    fit.add_argument("--tail-fraction", type=float, default=0.5)
    fit.set_defaults(func=cmd_fit)

    lst = sub.add_parser("list-models", help="list model ids and their parameters")
    lst.set_defaults(func=cmd_list_models)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
