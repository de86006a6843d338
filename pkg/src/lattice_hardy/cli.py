"""Command-line front end: ``python -m lattice_hardy <command> --flag value ...``.

Every command writes a JSON document (default) or a CSV table whose leading
``#`` line records the full parameter set.  Failures produce a JSON error
record on stderr with exit status 2 (invalid configuration) or 3 (the
computation itself failed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .criticality import null_sequence_report, scan
from .hardy import HardyParams, build_hardy_tables, hardy_deficit, optimal_constant, psi
from .lattice import ModelParams, ParameterError
from .operator import LatticeFunction, ground_state_residual, quadratic_form
from .riesz import (
    CoverageError,
    QuadratureSpec,
    check_alpha,
    riesz,
    riesz_asymptotic_constant,
    total_mass,
)

__all__ = ["RunConfig", "ConfigError", "build_parser", "parse_config", "run", "main"]

COMMANDS = (
    "kernel",
    "mass",
    "weight",
    "psi",
    "constant",
    "scan",
    "hardy-test",
    "asym-fit",
    "null-energy",
    "gs-residual",
)
REL_TOL_ENV = "LATTICE_HARDY_REL_TOL"
EXIT_CONFIG = 2
EXIT_COMPUTE = 3


class ConfigError(ValueError):
    """Command-line arguments that do not form a valid run."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    d: int
    sigma: float | None = None
    alpha: float | None = None
    points: tuple = ()
    alphas: tuple = ()
    radii: tuple = ()
    epsilons: tuple = ()
    radius: int | None = None
    seed: int = 0
    count: int = 100
    output: str | None = None
    format: str = "json"
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def params(self) -> ModelParams:
        if self.sigma is None:
            raise ConfigError(f"{self.command} requires --sigma")
        return ModelParams(self.d, self.sigma)

    def need(self, *names: str) -> None:
        for name in names:
            value = getattr(self, name)
            if value is None or value == ():
                raise ConfigError(f"{self.command} requires --{name.replace('_', '-')}")

    def header(self) -> dict:
        out = {"command": self.command, "d": self.d}
        for key in ("sigma", "alpha", "radius"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        for key in ("points", "alphas", "radii", "epsilons"):
            if getattr(self, key):
                out[key] = [list(v) if isinstance(v, tuple) else v for v in getattr(self, key)]
        if self.command == "hardy-test":
            out["seed"] = self.seed
            out["count"] = self.count
        out["quadrature"] = asdict(self.quadrature)
        return out


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> tuple:
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    return tuple(int(v) for v in vals)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lattice-hardy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--sigma", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument(
            "--x",
            type=_ints,
            action="append",
            default=[],
            help="lattice point as comma-separated coordinates; repeatable",
        )
        p.add_argument("--alphas", type=_floats, default=())
        p.add_argument("--radii", type=_ints, default=())
        p.add_argument("--epsilons", type=_floats, default=())
        p.add_argument("--radius", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--count", type=int, default=100)
        p.add_argument("--output")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--rel-tol", type=float)
        p.add_argument("--abs-tol", type=float)
        p.add_argument("--max-subdivisions", type=int)
    return parser


def parse_config(argv, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    ns = build_parser().parse_args(argv)
    quad = {}
    if REL_TOL_ENV in environ:
        try:
            quad["rel_tol"] = float(environ[REL_TOL_ENV])
        except ValueError as exc:
            raise ConfigError(f"{REL_TOL_ENV} is not a number: {environ[REL_TOL_ENV]!r}") from exc
    for key in ("rel_tol", "abs_tol", "max_subdivisions"):
        if getattr(ns, key) is not None:
            quad[key] = getattr(ns, key)
    config = RunConfig(
        command=ns.command,
        d=ns.d,
        sigma=ns.sigma,
        alpha=ns.alpha,
        points=tuple(ns.x),
        alphas=ns.alphas,
        radii=ns.radii,
        epsilons=ns.epsilons,
        radius=ns.radius,
        seed=ns.seed,
        count=ns.count,
        output=ns.output,
        format=ns.format,
        quadrature=replace(QuadratureSpec(), **quad),
    )
    if config.d < 1:
        raise ConfigError("--d must be a positive integer")
    for pt in config.points:
        if len(pt) != config.d:
            raise ConfigError(f"point {pt} does not have {config.d} coordinates")
    return config


# ---------------------------------------------------------------------------
# commands; each returns (summary dict, rows)
# ---------------------------------------------------------------------------


def _pt(p) -> str:
    return " ".join(str(c) for c in p)


def _cmd_kernel(c: RunConfig):
    c.need("alpha", "points")
    check_alpha(c.alpha, c.d)
    rows = [{"x": _pt(p), "value": riesz(c.alpha, p, c.quadrature)} for p in c.points]
    return {}, rows


def _cmd_mass(c: RunConfig):
    c.params()
    return {"value": total_mass(c.sigma, c.d, c.quadrature)}, []


def _cmd_weight(c: RunConfig):
    c.need("alpha", "points")
    hp = HardyParams(c.params(), c.alpha)
    rows = []
    for p in c.points:
        num = riesz(c.sigma - c.alpha, p, c.quadrature)
        den = riesz(-c.alpha, p, c.quadrature)
        rows.append({"sigma": c.sigma, "alpha": hp.alpha, "x": _pt(p), "value": num / den})
    return {}, rows


def _cmd_psi(c: RunConfig):
    c.params()
    alphas = c.alphas or ((c.alpha,) if c.alpha is not None else ())
    if not alphas:
        raise ConfigError("psi requires --alpha or --alphas")
    return {}, [{"alpha": a, "value": psi(c.sigma, c.d, a)} for a in alphas]


def _cmd_constant(c: RunConfig):
    params = c.params()
    return {"alpha0": params.alpha0, "value": optimal_constant(c.sigma, c.d)}, []


def _cmd_hardy_test(c: RunConfig):
    c.need("alpha")
    hp = HardyParams(c.params(), c.alpha)
    radius = c.radius if c.radius is not None else (6 if c.d <= 2 else 3)
    if radius < 0 or c.count < 1:
        raise ConfigError("--radius must be >= 0 and --count >= 1")
    tables = build_hardy_tables(hp, radius, c.quadrature)
    axis = np.arange(-radius, radius + 1)
    grid = np.stack(np.meshgrid(*([axis] * c.d), indexing="ij"), axis=-1).reshape(-1, c.d)
    rng = np.random.default_rng(c.seed)
    rows = []
    for k in range(c.count):
        phi = LatticeFunction(grid, rng.uniform(-1.0, 1.0, grid.shape[0]))
        form = quadratic_form(hp.sigma, phi, tables.operator)
        deficit = hardy_deficit(hp, phi, tables)
        rows.append(
            {"sigma": hp.sigma, "alpha": hp.alpha, "sample": k, "form": form, "deficit": deficit}
        )
    worst = min(r["deficit"] / r["form"] for r in rows)
    return {"radius": radius, "min_relative_deficit": worst}, rows


def _slope(r, y) -> float:
    return float(np.polyfit(np.log(np.asarray(r, float)), np.log(np.asarray(y, float)), 1)[0])


def _cmd_asym_fit(c: RunConfig):
    c.need("alpha")
    radii = c.radii or tuple(range(20, 201, 10))
    rows = []
    if c.sigma is None:
        check_alpha(c.alpha, c.d)
        const = riesz_asymptotic_constant(c.alpha, c.d)
        expo = c.d + 2.0 * c.alpha
        for r in radii:
            x = (r,) + (0,) * (c.d - 1)
            val = riesz(c.alpha, x, c.quadrature)
            rows.append({"r": r, "value": val, "deviation": abs(val * r**expo / const - 1.0)})
        target = "kernel"
    else:
        hp = HardyParams(c.params(), c.alpha)
        const = psi(hp.sigma, hp.d, hp.alpha)
        for r in radii:
            x = (r,) + (0,) * (c.d - 1)
            val = riesz(hp.sigma - hp.alpha, x, c.quadrature) / riesz(-hp.alpha, x, c.quadrature)
            rows.append({"r": r, "value": val, "deviation": abs(val * r ** (2 * hp.sigma) / const - 1.0)})
        target = "weight"
    dev = [row["deviation"] for row in rows]
    summary = {"target": target, "constant": const, "slope": _slope(radii, dev)}
    return summary, rows


def _cmd_null_energy(c: RunConfig):
    params = c.params()
    c.need("radius")
    eps = c.epsilons or ((0.1, 0.05, 0.025))
    tables: dict = {}
    rows = []
    for e in eps:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            res = null_sequence_report(params.sigma, e, c.radius, c.d, tables, c.quadrature)
        row = res.to_dict()
        row["warning"] = "; ".join(str(w.message) for w in caught)
        rows.append(row)
    energies = [r["energy"] for r in rows]
    decreasing = all(b < a for a, b in zip(energies, energies[1:]))
    return {"alpha0": params.alpha0, "strictly_decreasing": decreasing}, rows


def _cmd_gs_residual(c: RunConfig):
    c.need("alpha", "points", "radius")
    params = c.params()
    rows = []
    for p in c.points:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            res = ground_state_residual(params.sigma, c.alpha, p, c.radius, c.quadrature)
        rows.append(
            {
                "x": _pt(p),
                "residual": res.residual,
                "relative": res.relative,
                "main_sum": res.main_sum,
                "tail_correction": res.tail_correction,
                "target": res.target,
                "warning": "; ".join(str(w.message) for w in caught),
            }
        )
    return {}, rows


_HANDLERS = {
    "kernel": _cmd_kernel,
    "mass": _cmd_mass,
    "weight": _cmd_weight,
    "psi": _cmd_psi,
    "constant": _cmd_constant,
    "hardy-test": _cmd_hardy_test,
    "asym-fit": _cmd_asym_fit,
    "null-energy": _cmd_null_energy,
    "gs-residual": _cmd_gs_residual,
}


# ---------------------------------------------------------------------------
# rendering and dispatch
# ---------------------------------------------------------------------------


def _render(config: RunConfig, summary: dict, rows: list) -> str:
    if config.format == "json":
        doc = dict(config.header())
        doc.update(summary)
        if rows:
            doc["rows"] = rows
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    meta = dict(config.header())
    meta.update(summary)
    buf.write("# " + json.dumps(meta, separators=(",", ":")) + "\n")
    table = rows or [summary]
    writer = csv.DictWriter(buf, fieldnames=list(table[0]), lineterminator="\n")
    writer.writeheader()
    for row in table:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def execute(config: RunConfig) -> str:
    """Validate and run one command, returning the rendered output."""
    if config.command == "scan":
        config.need("alphas", "radii")
        report = scan(config.params().sigma, config.d, list(config.alphas), list(config.radii), config.quadrature)
        if config.format == "json":
            return report.to_json() + "\n"
        head = "# " + json.dumps(config.header(), separators=(",", ":")) + "\n"
        return head + report.to_csv()
    summary, rows = _HANDLERS[config.command](config)
    return _render(config, summary, rows)


def _fail(code: int, kind: str, message: str, operation: str | None) -> int:
    record = {"error": kind, "message": message}
    if operation is not None:
        record["operation"] = operation
    sys.stderr.write(json.dumps(record) + "\n")
    return code


def run(argv=None, environ=None) -> int:
    operation = None
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv, environ)
        operation = config.command
    except (ConfigError, ParameterError) as exc:
        return _fail(EXIT_CONFIG, "invalid-config", str(exc), operation)
    try:
        text = execute(config)
    except (ConfigError, ParameterError) as exc:
        return _fail(EXIT_CONFIG, "invalid-config", str(exc), operation)
    except (CoverageError, ArithmeticError, RuntimeError, ValueError, MemoryError) as exc:
        return _fail(EXIT_COMPUTE, "computation-failed", f"{type(exc).__name__}: {exc}", operation)
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
