"""Command-line workbench: ``vortexlab <command> [options]``.

Commands: catalog, solution, solve, verify, superpose, deficit, export.

Exit codes: 0 success, 1 I/O failure, 2 parse error, 3 precondition error,
4 non-convergence, 5 check failure.

Option values are resolved as: command-line flag, then ``VORTEX_<NAME>``
environment variable, then the ``--config`` JSON file, then ``DEFAULTS``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .catalog import (ClassificationError, EquationSpec, catalog_rows, format_table,
                      hilbert_function, integrable_order, is_integrable, type_count)
from .diagnostics import (CHECK_TOLERANCES, cone_angle, default_map, expected_cone_angle,
                          solution_points, verify_solution)
from .io import ExportError, export_field, export_profile
from .liouville import (DivergenceError, IntegrabilityError, PoleError, RationalMap,
                        RootFindingError, closed_form)
from .mapstring import MapSyntaxError
from .schemas import validate
from .solver import (PreconditionError, RadialBackground, RadialProblem,
                     UnsupportedEquationError, residual_field, solve_radial, solve_superposed)
from .surface import DomainError, SurfaceChart, baptista_factor

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_NONCONVERGENCE = 4
EXIT_CHECK = 5

COMMANDS = ("catalog", "solution", "solve", "verify", "superpose", "deficit", "export")
L_MAX = 12

# Every numeric default lives here; flags, VORTEX_* variables and --config override it.
DEFAULTS = {
    "L": 2,              # catalogue order
    "format": "text",    # text | json
    "h": 1e-3,           # stencil spacing for 2D checks
    "step": 0.05,        # lattice step of exported / checked 2D grids
    "exclusion": 0.05,   # exclusion radius around vortex zeros
    "tol": 1e-10,        # Newton tolerance on the discrete residual sup-norm
    "points": 4000,      # radial grid points
    "R": None,           # domain radius (None: 0.999 Rv on the disc, 10 otherwise)
    "m": 1,              # multiplicity at the origin
    "k": 1,              # vortices added by superpose
    "n": None,           # Baptista order for deficit (None: the closed-form order)
    "bc": "decay",       # decay | dirichlet | neumann
    "u_boundary": None,  # Dirichlet value
    "K0": None,          # chart curvature (None: n C0 for integrable, else 0)
    "check_tol": 1e-6,   # composite residual threshold for superpose
    "quantity": "u",     # exported field: u | phisq | residual | omega
    "kind": "field",     # export: field | profile | catalog
    "table": "all",      # catalog: 1 | 2 | all
}

_TYPES = {"L": int, "format": str, "h": float, "step": float, "exclusion": float, "tol": float,
          "points": int, "R": float, "m": int, "k": int, "n": int, "bc": str,
          "u_boundary": float, "K0": float, "check_tol": float, "quantity": str, "kind": str,
          "table": str}

_CHOICES = {"format": ("text", "json"), "bc": ("decay", "dirichlet", "neumann"),
            "quantity": ("u", "phisq", "residual", "omega"),
            "kind": ("field", "profile", "catalog"), "table": ("1", "2", "all")}


class CLIError(Exception):
    def __init__(self, message: str, code: int = EXIT_PARSE):
        super().__init__(message)
        self.code = code


@dataclass
class RunSpec:
    command: str
    options: dict
    equation: EquationSpec | None = None
    equation_label: str = ""
    map_text: str | None = None
    rmap: RationalMap | None = None
    out: str | None = None
    config: str | None = None
    all: bool = False
    at: list = field(default_factory=list)

    def __getattr__(self, name):
        opts = self.__dict__.get("options", {})
        if name in opts:
            return opts[name]
        raise AttributeError(name)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("equation and map")
    g.add_argument("--equation", help="canonical name, e.g. taubes, jackiw-pi, chern-simons")
    g.add_argument("--coeffs", help="comma-separated coefficients C0,C2,...")
    g.add_argument("--map", dest="map_text", help='rational map, e.g. "z^2" or "(z^2+1)/(z-0.5)"')
    o = common.add_argument_group("options")
    for key in DEFAULTS:
        flag = "--" + key.replace("_", "-")
        kw = {"dest": key, "default": None, "type": _TYPES[key]}
        if key in _CHOICES:
            kw["choices"] = _CHOICES[key]
        o.add_argument(flag, **kw)
    o.add_argument("--out", "--export", dest="out", help="output CSV/JSON path")
    o.add_argument("--config", help="JSON file with option values")
    o.add_argument("--at", action="append", default=[], help="evaluation point (complex literal)")
    o.add_argument("--all", action="store_true", help="verify: every integrable row of the catalogue")

    p = argparse.ArgumentParser(prog="vortexlab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"vortexlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "catalog": "list the equation catalogue for order L",
        "solution": "build a closed-form solution from a rational map",
        "solve": "radial Newton solve with all vortices at the origin",
        "verify": "run residual, curvature, cone and volume checks",
        "superpose": "add vortices on the Baptista background",
        "deficit": "fit cone angles at vortex positions",
        "export": "write a field, profile or catalogue to disk",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


def _convert(key, raw):
    if raw is None:
        return None
    try:
        val = _TYPES[key](raw)
    except (TypeError, ValueError) as exc:
        raise CLIError(f"invalid value {raw!r} for {key}: {exc}") from exc
    if key in _CHOICES and str(val) not in _CHOICES[key]:
        raise CLIError(f"{key} must be one of {', '.join(_CHOICES[key])}")
    return val


def _parse_coeffs(text: str) -> EquationSpec:
    try:
        vals = [float(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError as exc:
        raise CLIError(f"cannot parse coefficients {text!r}") from exc
    if not vals:
        raise CLIError("empty coefficient list")
    canonical = all(v in (-1.0, 0.0, 1.0) for v in vals)
    return EquationSpec(tuple(vals), canonical=canonical)


def _parse_point(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise CLIError(f"cannot parse point {text!r}") from exc


def parse_run_spec(argv=None, env=None) -> RunSpec:
    """Parse arguments (and optional JSON config) into a validated :class:`RunSpec`."""
    env = os.environ if env is None else env
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # negative coefficient lists such as "-1,0,-1" look like flags to argparse
    for i in range(len(argv) - 2, -1, -1):
        if argv[i] == "--coeffs" and argv[i + 1].startswith("-"):
            argv[i:i + 2] = ["--coeffs=" + argv[i + 1]]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed its message
        raise CLIError("", EXIT_PARSE if exc.code else EXIT_OK) from None
    config = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CLIError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(config) - set(DEFAULTS) - {"equation", "coeffs", "map", "out", "at", "all"}
        if unknown:
            raise CLIError(f"unknown config keys: {', '.join(sorted(unknown))}")
    opts = {}
    for key in DEFAULTS:
        val = getattr(args, key)
        if val is None:
            raw = env.get("VORTEX_" + key.upper())
            val = _convert(key, raw) if raw not in (None, "") else None
        if val is None and key in config:
            val = _convert(key, config[key])
        if val is None:
            val = DEFAULTS[key]
        opts[key] = val
    L = opts["L"]
    if not -1 <= L <= L_MAX:
        raise CLIError(f"L must lie in [-1, {L_MAX}]")
    for key in ("h", "step", "exclusion", "tol", "check_tol"):
        if opts[key] <= 0:
            raise CLIError(f"{key} must be positive")
    if opts["points"] < 8:
        raise CLIError("points must be at least 8")

    spec = RunSpec(args.command, opts, out=args.out or config.get("out"), config=args.config,
                   all=args.all or bool(config.get("all", False)))
    eq_name = args.equation or config.get("equation")
    coeffs = args.coeffs or config.get("coeffs")
    if eq_name and coeffs:
        raise CLIError("--equation and --coeffs are mutually exclusive")
    if eq_name:
        try:
            spec.equation = EquationSpec.from_name(eq_name, max(L, 0))
        except KeyError as exc:
            raise CLIError(str(exc.args[0])) from None
        except ValueError as exc:
            raise CLIError(str(exc)) from None
        spec.equation_label = eq_name
    elif coeffs:
        spec.equation = _parse_coeffs(coeffs if isinstance(coeffs, str) else ",".join(map(str, coeffs)))
        spec.equation_label = coeffs if isinstance(coeffs, str) else ",".join(map(str, coeffs))
    if spec.equation is not None and not spec.equation.admissible:
        raise CLIError(f"coefficients {spec.equation.coefficients} violate the positive flux "
                       "condition: at least one of -C0, C2, C4, ... must be positive")
    map_text = args.map_text or config.get("map")
    if map_text:
        try:
            spec.rmap = RationalMap.parse(map_text)
        except MapSyntaxError as exc:
            raise CLIError(f"cannot parse map: {exc}") from None
        except ValueError as exc:
            raise CLIError(f"invalid map {map_text!r}: {exc}") from None
        spec.map_text = map_text
    spec.at = [_parse_point(p) for p in (args.at or config.get("at", []))]
    needs_eq = {"solution", "solve", "superpose", "deficit"}
    if spec.command in needs_eq and spec.equation is None:
        raise CLIError(f"{spec.command} needs --equation or --coeffs")
    if spec.command == "verify" and spec.equation is None and not spec.all:
        raise CLIError("verify needs --all or an equation")
    if spec.command == "export":
        if not spec.out:
            raise CLIError("export needs --out")
        if opts["kind"] != "catalog" and spec.equation is None:
            raise CLIError("export of a field or profile needs an equation")
    if spec.command == "solve" and opts["bc"] == "dirichlet" and opts["u_boundary"] is None:
        raise CLIError("--bc dirichlet needs --u-boundary")
    return spec


# ----------------------------------------------------------------------------
# commands


def _dump(obj) -> str:
    def default(o):
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, complex):
            return {"re": o.real, "im": o.imag}
        return str(o)
    return json.dumps(obj, indent=2, sort_keys=True, default=default, ensure_ascii=False)


def _closed_form(spec: RunSpec):
    n = integrable_order(spec.equation)
    if n is None:
        raise IntegrabilityError(f"{spec.equation.coefficients} has no closed-form family")
    rmap = spec.rmap or RationalMap.parse(default_map(spec.equation))
    chart = SurfaceChart(spec.K0) if spec.K0 is not None else None
    return closed_form(spec.equation, rmap, chart)


def cmd_catalog(spec: RunSpec, out) -> int:
    L = spec.L
    if spec.format == "json":
        rows = catalog_rows(L)
        counts = {f"type_{m}": type_count(L, m) for m in range(0, max(L, -1) + 2)}
        obj = {"L": L, "count": hilbert_function(L), "type_counts": counts, "rows": rows}
        out.write(_dump(obj) + "\n")
        return EXIT_OK
    parts = []
    if spec.table in ("1", "all"):
        parts.append(format_table(L))
    if spec.table in ("2", "all"):
        parts.append(format_table(L, integrable_only=True))
    out.write("\n".join(parts))
    return EXIT_OK


def _field_of(sol, quantity: str, spec: RunSpec):
    pts = solution_points(sol, spec.step)
    u = sol.u_field(pts, spacing=spec.h, exclusion_radius=spec.exclusion)
    if quantity == "u":
        return u
    if quantity == "phisq":
        return u.with_values(sol._higgs(u.points))
    if quantity == "omega":
        return baptista_factor(sol.chart, u, sol.order)
    return residual_field(sol.equation, u, sol.chart, sol.divisor)


def cmd_solution(spec: RunSpec, out) -> int:
    sol = _closed_form(spec)
    obj = sol.to_dict()
    validate(obj, "ClosedFormSolution")
    if spec.at:
        obj["evaluations"] = [{"z": {"re": z.real, "im": z.imag}, "phisq": sol.higgs_squared(z)}
                              for z in spec.at]
    r = _field_of(sol, "residual", spec)
    obj["residual_sup"] = float(np.max(np.abs(r.values[r.mask]))) if np.any(r.mask) else 0.0
    if spec.out:
        f = _field_of(sol, spec.quantity, spec)
        export_field(f, spec.out, {"equation": sol.equation.to_dict(), "quantity": spec.quantity,
                                   "map": sol.map.to_dict(),
                                   "divisor": sol.vortex_divisor.to_dict()})
        obj["exported"] = spec.out
    out.write(_dump(obj) + "\n")
    return EXIT_OK


def _radial_problem(spec: RunSpec) -> RadialProblem:
    eq = spec.equation
    if spec.K0 is not None:
        K0 = spec.K0
    else:
        n = integrable_order(eq)
        K0 = n * eq.C0 if n is not None else 0.0
    chart = SurfaceChart(K0)
    Rv = chart.valid_radius
    R = spec.R if spec.R is not None else (0.999 * Rv if math.isfinite(Rv) else 10.0)
    return RadialProblem(eq, spec.m, RadialBackground.from_chart(chart), R, spec.bc,
                         spec.u_boundary)


def cmd_solve(spec: RunSpec, out) -> int:
    prob = _radial_problem(spec)
    rep = solve_radial(prob, spec.points, spec.tol)
    obj = rep.to_dict(include_profile=False)
    validate(obj, "SolveReport")
    if spec.out:
        export_profile(rep, spec.out)
        obj["exported"] = spec.out
    out.write(_dump(obj) + "\n")
    return EXIT_OK if rep.converged else EXIT_NONCONVERGENCE


def cmd_superpose(spec: RunSpec, out) -> int:
    eq = spec.equation
    if spec.rmap is not None:
        sol = _closed_form(spec)
        n = sol.order
        d = int(np.nonzero(np.abs(sol.map.p) > 0)[0][-1])
        target = closed_form(eq, RationalMap.monomial(d + n * spec.k), sol.chart)
        rep = solve_superposed(sol, spec.k, eq, spec.points, spec.R,
                               composite_boundary=lambda R: float(target.u(R)), tol=spec.tol)
    else:
        u1 = solve_radial(_radial_problem(spec), spec.points, spec.tol)
        if not u1.converged:
            out.write(_dump({"stage": "u1", **u1.to_dict(include_profile=False)}) + "\n")
            return EXIT_NONCONVERGENCE
        rep = solve_superposed(u1, spec.k, eq, tol=spec.tol)
    obj = rep.to_dict(include_profile=False)
    for key in ("composite_u", "u1"):
        obj["extra"].pop(key, None)
    obj["check_tol"] = spec.check_tol
    out.write(_dump(obj) + "\n")
    if spec.out:
        export_profile(rep, spec.out)
    if not rep.converged:
        return EXIT_NONCONVERGENCE
    return EXIT_OK if rep.extra["composite_residual"] < spec.check_tol else EXIT_CHECK


def cmd_deficit(spec: RunSpec, out) -> int:
    sol = _closed_form(spec)
    n = spec.n or sol.order
    pts = spec.at or [z for z, _ in sol.vortex_divisor.points]
    rows, ok = [], True
    for z in pts:
        rep = cone_angle(sol, z, n)
        N = sol.vortex_divisor.multiplicity(z, tol=1e-6)
        want = expected_cone_angle(n, N)
        passed = abs(rep.angle - want) <= CHECK_TOLERANCES["cone"] * want
        ok &= passed
        d = rep.to_dict()
        validate(d, "ConeReport")
        d.update({"expected": want, "expected_over_pi": want / np.pi, "multiplicity": float(N),
                  "status": "PASS" if passed else "FAIL"})
        rows.append(d)
    if spec.format == "json":
        out.write(_dump({"n": n, "cones": rows}) + "\n")
    else:
        out.write(f"{'center':>18}  {'N':>6}  {'angle/pi':>10}  {'expect/pi':>10}  status\n")
        for d in rows:
            z = complex(d["center"]["re"], d["center"]["im"])
            out.write(f"{z!s:>18}  {d['multiplicity']:>6.3g}  {d['cone_angle_over_pi']:>10.5f}  "
                      f"{d['expected_over_pi']:>10.5g}  {d['status']}\n")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_verify(spec: RunSpec, out) -> int:
    if spec.all:
        from .catalog import classify, enumerate_equations
        targets = [(s, str(classify(s)), classify(s).name) for s, _ in enumerate_equations(spec.L)
                   if is_integrable(s)]
    else:
        from .catalog import classify
        lab = classify(spec.equation) if spec.equation.canonical else None
        targets = [(spec.equation, str(lab) if lab else spec.equation_label, lab.name if lab else "")]
    table, failed = [], False
    for eq, label, name in targets:
        rmap = spec.rmap if (spec.rmap is not None and not spec.all) else RationalMap.parse(default_map(eq))
        sol = closed_form(eq, rmap, SurfaceChart(spec.K0) if spec.K0 is not None and not spec.all else None)
        checks = verify_solution(sol, spec.step, spec.h)
        failed |= any(c.passed is False for c in checks)
        table.append({"type": label, "name": name or "--", "map": default_map(eq) if rmap is not spec.rmap
                      else spec.map_text, "checks": [c.to_dict() for c in checks]})
    if spec.format == "json":
        out.write(_dump({"rows": table, "passed": not failed}) + "\n")
    else:
        names = [c["check"] for c in table[0]["checks"]] if table else []
        wt = max([len("type")] + [len(r["type"]) for r in table])
        wn = max([len("name")] + [len(r["name"]) for r in table])
        wm = max([len("map")] + [len(r["map"]) for r in table])
        head = f"{'type':<{wt}}  {'name':<{wn}}  {'map':<{wm}}  " + "  ".join(f"{n:>16}" for n in names)
        out.write(head.rstrip() + "\n")
        for r in table:
            cells = "  ".join(f"{c['status']:>16}" for c in r["checks"])
            out.write(f"{r['type']:<{wt}}  {r['name']:<{wn}}  {r['map']:<{wm}}  {cells}\n")
        out.write(("all checks passed" if not failed else "some checks FAILED") + "\n")
    return EXIT_CHECK if failed else EXIT_OK


def cmd_export(spec: RunSpec, out) -> int:
    if spec.kind == "catalog":
        try:
            with open(spec.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(_dump({"L": spec.L, "rows": catalog_rows(spec.L)}) + "\n")
        except OSError as exc:
            raise ExportError(f"cannot write {spec.out}: {exc}") from exc
    elif spec.kind == "field":
        sol = _closed_form(spec)
        export_field(_field_of(sol, spec.quantity, spec), spec.out,
                     {"equation": sol.equation.to_dict(), "quantity": spec.quantity,
                      "map": sol.map.to_dict(), "divisor": sol.vortex_divisor.to_dict()})
    else:
        rep = solve_radial(_radial_problem(spec), spec.points, spec.tol)
        export_profile(rep, spec.out)
        if not rep.converged:
            out.write(f"wrote {spec.out} (solve did not converge)\n")
            return EXIT_NONCONVERGENCE
    out.write(f"wrote {spec.out}\n")
    return EXIT_OK


HANDLERS = {"catalog": cmd_catalog, "solution": cmd_solution, "solve": cmd_solve,
            "verify": cmd_verify, "superpose": cmd_superpose, "deficit": cmd_deficit,
            "export": cmd_export}

PRECONDITION_ERRORS = (IntegrabilityError, DomainError, PreconditionError, PoleError,
                       DivergenceError, UnsupportedEquationError, ClassificationError,
                       RootFindingError)


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        spec = parse_run_spec(argv)
    except CLIError as exc:
        if str(exc):
            err.write(f"vortexlab: error: {exc}\n")
        return exc.code
    try:
        return HANDLERS[spec.command](spec, out)
    except PRECONDITION_ERRORS as exc:
        err.write(f"vortexlab: precondition failed: {exc}\n")
        return EXIT_PRECONDITION
    except ExportError as exc:
        err.write(f"vortexlab: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
