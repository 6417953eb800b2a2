"""Command-line front end.

    polypotential identities --n 3,4 --out report.json
    polypotential solve --spec spec.json --points points.csv --out vals.csv
    polypotential constants --n 3..5 --K 1.0..2.0:0.1 --norms norms.json --out table.csv

Exit codes: 0 everything passed, 1 an identity or inequality failed,
2 usage or schema error, 3 resource limit (nothing is written then).
Outputs carry ``schema_version`` and the seed, contain no timestamps and
list rows in input order, so identical invocations give identical bytes.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import specfun
from ._parallel import pmap
from .errors import BudgetExceeded, DomainError, PolypotentialError, SchemaError
from .identities import run_identities
from .inequality_lab.constants import LipschitzInputs, c0, delta_n, lipschitz_constants
from .problem import ProblemSpec
from .quadrature import Budget
from .reports import SCHEMA_VERSION, rows_to_csv
from .solver import get_solver

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
COMMANDS = ("identities", "solve", "constants")
BUDGET_KEYS = ("sphere_level", "radial", "grid_radial", "grid_level")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's output besides the command's own arguments.

    Attributes
    ----------
    command : str
        ``identities``, ``solve`` or ``constants``.
    input : str or None
        Input document (the problem spec for ``solve``).
    output : str or None
        Output path; standard output when ``None``.
    format : str
        ``json`` or ``csv``.
    seed : int
        Recorded in every output; drives the random samples of ``identities``.
    tolerance : dict
        Overrides such as ``{"rel": 5e-3}``.
    budget : dict
        Overrides of :class:`~polypotential.quadrature.Budget` fields.
    """

    command: str
    input: str | None = None
    output: str | None = None
    format: str = "json"
    seed: int = 0
    tolerance: dict = field(default_factory=dict)
    budget: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise SchemaError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise SchemaError("format must be json or csv")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise SchemaError("seed must be an unsigned integer")
        unknown = set(self.budget) - set(BUDGET_KEYS)
        if unknown:
            raise SchemaError(f"unknown budget keys {sorted(unknown)}")
        unknown = set(self.tolerance) - {"rel"}
        if unknown:
            raise SchemaError(f"unknown tolerance keys {sorted(unknown)}")

    @classmethod
    def from_mapping(cls, doc):
        """Build from a dict, rejecting keys that are not fields."""
        names = {f.name for f in fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise SchemaError(f"unknown RunConfig keys {sorted(unknown)}")
        return cls(**doc)

    def make_budget(self, base=None):
        base = base or Budget()
        try:
            return Budget(**{**base.__dict__, **self.budget})
        except (DomainError, TypeError) as exc:
            raise UsageError(f"bad budget override: {exc}") from None

    def emit(self, text):
        if self.output:
            Path(self.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


# -- argument parsing -------------------------------------------------------------------


def parse_int_list(text):
    """``"3,4"`` or ``"3..5"`` (inclusive) to a list of ints."""
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"not an integer list or range: {text!r}") from None


def parse_float_range(text):
    """``"1.0..2.0:0.1"`` (inclusive, fixed step) or ``"1,1.5"`` to a list of floats."""
    try:
        if ".." in text:
            span, _, step = text.partition(":")
            a, b = (float(v) for v in span.split(".."))
            step = float(step) if step else 1.0
            if step <= 0 or b < a:
                raise ValueError
            count = int(round((b - a) / step)) + 1
            return [round(a + i * step, 12) for i in range(count)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"not a float list or range: {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="polypotential", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identities", help="closed-form identity suite")
    p.add_argument("--n", default="3", help="dimensions, e.g. 3,4 or 3..5 (each in 3..5)")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, help="relative tolerance (default 1e-3)")
    _common(p, "json", budget=True)

    p = sub.add_parser("solve", help="solve a problem from a JSON spec at given points")
    p.add_argument("--spec", required=True)
    p.add_argument("--points", required=True, help="CSV with one point per row, optional header")
    _common(p, "csv", budget=True)

    p = sub.add_parser("constants", help="tables of L(n), c0, delta(n) and Lipschitz constants")
    p.add_argument("--n", default="3")
    p.add_argument("--K", default="1.0")
    p.add_argument("--norms", help="JSON file holding a list of norm lists [||phi_1||, ..., ||phi_m||]")
    p.add_argument("--q", type=float, help="fixed Mori constant (default model exp(K-1))")
    _common(p, "csv", budget=False)
    return parser


def _common(p, default_format, budget):
    p.add_argument("--out", help="output file (stdout if omitted)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON RunConfig; command-line flags take precedence")
    p.set_defaults(default_format=default_format)
    if budget:
        g = p.add_argument_group("budget overrides")
        for key in BUDGET_KEYS:
            g.add_argument("--" + key.replace("_", "-"), dest=key, type=int)


def config_from_args(args):
    """Merge ``--config`` (if any) with the command-line flags into a RunConfig."""
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(base, dict):
            raise SchemaError("config must be a JSON object")
        base.setdefault("command", args.command)
        if base["command"] != args.command:
            raise SchemaError("config command does not match the subcommand")
    cfg = RunConfig.from_mapping(base) if base else RunConfig(command=args.command)
    out = args.out if args.out is not None else cfg.output
    fmt = args.format or base.get("format")
    if fmt is None:
        suffix = Path(out).suffix if out else ""
        fmt = {".csv": "csv", ".json": "json"}.get(suffix, args.default_format)
    budget = dict(cfg.budget)
    budget.update({k: getattr(args, k) for k in BUDGET_KEYS if getattr(args, k, None) is not None})
    tolerance = dict(cfg.tolerance)
    if getattr(args, "tol", None) is not None:
        tolerance["rel"] = args.tol
    return RunConfig(
        command=args.command,
        input=getattr(args, "spec", None) or cfg.input,
        output=out,
        format=fmt,
        seed=cfg.seed if args.seed is None else args.seed,
        tolerance=tolerance,
        budget=budget,
    )


# -- commands -----------------------------------------------------------------------------


def cmd_identities(config, ns, samples=20):
    """Run the identity suite for the dimensions ``ns``; returns the exit code."""
    if not ns or any(n not in (3, 4, 5) for n in ns):
        raise UsageError("--n must list dimensions among 3, 4, 5")
    if samples < 1:
        raise UsageError("--samples must be positive")
    budget = config.make_budget()
    tol = config.tolerance.get("rel", 1e-3)
    report = run_identities(ns, seed=config.seed, samples=samples, budget=budget, tol=tol)
    report.meta.update({"command": "identities", "n": list(ns), "budget": dict(sorted(config.budget.items()))})
    config.emit(report.to_json() if config.format == "json" else report.to_csv())
    return EXIT_OK if report.passed else EXIT_FAIL


def read_points(path, n):
    """Points from a CSV file; a non-numeric first row is taken as a header."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for i, line in enumerate(csv.reader(io.StringIO(text))):
        if not "".join(line).strip():
            continue
        try:
            rows.append([float(v) for v in line])
        except ValueError:
            if rows or i > 0:
                raise UsageError(f"non-numeric row {i + 1} in {path}") from None
    if any(len(r) != n for r in rows):
        raise UsageError(f"every point needs {n} coordinates")
    return np.array(rows, dtype=float).reshape(-1, n)


def cmd_solve(config, points_path):
    """Solve the problem in ``config.input`` at the points of ``points_path``."""
    try:
        doc = Path(config.input).read_text(encoding="utf-8")
    except (OSError, TypeError) as exc:
        raise UsageError(f"cannot read spec: {exc}") from None
    spec = ProblemSpec.from_json(doc)
    budget = config.make_budget(spec.budget)
    pts = read_points(points_path, spec.n)
    if np.any(np.linalg.norm(pts, axis=1) > 1.0 + 1e-12):
        raise UsageError("all points must lie in the closed unit ball")
    # everything is computed before anything is written, so a resource
    # failure leaves no partial output behind
    results = get_solver(spec, budget).solve_many(pts) if len(pts) else []
    rows = []
    for i, (x, est) in enumerate(zip(pts, results)):
        row = {"index": i}
        row.update({f"x{j + 1}": float(v) for j, v in enumerate(x)})
        row.update({f"f{j + 1}": float(v) for j, v in enumerate(np.atleast_1d(est.value))})
        row["error"] = float(est.error)
        rows.append(row)
    meta = {"seed": config.seed}
    if config.format == "csv":
        text = rows_to_csv(rows, meta)
    else:
        payload = {"schema_version": SCHEMA_VERSION, "meta": meta, "spec": spec.to_json(), "rows": rows}
        text = json.dumps(payload, indent=2) + "\n"
    config.emit(text)
    return EXIT_OK


def read_norm_sets(path):
    if path is None:
        return [[]]
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read norms: {exc}") from None
    ok = isinstance(doc, list) and all(
        isinstance(s, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) and v >= 0 for v in s)
        for s in doc
    )
    if not ok:
        raise SchemaError("norms must be a JSON list of lists of nonnegative numbers")
    return [[float(v) for v in s] for s in doc]


def constants_rows(ns, Ks, norm_sets, q=None):
    """One row per ``(n, K, norm set)`` cell, nested in that order."""
    cells = [(n, K, i, s) for n in ns for K in Ks for i, s in enumerate(norm_sets)]

    def one(cell):
        n, K, i, s = cell
        rep = lipschitz_constants(LipschitzInputs(n=n, K=K, phi_norms=tuple(s), q=q))
        v = rep.values
        return {
            "n": n,
            "K": K,
            "norm_set": i,
            "norms": " ".join(repr(x) for x in s),
            "q_model": rep.meta["q_model"],
            "q": v["q"],
            "L": specfun.heinz_constant(n),
            "c0": c0(),
            "delta": delta_n(n),
            **{k: v[k] for k in ("alpha", "mu1", "mu2", "mu3", "mu4", "mu5", "C3", "branch", "M1", "N1", "lipschitz")},
        }

    return pmap(one, cells)


def cmd_constants(config, ns, Ks, norm_sets, q=None):
    """Write the constants table; cells whose second branch diverges are labelled, not dropped."""
    if not ns or any(n < 3 for n in ns):
        raise UsageError("--n must list dimensions >= 3")
    if not Ks or any(K < 1.0 for K in Ks):
        raise UsageError("--K values must be >= 1")
    if q is not None and q <= 0:
        raise UsageError("--q must be positive")
    rows = constants_rows(ns, Ks, norm_sets, q)
    meta = {"seed": config.seed}
    if config.format == "csv":
        text = rows_to_csv([{k: ("" if v is None else v) for k, v in r.items()} for r in rows], meta)
    else:
        text = json.dumps({"schema_version": SCHEMA_VERSION, "meta": meta, "rows": rows}, indent=2) + "\n"
    config.emit(text)
    return EXIT_OK


def _dispatch(args):
    config = config_from_args(args)
    if args.command == "identities":
        return cmd_identities(config, parse_int_list(args.n), args.samples)
    if args.command == "solve":
        return cmd_solve(config, args.points)
    return cmd_constants(config, parse_int_list(args.n), parse_float_range(args.K), read_norm_sets(args.norms), args.q)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except (UsageError, SchemaError) as exc:
        print(f"polypotential: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"polypotential: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, PolypotentialError) as exc:
        print(f"polypotential: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
