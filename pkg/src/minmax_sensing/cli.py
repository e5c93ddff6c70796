"""Command-line front end: ``minmax-sensing {design,eval,search,simulate}``.

Exit codes: 0 success, 2 usage or parse error, 3 search budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from .core import Design, spectral_closed_form, all_subsets
from .designs import Family, auto_family, generate, theoretical_optimum
from .estimate import SimConfig, simulate
from .search import DEFAULT_BUDGET, BudgetExceeded, grid_search, local_search, worst_case

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- angle files


def read_angle_file(path: str | Path) -> Design:
    """Load a design from JSON ``{"n": .., "angles_rad": [..]}`` or plain text.

    Plain text holds one radian value per line; blank lines and anything after
    ``#`` are ignored.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
            angles = [float(a) for a in doc["angles_rad"]]
            if "n" in doc and int(doc["n"]) != len(angles):
                raise UsageError(f"{path}: n={doc['n']} but {len(angles)} angles given")
        else:
            angles = []
            for line in text.splitlines():
                line = line.split("#", 1)[0].strip()
                if line:
                    angles.append(float(line))
        return Design(angles)
    except UsageError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc


def _fmt_angle(a: float) -> str:
    return format(a, ".17g")


def format_angle_file(design: Design, plain: bool = False) -> str:
    if plain:
        return "".join(_fmt_angle(a) + "\n" for a in design.angles)
    angles = ", ".join(_fmt_angle(a) for a in design.angles)
    return f'{{"n": {design.n}, "angles_rad": [{angles}]}}\n'


# ---------------------------------------------------------------- formatting


def _num(x: float):
    """JSON-safe number: unbounded ratios become the string "inf"."""
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return None
    return x


def _csv_num(x: float) -> str:
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return ""
    return repr(x)


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _optimum_or_none(n: int, k: int):
    try:
        return theoretical_optimum(n, k)
    except (NotImplementedError, ValueError):
        return None


# ---------------------------------------------------------------- commands


def cmd_design(args, out) -> int:
    if args.family == "auto":
        if args.k is None:
            raise UsageError("--family auto needs --k")
        try:
            family = auto_family(args.n, args.k)
        except ValueError as exc:
            raise UsageError(f"{exc}; pass --family explicitly") from exc
    else:
        family = Family.parse(args.family)
    k = args.k if args.k is not None else (2 if family is Family.K2_UNIFORM else 3)
    kwargs = {}
    if args.t1 is not None:
        kwargs["t1"] = args.t1
    if args.t2 is not None:
        kwargs["t2"] = args.t2
    design = generate(family, args.n, **kwargs)

    opt = _optimum_or_none(args.n, k)
    note = f"family {family.value}, n={args.n}, k={k}"
    if opt is not None:
        note += f": theoretical optimum max_cost={opt.max_cost!r}"

    if args.out in (None, "-"):
        out.write(format_angle_file(design))
        print(note, file=sys.stderr)
    else:
        path = Path(args.out)
        path.write_text(format_angle_file(design, plain=path.suffix == ".txt"))
        out.write(f"wrote {path} ({note})\n")
    return EXIT_OK


def cmd_eval(args, out) -> int:
    design = read_angle_file(args.design)
    if not 2 <= args.k <= design.n:
        raise UsageError(f"--k must satisfy 2 <= k <= n={design.n}")
    report = worst_case(design, args.k)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["subset", "cost", "lambda_min", "lambda_max", "kappa"])
        for s in all_subsets(design.n, args.k):
            summ = spectral_closed_form(design, s)
            w.writerow([s.label(), _csv_num(summ.cost), _csv_num(summ.lambda_min), _csv_num(summ.lambda_max), _csv_num(summ.kappa)])
        out.write(buf.getvalue())
    else:
        doc = {
            "n": design.n,
            "k": report.k,
            "max_cost": report.max_cost,
            "max_kappa": _num(report.max_kappa),
            "attaining_subsets": [list(s.indices) for s in report.attaining_subsets],
            "subsets_evaluated": report.subsets_evaluated,
        }
        out.write(_dump_json(doc))
    return EXIT_OK


_SEARCH_FIELDS = [
    "method", "n", "k", "seed", "resolution_or_restarts", "evaluations", "converged",
    "best_max_cost", "best_max_kappa", "theorem_max_cost", "gap_to_theorem", "status", "angles_rad",
]


def cmd_search(args, out) -> int:
    if args.method == "grid":
        result = grid_search(args.n, args.k, args.resolution, budget=args.budget)
    else:
        if args.seed is None:
            raise UsageError("--method local needs --seed")
        result = local_search(args.n, args.k, args.restarts, args.seed)
    opt = _optimum_or_none(args.n, args.k)
    best_kappa = worst_case(result.best_design, args.k).max_kappa
    if opt is None:
        status = "exploratory (no theorem covers this n, k)"
    elif result.best_max_cost <= opt.max_cost + 1e-6:
        status = "matches theorem optimum"
    else:
        status = "above theorem optimum"
    row = {
        "method": result.method.value,
        "n": result.n,
        "k": result.k,
        "seed": result.seed,
        "resolution_or_restarts": result.resolution_or_restarts,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "best_max_cost": result.best_max_cost,
        "best_max_kappa": _num(best_kappa),
        "theorem_max_cost": None if opt is None else opt.max_cost,
        "gap_to_theorem": None if opt is None else result.best_max_cost - opt.max_cost,
        "status": status,
        "angles_rad": list(result.best_design.angles),
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_SEARCH_FIELDS)
        cells = []
        for key in _SEARCH_FIELDS:
            v = row[key]
            if key == "angles_rad":
                cells.append(" ".join(_fmt_angle(a) for a in v))
            elif v is None:
                cells.append("")
            elif isinstance(v, float):
                cells.append(_csv_num(v))
            else:
                cells.append(str(v).lower() if isinstance(v, bool) else str(v))
        w.writerow(cells)
        out.write(buf.getvalue())
    else:
        out.write(_dump_json(row))
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    design = read_angle_file(args.design)
    if not 2 <= args.k <= design.n:
        raise UsageError(f"--k must satisfy 2 <= k <= n={design.n}")
    try:
        cfg = SimConfig(trials=args.trials, noise_sigma=args.noise_sigma, seed=args.seed, signal_norm=args.signal_norm)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = simulate(design, args.k, cfg)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["subset", "estimable", "sigma_min", "trials", "mean_error", "max_error", "bound_violations"])
        for r in report.records:
            w.writerow([r.subset.label(), str(r.estimable).lower(), _csv_num(r.sigma_min), r.trials,
                        _csv_num(r.mean_error), _csv_num(r.max_error), r.bound_violations])
        out.write(buf.getvalue())
    else:
        doc = {
            "n": design.n,
            "k": report.k,
            "trials": cfg.trials,
            "noise_sigma": cfg.noise_sigma,
            "seed": cfg.seed,
            "signal_norm": cfg.signal_norm,
            "bound_violations": report.bound_violations,
            "unestimable": [list(s.indices) for s in report.unestimable],
            "worst_subset_mean_error": _num(report.worst_subset_mean_error),
            "max_error": _num(report.max_error),
            "subsets": [
                {
                    "subset": list(r.subset.indices),
                    "estimable": r.estimable,
                    "sigma_min": r.sigma_min,
                    "trials": r.trials,
                    "mean_error": _num(r.mean_error),
                    "max_error": _num(r.max_error),
                    "bound_violations": r.bound_violations,
                }
                for r in report.records
            ],
        }
        out.write(_dump_json(doc))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="minmax-sensing",
        description="Optimal 2 x N unit-norm sensing matrices under worst-case K-column conditioning.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="write an optimal design")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--k", type=int)
    d.add_argument("--family", default="auto", help="auto or one of: " + ", ".join(f.value for f in Family))
    d.add_argument("--t1", type=float, help="first free doubled angle (k3-n4-family)")
    d.add_argument("--t2", type=float, help="second free doubled angle (k3-n4-family)")
    d.add_argument("--out", help="output file (.txt for plain text, otherwise JSON); default stdout")
    d.set_defaults(func=cmd_design)

    e = sub.add_parser("eval", help="worst-case evaluation of a design file")
    e.add_argument("--design", required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("search", help="numerical search for the best design")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--method", choices=["grid", "local"], default="local")
    s.add_argument("--resolution", type=int, default=24)
    s.add_argument("--restarts", type=int, default=50)
    s.add_argument("--seed", type=int)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max subset evaluations for grid search")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.set_defaults(func=cmd_search)

    m = sub.add_parser("simulate", help="Monte-Carlo estimation error on every k-subset")
    m.add_argument("--design", required=True)
    m.add_argument("--k", type=int, required=True)
    m.add_argument("--trials", type=int, default=1000)
    m.add_argument("--noise-sigma", type=float, required=True)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--signal-norm", type=float, default=1.0)
    m.add_argument("--format", choices=["json", "csv"], default="json")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
