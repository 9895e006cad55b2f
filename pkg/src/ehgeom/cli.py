"""Command-line client: `ehgeom geometry|geodesic|spectral|spinor|verify`.

Exit codes: 0 ok, 1 verification failure or divergent quadrature, 2 usage error.
"""

import argparse
import csv
import io
import json
import math
import sys

from pydantic import ValidationError

from . import service
from .schemas import RunConfig
from .specfun import ConvergenceError, DomainError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return "" if x is None else str(x)


def write_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json(model):
    return json.dumps(model.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def build_parser():
    p = argparse.ArgumentParser(prog="ehgeom", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("geometry", "geodesic", "spectral", "spinor", "verify"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"),
                        default="json" if name == "spectral" else "csv")
        sp.add_argument("--t", type=float)
        sp.add_argument("--eps", type=float)
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--tol", type=float)
    return p


def load_config(args):
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    for key, attr in (("t", "t"), ("eps", "eps"), ("lambda", "lam"), ("tol", "tol")):
        value = getattr(args, attr)
        if value is not None:
            data[key] = value
    return RunConfig.model_validate(data)


def render(command, result, fmt_name):
    """Return (text, ok)."""
    if command in ("geometry", "spinor"):
        ok = True
        text = write_csv(result.columns, result.rows) if fmt_name == "csv" else _json(result)
    elif command == "geodesic":
        ok = True
        if fmt_name == "csv":
            text = write_csv(result.table.columns, result.table.rows)
            for k in sorted(result.summary):
                print(f"{k}={fmt(result.summary[k])}", file=sys.stderr)
        else:
            text = _json(result)
    elif command == "spectral":
        lap = result.laplace
        ok = result.dirac_decreasing and all(
            d.analytic_bound is None or d.quotient <= d.analytic_bound for d in result.dirac)
        if lap.t <= lap.eps:
            ok = ok and lap.quotient <= lap.bound * (1.0 + 1e-9)
        if fmt_name == "csv":
            rows = [["dirac", d.eps, d.t, d.quotient,
                     math.nan if d.analytic_bound is None else d.analytic_bound] for d in result.dirac]
            rows.append(["laplace", lap.eps, lap.t, lap.quotient, lap.bound])
            text = write_csv(["kind", "eps", "t", "quotient", "bound"], rows)
        else:
            text = _json(result)
    else:
        ok = result.all_passed
        if fmt_name == "csv":
            text = write_csv(["name", "value", "threshold", "passed"],
                             [[c.name, c.value, c.threshold, c.passed] for c in result.checks])
        else:
            text = _json(result)
    return text, ok


RUNNERS = {
    "geometry": service.run_geometry,
    "geodesic": service.run_geodesic,
    "spectral": service.run_spectral,
    "spinor": service.run_spinor,
    "verify": service.run_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        result = RUNNERS[args.command](cfg)
    except (OSError, json.JSONDecodeError, ValidationError, DomainError) as exc:
        print(f"ehgeom: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, RuntimeError) as exc:
        print(f"ehgeom: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text, ok = render(args.command, result, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
