"""Command-line driver: verification, counting, ratio scans, tabulation.

Subcommands
    verify      recompute every published constant, emit direction-aware rows
    count       one pattern-counting query (pi_1ab, D_1ab, pi_1r, D_1r, D_sr)
    ratio       counts and count/predictor ratios at ascending checkpoints
    functions   tabulate F0, f0 or w at given points
    constants   the Euler products and aggregated constants

Reports are CSV (default) or JSON built from identical pre-formatted string
rows, so the two formats carry the same values field for field.  Output is
deterministic; the timestamp header is the only varying line and is dropped
with --no-timestamp.  Exit codes: 0 clean, 1 usage or I/O failure, 2 flagged
rows / out-of-domain points.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from datetime import datetime, timezone

from . import constants, engine, pipeline
from .errors import CapacityError, DomainError, EvaluationError
from .sieve_functions import buchstab_w, lower_f0, upper_F0

SCHEMA = 1


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _render(command: str, columns: list[str], rows: list[dict[str, str]],
            fmt: str, timestamp: bool) -> str:
    if fmt == "json":
        doc: dict = {"schema": SCHEMA, "command": command}
        if timestamp:
            doc["generated"] = datetime.now(timezone.utc).isoformat()
        doc["columns"] = columns
        doc["rows"] = rows
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out_path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".triplesieve-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, out_path)  # no partial files on failure
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="write the report here (atomic)")
    p.add_argument("--no-timestamp", action="store_true",
                   help="suppress the generated-at header for byte-identical runs")


def _parse_tolerances(items: list[str]) -> tuple[float | None, dict[str, float]]:
    default = None
    overrides: dict[str, float] = {}
    known = set(pipeline.report_labels())
    for item in items:
        if "=" in item:
            label, _, pct = item.partition("=")
            if label not in known:
                raise DomainError(f"unknown label in --tolerance: {label!r}")
            overrides[label] = float(pct) / 100.0
        else:
            default = float(item) / 100.0
    return default, overrides


def _cmd_verify(args: argparse.Namespace) -> int:
    default_tol, overrides = _parse_tolerances(args.tolerance)
    checks = pipeline.verification_report(
        tolerance=0.01 if default_tol is None else default_tol,
        overrides=overrides,
        use_paper_values=args.paper_values,
    )
    columns = ["label", "computed", "paper", "direction", "rel_diff", "verdict"]
    rows = [
        {
            "label": c.label,
            "computed": _fmt(c.computed),
            "paper": _fmt(c.paper),
            "direction": c.direction,
            "rel_diff": _fmt(c.rel_diff),
            "verdict": c.verdict,
        }
        for c in checks
    ]
    _emit(_render("verify", columns, rows, args.format, not args.no_timestamp), args.out)
    return 0 if all(c.passed for c in checks) else 2


_COUNT_PARAMS = {"pi_1ab": ("a", "b"), "D_1ab": ("a", "b"),
                 "pi_1r": ("r",), "D_1r": ("r",), "D_sr": ("s", "r")}
_COUNT_COLUMNS = ["kind", "size", "a", "b", "s", "r", "count", "predicted", "ratio"]


def _count_row(res: engine.TripleCountResult) -> dict[str, str]:
    row = {c: "" for c in _COUNT_COLUMNS}
    row.update(kind=res.kind, size=str(res.size), count=str(res.count),
               predicted=_fmt(res.predicted), ratio=_fmt(res.ratio))
    for key, val in res.params.items():
        row[key] = str(val)
    return row


def _run_count(kind: str, size: int, values: list[int]) -> engine.TripleCountResult:
    names = _COUNT_PARAMS[kind]
    if len(values) != len(names):
        raise DomainError(f"{kind} takes parameters {' '.join(names)}")
    params = dict(zip(names, values))
    if kind == "pi_1ab":
        return engine.count_pi_1ab(size, params["a"], params["b"])
    if kind == "D_1ab":
        return engine.count_D_1ab(size, params["a"], params["b"])
    return engine.count_chen_variants(kind, size, **params)


def _cmd_count(args: argparse.Namespace) -> int:
    res = _run_count(args.kind, args.size, args.params)
    text = _render("count", _COUNT_COLUMNS, [_count_row(res)],
                   args.format, not args.no_timestamp)
    _emit(text, args.out)
    return 0


def _cmd_ratio(args: argparse.Namespace) -> int:
    checkpoints = [int(float(c)) for c in args.checkpoints.split(",") if c.strip()]
    results = engine.ratio_scan(args.kind, args.a, args.b, checkpoints)
    text = _render("ratio", _COUNT_COLUMNS, [_count_row(r) for r in results],
                   args.format, not args.no_timestamp)
    _emit(text, args.out)
    return 0


def _cmd_functions(args: argparse.Namespace) -> int:
    evaluators = {"F0": upper_F0, "f0": lower_f0, "w": buchstab_w}
    fn = evaluators[args.which]
    rows = []
    failed = False
    for token in args.points.split(","):
        if not token.strip():
            continue
        point = float(token)
        row = {"function": args.which, "point": _fmt(point), "value": "", "error": ""}
        try:
            row["value"] = _fmt(fn(point))
        except DomainError as exc:
            row["error"] = str(exc)
            failed = True
        rows.append(row)
    text = _render("functions", ["function", "point", "value", "error"], rows,
                   args.format, not args.no_timestamp)
    _emit(text, args.out)
    return 2 if failed else 0


def _cmd_constants(args: argparse.Namespace) -> int:
    requested = args.names or ["C2", "C3", "C0"]
    rows = []
    for name in requested:
        row = {"label": name, "value": "", "truncation_prime": "", "tail_bound": ""}
        if name == "C2" or name == "C3":
            res = (constants.constant_C2 if name == "C2" else constants.constant_C3)(1e-6)
            row.update(value=_fmt(res.value), truncation_prime=str(res.truncation_prime),
                       tail_bound=f"{res.tail_bound:.3e}")
        elif name == "C0":
            row["value"] = _fmt(constants.constant_C0())
        elif name.startswith("CN="):
            n = int(name.partition("=")[2])
            row["label"] = f"CN={n}"
            row["value"] = _fmt(constants.singular_series_CN(n))
        else:
            raise DomainError(f"unknown constant {name!r}; use C2, C3, C0 or CN=<N>")
        rows.append(row)
    text = _render("constants", ["label", "value", "truncation_prime", "tail_bound"],
                   rows, args.format, not args.no_timestamp)
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triplesieve",
        description="Recompute the weighted-sieve constants for (p, p+2, p+6) "
                    "almost-prime triples and count them at desk scale.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="recompute and check every published constant")
    p.add_argument("--tolerance", action="append", default=[], metavar="[LABEL=]PCT",
                   help="relative tolerance in percent, globally or per label")
    p.add_argument("--paper-values", action="store_true",
                   help="substitute the published values (report plumbing identity)")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("count", help="one counting query")
    p.add_argument("kind", choices=sorted(_COUNT_PARAMS))
    p.add_argument("size", type=int)
    p.add_argument("params", type=int, nargs="*")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("ratio", help="counts vs predictor at ascending checkpoints")
    p.add_argument("kind", choices=sorted(_COUNT_PARAMS))
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--checkpoints", required=True, metavar="x1,x2,...")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_ratio)

    p = sub.add_parser("functions", help="tabulate a sieve curve at given points")
    p.add_argument("which", choices=("F0", "f0", "w"))
    p.add_argument("--points", required=True, metavar="p1,p2,...")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_functions)

    p = sub.add_parser("constants", help="Euler products and aggregated constants")
    p.add_argument("names", nargs="*", metavar="C2|C3|C0|CN=<N>")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_constants)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, CapacityError, EvaluationError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        sys.stderr.write(parser.format_usage())
        return 1
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
