"""Command-line front end.

Exit status: 0 success, 1 invalid arguments, 2 numerical failure,
3 verification failure.  Machine output goes to stdout (or ``--output``); a
short human summary goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import eigen, models, suites
from .models import DomainError, IntegrationError, ModelFamily, Params

EXIT_ARGS = 1
EXIT_NUMERIC = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


def fmt_number(x) -> str:
    """Locale-free float with 17 significant digits and an explicit decimal point."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def to_json(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, (bool, int, float, np.integer, np.floating)):
        return fmt_number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{to_json(str(k))}: {to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if not any(isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt_number(v) for v in row])
    return buf.getvalue()


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("PSPECTRAL_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pspectral",
                                     description="Sharp p-Laplacian Neumann eigenvalue bounds "
                                                 "under negative Ricci lower bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_n=True, need_k=True):
        p.add_argument("--p", type=float, default=2.0, help="exponent p > 1 (default 2)")
        if need_n:
            p.add_argument("--n", type=float, required=True, help="dimension n >= 1")
        if need_k:
            p.add_argument("--k", type=float, required=True, help="curvature constant k < 0")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")

    lb = sub.add_parser("lambda-bar", help="lower bound lambda_bar(n, k, d)")
    common(lb)
    lb.add_argument("--d", type=float, required=True, help="diameter d > 0")
    lb.add_argument("--tol", type=float, default=1e-10, help="relative tolerance on lambda")

    db = sub.add_parser("delta-bar", help="minimal model diameter at fixed lambda")
    common(db)
    db.add_argument("--lambda", dest="lam", type=float, required=True)

    md = sub.add_parser("model", help="sampled model function w_{i,a}")
    common(md)
    md.add_argument("--lambda", dest="lam", type=float, required=True)
    md.add_argument("--family", type=int, choices=(1, 2, 3), required=True)
    md.add_argument("--a", type=float, required=True)
    md.add_argument("--samples", type=int, default=201)

    ls = sub.add_parser("landscape", help="(a, b, delta, m) over a grid of a")
    common(ls)
    ls.add_argument("--lambda", dest="lam", type=float, required=True)
    ls.add_argument("--family", type=int, choices=(1, 2, 3), required=True)
    ls.add_argument("--a-from", type=float, required=True)
    ls.add_argument("--a-to", type=float, required=True)
    ls.add_argument("--a-steps", type=int, default=11)

    ac = sub.add_parser("alpha-critical", help="critical frequency alpha_bar and l")
    common(ac)

    vf = sub.add_parser("verify", help="run verification suites")
    vf.add_argument("--suite", default="all", help="all, " + ", ".join(suites.CRITERIA))
    vf.add_argument("--format", choices=("json", "csv"), default="json")
    vf.add_argument("--output", "-o", default="-")
    return parser


def _check(args) -> None:
    if getattr(args, "p", 2.0) <= 1.0:
        raise UsageError("--p must be > 1")
    if hasattr(args, "k") and not args.k < 0.0:
        raise UsageError("--k must be strictly negative (only k < 0 is supported)")
    if hasattr(args, "n") and not args.n >= 1.0:
        raise UsageError("--n must be >= 1")
    if hasattr(args, "d") and not args.d > 0.0:
        raise UsageError("--d must be > 0")
    if hasattr(args, "lam") and not args.lam > 0.0:
        raise UsageError("--lambda must be > 0")
    if getattr(args, "samples", 2) < 2 or getattr(args, "a_steps", 2) < 1:
        raise UsageError("--samples must be >= 2 and --a-steps >= 1")


def _landscape_row(job):
    family, a, params = job
    return models.model_landscape(family, [a], params)[0]


def run(args) -> tuple[int, str, str]:
    """Execute a parsed command; returns (exit status, document, human summary)."""
    _check(args)
    cmd = args.command
    if cmd == "lambda-bar":
        est = eigen.lambda_bar(args.n, args.k, args.d, args.p, tol=args.tol)
        doc = {"lambda_bar": est.value, "bracket": list(est.bracket),
               "iterations": est.iterations, "residual": est.residual}
        return 0, _emit(args, doc), f"lambda_bar = {est.value:.10g}"
    if cmd == "delta-bar":
        est = eigen.delta_bar(args.n, args.k, args.lam, args.p)
        doc = {"delta_bar": est.value, "a_bar": est.extra["a_bar"], "residual": est.residual}
        return 0, _emit(args, doc), f"delta_bar = {est.value:.10g}"
    if cmd == "alpha-critical":
        l_val = models.critical_l(args.p)
        abar = models.alpha_critical(args.p, args.n, args.k)
        return 0, _emit(args, {"l": l_val, "alpha_bar": abar}), f"alpha_bar = {abar:.10g}"
    if cmd == "model":
        params = Params(args.p, args.n, args.k, args.lam)
        sol = models.solve_model(ModelFamily(args.family), args.a, params)
        t = np.linspace(sol.a, sol.t_max, args.samples)
        res = sol.residual(t)
        cols = [t, sol.w(t), sol.wdot(t), sol.phi(t), sol.e(t), res]
        header = ["t", "w", "wdot", "phi", "e", "residual"]
        rows = [list(r) for r in zip(*cols)]
        meta = {"family": args.family, "a": sol.a, "b": sol.b, "delta": sol.delta, "m": sol.m,
                "finite": sol.finite}
        if args.format == "csv":
            return 0, to_csv(header, rows), f"b = {sol.b:.10g}, m = {sol.m:.10g}"
        doc = dict(meta, columns=header, rows=rows)
        return 0, to_json(doc) + "\n", f"b = {sol.b:.10g}, m = {sol.m:.10g}"
    if cmd == "landscape":
        params = Params(args.p, args.n, args.k, args.lam)
        grid = np.linspace(args.a_from, args.a_to, args.a_steps)
        family = ModelFamily(args.family)
        jobs = [(family, float(a), params) for a in grid]
        workers = max_workers()
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                out = list(pool.map(_landscape_row, jobs))
        else:
            out = [_landscape_row(j) for j in jobs]
        out.sort(key=lambda r: r.a)
        header = ["a", "b", "delta", "m", "finite"]
        rows = [[r.a, r.b, r.delta, r.m, r.finite] for r in out]
        if args.format == "csv":
            return 0, to_csv(header, rows), f"{len(rows)} rows"
        return 0, to_json({"family": args.family, "columns": header, "rows": rows}) + "\n", \
            f"{len(rows)} rows"
    if cmd == "verify":
        try:
            results = suites.run_suite(args.suite)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
        ok = all(r.passed for r in results)
        header = ["name", "passed", "margin", "seconds", "detail"]
        rows = [[r.name, r.passed, r.margin, r.seconds, r.detail] for r in results]
        if args.format == "csv":
            doc = to_csv(header, rows)
        else:
            doc = to_json({"passed": ok, "results": [dict(zip(header, row)) for row in rows]}) + "\n"
        summary = "\n".join(r.line() for r in results)
        return (0 if ok else EXIT_VERIFY), doc, summary
    raise UsageError(f"unknown command {cmd}")


def _emit(args, doc: dict) -> str:
    if args.format == "csv":
        return to_csv(list(doc), [[_flat(v) for v in doc.values()]])
    return to_json(doc) + "\n"


def _flat(v):
    if isinstance(v, (list, tuple)):
        return " ".join(fmt_number(x) for x in v)
    return v


_NEGATIVE = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")


def _attach_negatives(argv: list[str]) -> list[str]:
    """Rewrite ``--k -1e-8`` as ``--k=-1e-8``; argparse mistakes exponent-form
    negatives for options."""
    out: list[str] = []
    for tok in argv:
        if (_NEGATIVE.match(tok) and out and out[-1].startswith("--") and "=" not in out[-1]):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negatives(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ARGS if exc.code else 0
    try:
        status, doc, summary = run(args)
    except (UsageError, ValueError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (IntegrationError, eigen.BracketError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.output == "-":
        sys.stdout.write(doc)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(doc)
    print(summary, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
