"""Command-line front end: ``condsage solve|recover|bench|gen-quartic``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import problems
from .problemfile import ProblemFileError, load
from .recovery import recover
from .relaxations import HierarchyLevel, HierarchyTooLarge, solve_spec

EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_EMPTY = 0, 2, 3, 4


class SolverFailure(RuntimeError):
    pass


def _level(args, pf):
    if args.level is None:
        if args.minimax_free and not pf.level.minimax_free:
            raise ProblemFileError("--minimax-free needs --level", "--level")
        return pf.level
    try:
        return HierarchyLevel.parse(args.level, minimax_free=args.minimax_free)
    except (ValueError, TypeError) as e:
        raise ProblemFileError(str(e), "--level") from None


def _solve(pf, level, dump=None):
    spec = pf.to_spec()
    t0 = time.perf_counter()
    try:
        res = solve_spec(spec, level)
    except HierarchyTooLarge as e:
        raise SolverFailure(str(e)) from None
    elapsed = time.perf_counter() - t0
    if res.status not in ("optimal", "inaccurate"):
        raise SolverFailure(f"relaxation status {res.status} "
                            f"(primal {res.primal_status}, dual {res.dual_status})")
    if dump:
        res.primal_prog.dump(dump)
        p = Path(dump)
        res.dual_prog.dump(p.with_name(p.stem + ".dual" + p.suffix))
    return spec, res, elapsed


def _report(res, elapsed, level) -> dict:
    return {"level": str(level), "bound": res.bound, "reported": res.reported,
            "status": res.status, "primal": res.primal_value, "dual": res.dual_value,
            "primal_status": res.primal_status, "dual_status": res.dual_status,
            "seconds": elapsed, "exp_cones": res.n_exp}


def _print_report(rep, out):
    print(f"bound {rep['reported']}", file=out)
    print(f"status {rep['status']} (primal {rep['primal_status']}, "
          f"dual {rep['dual_status']})", file=out)
    print(f"primal {rep['primal']:.10g}  dual {rep['dual']:.10g}", file=out)
    print(f"level {rep['level']}  exponential cones {rep['exp_cones']}  "
          f"time {rep['seconds']:.2f}s", file=out)


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, default=_default)
        fh.write("\n")


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o))


# -------------------------------------------------------------- commands

def cmd_solve(args, out) -> int:
    pf = load(args.path)
    level = _level(args, pf)
    _, res, elapsed = _solve(pf, level, args.dump_conic)
    rep = _report(res, elapsed, level)
    _print_report(rep, out)
    if args.json_out:
        _write_json(args.json_out, rep)
    return EXIT_OK


def cmd_recover(args, out) -> int:
    pf = load(args.path)
    level = _level(args, pf)
    _, res, elapsed = _solve(pf, level, args.dump_conic)
    rep = _report(res, elapsed, level)
    _print_report(rep, out)
    settings = pf.settings(eps_ineq=args.eps_ineq, eps_eq=args.eps_eq)
    cands = recover(res, pf.checked_spec(), settings, do_refine=args.refine)
    for msg in cands.diagnostics:
        print(f"note: {msg}", file=out)
    if not cands:
        print("no candidates", file=out)
        rep["candidates"] = []
        if args.json_out:
            _write_json(args.json_out, rep)
        return EXIT_EMPTY
    print(cands.table(), file=out)
    if pf.geometric:
        print("geometric form of the best candidate: "
              + " ".join(f"{t:.8g}" for t in np.exp(cands.best.x)), file=out)
    rep["candidates"] = [{"x": c.x, "objective": c.objective, "violation": c.violation}
                         for c in cands]
    if args.json_out:
        _write_json(args.json_out, rep)
    return EXIT_OK


BENCH_FIELDS = ["id", "level", "expected", "tolerance", "bound", "primal", "dual",
                "status", "passed", "seconds"]


def _bench_one(job):
    suite, k = job
    case = problems.suite(suite)[k]
    t0 = time.perf_counter()
    row = {"id": case.id, "level": str(case.level), "expected": case.expected,
           "tolerance": case.tolerance()}
    try:
        res = solve_spec(case.spec, case.level)
        row.update(bound=res.bound, primal=res.primal_value, dual=res.dual_value,
                   status=res.status)
    except Exception as e:  # a failing case must not stop the table
        row.update(bound=float("nan"), primal=float("nan"), dual=float("nan"),
                   status=f"error: {e}")
    ok = (case.expected is not None and np.isfinite(row["bound"])
          and abs(row["bound"] - case.expected) <= case.tolerance())
    row.update(passed=bool(ok), seconds=round(time.perf_counter() - t0, 3))
    return row


def cmd_bench(args, out) -> int:
    if not args.suite:
        raise ProblemFileError(f"suite name required (one of {', '.join(problems.SUITES)})",
                               "suite")
    if args.suite not in problems.SUITES:
        raise ProblemFileError(f"unknown suite {args.suite!r} "
                               f"(one of {', '.join(problems.SUITES)})", "suite")
    jobs = [(args.suite, k) for k in range(len(problems.suite(args.suite)))]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    out.write(buf.getvalue())
    if args.json_out:
        _write_json(args.json_out, rows)
    npass = sum(r["passed"] for r in rows)
    print(f"{npass}/{len(rows)} cases within tolerance", file=sys.stderr)
    return EXIT_OK


def cmd_gen_quartic(args, out) -> int:
    if args.n < 2:
        raise ProblemFileError("n must be at least 2", "n")
    case = problems.random_quartic(args.n, args.seed)
    text = case.problem.dumps() + "\n"
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="condsage",
                                description="Conditional SAGE relaxations and solution recovery.")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = p.add_subparsers(dest="command", required=True)

    def problem_cmd(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("path", help="JSON problem file")
        s.add_argument("--level", help="hierarchy level p,q,l (p,q or l with --minimax-free)")
        s.add_argument("--minimax-free", action="store_true", help="use the minimax-free hierarchy")
        s.add_argument("--dump-conic", metavar="PATH",
                       help="write the primal (PATH) and dual (PATH.dual) conic programs")
        s.add_argument("--json-out", metavar="PATH", help="write a JSON report")
        return s

    problem_cmd("solve", "compute a SAGE lower bound")
    r = problem_cmd("recover", "compute a bound and recover candidate solutions")
    r.add_argument("--refine", action="store_true", help="refine candidates locally")
    r.add_argument("--eps-ineq", type=float, help="inequality tolerance")
    r.add_argument("--eps-eq", type=float, help="equality tolerance")
    b = sub.add_parser("bench", help="run a benchmark suite and print CSV")
    b.add_argument("suite", nargs="?", default="", help=", ".join(problems.SUITES))
    b.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    b.add_argument("--json-out", metavar="PATH", help="also write rows as JSON")
    g = sub.add_parser("gen-quartic", help="emit a random sparse quartic problem file")
    g.add_argument("n", type=int, help="number of variables")
    g.add_argument("--seed", type=int, default=0, help="generator seed")
    g.add_argument("--json-out", metavar="PATH", help="write the file here instead of stdout")
    return p


COMMANDS = {"solve": cmd_solve, "recover": cmd_recover, "bench": cmd_bench,
            "gen-quartic": cmd_gen_quartic}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args, out)
    except ProblemFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except SolverFailure as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
