"""Command-line front end.

Exit statuses: 0 success, 2 config/validation error, 3 evaluation error
(including null branches), 4 proposition syntax error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from typing import Sequence

from . import __version__
from .config import load_scenario
from .errors import (
    CapacityError,
    OpenFutureError,
    PropositionSyntaxError,
    ScenarioError,
)
from .logic import Context, evaluate, parse, truth_profile
from .scenarios import CatParams, Scenario, build_cat_record_circuit
from .transition import TransitionQuery, transition_matrix, transition_probability
from .universe import real_experiences

EXIT_OK, EXIT_CONFIG, EXIT_EVAL, EXIT_SYNTAX = 0, 2, 3, 4


def fmt(x: float) -> str:
    """12 significant digits; the CSV contract relies on this round-tripping."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.12g}"


def _emit(rows: list[list], header: list[str], as_csv: bool, out) -> None:
    if as_csv:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    cells = [header] + [[str(c) if c != "" else "-" for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _scenario(args) -> Scenario:
    if args.scenario:
        try:
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario: {exc}") from None
        return load_scenario(text)
    try:
        return build_cat_record_circuit(CatParams(args.gamma, args.dt, args.steps))
    except CapacityError as exc:
        raise ScenarioError(str(exc)) from None


def _threads(args) -> int:
    return args.threads or os.cpu_count() or 1


def cmd_branches(args, out) -> None:
    sc = _scenario(args)
    d = sc.branches_at(args.at)
    live = set(real_experiences(d))
    order = sorted(range(len(d)), key=lambda i: (-d.entries[i].weight, i))
    rows = [[d.entries[i].label, fmt(d.entries[i].weight), "yes" if d.entries[i].label in live else "no"]
            for i in order]
    if not args.all:
        rows = [r for r in rows if r[2] == "yes"]
    _emit(rows, ["label", "weight", "real"], args.csv, out)


def cmd_prob(args, out) -> None:
    sc = _scenario(args)
    p = transition_probability(sc, TransitionQuery(args.from_label, args.t, args.to_label, args.s))
    out.write(f"{p:.12f}\n")


def cmd_matrix(args, out) -> None:
    sc = _scenario(args)
    tm = transition_matrix(sc, args.t, args.s, threads=_threads(args))
    live_from = tm.live_from()
    cols = [tm.labels.index(lab) for lab in live_from]
    rows = [[lab] + [fmt(tm.probs[i, j]) for j in cols] for i, lab in enumerate(tm.labels)]
    sums = tm.column_sums
    rows.append(["(sum)"] + [fmt(sums[j]) for j in cols])
    _emit(rows, ["to\\from"] + live_from, args.csv, out)


def cmd_eval(args, out) -> None:
    prop = parse(args.prop)
    sc = _scenario(args)
    tv = evaluate(prop, sc, Context(args.branch, args.at))
    if args.csv:
        lo, hi = tv.bounds
        _emit([["point" if tv.is_point else "interval", fmt(lo), fmt(hi)]], ["kind", "lo", "hi"], True, out)
    else:
        out.write(f"{tv}\n")


def cmd_profile(args, out) -> None:
    prop = parse(args.prop)
    sc = _scenario(args)
    try:
        times = [float(x) for x in args.times.split(",") if x.strip()]
    except ValueError:
        raise ScenarioError(f"--times must be a comma-separated list of decimals, got {args.times!r}") from None
    tvs = truth_profile(prop, sc, args.branch, times, threads=_threads(args))
    rows = [[fmt(t), "point" if tv.is_point else "interval", fmt(tv.bounds[0]), fmt(tv.bounds[1])]
            for t, tv in zip(times, tvs)]
    _emit(rows, ["t", "kind", "lo", "hi"], args.csv, out)


def cmd_cat_demo(args, out) -> None:
    try:
        sc = build_cat_record_circuit(CatParams(args.gamma, args.dt, args.steps))
    except CapacityError as exc:
        raise ScenarioError(str(exc)) from None
    every = max(1, args.every)
    rows = []
    for k in list(range(0, args.steps + 1, every)) + ([args.steps] if args.steps % every else []):
        t = k * args.dt
        w = sc.branches_at(t).weight("alive")
        exact = math.exp(-2 * args.gamma * t)
        rows.append([fmt(t), fmt(w), fmt(exact), fmt(abs(w - exact))])
    _emit(rows, ["t", "alive_weight", "exp(-2*gamma*t)", "abs_error"], args.csv, out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("scenario")
    src.add_argument("--scenario", metavar="PATH", help="scenario config (JSON); default: the cat record circuit")
    src.add_argument("--gamma", type=float, default=0.5, help="cat decay rate (default 0.5)")
    src.add_argument("--dt", type=float, default=0.01, help="cat time-bin width (default 0.01)")
    src.add_argument("--steps", type=int, default=200, help="number of cat time bins (default 200)")
    common.add_argument("--csv", action="store_true", help="emit CSV instead of a table")
    common.add_argument("--threads", type=int, default=None, metavar="N", help="worker threads (default: all cores)")

    ap = argparse.ArgumentParser(prog="openfuture", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("branches", parents=[common], help="branch weights at a time")
    p.add_argument("--at", type=float, required=True, metavar="T")
    p.add_argument("--all", action="store_true", help="include null branches")
    p.set_defaults(func=cmd_branches)

    p = sub.add_parser("prob", parents=[common], help="P(to at s | from at t)")
    p.add_argument("--from", dest="from_label", required=True, metavar="L")
    p.add_argument("--t", type=float, required=True, metavar="T")
    p.add_argument("--to", dest="to_label", required=True, metavar="L")
    p.add_argument("--s", type=float, required=True, metavar="S")
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("matrix", parents=[common], help="transition matrix between two times")
    p.add_argument("--t", type=float, required=True, metavar="T")
    p.add_argument("--s", type=float, required=True, metavar="S")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("eval", parents=[common], help="truth value of a proposition in a context")
    p.add_argument("--prop", required=True, metavar="TEXT")
    p.add_argument("--branch", required=True, metavar="LABEL")
    p.add_argument("--at", type=float, required=True, metavar="T")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("profile", parents=[common], help="truth value across utterance times")
    p.add_argument("--prop", required=True, metavar="TEXT")
    p.add_argument("--branch", required=True, metavar="LABEL")
    p.add_argument("--times", required=True, metavar="T1,T2,...")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("cat-demo", parents=[common], help="survival curve of the watched cat")
    p.add_argument("--every", type=int, default=10, metavar="K", help="report every K-th bin (default 10)")
    p.set_defaults(func=cmd_cat_demo)
    return ap


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except PropositionSyntaxError as exc:
        err.write(f"error: {exc}\n{exc.caret()}\n")
        return EXIT_SYNTAX
    except ScenarioError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except OpenFutureError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_EVAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
