"""Command-line front end: ``mefe solve|verify|generate|enumerate|bench``.

Exit codes: 0 yes (or a clean verification), 1 no, 2 not applicable or out
of budget, 3 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional

from . import io as mio
from .core import MEFEError, ResourceBound, format_rational, to_rational, verify
from .oracle import enumerate_all_mefe, solve_bruteforce
from .polycases import AUTO_ORDER, STRATEGIES, dispatch, profile
from .reductions import (
    STRUCTURES,
    SmtiInput,
    ThreeDMInput,
    from_3dpm,
    from_partition,
    from_smti33,
    random_instance,
)

EXIT_YES, EXIT_NO, EXIT_NA, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors count as bad input, so they exit 3 rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _write(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _epsilon(args) -> Optional[Fraction]:
    if args.epsilon is None:
        return None
    try:
        return to_rational(args.epsilon)
    except MEFEError as exc:
        raise InputError(f"bad --epsilon: {exc}") from None


def _text_report(report) -> List[str]:
    lines = [
        f"feasible: {'yes' if report.feasible else 'no'}",
        f"threshold: {format_rational(report.threshold)}",
    ]
    for x, a in report.avg_utils.items():
        lines.append(f"avg_util {x}: {format_rational(a)}")
    for a, b in report.envy_pairs:
        lines.append(f"envy: {a} -> {b}")
    for v in report.violations:
        if v.kind != "envy":
            lines.append(f"violation: {v.kind} {v.course or ''} {v.ta or ''} {v.detail}".rstrip())
    lines.append(f"mefe: {'yes' if report.is_mefe else 'no'}")
    return lines


# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    inst = mio.load_instance(args.instance)
    eps = _epsilon(args)
    if (args.strategy == "approx") != (eps is not None):
        raise InputError("--epsilon is required with --strategy approx and only then")
    try:
        out = dispatch(inst, args.strategy, epsilon=eps, budget=args.budget, jobs=args.jobs)
    except ResourceBound as exc:
        payload = {"verdict": "resource_bound", "reason": str(exc), "strategy": args.strategy}
        _emit(args, payload, [f"verdict: resource bound ({exc})"])
        return EXIT_NA
    threshold = (1 - eps) * inst.k if eps is not None else inst.k
    payload = {"verdict": out.verdict, "solver": out.solver, "threshold": format_rational(threshold)}
    lines = [f"solver: {out.solver}", f"verdict: {out.verdict}"]
    if out.reason:
        payload["reason"] = out.reason
        lines.append(f"reason: {out.reason}")
    if out.is_yes:
        report = verify(inst, out.matching, threshold)
        payload["matching"] = mio.matching_to_dict(out.matching, inst)
        payload["report"] = mio.report_to_dict(report)
        lines += [f"assign {t} -> {x}" for t, x in out.matching.key()]
        lines += _text_report(report)
        if args.output:
            _write(mio.dumps(mio.matching_to_dict(out.matching, inst)), args.output)
    _emit(args, payload, lines)
    return {"yes": EXIT_YES, "no": EXIT_NO}.get(out.verdict, EXIT_NA)


def _emit(args, payload, lines):
    if args.format == "json":
        sys.stdout.write(mio.dumps(payload))
    else:
        sys.stdout.write("\n".join(lines) + "\n")


def cmd_verify(args) -> int:
    inst = mio.load_instance(args.instance)
    mu = mio.load_matching(args.matching)
    report = verify(inst, mu)
    _emit(args, mio.report_to_dict(report), _text_report(report))
    return EXIT_YES if report.is_mefe else EXIT_NO


def cmd_generate(args) -> int:
    if args.source:
        try:
            with open(args.source, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read {args.source}: {exc}") from None
        try:
            if args.kind == "partition":
                inst = from_partition(data["values"])
            elif args.kind == "smti":
                inst = from_smti33(SmtiInput(data["men"], data["women"]), binary=args.binary)
            else:
                inst = from_3dpm(
                    ThreeDMInput(
                        tuple(data["P"]), tuple(data["Q"]), tuple(data["R"]),
                        tuple(tuple(e) for e in data["E"]),
                    )
                )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed {args.kind} input: {exc}") from None
    else:
        k = to_rational(args.k) if args.k is not None else None
        inst = random_instance(
            args.seed, args.n, args.m, args.cap_max, args.val_max, args.tie_policy, args.structure, k
        )
    _write(mio.dumps(mio.instance_to_dict(inst)), args.output)
    return EXIT_YES


def cmd_enumerate(args) -> int:
    inst = mio.load_instance(args.instance)
    try:
        all_mu = enumerate_all_mefe(inst, budget=args.budget, jobs=args.jobs)
    except ResourceBound as exc:
        _emit(args, {"verdict": "resource_bound", "reason": str(exc)}, [f"resource bound: {exc}"])
        return EXIT_NA
    payload = {"count": len(all_mu), "matchings": [mio.matching_to_dict(mu, inst) for mu in all_mu]}
    lines = [f"count: {len(all_mu)}"] + [
        " ".join(f"{t}->{x}" for t, x in mu.key()) or "(empty)" for mu in all_mu
    ]
    _emit(args, payload, lines)
    return EXIT_YES if all_mu else EXIT_NO


def _bench_row(task):
    seed, args_d = task
    inst = random_instance(
        seed, args_d["n"], args_d["m"], args_d["cap_max"], args_d["val_max"],
        args_d["tie_policy"], args_d["structure"],
    )
    prof = profile(inst)
    truth = solve_bruteforce(inst, budget=args_d["budget"]).verdict
    rows = []
    for strat in args_d["strategies"]:
        eps = args_d["epsilon"] if strat == "approx" else None
        start = time.perf_counter()
        try:
            out = dispatch(inst, strat, epsilon=eps, budget=args_d["budget"])
            verdict, solver = out.verdict, out.solver
        except ResourceBound:
            verdict, solver, out = "resource_bound", strat, None
        wall = (time.perf_counter() - start) * 1000
        threshold = (1 - eps) * inst.k if eps is not None else inst.k
        clean = ""
        if out is not None and out.is_yes:
            clean = verify(inst, out.matching, threshold).is_mefe
        if strat == "approx":
            agree = truth != "yes" or verdict == "yes"
        else:
            agree = verdict == truth if verdict in ("yes", "no") else ""
        rows.append({
            "seed": seed, "strategy": strat, "solver": solver, "verdict": verdict,
            "oracle": truth, "agree": agree, "verified": clean,
            "n": inst.n, "m": inst.m, "k": format_rational(inst.k),
            "max_capacity": prof.max_capacity, "max_ta_degree": prof.max_ta_degree,
            "wall_ms": round(wall, 3),
        })
    return rows


def cmd_bench(args) -> int:
    strategies = args.strategies.split(",")
    for s in strategies:
        if s not in STRATEGIES:
            raise InputError(f"unknown strategy {s!r}")
    eps = _epsilon(args)
    if "approx" in strategies and eps is None:
        raise InputError("--epsilon is required when benchmarking approx")
    args_d = dict(
        n=args.n, m=args.m, cap_max=args.cap_max, val_max=args.val_max, tie_policy=args.tie_policy,
        structure=args.structure, budget=args.budget, strategies=strategies, epsilon=eps,
    )
    tasks = [(args.seed + i, args_d) for i in range(args.count)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_bench_row, tasks))
    else:
        chunks = [_bench_row(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    summary = {}
    for s in strategies:
        mine = [r for r in rows if r["strategy"] == s]
        decided = [r for r in mine if r["agree"] != ""]
        summary[s] = {
            "rows": len(mine),
            "applicable": sum(1 for r in mine if r["verdict"] in ("yes", "no")),
            "agreement": f"{sum(1 for r in decided if r['agree'])}/{len(decided)}" if decided else "n/a",
            "unverified_yes": sum(1 for r in mine if r["verdict"] == "yes" and not r["verified"]),
        }
    if args.format == "json":
        # wall time is left out so the output is reproducible byte for byte
        clean_rows = [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows]
        sys.stdout.write(mio.dumps({"rows": clean_rows, "summary": summary}))
    else:
        buf = _io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["seed"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
    return EXIT_YES


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mefe", description="Merit-based envy-free TA matching")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--budget", type=int, default=None, help="search budget (default: $MEFE_BUDGET or 1e8)")
    common.add_argument("--jobs", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="decide an instance")
    p.add_argument("instance")
    p.add_argument("--strategy", choices=STRATEGIES, default="auto")
    p.add_argument("--epsilon", default=None, help="rational in (0,1), approx only")
    p.add_argument("-o", "--output", default=None, help="write the matching JSON here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="check a matching")
    p.add_argument("instance")
    p.add_argument("matching")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", parents=[common], help="emit an instance")
    p.add_argument("--from", dest="kind", choices=("partition", "smti", "3dpm"), default=None)
    p.add_argument("source", nargs="?", default=None, help="input JSON for --from")
    p.add_argument("--binary", action="store_true", help="binary valuations for --from smti")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--cap-max", type=int, default=2)
    p.add_argument("--val-max", type=int, default=4)
    p.add_argument("--tie-policy", choices=("allow", "distinct"), default="allow")
    p.add_argument("--structure", choices=STRUCTURES, default="none")
    p.add_argument("--k", default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("enumerate", parents=[common], help="list every MEFE matching")
    p.add_argument("instance")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("bench", parents=[common], help="compare strategies with the oracle")
    p.add_argument("--strategies", default=",".join(AUTO_ORDER))
    p.add_argument("--epsilon", default=None)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--cap-max", type=int, default=2)
    p.add_argument("--val-max", type=int, default=4)
    p.add_argument("--tie-policy", choices=("allow", "distinct"), default="allow")
    p.add_argument("--structure", choices=STRUCTURES, default="none")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "kind", None) and not args.source:
        parser.error("--from needs an input file")
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except (MEFEError, InputError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"mefe: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
