"""Command-line front end.

Exit status: 0 when every checked verdict matches its expectation, 1 on a
mismatch, 2 on usage or input errors, 3 when a resource limit is hit.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
import time
from typing import List, Optional

from . import __version__
from .ctl import Fairness, builtin_properties, check, parse_formula
from .ctl.properties import BuiltinProperty
from .errors import (
    OverflowEncountered,
    RingelectError,
    StateLimitExceeded,
    StepBudgetExhausted,
)
from .protocol import Variant, validate_uids
from .simulate import RoundRobin, UniformEnabled, rows_to_csv, run_async, sweep, sync_oracle
from .smv import emit_smv, smv_filename
from .statespace import ExploreLimits, explore

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _variant(text):
    try:
        return Variant.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown variant {text!r} (use general|modified|extra)")


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        value = 0
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _n_range(text):
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad range {text!r} (expected a..b)")
    lo, hi = int(m.group(1)), int(m.group(2))
    return list(range(lo, hi + 1))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--variant", type=_variant, default=Variant.MODIFIED)
    common.add_argument("-n", type=int, help="ring size (defaults to the length of --uids)")
    ids = common.add_mutually_exclusive_group()
    ids.add_argument("--uids", help="comma-separated uid permutation, ring order")
    ids.add_argument("--uid-seed", type=int, help="draw a random permutation of 0..n-1")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes for independent runs")

    p = _Parser(prog="ringelect", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ringelect {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="model-check properties")
    c.add_argument("--props", default="builtin", help="'builtin' or a property file")
    c.add_argument("--fairness", choices=["running", "off"], default="running",
                   help="fairness for liveness properties and property files")
    c.add_argument("--fair-safety", action="store_true", help="also apply --fairness to P2 and P3")
    c.add_argument("--max-states", type=_positive, default=10**7)

    e = sub.add_parser("explore", parents=[common], help="reachable-state statistics")
    e.add_argument("--max-states", type=_positive, default=10**7)

    s = sub.add_parser("simulate", parents=[common], help="randomized asynchronous runs")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--runs", type=_positive, default=1)
    s.add_argument("--max-steps", type=_positive, default=10**6)
    s.add_argument("--scheduler", choices=["uniform", "roundrobin"], default="uniform")

    w = sub.add_parser("sweep", parents=[common], help="simulation sweep over ring sizes")
    w.add_argument("--variants", default="all", help="comma list of variants or 'all'")
    w.add_argument("--n-range", type=_n_range, default=list(range(2, 9)))
    w.add_argument("--runs", type=_positive, default=10)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--max-steps", type=_positive, default=10**6)

    sub.add_parser("export-smv", parents=[common], help="write an SMV model")
    return p


def resolve_uids(args) -> tuple:
    """Returns ``(uids, uid_seed)`` from --uids / --uid-seed / -n."""
    if args.uids is not None:
        try:
            uids = [int(t) for t in args.uids.split(",") if t.strip()]
        except ValueError:
            raise UsageError(f"--uids: not a comma-separated integer list: {args.uids!r}")
        if args.n is not None and args.n != len(uids):
            raise UsageError(f"-n {args.n} does not match {len(uids)} uids in {args.uids!r}")
        return tuple(validate_uids(uids)), None
    if args.n is None:
        raise UsageError("need -n or --uids")
    if args.n < 1:
        raise UsageError(f"-n: ring size must be positive, got {args.n}")
    uids = list(range(args.n))
    if args.uid_seed is not None:
        random.Random(args.uid_seed).shuffle(uids)
    return tuple(validate_uids(uids)), args.uid_seed


def load_properties(path: str, n: int, fairness: Fairness) -> List[BuiltinProperty]:
    """Property file: one ``name: formula`` per line; ``name (expect false):``
    marks a formula that must not hold.  ``#`` starts a comment."""
    props = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.fullmatch(r"([\w.-]+)\s*(?:\(\s*expect\s+(true|false)\s*\))?\s*:\s*(.+)", line)
            if not m:
                raise UsageError(f"{path}:{lineno}: expected 'name: formula', got {line!r}")
            formula = parse_formula(m.group(3), n)
            expected = m.group(2) != "false"
            props.append(BuiltinProperty(m.group(1), formula, fairness, expected, m.group(3)))
    return props


def describe_delta(before, after) -> str:
    if after is None:
        return "inbox overflow"
    if before == after:
        return "blocked (stutter)"
    parts = []
    for i, (a, b) in enumerate(zip(before.nodes, after.nodes)):
        changes = []
        for name in ("mode", "pc", "vid", "id2", "id3", "inbox"):
            x, y = getattr(a, name), getattr(b, name)
            if x != y:
                changes.append(f"{name} {_fmt(x)}->{_fmt(y)}")
        if changes:
            parts.append(f"node {i}: " + ", ".join(changes))
    return "; ".join(parts)


def _fmt(v):
    if hasattr(v, "name"):
        return v.name
    if isinstance(v, tuple):
        return "[" + ",".join(map(str, v)) + "]"
    return "-" if v is None else str(v)


def trace_json(graph, trace) -> dict:
    entries = []
    for k, (sid, label) in enumerate(trace.steps):
        before = graph.state(sid)
        if label is None:
            delta = "end"
        else:
            delta = describe_delta(before, graph.state(int(graph.succ[sid, label])))
        entries.append({"step": k, "process": label, "state": sid, "delta": delta})
    out = {"steps": entries}
    if trace.loop_start is not None:
        out["loop_start"] = trace.loop_start
        out["loop_processes"] = sorted(trace.loop_labels())
    return out


def _emit(args, payload: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _header(command, variant, uids, uid_seed):
    doc = {"tool": "ringelect", "version": __version__, "command": command,
           "variant": variant.value, "n": len(uids), "uids": list(uids)}
    if uid_seed is not None:
        doc["uid_seed"] = uid_seed
    return doc


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    uids, seed = resolve_uids(args)
    n = len(uids)
    fairness = Fairness.parse(args.fairness)
    if args.props == "builtin":
        props = []
        for prop in builtin_properties(n, max(uids)):
            fair = fairness if (prop.fairness is Fairness.RUNNING or args.fair_safety) else prop.fairness
            props.append(prop._replace(fairness=fair))
    else:
        props = load_properties(args.props, n, fairness)
    doc = _header("check", args.variant, uids, seed)
    try:
        graph, stats = explore(args.variant, uids, ExploreLimits(max_states=args.max_states))
    except StateLimitExceeded as exc:
        doc["stats"] = exc.stats.to_dict(exc.graph)
        doc["error"] = str(exc)
        _finish(args, doc, t0)
        return EXIT_LIMIT
    results = []
    ok = True
    for prop in props:
        res = check(graph, prop.formula, prop.fairness)
        match = res.holds == prop.expected
        ok &= match
        entry = {"name": prop.name, "formula": str(prop.formula), "fairness": prop.fairness.value,
                 "expected": prop.expected, "holds": res.holds, "matches": match, "sat_count": res.sat_count}
        if res.evidence is not None:
            entry["evidence"] = trace_json(graph, res.evidence)
        results.append(entry)
    doc["properties"] = results
    doc["stats"] = stats.to_dict(graph)
    _finish(args, doc, t0)
    return EXIT_OK if ok else EXIT_MISMATCH


def _finish(args, doc, t0):
    doc["elapsed_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    _emit(args, json.dumps(doc, indent=2) + "\n")


def cmd_explore(args) -> int:
    t0 = time.perf_counter()
    uids, seed = resolve_uids(args)
    status = EXIT_OK
    try:
        graph, stats = explore(args.variant, uids, ExploreLimits(max_states=args.max_states))
    except StateLimitExceeded as exc:
        graph, stats, status = exc.graph, exc.stats, EXIT_LIMIT
    if args.format == "csv":
        d = stats.to_dict(graph)
        d["uids"] = " ".join(map(str, d["uids"]))
        _emit(args, ",".join(d) + "\n" + ",".join(str(v) for v in d.values()) + "\n")
        return status
    doc = _header("explore", args.variant, uids, seed)
    doc["stats"] = stats.to_dict(graph)
    doc["overflow_reached"] = graph.overflow_reached
    doc["truncated"] = graph.truncated
    _finish(args, doc, t0)
    return status


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    uids, seed = resolve_uids(args)
    oracle = sync_oracle(uids)
    reports, status = [], EXIT_OK
    for run in range(args.runs):
        sched = RoundRobin() if args.scheduler == "roundrobin" else UniformEnabled(args.seed + run)
        try:
            rep = run_async(args.variant, uids, sched, args.max_steps)
        except StepBudgetExhausted as exc:
            rep, status = exc.report, EXIT_LIMIT
        except OverflowEncountered as exc:
            rep, status = exc.report, max(status, EXIT_MISMATCH)
        if rep.terminated and (rep.elected != oracle.winner or rep.elected_vid != max(uids)):
            status = max(status, EXIT_MISMATCH)
        if not rep.terminated and status == EXIT_OK:
            status = EXIT_MISMATCH
        reports.append(dict(vars(rep), seed=None if args.scheduler == "roundrobin" else args.seed + run))
    if args.format == "csv":
        rows = [{"variant": args.variant.value, "n": len(uids), "seed": r["seed"], "uids": " ".join(map(str, uids)),
                 "elected": r["elected"], "elected_vid": r["elected_vid"], "steps": r["steps"],
                 "link_transmissions": r["link_transmissions"], "oracle_winner": oracle.winner,
                 "phases": oracle.phases} for r in reports]
        _emit(args, rows_to_csv(rows))
        return status
    doc = _header("simulate", args.variant, uids, seed)
    doc["oracle"] = vars(oracle)
    doc["runs"] = reports
    _finish(args, doc, t0)
    return status


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    if args.variants == "all":
        variants = list(Variant)
    else:
        try:
            variants = [Variant.parse(v) for v in args.variants.split(",")]
        except ValueError as exc:
            raise UsageError(f"--variants: {exc}")
    rows = sweep(variants, args.n_range, args.runs, args.seed, args.max_steps, jobs=args.jobs)
    bad = [r for r in rows if r["elected"] != r["oracle_winner"] or r["elected_vid"] != r["n"] - 1]
    if args.format == "json":
        doc = {"tool": "ringelect", "version": __version__, "command": "sweep", "rows": rows}
        _finish(args, doc, t0)
    else:
        _emit(args, rows_to_csv(rows))
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_export_smv(args) -> int:
    uids, _ = resolve_uids(args)
    model = emit_smv(args.variant, uids)
    if args.out and os.path.isdir(args.out):
        with open(os.path.join(args.out, smv_filename(args.variant, len(uids))), "w") as fh:
            fh.write(model.text)
    else:
        _emit(args, model.text)
    return EXIT_OK


COMMANDS = {"check": cmd_check, "explore": cmd_explore, "simulate": cmd_simulate,
            "sweep": cmd_sweep, "export-smv": cmd_export_smv}


def run_cli(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ringelect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RingelectError, OSError, ValueError) as exc:
        print(f"ringelect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StepBudgetExhausted:
        return EXIT_LIMIT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
