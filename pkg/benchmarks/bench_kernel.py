"""Compare the pure-Python and compiled transition kernels.

    python3 benchmarks/bench_kernel.py [--repeat 3] [--json out.json]

Times full state-space exploration and a batch of simulator runs on both
backends and checks that they produce identical results.
"""

import argparse
import json
import platform
import random
import statistics
import time

from ringelect import Variant, explore
from ringelect.simulate import UniformEnabled, run_async

EXPLORE_CASES = [(Variant.GENERAL, 6), (Variant.MODIFIED, 7), (Variant.EXTRA, 8)]
SIM_CASES = [(Variant.GENERAL, 32), (Variant.MODIFIED, 32), (Variant.EXTRA, 32)]
SIM_RUNS = 20


def timed(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times), result


def bench_explore(variant, n, backend, repeat):
    def go():
        graph, stats = explore(variant, list(range(n)), backend=backend)
        return stats.reachable_states, graph.succ.tobytes()
    return timed(go, repeat)


def bench_simulate(variant, n, backend, repeat):
    rings = [random.Random(s).sample(range(n), n) for s in range(SIM_RUNS)]

    def go():
        return [(r.elected, r.steps) for r in
                (run_async(variant, u, UniformEnabled(s), backend=backend) for s, u in enumerate(rings))]
    return timed(go, repeat)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the results here")
    args = ap.parse_args()

    rows = []
    print(f"python {platform.python_version()} on {platform.machine()}")
    print(f"{'task':<24}{'pure s':>10}{'compiled s':>12}{'speedup':>9}  detail")
    cases = [("explore", v, n, bench_explore) for v, n in EXPLORE_CASES]
    cases += [("simulate", v, n, bench_simulate) for v, n in SIM_CASES]
    for kind, variant, n, fn in cases:
        p_best, _, p_res = fn(variant, n, "pure", args.repeat)
        c_best, _, c_res = fn(variant, n, "compiled", args.repeat)
        if p_res != c_res:
            raise SystemExit(f"backends disagree on {kind} {variant.value} n={n}")
        detail = f"{p_res[0]} states" if kind == "explore" else f"{SIM_RUNS} runs"
        name = f"{kind} {variant.value} n={n}"
        print(f"{name:<24}{p_best:>10.3f}{c_best:>12.3f}{p_best / c_best:>8.1f}x  {detail}")
        rows.append({"task": kind, "variant": variant.value, "n": n, "pure_s": p_best,
                     "compiled_s": c_best, "speedup": p_best / c_best})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
