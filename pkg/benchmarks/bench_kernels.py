"""Compare the numba kernels with the plain-Python fallback.

Each backend runs in its own interpreter (the choice is made at import time
from ``MOTIFSCOPE_NUMBA``). Timings are best-of-N wall seconds; the numba
column excludes compilation because every workload is run once to warm up.

    python benchmarks/bench_kernels.py [--vertices 2000] [--edges 10000] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
from motifscope import SwapConfig, count_monomorphisms, parse_motif, xswap
from motifscope import _kernels as K
from motifscope.fixtures import random_digraph

n, m, repeat = map(int, sys.argv[1:4])
g = random_digraph(n, m, seed=1)
jobs = {
    "3-cycle count": lambda: count_monomorphisms(parse_motif("A -> B; B -> C; C -> A"), g).count,
    "feed-forward count": lambda: count_monomorphisms(parse_motif("A -> B; B -> C; A -> C"), g).count,
    "4-path count": lambda: count_monomorphisms(parse_motif("A -> B; B -> C; C -> D"), g).count,
    "xswap x10": lambda: xswap(g, SwapConfig(10, 3)).digest(),
}
out = {"backend": K.backend(), "results": {}}
for name, fn in jobs.items():
    value = fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out["results"][name] = {"seconds": best, "value": value}
print(json.dumps(out))
"""


def run_backend(flag: str, args) -> dict:
    env = dict(os.environ, MOTIFSCOPE_NUMBA=flag)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(args.vertices), str(args.edges), str(args.repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vertices", type=int, default=2000)
    ap.add_argument("--edges", type=int, default=10000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    t0 = time.perf_counter()
    fast = run_backend("1", args)
    slow = run_backend("0", args)
    print(f"random digraph: {args.vertices} vertices, {args.edges} edges")
    print(f"{'workload':<20} {fast['backend']:>14} {slow['backend']:>10} {'speedup':>9}")
    for name, r in fast["results"].items():
        s = slow["results"][name]
        if r["value"] != s["value"]:
            raise SystemExit(f"backends disagree on {name}: {r['value']} vs {s['value']}")
        print(f"{name:<20} {r['seconds']:>13.4f}s {s['seconds']:>9.4f}s {s['seconds'] / r['seconds']:>8.1f}x")
    print(f"(total {time.perf_counter() - t0:.1f}s; outputs identical across backends)")


if __name__ == "__main__":
    main()
