"""Time the numba kernels against the numpy / pure Python fallbacks.

    python3 benchmarks/bench_kernels.py --n 7 --p 1 --s 2 --repeat 3

Each kernel runs once per backend to warm up (numba compiles on first call),
then ``--repeat`` timed runs; the best time is reported.  Results from the two
paths are compared so a speedup never hides a disagreement.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from pmekr import _accel, kernels
from pmekr.cycles import order_batches
from pmekr.constructions import star_family
from pmekr.matching import Signature
from pmekr.search import build_disjointness_graph


def best_of(fn, repeat: int):
    out = fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def run(n: int, p: int, s: int, repeat: int, solver: tuple[int, int, int]) -> dict:
    sig = Signature(p, s)
    batches = list(order_batches(n, restricted=True))
    sigma0 = np.concatenate([b[0] for b in batches])
    tau = np.concatenate([b[1] for b in batches])
    fam = np.array(sorted(F.mask for F in star_family(n, sig, 0)), dtype=np.int64)
    gn, gp, gs = solver
    g = build_disjointness_graph(gn, (gp, gs))
    gadj, dadj = g.intersecting(), g.disjoint

    rows = {}
    outs = {}
    for name in ("numba", "numpy"):
        _accel.set_backend(name)
        t_tab, (b, r) = best_of(lambda: kernels.interval_tables(sigma0, tau, p, s), repeat)
        t_look, (bi, ri) = best_of(lambda: (kernels.lookup(b, fam), kernels.lookup(r, fam)), repeat)
        t_stat, st = best_of(lambda: kernels.order_stats(b, r, bi, ri, n, p, s), repeat)
        t_cl, cl = best_of(lambda: kernels.clique_search(gadj, dadj, (1 << g.size) - 1), max(1, repeat // 3))
        rows[name] = {
            "interval_tables": t_tab,
            "lookup": t_look,
            "order_stats": t_stat,
            "clique_search": t_cl,
        }
        outs[name] = (b, r, bi, ri, st, cl)

    a, z = outs["numba"], outs["numpy"]
    agree = (
        all(np.array_equal(x, y) for x, y in zip(a[:4], z[:4]))
        and all(np.array_equal(a[4][k], z[4][k]) for k in a[4])
        and a[5]["best"] == z[5]["best"]
        and a[5]["nodes"] == z[5]["nodes"]
    )
    return {
        "orders": int(sigma0.shape[0]),
        "instance": {"n": n, "p": p, "s": s},
        "solver_instance": {"n": gn, "p": gp, "s": gs, "members": g.size},
        "seconds": rows,
        "speedup": {k: rows["numpy"][k] / rows["numba"][k] for k in rows["numba"]},
        "agree": agree,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=7)
    ap.add_argument("--p", type=int, default=1)
    ap.add_argument("--s", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--solver", default="5,1,2", help="n,p,s for the clique search timing")
    ap.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; nothing to compare", file=sys.stderr)
        return 2
    solver = tuple(int(x) for x in args.solver.split(","))
    res = run(args.n, args.p, args.s, args.repeat, solver)
    if args.json:
        print(json.dumps(res, indent=2))
    else:
        print(f"{res['orders']} orders of n={args.n}; solver on H^({solver[1]},{solver[2]})({solver[0]})")
        print(f"{'kernel':16s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
        for k, t in res["seconds"]["numba"].items():
            print(f"{k:16s} {t:10.4f} {res['seconds']['numpy'][k]:10.4f} {res['speedup'][k]:8.1f}")
        print("paths agree" if res["agree"] else "PATHS DISAGREE")
    return 0 if res["agree"] else 1


if __name__ == "__main__":
    sys.exit(main())
