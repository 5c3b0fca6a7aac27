"""Compare the compiled line-search kernel with the pure-Python fallback.

Two measurements:

* per-call time of ``ray_minimize`` on representative rays (both kernels are
  imported side by side in this process);
* end-to-end ``run_nsdm`` wall time, one subprocess per backend, since the
  solver picks its kernel at import.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from proxdescent import backend
from proxdescent.oracle import L1CompositeOracle, MaxAffineOracle, QuadraticOracle, Rosenbrock

RUN_SNIPPET = """
import time
from proxdescent import backend, corpus_by_id, run_nsdm
spec = corpus_by_id()[{pid!r}]
t0 = time.perf_counter()
tr = run_nsdm(spec.oracle, spec.x0)
print(backend.NAME, tr.iterations, repr(tr.final.f_value), time.perf_counter() - t0)
"""


def rays():
    rng = np.random.default_rng(0)
    u = rng.standard_normal(2)
    u /= np.linalg.norm(u)
    x = np.array([-1.2, 1.0])
    out = [("rosenbrock (prescan)", Rosenbrock().ray(x, u), True)]
    q = QuadraticOracle(np.diag([1.0, 4.0]), [0.0, 0.0])
    out.append(("quadratic", q.ray(np.array([2.0, 1.0]), -q.gradient(np.array([2.0, 1.0])) / np.linalg.norm([2.0, 4.0])), False))
    m = MaxAffineOracle(rng.standard_normal((50, 2)), rng.standard_normal(50), 1.0)
    out.append(("max_affine, 50 pieces", m.ray(x, u), False))
    d = 200
    l1 = L1CompositeOracle(0.5, np.eye(d), rng.standard_normal(d))
    ud = rng.standard_normal(d)
    out.append((f"l1_composite, dim {d}", l1.ray(rng.standard_normal(d), ud / np.linalg.norm(ud)), False))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--problem", default="rosenbrock", help="corpus id for the end-to-end run")
    args = ap.parse_args(argv)

    kernels = backend.available()
    if "compiled" not in kernels:
        print("compiled extension not built; only the python kernel is available", file=sys.stderr)
    print(f"{'ray':<24} " + " ".join(f"{k:>14}" for k in kernels) + "   speedup")
    for name, ray, prescan in rays():
        times = {}
        results = set()
        for k, mod in kernels.items():
            results.add(mod.ray_minimize(ray, 1e3, 1e-10, prescan))
            times[k] = min(timeit.repeat(lambda: mod.ray_minimize(ray, 1e3, 1e-10, prescan),
                                         number=args.repeat, repeat=3)) / args.repeat
        same = "" if len(results) == 1 else "  (results differ!)"
        ratio = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{name:<24} " + " ".join(f"{1e6 * times[k]:>12.1f}us" for k in kernels) + f"   {ratio:6.1f}x{same}")

    print(f"\nend-to-end run_nsdm on {args.problem}:")
    for k in kernels:
        env = dict(os.environ, PROXDESCENT_BACKEND=k)
        res = subprocess.run([sys.executable, "-c", RUN_SNIPPET.format(pid=args.problem)],
                             env=env, capture_output=True, text=True, check=True)
        name, iters, f, secs = res.stdout.split()
        print(f"  {name:<9} {iters:>7} iterations  f={f:<24} {float(secs):8.3f}s")


if __name__ == "__main__":
    main()
