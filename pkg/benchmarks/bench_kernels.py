"""Compare the compiled and pure-Python elimination kernels.

    python benchmarks/bench_kernels.py [--repeat 3] [--json]

Workloads are boundary matrices of bundled triangulations and their
barycentric subdivisions, seeded sparse +-1 matrices, and one dense matrix
whose transforms leave the int64 range (the compiled kernel reports
``nan``: it raises ``OverflowError`` and the dispatcher falls back).  Every
workload also checks that both kernels agree.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from ahsslab._kernels import _pykernels

try:
    from ahsslab._kernels import _ckernels
except ImportError:
    _ckernels = None

from ahsslab.complexes import barycentric_subdivision
from ahsslab.data import load_complex


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def workloads(seed: int = 0):
    for name, sub in [("torus", False), ("rp3", False), ("rp2", True), ("rp3", True)]:
        X = load_complex(name)
        if sub:
            X = barycentric_subdivision(X).complex
        label = f"sd({name})" if sub else name
        for k in range(1, X.dim + 1):
            cols = X.boundary_columns(k)
            nrows = X.ncells(k - 1)
            for modulus in (0, 2):
                yield f"sparse_invariants {label} d{k} mod {modulus}", "sparse_invariants", (cols, nrows, modulus)
    rng = random.Random(seed)
    for n in (40, 80, 160):
        # boundary-like: three +-1 entries per column
        rows = [[0] * n for _ in range(n)]
        for j in range(n):
            for i in rng.sample(range(n), 3):
                rows[i][j] = rng.choice((-1, 1))
        yield f"smith sparse +-1 {n}x{n} (no transforms)", "smith", (rows, n, n, False)
        yield f"echelon sparse +-1 {n}x{n}", "echelon", (rows, n, n)
    # coefficient growth past int64: the compiled kernel must refuse
    rows = [[rng.randint(-6, 6) for _ in range(12)] for _ in range(12)]
    yield "smith dense 12x12 (transforms, overflows int64)", "smith", (rows, 12, 12, True)
    X = load_complex("rp3")
    cols = X.boundary_columns(2)
    rows = [[c.get(i, 0) for c in cols] for i in range(X.ncells(1))]
    yield "smith rp3 d2 (transforms)", "smith", (rows, X.ncells(1), X.ncells(2), True)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; run `python setup.py build_ext --inplace`", file=sys.stderr)
        return 1
    rows = []
    for label, fname, fargs in workloads():
        py, cy = getattr(_pykernels, fname), getattr(_ckernels, fname)
        try:
            same = py(*fargs) == cy(*fargs)
        except OverflowError:
            same = None
        t_py = _best(lambda: py(*fargs), args.repeat)
        try:
            t_cy = _best(lambda: cy(*fargs), args.repeat)
        except OverflowError:
            t_cy = float("nan")
        rows.append({"workload": label, "python_s": t_py, "cython_s": t_cy,
                     "speedup": t_py / t_cy if t_cy else float("inf"), "agree": same})
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        w = max(len(r["workload"]) for r in rows)
        print(f"{'workload':<{w}}  {'python':>9}  {'cython':>9}  {'speedup':>7}  agree")
        for r in rows:
            print(f"{r['workload']:<{w}}  {r['python_s']:9.4f}  {r['cython_s']:9.4f}  {r['speedup']:7.1f}  {r['agree']}")
    return 0 if all(r["agree"] is not False for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())
