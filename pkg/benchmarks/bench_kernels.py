"""Numba vs pure-numpy timings for the hot kernels, plus one end-to-end lift + Mapper run per backend.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from reeblift import _kernels as K
from reeblift import examples
from reeblift.lift import LiftSpec, build_lift, fibre_directions
from reeblift.mapper import cluster


def best_of(fn, repeat):
    fn()  # warm-up (JIT compile / cache load)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases():
    rng = np.random.default_rng(0)
    F = build_lift(LiftSpec(examples.chain(3), 4))
    exps, coeffs = F.arrays()
    Z = rng.normal(size=(400_000, 4)) * 0.5

    U = fibre_directions(2, 8, rng)
    P = rng.uniform(0, 1, 50_000)
    rexps = np.array([2, 1])
    rcoeffs = np.array([3.0, 1.0])

    pts = rng.uniform(-1, 1, size=(60_000, 4))
    from scipy.spatial import cKDTree
    pairs = cKDTree(pts).query_pairs(0.08, output_type="ndarray").astype(np.int64)
    n = len(pts)
    return [
        ("eval_monomials  (400k pts, %d terms)" % len(coeffs),
         lambda: K.eval_monomials_numba(exps, coeffs, Z), lambda: K.eval_monomials_numpy(exps, coeffs, Z)),
        ("radial_scale    (50k x 8, exps (2,1))",
         lambda: K.radial_scale_numba(P, U, rcoeffs, rexps), lambda: K.radial_scale_numpy(P, U, rcoeffs, rexps)),
        ("connected_labels (60k nodes, %d pairs)" % len(pairs),
         lambda: K.connected_labels_numba(n, pairs), lambda: K.connected_labels_numpy(n, pairs)),
    ]


PIPELINE = """
import time
from reeblift import examples, LiftSpec, sample_surface, mapper_reeb, BACKEND
spec = LiftSpec(examples.chain(3), 4)
sample_surface(spec, 40 ** 2, 8); mapper_reeb(sample_surface(spec, 40 ** 2, 8))  # warm-up
t0 = time.perf_counter()
res = sample_surface(spec, 200 ** 2, 8)
t1 = time.perf_counter()
g = mapper_reeb(res)
t2 = time.perf_counter()
print(BACKEND, len(res), round(t1 - t0, 3), round(t2 - t1, 3))
"""


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    print(f"{'kernel':42s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speed-up':>9s}")
    for name, fast, slow in kernel_cases():
        tn, tp = best_of(fast, args.repeat), best_of(slow, args.repeat)
        print(f"{name:42s} {tn:10.4f} {tp:10.4f} {tp / tn:8.1f}x")
    print("\nend to end, chain(3), n_base 200^2, n_fiber 8:")
    print(f"{'backend':8s} {'samples':>8s} {'lift [s]':>9s} {'mapper [s]':>10s}")
    for flag in ("0", "1"):
        env = dict(os.environ, REEBLIFT_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", PIPELINE], env=env, capture_output=True, text=True, check=True)
        b, n, tl, tm = out.stdout.split()
        print(f"{b:8s} {n:>8s} {float(tl):9.3f} {float(tm):10.3f}")


if __name__ == "__main__":
    main()
