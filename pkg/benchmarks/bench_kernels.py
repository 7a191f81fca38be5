#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure NumPy fallback.

Times each hot kernel on representative grid sizes, then an end-to-end
reference-style run per backend (subprocess, since the backend is chosen at
import time).  Usage:  python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from icns1d.kernels import available_backends

SIZES = (1001, 4001, 16001)
REPS = 200

END_TO_END = r"""
import os, time
import numpy as np
from icns1d.params import make_params
from icns1d.grid import Grid
from icns1d.initdata import InitFamilySpec, build_initial_state
from icns1d.solver import SolverConfig, run
import icns1d.kernels as K

p = make_params(1, 2, 1, 1)
g = Grid(50.0, 4001)
spec = InitFamilySpec(sigma=1.0, velocity_profile="lorentz")
c = SolverConfig(cfl=0.5, t_end=1.0, output_stride=10**9)
s0 = build_initial_state(spec, p, g, vacuum_floor=c.vacuum_floor)
t0 = time.perf_counter()
series = run(s0, p, c, keep_snapshots=False)
t1 = time.perf_counter()
print(f"{K.BACKEND} end-to-end t_end=1 n=4001: {t1-t0:.3f} s "
      f"({len(series.records)} records)")
"""


def time_kernel(fn, args, reps):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps


def bench_kernels(reps):
    backends = available_backends()
    rng = np.random.default_rng(0)
    print(f"available backends: {', '.join(backends)}")
    print(f"{'kernel':<16}{'n':>7}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for n in SIZES:
        lower = rng.normal(size=n)
        upper = rng.normal(size=n)
        diag = 4.0 + np.abs(rng.normal(size=n))
        rhs = rng.normal(size=n)
        q = rng.normal(size=n)
        f = rng.normal(size=n)
        speed = np.abs(rng.normal(size=n)) + 1.0
        u = rng.normal(size=n)
        cases = {
            "thomas": (("thomas", (lower, diag, upper, rhs))),
            "interface_flux": (("interface_flux", (f, q, speed, 0.1))),
            "advect_biased": (("advect_biased", (u, q, 0.01, 0.1))),
        }
        for label, (attr, args) in cases.items():
            times = {name: time_kernel(getattr(mod, attr), args, reps) for name, mod in backends.items()}
            row = f"{label:<16}{n:>7}"
            for name in backends:
                row += f"{times[name] * 1e6:>12.1f}us"
            if "compiled" in times and "numpy" in times:
                row += f"{times['numpy'] / times['compiled']:>9.2f}x"
            print(row)


def bench_end_to_end():
    sys.stdout.flush()
    for backend in available_backends():
        env = dict(os.environ, ICNS1D_KERNELS=backend)
        subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="fewer repetitions")
    args = ap.parse_args()
    bench_kernels(20 if args.quick else REPS)
    print()
    bench_end_to_end()


if __name__ == "__main__":
    main()
