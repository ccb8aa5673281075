#!/usr/bin/env python3
"""Time the numba-jitted hot kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py
The jitted path is warmed up once before timing so compilation is not
counted.  Set TANKSIM_DISABLE_NUMBA=1 to confirm the fallback is what
the package would use without numba.
"""

import time

import numpy as np

from tanksim import kernels, sloshfem
from tanksim.model import bundled_spec


def bench(label, fn, repeats=5):
    fn()  # warm-up (JIT compile / cache touch)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    best = min(times)
    print(f"  {label:<28s} {best * 1e3:10.2f} ms (best of {repeats})")
    return best


def main():
    print(f"numba active in this process: {kernels.USE_NUMBA}")

    rng = np.random.default_rng(0)
    accel = rng.standard_normal(200_000)
    args = (accel, 0.005, 8.0, 0.02, 0.25, 0.5)
    print("\nsdof_newmark, 200k steps:")
    t_fast = bench("selected path", lambda: kernels.sdof_newmark(*args))
    t_py = bench("pure-numpy fallback",
                 lambda: kernels._sdof_newmark_py(*args))
    print(f"  speedup: {t_py / t_fast:.1f}x")

    spec = bundled_spec("broad")
    mesh = sloshfem.build_mesh(spec.geometry, 0.01)
    nodes = np.ascontiguousarray(mesh.nodes)
    elems = np.ascontiguousarray(mesh.elements)
    print(f"\nassemble_quads, {elems.shape[0]} elements:")
    t_fast = bench("selected path",
                   lambda: kernels.assemble_quads(nodes, elems, 1))
    t_py = bench("pure-numpy fallback",
                 lambda: kernels._assemble_quads_py(nodes, elems, 1))
    print(f"  speedup: {t_py / t_fast:.1f}x")


if __name__ == "__main__":
    main()
