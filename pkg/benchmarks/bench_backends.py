"""Compare the compiled pair-sum core against the numpy fallback.

Usage: python benchmarks/bench_backends.py [--quick]

Times the two hot kernels (star-quadrature pair sums and raster cell sums)
at several sizes, then one end-to-end energy evaluation, and prints a table
with speedups.  Both backends must agree to rounding; the script asserts it.
"""

import argparse
import math
import time

import numpy as np

from gamow2d import _kernels_np as np_impl
from gamow2d import disk, power_kernel, project_volume
from gamow2d.energy import star_quadrature
from gamow2d.shapes import StarShape, rasterize

try:
    from gamow2d import _kernels as cy_impl
except ImportError:
    cy_impl = None


def timeit(fn, repeat=3):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_pair_sum(n_theta, n_radial, repeat):
    shape = project_volume(
        StarShape(center=(0, 0), r0=1.0, modes=((2, 0.1, 0.0), (3, 0.0, 0.05))),
        math.pi,
    )
    pts, w = star_quadrature(shape, n_theta, n_radial)
    args = (pts, w, pts, w, 0, -0.5, 0.0, 0.0, 0.0)
    t_np, v_np = timeit(lambda: np_impl.pair_sum(*args), repeat)
    row = {"case": f"pair_sum {len(w)} nodes", "numpy": t_np}
    if cy_impl is not None:
        t_cy, v_cy = timeit(lambda: cy_impl.pair_sum(*args), repeat)
        assert abs(v_cy - v_np) <= 1e-10 * abs(v_np)
        row["cython"] = t_cy
    return row

def bench_raster_sum(pitch, repeat):
    ras = rasterize(disk(), pitch)
    centers = ras.cell_centers()
    d_max = float(np.hypot(*(centers.max(0) - centers.min(0)))) + 2 * pitch
    step = pitch / 4
    n = int(math.ceil(d_max / step)) + 2
    table = np.ascontiguousarray((np.arange(n) * step + step) ** -0.5)
    args = (centers, centers, pitch**4, table, step, 3.0)
    t_np, v_np = timeit(lambda: np_impl.raster_sum(*args), repeat)
    row = {"case": f"raster_sum {len(centers)} cells", "numpy": t_np}
    if cy_impl is not None:
        t_cy, v_cy = timeit(lambda: cy_impl.raster_sum(*args), repeat)
        assert abs(v_cy - v_np) <= 1e-10 * abs(v_np)
        row["cython"] = t_cy
    return row


def bench_energy(repeat):
    from gamow2d import gamow_energy

    k = power_kernel(-0.5)
    shape = project_volume(
        StarShape(center=(0, 0), r0=1.0, modes=((2, 0.1, 0.0),)), math.pi
    )
    t, _ = timeit(lambda: gamow_energy(k, 1e-3, shape, 64, 6).total, repeat)
    return {"case": "gamow_energy 64x6 (selected backend)",
            "numpy": None, "selected": t}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()
    repeat = 2 if args.quick else 4

    rows = []
    sizes = [(32, 4), (64, 6)] if args.quick else [(32, 4), (64, 6), (128, 10)]
    for nt, nr in sizes:
        rows.append(bench_pair_sum(nt, nr, repeat))
    pitches = [1 / 24] if args.quick else [1 / 24, 1 / 48]
    for p in pitches:
        rows.append(bench_raster_sum(p, repeat))
    rows.append(bench_energy(repeat))

    from gamow2d import BACKEND

    print(f"selected backend: {BACKEND}")
    print(f"{'case':<36} {'numpy':>10} {'cython':>10} {'speedup':>9}")
    for r in rows:
        t_np = r.get("numpy")
        t_cy = r.get("cython")
        t_sel = r.get("selected")
        if t_sel is not None:
            print(f"{r['case']:<36} {'-':>10} {t_sel * 1e3:>8.2f}ms {'':>9}")
        elif t_cy is not None:
            print(f"{r['case']:<36} {t_np * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms "
                  f"{t_np / t_cy:>8.1f}x")
        else:
            print(f"{r['case']:<36} {t_np * 1e3:>8.2f}ms {'n/a':>10} {'':>9}")


if __name__ == "__main__":
    main()
