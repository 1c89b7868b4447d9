"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--n 2 4 8]

Both backends are imported side by side, so the environment flag does not
matter here.  The first numba call (compilation) is excluded.
"""
import argparse
import timeit

import numpy as np

from suther_lax.kernels import numba_impl, numpy_impl
from suther_lax.model import CouplingParams
from suther_lax.sampling import sample_point, stream

C = CouplingParams(1.0, 1.2, 0.7)


def cases(n):
    x = sample_point(stream(0, n), n, gap=1.0, pmax=0.5)
    q, p = np.ascontiguousarray(x.q), np.ascontiguousarray(x.p)
    g = (C.g2, C.g1sq, C.g2sq)
    return {
        "lax_matrix": (lambda m: m.lax_matrix(q, p, C.mu, C.nu, C.kappa), 2000),
        "grad_q_hamiltonian": (lambda m: m.grad_q_hamiltonian(q, *g), 2000),
        "lax_partials_q": (lambda m: m.lax_partials_q(q, C.mu, C.nu, C.kappa), 1000),
        "b_closed": (lambda m: m.b_closed(q, C.mu, C.nu, C.kappa), 2000),
        "rk4 (2000 steps)": (lambda m: m.rk4(q, p, *g, 1e-3, 2000, 10, 1e-8), 3),
    }


def best(fn, number, repeat):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, nargs="+", default=[2, 4, 8])
    args = ap.parse_args()
    if numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare (pip install .[fast])")

    print(f"{'kernel':<22}{'n':>3}{'numpy [us]':>14}{'numba [us]':>14}{'speedup':>10}")
    for n in args.n:
        for name, (call, number) in cases(n).items():
            call(numba_impl)  # compile
            t_np = best(lambda: call(numpy_impl), number, args.repeat)
            t_nb = best(lambda: call(numba_impl), number, args.repeat)
            print(f"{name:<22}{n:>3}{t_np * 1e6:>14.1f}{t_nb * 1e6:>14.1f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
