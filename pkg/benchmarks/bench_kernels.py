"""Compare the numba and numpy finite-field kernels.

    python benchmarks/bench_kernels.py --primes 23 53 101 --repeat 3
"""
import argparse
import time

import numpy as np

from doper import _kernels


def pipeline(p, use_numba):
    triples = _kernels.all_triples(p)
    mask = _kernels.admissible_mask(triples, p, use_numba)
    adm = triples[mask]
    a, b, c = adm[:, 0], adm[:, 1], adm[:, 2]
    shifted = np.stack([(a - c + 1) % p, (b - c + 1) % p, (2 - c) % p], axis=1)
    c_t = np.where(c == 0, p, c)
    c1, l1, _ = _kernels.series_coefficients(adm, p, use_numba)
    c2, l2, _ = _kernels.series_coefficients(shifted, p, use_numba)
    ok1 = _kernels.operator_residual(adm, c1, l1, np.zeros(len(adm), dtype=np.int64), p, use_numba)
    ok2 = _kernels.operator_residual(adm, c2, l2, (1 - c_t).astype(np.int64), p, use_numba)
    return int(mask.sum()), int((ok1 & ok2).sum())


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--primes", type=int, nargs="+", default=[23, 53, 101])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed")
    pipeline(5, True)  # compile outside the timing
    print(f"{'p':>5} {'admissible':>10} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for p in args.primes:
        t_np, out_np = best_of(lambda: pipeline(p, False), args.repeat)
        t_nb, out_nb = best_of(lambda: pipeline(p, True), args.repeat)
        assert out_np == out_nb, (out_np, out_nb)
        print(f"{p:>5} {out_np[0]:>10} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f}")


if __name__ == "__main__":
    main()
