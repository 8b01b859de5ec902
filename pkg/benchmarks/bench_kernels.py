"""Compare the compiled and pure-Python determinant kernels.

Usage: python benchmarks/bench_kernels.py [--repeat R]
"""
import argparse
import itertools
import timeit

import numpy as np

from polariton_scf import _kernels_py

try:
    from polariton_scf import _kernels
except ImportError:
    _kernels = None


def basis(n_sites, n_el):
    n_so = 2 * n_sites
    return n_so, np.array(sorted(sum(1 << p for p in c) for c in itertools.combinations(range(n_so), n_el)),
                          dtype=np.int64)


def hopping_pairs(n_sites):
    p, q = [], []
    for i in range(n_sites - 1):
        for s in (0, 1):
            a, b = 2 * i + s, 2 * (i + 1) + s
            p += [a, b]
            q += [b, a]
    return p, q


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = {"python": _kernels_py}
    if _kernels is not None:
        backends["cython"] = _kernels
    else:
        print("compiled extension not available; timing the Python kernels only")

    print(f"{'case':28s} {'kernel':20s} " + " ".join(f"{b:>12s}" for b in backends) + "   speedup")
    for n_sites, n_el in [(6, 4), (10, 4), (30, 2), (12, 6)]:
        n_so, dets = basis(n_sites, n_el)
        p, q = hopping_pairs(n_sites)
        case = f"B_m={n_sites} N={n_el} ({dets.size} dets)"
        for kernel, call in [("single_excitations", lambda m: m.single_excitations(dets, p, q)),
                             ("occupation_matrix", lambda m: m.occupation_matrix(dets, n_so))]:
            times = {}
            for name, mod in backends.items():
                call(mod)
                times[name] = min(timeit.repeat(lambda: call(mod), number=1, repeat=args.repeat))
            speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
            print(f"{case:28s} {kernel:20s} " + " ".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
                  + f"  {speed}")


if __name__ == "__main__":
    main()
