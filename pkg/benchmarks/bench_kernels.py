"""Compare the numba and numpy oracle backends on a few exhaustive searches.

    python benchmarks/bench_kernels.py [--repeat 3]

The numba column excludes compilation (one warm-up call per case).
"""
from __future__ import annotations

import argparse
import time

from genuspls.graph import complete_bipartite, complete_graph, cycle_graph
from genuspls.oracle import min_genus_nonorientable, min_genus_orientable

CASES = [
    ("K5 orientable", complete_graph(5), min_genus_orientable),
    ("K3,3 nonorientable", complete_bipartite(3, 3), min_genus_nonorientable),
    ("K5 nonorientable", complete_graph(5), min_genus_nonorientable),
    ("C8 nonorientable", cycle_graph(8), min_genus_nonorientable),
]


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, res = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        res = fn()
        best = min(best, time.perf_counter() - t)
    return best, res


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'case':<22}{'systems':>10}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, g, search in CASES:
        search(g, backend="numba")  # compile
        t_nb, r_nb = best_of(lambda: search(g, backend="numba"), args.repeat)
        t_np, r_np = best_of(lambda: search(g, backend="numpy"), args.repeat)
        if (r_nb.min_eg, r_nb.witness) != (r_np.min_eg, r_np.witness):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<22}{r_nb.systems_searched:>10}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>9.1f}")


if __name__ == "__main__":
    main()
