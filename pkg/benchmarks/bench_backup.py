"""Compare the numba and numpy backup kernels on a large kinematic arena.

    python benchmarks/bench_backup.py [--size 120] [--horizon 40] [--repeat 3]

Both backends solve the same game; the script checks the tables agree and
prints the best wall time of each.
"""
import argparse
import time

import numpy as np

from ra_ddp.game import CostWeights, Kinematic, ModalGame
from ra_ddp.lattice import MoveSet, Region, ScopeBox
from ra_ddp.solver import ddp_solve


def make_game(size: int, horizon: int) -> ModalGame:
    scope = ScopeBox((0, 0), (size - 1, size - 1))
    wall = [(size // 2, y) for y in range(size) if not size // 3 <= y <= size // 3 + 4]
    goal = [(size - 2 + dx, size - 2 + dy) for dx in (-1, 0) for dy in (-1, 0)]
    return ModalGame(scope, Kinematic(2), MoveSet.box(2, 2), MoveSet.of([(0, 0), (0, 1), (0, -1), (1, 0)]),
                     Region.from_cells(goal), Region.from_cells(wall), CostWeights((0, 0), (1, 1), (0, 0)),
                     horizon)


def best_time(g, backend, repeat):
    best, sol = None, None
    for _ in range(repeat):
        t = time.perf_counter()
        sol = ddp_solve(g, backend=backend)
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return best, sol


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=120)
    ap.add_argument("--horizon", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    g = make_game(args.size, args.horizon)
    ddp_solve(g.with_horizon(2), backend="numba")  # compile outside the timing

    t_np, s_np = best_time(g, "numpy", args.repeat)
    t_nb, s_nb = best_time(g, "numba", args.repeat)
    same = np.array_equal(s_np.table.values, s_nb.table.values) and np.array_equal(s_np.table.argmin, s_nb.table.argmin)
    cells = g.scope.size * len(g.U) * len(g.D) * (g.N - 1)
    print(f"cells={g.scope.size} |U|={len(g.U)} |D|={len(g.D)} N={g.N} backups={cells}")
    print(f"numpy  {t_np:8.3f} s")
    print(f"numba  {t_nb:8.3f} s   speedup {t_np / t_nb:5.1f}x")
    print(f"tables identical: {same}")


if __name__ == "__main__":
    main()
