"""CSV and PGM writers (and the value-table reader used by ``audit --values``)."""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .game import ModalGame
from .lattice import ScopeBox
from .player import PlayTrace
from .solver import Solution, ValueTable


def values_csv(sol: Solution) -> str:
    g = sol.game
    t = sol.table
    m, nu = g.m, g.U.dim
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["stage"] + [f"x{i + 1}" for i in range(m)] + ["value"] + [f"u{i + 1}" for i in range(nu)])
    pts = g.scope.points()
    for k in range(1, sol.N + 1):
        row = t.row(k)
        am = t.argmin[k - 1]
        for i, x in enumerate(pts):
            v = "TOP" if row[i] >= g.top_bound else str(int(row[i]))
            u = ["NONE"] * nu if am[i] < 0 or k == sol.N else [str(c) for c in g.U.moves[am[i]]]
            w.writerow([k, *map(int, x), v, *u])
    return buf.getvalue()


def write_values(sol: Solution, path: str | Path) -> None:
    Path(path).write_text(values_csv(sol))


def read_values(path: str | Path, game: ModalGame) -> Solution:
    """Rebuild a solution for ``game`` from a value CSV.

    Scope and horizon come from the file. Rows at the bottom that repeat
    row 1 are treated as copies of a fixpoint stage.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    m = sum(1 for h in head if h.startswith("x"))
    nu = sum(1 for h in head if h.startswith("u"))
    if m != game.m or nu != game.U.dim or not body:
        raise ValueError("value file does not match the game dimensions")
    stages = np.asarray([int(r[0]) for r in body])
    xs = np.asarray([[int(c) for c in r[1:1 + m]] for r in body], dtype=np.int64)
    scope = ScopeBox(tuple(xs.min(axis=0)), tuple(xs.max(axis=0)))
    N = int(stages.max())
    g = game.with_scope(scope).with_horizon(N)
    top = g.top_bound
    values = np.full((N, scope.size), top, dtype=np.int64)
    argmin = np.full((N, scope.size), -1, dtype=np.int64)
    idx = scope.indices(xs)
    for r, k, i in zip(body, stages, idx):
        v = r[1 + m]
        values[k - 1, i] = top if v == "TOP" else int(v)
        u = r[2 + m:2 + m + nu]
        if u[0] != "NONE":
            argmin[k - 1, i] = g.U.index(tuple(int(c) for c in u))
    lowest = 1
    while lowest < N - 1 and np.array_equal(values[lowest], values[0]) and np.array_equal(argmin[lowest], argmin[0]):
        lowest += 1
    table = ValueTable(g, values, argmin, None)
    fp = lowest if lowest > 1 else None
    return Solution(table, fp, (lowest, N), "file")


def region_pgm(sol: Solution, k: int, pos_axes: tuple[int, ...]) -> str:
    """Existential projection of W(k) onto the first two position axes (255 = winning)."""
    g = sol.game
    ax = list(pos_axes[:2])
    sub = g.scope.project(ax)
    img = np.zeros(sub.shape if len(ax) == 2 else (sub.shape[0], 1), dtype=bool)
    pts = g.scope.points()[sol.table.finite(k)]
    if len(pts):
        rel = pts[:, ax] - np.asarray(sub.lo, dtype=np.int64)
        if len(ax) == 1:
            rel = np.concatenate([rel, np.zeros_like(rel)], axis=1)
        img[rel[:, 0], rel[:, 1]] = True
    # rows top to bottom run from the highest second coordinate down
    grid = img.T[::-1]
    h, w = grid.shape
    lines = ["P2", f"# W({k})", f"{w} {h}", "255"]
    lines.extend(" ".join("255" if c else "0" for c in row) for row in grid)
    return "\n".join(lines) + "\n"


def write_regions(sol: Solution, outdir: str | Path, pos_axes: tuple[int, ...]) -> list[Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for k in range(1, sol.N + 1):
        p = out / f"region_k{k:03d}.pgm"
        p.write_text(region_pgm(sol, k, pos_axes))
        paths.append(p)
    return paths


def trace_csv(trace: PlayTrace) -> str:
    m = len(trace.final_state)
    nu = len(trace.steps[0].u) if trace.steps else len(trace.position_axes)
    jumps = {}
    for i, name in trace.jumps:
        jumps[i] = name
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "segment", "stage"] + [f"x{i + 1}" for i in range(m)] + [f"u{i + 1}" for i in range(nu)]
               + [f"d{i + 1}" for i in range(nu)] + ["value", "jump", "termination"])
    for j, s in enumerate(trace.steps):
        w.writerow([j, s.segment, s.stage, *s.x, *s.u, *s.d, s.value, jumps.get(j, ""), ""])
    n = len(trace.steps)
    seg = trace.steps[-1].segment if trace.steps else 0
    stage = trace.steps[-1].stage + 1 if trace.steps else ""
    w.writerow([n, seg, stage, *trace.final_state, *[""] * (2 * nu), "", jumps.get(n, ""), trace.termination.value])
    return buf.getvalue()


def write_trace(trace: PlayTrace, path: str | Path) -> None:
    Path(path).write_text(trace_csv(trace))
