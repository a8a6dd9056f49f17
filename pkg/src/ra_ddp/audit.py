"""Executable certificates over solved tables.

Each audit returns a result object with ``ok`` and a list of violations so
failures can be inspected, not just counted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import ModalGame, step
from .lattice import MoveSet, Point, minkowski_dilate, segment_cells
from .solver import Solution, argmin_move, hji_residual, neighbourhood_clause


@dataclass
class AuditResult:
    name: str
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _values(sol: Solution) -> np.ndarray:
    if sol.table.values is None:
        raise ValueError("audit needs the full value table (solve with retain_values=True)")
    return sol.table.values


def monotonicity_audit(sol: Solution) -> AuditResult:
    """Finite V(x, k-1) must not exceed V(x, k); violations are (x, k-1, k)."""
    v = _values(sol)
    g = sol.game
    top = g.top_bound
    bad = []
    for k in range(2, sol.N + 1):
        lo, hi = v[k - 2], v[k - 1]
        for i in np.flatnonzero((lo < top) & (lo > hi)):
            bad.append((g.scope.point(i), k - 1, k))
    return AuditResult("monotonicity", not bad, bad)


def hji_audit(sol: Solution) -> AuditResult:
    """Zero HJI residual on every recomputable row (copied rows are skipped)."""
    _values(sol)
    g = sol.game
    bad = []
    for k in range(max(2, sol.stages_computed[0] + 1), sol.N + 1):
        for x in g.scope:
            r = hji_residual(sol, x, k)
            if not r.ok:
                bad.append((x, k, r.stored, r.recomputed))
    return AuditResult("hji", not bad, bad)


def _boundary(sol: Solution, k: int) -> np.ndarray:
    g = sol.game
    win = sol.table.finite(k)
    pts = g.scope.points()
    edge = np.zeros(len(pts), dtype=bool)
    for m in MoveSet.box(1, g.m).moves:
        if not any(m):
            continue
        idx = g.scope.indices(pts + np.asarray(m, dtype=np.int64))
        edge |= (idx < 0) | ~win[np.maximum(idx, 0)]
    return win & edge


def vector_field_certificate(sol: Solution, g: ModalGame | None = None, *,
                             boundary_only: bool = False) -> AuditResult:
    """Under u*(x, k), no disturbance makes the continuous step touch the unsafe set.

    The whole continuous completion of each step is checked, endpoints
    included. ``boundary_only`` restricts the scan to the edge of W(k).
    """
    g = g or sol.game
    bad = []
    for k in range(1, sol.N):
        mask = _boundary(sol, k) if boundary_only else sol.table.finite(k)
        for i in np.flatnonzero(mask):
            x = g.scope.point(i)
            u = argmin_move(sol, x, k)
            if u is None:
                continue
            for d in g.D:
                for c in segment_cells(x, step(g, x, u, d, k)):
                    if g.unsafe.contains(c):
                        bad.append((x, k, u, d, c))
                        break
    return AuditResult("vector_field", not bad, bad)


def fixpoint_implication_audit(sol: Solution, x0) -> AuditResult:
    """Where the neighbourhood clause holds at k it must hold at every l <= k."""
    N = sol.N
    holds = {k: neighbourhood_clause(sol, k, x0) for k in range(1, N)}
    bad = [(k, l) for k in holds if holds[k] for l in range(1, k) if not holds[l]]
    return AuditResult("fixpoint_implication", not bad, bad)


@dataclass
class InvariantAudit:
    inclusion: AuditResult
    closure: AuditResult

    @property
    def ok(self) -> bool:
        return self.inclusion.ok and self.closure.ok


def invariant_set_audit(sol: Solution, g: ModalGame | None = None, delta: int = 1) -> InvariantAudit:
    """(a) W(1) avoids the unsafe set dilated by delta; (b) W is closed under u*."""
    g = g or sol.game
    unsafe = g.unsafe
    if unsafe.cells:
        cell_dim = len(next(iter(unsafe.cells)))
        fat = minkowski_dilate(unsafe, MoveSet.box(delta, cell_dim))
    else:
        fat = unsafe
    w1 = sol.table.finite(1)
    hit = w1 & fat.mask(g.scope)
    inc = [g.scope.point(i) for i in np.flatnonzero(hit)]

    # copied rows below the fixpoint stage carry no closure guarantee
    bad: list[tuple[Point, int, Point, Point, Point]] = []
    for k in range(sol.stages_computed[0], sol.N):
        nxt = sol.table.finite(k + 1)
        for i in np.flatnonzero(sol.table.finite(k)):
            x = g.scope.point(i)
            u = argmin_move(sol, x, k)
            if u is None:
                bad.append((x, k, None, None, None))
                continue
            for d in g.D:
                xn = step(g, x, u, d, k)
                if not g.scope.contains(xn) or not nxt[g.scope.index(xn)]:
                    bad.append((x, k, u, d, xn))
    return InvariantAudit(AuditResult("invariant_inclusion", not inc, inc),
                          AuditResult("invariant_closure", not bad, bad))
