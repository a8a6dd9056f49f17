"""Shielded backward minimax value iteration over a modal game.

Stage convention: row ``k`` of the table holds V(., k) for k = 1..N. The
terminal row is V(., N) = Phi, and for k < N

    V(x, k) = min_u max_d  L(x, u, d, k) (+) V(x + f(x, u, d, k), k + 1)

with saturating addition (+) and successors outside the scope valued TOP.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from . import _kernels
from .game import (TOP, ModalGame, from_raw, sat_add, stage_cost, step)
from .lattice import MoveSet, Point, Region, as_point

log = logging.getLogger(__name__)


class StageCostUnbounded(ValueError):
    """N times the largest finite stage cost reaches the top value."""


class ModeUnavailable(ValueError):
    """Requested policy mode is not supported by the solution."""


@dataclass(frozen=True)
class Approximate:
    """Stop the backward iteration once the fixpoint approximation holds for x0."""

    x0: Point

    def __post_init__(self):
        object.__setattr__(self, "x0", as_point(self.x0))


def lambda_table(g: ModalGame) -> np.ndarray:
    """Raw weight term over (cell, u, d), unsaturated."""
    pts = g.scope.points()
    w = g.weights
    px = (pts**2 * np.asarray(w.P, dtype=np.int64)).sum(axis=1)
    qu = (g.U.array() ** 2 * np.asarray(w.Q, dtype=np.int64)).sum(axis=1)
    rd = (g.D.array() ** 2 * np.asarray(w.R, dtype=np.int64)).sum(axis=1)
    return px[:, None, None] + qu[None, :, None] + rd[None, None, :]


def max_finite_lambda(g: ModalGame) -> int:
    lam = lambda_table(g)
    finite = lam[lam < g.top_bound]
    return int(finite.max()) if finite.size else 0


def stage_cost_bounded(g: ModalGame) -> bool:
    return g.N * max_finite_lambda(g) < g.top_bound


def u_rank(g: ModalGame) -> np.ndarray:
    """Tie-break order over U: smaller control weight first, then lexicographic."""
    q = np.asarray(g.weights.Q, dtype=np.int64)
    keys = [(int((np.asarray(u) ** 2 * q).sum()), i) for i, u in enumerate(g.U.moves)]
    return np.asarray([i for _, i in sorted(keys)], dtype=np.int64)


def transition_tables(g: ModalGame, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Successor indices and stage costs over (cell, u, d) at stage k.

    Successor index is -1 outside the scope. Costs follow the stage-cost
    branches: unsafe cell or unsafe crossing -> top, goal -> 0, else weight.
    """
    scope, dyn, top = g.scope, g.dynamics, g.top_bound
    pts = scope.points()
    nc, nu, nd = len(pts), len(g.U), len(g.D)
    succ = np.empty((nc, nu, nd), dtype=np.int64)
    crossing = np.zeros((nc, nu, nd), dtype=bool)
    unsafe = g.unsafe_mask
    for iu, u in enumerate(g.U.moves):
        for jd, d in enumerate(g.D.moves):
            off = np.asarray(dyn.offsets(pts, u, d, k), dtype=np.int64)
            idx = scope.indices(pts + off)
            succ[:, iu, jd] = idx
            if not g.crossing_shield:
                continue
            mag = np.abs(off)
            span = mag.max(axis=1) if off.size else np.zeros(nc, dtype=np.int64)
            sign = np.sign(off)
            hit = np.zeros(nc, dtype=bool)
            for t in range(1, int(span.max(initial=0))):
                live = (span > t) & (idx >= 0)
                if not live.any():
                    continue
                mid = pts[live] + sign[live] * np.minimum(t, mag[live])
                hit[live] |= unsafe[scope.indices(mid)]
            crossing[:, iu, jd] = hit
    lam = lambda_table(g)
    cost = np.where(lam >= top, top, lam)
    goal = g.goal_mask & ~unsafe
    cost = np.where(goal[:, None, None], 0, cost)
    cost = np.where(crossing, top, cost)
    cost = np.where(unsafe[:, None, None], top, cost)
    return succ, cost.astype(np.int64)


@dataclass
class ValueTable:
    """Dense values and argmin moves; row k-1 of each array is stage k."""

    game: ModalGame
    values: np.ndarray | None
    argmin: np.ndarray
    argmax_d: np.ndarray | None
    rows: dict = field(default_factory=dict)

    def row(self, k: int) -> np.ndarray:
        if self.values is not None:
            return self.values[k - 1]
        if k in self.rows:
            return self.rows[k]
        raise KeyError(f"value row {k} was not retained")

    def finite(self, k: int) -> np.ndarray:
        top = self.game.top_bound
        if self.values is not None or k in self.rows:
            return self.row(k) < top
        return self.argmin[k - 1] >= 0


@dataclass
class Solution:
    table: ValueTable
    fixpoint_stage: int | None
    stages_computed: tuple[int, int]
    backend: str = "numpy"

    @property
    def game(self) -> ModalGame:
        return self.table.game

    @property
    def N(self) -> int:
        return self.table.game.N


def _terminal_row(g: ModalGame) -> np.ndarray:
    goal = g.goal_mask & ~g.unsafe_mask
    return np.where(goal, 0, g.top_bound).astype(np.int64)


def _nbhd_indices(g: ModalGame, x0: Sequence[int]) -> np.ndarray | None:
    if not g.scope.contains(x0):
        return None
    box = MoveSet.box(g.delta, g.m)
    cells = np.asarray(x0, dtype=np.int64) + box.array()
    idx = g.scope.indices(cells)
    return idx[idx >= 0]


def ddp_solve(g: ModalGame, fixpoint: Approximate | None = None, *, backend: str | None = None,
              retain_values: bool = True) -> Solution:
    """Solve the modal game by backward min-max iteration.

    With ``fixpoint=Approximate(x0)`` the iteration stops at the largest
    stage where the fixpoint approximation holds and lower rows are copies
    of that stage. ``retain_values=False`` keeps only the terminal and last
    computed value rows (argmin tables are always kept).
    """
    if not stage_cost_bounded(g):
        raise StageCostUnbounded(
            f"N * max stage cost = {g.N} * {max_finite_lambda(g)} >= top_bound {g.top_bound}")
    if backend is None:
        backend = "numba" if _kernels.numba_enabled() else "numpy"
    N, nc, nu, top = g.N, g.scope.size, len(g.U), g.top_bound
    values = np.full((N, nc), top, dtype=np.int64) if retain_values else None
    argmin = np.full((N, nc), -1, dtype=np.int64)
    argmax_d = np.zeros((N, nc, nu), dtype=np.int64) if retain_values else None
    rows: dict[int, np.ndarray] = {}
    rank = u_rank(g)

    vnext = _terminal_row(g)
    if retain_values:
        values[N - 1] = vnext
    else:
        rows[N] = vnext

    nbhd = _nbhd_indices(g, fixpoint.x0) if fixpoint is not None else None
    nbhd_hit = nbhd is not None and nbhd.size > 0 and bool(np.all(vnext[nbhd] < top))
    tables = None
    fp_stage = None
    lowest = N
    for k in range(N - 1, 0, -1):
        if tables is None or not g.dynamics.time_invariant:
            tables = transition_tables(g, k)
        succ, cost = tables
        vrow, au, ad = _kernels.backup(cost, succ, vnext, top, rank, backend=backend)
        argmin[k - 1] = au
        if retain_values:
            values[k - 1] = vrow
            argmax_d[k - 1] = ad
        lowest = k
        if fixpoint is not None:
            if nbhd is not None and nbhd.size > 0 and np.all(vrow[nbhd] < top):
                nbhd_hit = True
            same_size = int((vrow < top).sum()) == int((vnext < top).sum())
            if same_size or nbhd_hit:
                fp_stage = k
                vnext = vrow
                break
        vnext = vrow

    if not retain_values:
        rows[lowest] = vnext
    if fp_stage is not None and fp_stage > 1:
        argmin[: fp_stage - 1] = argmin[fp_stage - 1]
        if retain_values:
            values[: fp_stage - 1] = values[fp_stage - 1]
            argmax_d[: fp_stage - 1] = argmax_d[fp_stage - 1]
        log.debug("fixpoint approximation fired at stage %d of %d", fp_stage, N)
    table = ValueTable(g, values, argmin, argmax_d, rows)
    return Solution(table, fp_stage, (lowest, N), backend)


def _check_stage(sol: Solution, k: int) -> None:
    if not 1 <= k <= sol.N:
        raise ValueError(f"stage {k} outside 1..{sol.N}")


def value(sol: Solution, x: Sequence[int], k: int):
    g = sol.game
    if not g.scope.contains(x):
        raise ValueError(f"state {tuple(x)} outside scope")
    _check_stage(sol, k)
    return from_raw(int(sol.table.row(k)[g.scope.index(x)]), g.top_bound)


def winning_region(sol: Solution, k: int) -> Region:
    _check_stage(sol, k)
    g = sol.game
    idx = np.flatnonzero(sol.table.finite(k))
    return Region.from_cells(g.scope.point(i) for i in idx)


def winning_mask(sol: Solution, k: int) -> np.ndarray:
    _check_stage(sol, k)
    return sol.table.finite(k)


def argmin_move(sol: Solution, x: Sequence[int], k: int) -> Point | None:
    g = sol.game
    if not g.scope.contains(x) or not 1 <= k <= sol.N:
        return None
    iu = int(sol.table.argmin[k - 1, g.scope.index(x)])
    return None if iu < 0 else g.U.moves[iu]


def worst_disturbance(sol: Solution, x: Sequence[int], u: Sequence[int], k: int) -> Point | None:
    """Recorded maximising disturbance for (x, k, u), if any."""
    g, t = sol.game, sol.table
    if t.argmax_d is None or not g.scope.contains(x) or not 1 <= k < sol.N:
        return None
    jd = int(t.argmax_d[k - 1, g.scope.index(x), g.U.index(u)])
    return g.D.moves[jd]


class PolicyMode(str, Enum):
    NON_STATIONARY = "nonstationary"
    QUASI_STATIONARY = "quasistationary"
    STATIONARY = "stationary"


@dataclass(frozen=True)
class Policy:
    mode: PolicyMode
    solution: Solution = field(compare=False, repr=False)
    stage: int | None = None

    def lookup(self, x: Sequence[int], k: int) -> Point | None:
        if self.mode is PolicyMode.NON_STATIONARY:
            return argmin_move(self.solution, x, k)
        return argmin_move(self.solution, x, self.stage)


def exact_fixpoint_stage(sol: Solution) -> int | None:
    """Largest computed stage k < N whose value row equals row k + 1."""
    t = sol.table
    if t.values is None:
        return None
    lo = sol.stages_computed[0]
    for k in range(sol.N - 1, lo - 1, -1):
        if np.array_equal(t.values[k - 1], t.values[k]):
            return k
    return None


def extract_policy(sol: Solution, mode: PolicyMode | str = PolicyMode.NON_STATIONARY) -> Policy:
    mode = PolicyMode(mode)
    if mode is PolicyMode.NON_STATIONARY:
        return Policy(mode, sol)
    if mode is PolicyMode.QUASI_STATIONARY:
        if sol.fixpoint_stage is None:
            raise ModeUnavailable("no fixpoint approximation fired; quasi-stationary policy unavailable")
        return Policy(mode, sol, sol.fixpoint_stage)
    k = exact_fixpoint_stage(sol)
    if k is None:
        raise ModeUnavailable("no two consecutive computed value rows coincide; stationary policy unavailable")
    return Policy(mode, sol, k)


@dataclass(frozen=True)
class HJIResidual:
    stored: object
    recomputed: object
    residual: int | None

    @property
    def ok(self) -> bool:
        return self.residual == 0


def recompute_backup(sol: Solution, x: Sequence[int], k: int):
    """min_u max_d L(x,u,d,k) (+) V(x^{ud}, k+1), evaluated point-wise."""
    g = sol.game
    best = TOP
    for u in g.U:
        worst = None
        for d in g.D:
            xn = step(g, x, u, d, k)
            vn = value(sol, xn, k + 1) if g.scope.contains(xn) else TOP
            t = sat_add(stage_cost(g, x, u, d, k), vn, g.top_bound)
            if worst is None or t > worst:
                worst = t
        if worst < best:
            best = worst
    return best


def hji_residual(sol: Solution, x: Sequence[int], k: int) -> HJIResidual:
    """Compare the stored V(x, k-1) with a fresh min-max of the Hamiltonian.

    Equivalent to checking V(x,k-1) - V(x,k) = min max H(x,u,d,k) with
    TOP - TOP = 0. ``residual`` is None when exactly one side is TOP.
    """
    if not 2 <= k <= sol.N:
        raise ValueError(f"stage {k} outside 2..{sol.N}")
    stored = value(sol, x, k - 1)
    again = recompute_backup(sol, x, k - 1)
    if stored is TOP and again is TOP:
        res = 0
    elif stored is TOP or again is TOP:
        res = None
    else:
        res = stored - again
    return HJIResidual(stored, again, res)


def fixpoint_reached(sol: Solution, k: int, x0: Sequence[int]) -> bool:
    N = sol.N
    if not 1 <= k < N:
        raise ValueError(f"need 1 <= k < N, got k={k}")
    t = sol.table
    if int(t.finite(k).sum()) == int(t.finite(k + 1).sum()):
        return True
    return neighbourhood_clause(sol, k, x0)


def neighbourhood_clause(sol: Solution, k: int, x0: Sequence[int]) -> bool:
    """Some stage k' >= k has every in-scope cell of x0's delta-box finite."""
    idx = _nbhd_indices(sol.game, as_point(x0))
    if idx is None or idx.size == 0:
        return False
    return any(bool(np.all(sol.table.finite(kk)[idx])) for kk in range(k, sol.N + 1))


def step_bound(g: ModalGame) -> int:
    pts = g.scope.points()
    stages = [1] if g.dynamics.time_invariant else range(1, g.N + 1)
    best = 0
    for k in stages:
        for u in g.U:
            for d in g.D:
                off = g.dynamics.offsets(pts, u, d, k)
                if off.size:
                    best = max(best, int(np.abs(off).max()))
    return best
