"""Side-condition checkers and the configuration well-formedness report."""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .game import ModalGame
from .lattice import MoveSet, Point, Region, ScopeBox, Trajectory, as_point, chebyshev
from .solver import stage_cost_bounded

if TYPE_CHECKING:
    from .player import Configuration, TaskConfig

log = logging.getLogger(__name__)


class NotPerforated(ValueError):
    """No obstacle-free continuous tube covers the route, even with zero width."""


def check_local_controllability(U: MoveSet, D: MoveSet) -> bool:
    """Every non-zero disturbance can be met by a control with |d|^2 + <d,u> <= 0."""
    ua = U.array()
    for d in D.moves:
        if not any(d):
            continue
        dv = np.asarray(d, dtype=np.int64)
        if not np.any(dv @ dv + ua @ dv <= 0):
            return False
    return True


def _pos_drift(g: ModalGame, xs: np.ndarray, d: Point, k: int) -> np.ndarray:
    """Position part of f(x, 0, d, k) as an (n, npos) array."""
    off = g.dynamics.offsets(xs, g.U.zero, d, k)
    return off[:, list(g.dynamics.position_axes)]


def _stages(g: ModalGame) -> range:
    return range(1, 2) if g.dynamics.time_invariant else range(1, g.N + 1)


def delta_lower(g: ModalGame) -> tuple[int, bool]:
    """(bound, empty) where ``empty`` flags that no progress state exists.

    Only states whose post-step velocity is non-zero count; kinematic
    dynamics have no velocity and use every state.
    """
    xs = g.scope.points()
    vax = list(g.dynamics.velocity_axes)
    best, seen = 0, False
    for d in g.D:
        lo = None
        for k in _stages(g):
            off = g.dynamics.offsets(xs, g.U.zero, d, k)
            keep = np.ones(len(xs), dtype=bool)
            if vax:
                keep = np.any(xs[:, vax] + off[:, vax] != 0, axis=1)
            if not keep.any():
                continue
            mag = np.abs(off[keep][:, list(g.dynamics.position_axes)]).max(axis=1, initial=0)
            m = int(mag.min())
            lo = m if lo is None else min(lo, m)
        if lo is not None:
            seen = True
            best = max(best, lo)
    return best, not seen


def delta_lower_bound(g: ModalGame) -> int:
    val, empty = delta_lower(g)
    if empty:
        log.warning("no state with non-zero post-step velocity; lower robustness bound reported as 0")
    return val


def delta_goal_bound(g: ModalGame) -> int:
    xs = g.scope.points()[g.goal_mask]
    if len(xs) == 0:
        return 0
    best = 0
    for d in g.D:
        for k in _stages(g):
            best = max(best, int(np.abs(_pos_drift(g, xs, d, k)).max(initial=0)))
    return best


def _free_mask(arena: ScopeBox, obstacles: Region, delta: int) -> np.ndarray:
    """Cells whose delta-box lies in the arena and misses every obstacle."""
    shape = arena.shape
    occ = obstacles.mask(arena).reshape(shape)
    # a cell is blocked if any obstacle lies within delta (Chebyshev)
    blocked = occ.copy()
    for ax in range(arena.dim):
        acc = blocked.copy()
        for s in range(1, delta + 1):
            acc |= _pad_shift(blocked, s, ax) | _pad_shift(blocked, -s, ax)
        blocked = acc
    inner = np.zeros(shape, dtype=bool)
    if all(n > 2 * delta for n in shape):
        inner[tuple(slice(delta, n - delta) for n in shape)] = True
    return (inner & ~blocked).ravel()


def _pad_shift(a: np.ndarray, s: int, ax: int) -> np.ndarray:
    out = np.zeros_like(a)
    n = a.shape[ax]
    if abs(s) >= n:
        return out
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if s > 0:
        src[ax], dst[ax] = slice(0, n - s), slice(s, n)
    else:
        src[ax], dst[ax] = slice(-s, n), slice(0, n + s)
    out[tuple(dst)] = a[tuple(src)]
    return out


def check_perforation(task: "TaskConfig", delta: int) -> Trajectory | None:
    """Breadth-first search for a continuous tube covering the route in order.

    Search states are (cell, number of waypoints covered so far); a cell
    covers a waypoint when the waypoint lies in the cell's delta-box.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    arena, route = task.arena, task.route
    for w in route:
        if not arena.contains(w):
            log.info("waypoint %s outside the arena", w)
            return None
        if any(chebyshev(w, o) <= delta for o in task.obstacles.cells):
            log.info("waypoint %s lies within %d of an obstacle", w, delta)
            return None
    free = _free_mask(arena, task.obstacles, delta)
    n = len(route)

    def advance(c: Point, j: int) -> int:
        while j < n and chebyshev(c, route[j]) <= delta:
            j += 1
        return j

    parent: dict[tuple[Point, int], tuple[Point, int] | None] = {}
    queue: deque[tuple[Point, int]] = deque()
    for c in ScopeBox.bounding([route[0]]).dilate(delta).clip(arena):
        if free[arena.index(c)]:
            s = (c, advance(c, 0))
            if s not in parent:
                parent[s] = None
                queue.append(s)
    # axis-aligned moves first so witnesses prefer straight runs
    steps = sorted(MoveSet.box(1, arena.dim).moves, key=lambda m: (sum(map(abs, m)), m))
    end = None
    while queue:
        c, j = queue.popleft()
        if j == n:
            end = (c, j)
            break
        for m in steps:
            nc = tuple(a + b for a, b in zip(c, m))
            if not arena.contains(nc) or not free[arena.index(nc)]:
                continue
            s = (nc, advance(nc, j))
            if s not in parent:
                parent[s] = (c, j)
                queue.append(s)
    if end is None:
        return None
    path = []
    s = end
    while s is not None:
        path.append(s[0])
        s = parent[s]
    return Trajectory(tuple(reversed(path)))


def perforation_width(task: "TaskConfig") -> int:
    """Largest tube half-width that still admits a perforation witness."""
    top = max(task.arena.shape) // 2
    for dlt in range(top, -1, -1):
        if check_perforation(task, dlt) is not None:
            return dlt
    raise NotPerforated("no continuous obstacle-free path covers the route")


def robust_trackable(g: ModalGame, traj: Trajectory | Iterable[Sequence[int]], delta: int) -> bool:
    traj = traj if isinstance(traj, Trajectory) else Trajectory(tuple(traj))
    dyn = g.dynamics
    xs = np.asarray(traj.points, dtype=np.int64)
    if xs.shape[1] != dyn.state_dim:
        lifted = np.zeros((len(xs), dyn.state_dim), dtype=np.int64)
        lifted[:, list(dyn.position_axes)] = xs
        xs = lifted
    stages = range(1, 2) if dyn.time_invariant else range(1, len(traj) + 1)
    lhs = 0
    for d in g.D:
        m = min(int(np.abs(_pos_drift(g, xs, d, k)).max(axis=1, initial=0).min()) for k in stages)
        lhs = max(lhs, m)
    return lhs < delta


def delay_bound(delta: int, delta_O: int) -> int:
    if delta < 1:
        raise ValueError("delta must be >= 1")
    return max(delta_O, 0) // delta


def horizon_heuristic(p: Sequence[int], goal: Region | Iterable[Sequence[int]], sigma: int,
                      v_min: int, v_max: int) -> int:
    """Stage estimate min_p' floor(2 sigma |p - p'| / (v_min + v_max)), Euclidean norm.

    Evaluated exactly in integers: floor(2 s sqrt(q) / v) = isqrt(4 s^2 q) // v.
    """
    if sigma < 1 or v_min + v_max < 1:
        raise ValueError("need sigma >= 1 and v_min + v_max >= 1")
    p = as_point(p)
    cells = list(goal.cells if isinstance(goal, Region) else (as_point(c) for c in goal))
    if not cells:
        raise ValueError("goal must be non-empty")
    best = None
    for c in cells:
        q = sum((a - b) ** 2 for a, b in zip(p, c[: len(p)]))
        h = math.isqrt(4 * sigma * sigma * q) // (v_min + v_max)
        best = h if best is None else min(best, h)
    return best


def check_stage_cost_bound(g: ModalGame) -> bool:
    return stage_cost_bounded(g)


@dataclass
class WellFormedReport:
    perforated: bool
    witness: Trajectory | None
    locally_controllable: bool
    delta_lower: int
    delta_lower_empty: bool
    delta_goal: int
    perforation_width: int
    delay_bound: int
    horizon_hint: int
    stage_cost_ok: bool
    x0_safe: bool
    waypoints_free: bool
    overall: bool
    diagnostics: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        """Flat key=value rendering, fixed order."""
        keys = ("overall", "perforated", "locally_controllable", "delta_lower", "delta_lower_empty",
                "delta_goal", "perforation_width", "delay_bound", "horizon_hint", "stage_cost_ok",
                "x0_safe", "waypoints_free")
        out = [f"{k}={str(getattr(self, k)).lower()}" for k in keys]
        out.append(f"witness_length={len(self.witness) if self.witness else 0}")
        out.extend(f"diagnostic={d}" for d in self.diagnostics)
        return out


def well_formed(cfg: "Configuration") -> WellFormedReport:
    from .player import segment_game

    task, hyper = cfg.task, cfg.hyper
    diag: list[str] = []
    g = segment_game(cfg, 0)
    g_max = g.with_horizon(g.N + hyper.max_extensions * hyper.horizon_step)

    witness = check_perforation(task, hyper.delta)
    if witness is None:
        diag.append(f"perforation: no tube of half-width {hyper.delta} covers the route")
    try:
        width = perforation_width(task)
    except NotPerforated:
        width = -1
        diag.append("perforation: route not perforated even at width 0")
    ctrl = check_local_controllability(cfg.U, cfg.D)
    if not ctrl:
        diag.append("local controllability: some disturbance cannot be countered")
    dl, empty = delta_lower(g)
    if empty:
        diag.append("delta_lower: no progress state, reported as 0")
    n_delay = delay_bound(hyper.delta, width)
    if n_delay < 1:
        diag.append(f"delay bound {n_delay} < 1")
    cost_ok = check_stage_cost_bound(g_max)
    if not cost_ok:
        diag.append(f"stage cost: N={g_max.N} times max stage cost reaches top_bound")
    x0_safe = not task.obstacles.contains(cfg.space.position(cfg.start))
    if not x0_safe:
        diag.append("x0: start state lies in the unsafe region")
    wp_free = all(not any(chebyshev(w, o) <= cfg.margin for o in task.obstacles.cells) for w in task.route)
    if not wp_free:
        diag.append("waypoints: a waypoint neighbourhood meets an obstacle")
    nxt = task.route[1] if len(task.route) > 1 else task.route[0]
    hint = horizon_heuristic(task.route[0], [nxt], cfg.sigma, cfg.v_min, cfg.space.v_max)
    overall = witness is not None and ctrl and n_delay >= 1 and cost_ok and x0_safe and wp_free
    return WellFormedReport(witness is not None, witness, ctrl, dl, empty, delta_goal_bound(g), width,
                            n_delay, hint, cost_ok, x0_safe, wp_free, overall, diag)
