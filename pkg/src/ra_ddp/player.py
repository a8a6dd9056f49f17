"""Hybrid play along a waypoint route: per-segment synthesis plus closed-loop simulation."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np

from .game import DEFAULT_TOP_BOUND, CostWeights, DoubleIntegrator, Dynamics, GameSpace, Kinematic, ModalGame, step
from .lattice import MoveSet, Point, Region, ScopeBox, as_point, chebyshev
from .scope import HyperPolicyConfig, Unsolvable, hyper_policy_synthesize
from .solver import Solution, StageCostUnbounded, argmin_move, value, worst_disturbance
from .wellformed import horizon_heuristic

log = logging.getLogger(__name__)

FAMILIES = ("kinematic", "double_integrator")


@dataclass(frozen=True)
class TaskConfig:
    """Arena (positions), waypoint route and static obstacle cells."""

    arena: ScopeBox
    route: tuple[Point, ...]
    obstacles: Region = field(default_factory=Region)

    def __post_init__(self):
        route = tuple(as_point(p) for p in self.route)
        if not route:
            raise ValueError("route must be non-empty")
        if any(len(p) != self.arena.dim for p in route):
            raise ValueError("waypoint dimension differs from the arena")
        if self.obstacles.axes is not None:
            raise ValueError("obstacles are given as plain position cells")
        object.__setattr__(self, "route", route)


@dataclass(frozen=True)
class Configuration:
    """Game template, hyper-policy settings and task; plus run defaults.

    ``x0`` defaults to the first waypoint at rest. ``auto_horizon`` seeds
    each segment's N from the horizon heuristic instead of ``hyper.initial_N``.
    """

    task: TaskConfig
    U: MoveSet
    D: MoveSet
    weights: CostWeights
    hyper: HyperPolicyConfig
    family: str = "kinematic"
    v_max: int = 1
    v_min: int = 1
    top_bound: int = DEFAULT_TOP_BOUND
    sigma: int = 1
    goal_margin: int | None = None
    scope_pad: int = 2
    obstacle_margin: int = 0
    auto_horizon: bool = False
    x0: Point | None = None
    adversary: str = "zero"
    seed: int = 0
    max_steps: int = 10_000

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown dynamics family {self.family!r}")
        if self.x0 is not None:
            object.__setattr__(self, "x0", as_point(self.x0))
        if self.scope_pad < 0 or self.obstacle_margin < 0 or (self.goal_margin or 0) < 0:
            raise ValueError("margins must be non-negative")
        AdversaryModel.parse(self.adversary, self.seed)

    @cached_property
    def dynamics(self) -> Dynamics:
        n = self.task.arena.dim
        return Kinematic(n) if self.family == "kinematic" else DoubleIntegrator(n, self.v_max)

    @cached_property
    def space(self) -> GameSpace:
        return GameSpace.for_dynamics(self.task.arena, self.dynamics, self.v_min, self.v_max)

    @property
    def margin(self) -> int:
        """Half-width of waypoint areas."""
        return self.hyper.delta if self.goal_margin is None else self.goal_margin

    @property
    def start(self) -> Point:
        return self.x0 if self.x0 is not None else self.space.lift_point(self.task.route[0])


class AdversaryKind(str, Enum):
    ZERO = "zero"
    RANDOM = "random"
    WORST = "worst"


@dataclass(frozen=True)
class AdversaryModel:
    kind: AdversaryKind = AdversaryKind.ZERO
    seed: int = 0

    @classmethod
    def parse(cls, name: str, seed: int = 0) -> "AdversaryModel":
        try:
            return cls(AdversaryKind(name.lower()), int(seed))
        except ValueError:
            raise ValueError(f"unknown adversary {name!r}; expected zero, random or worst") from None


class Termination(str, Enum):
    FINISHED = "Finished"
    ENTERED_UNSAFE = "EnteredUnsafe"
    UNSOLVABLE_SEGMENT = "UnsolvableSegment"
    HORIZON_EXHAUSTED = "HorizonExhausted"
    BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass(frozen=True)
class StepRecord:
    segment: int
    stage: int
    x: Point
    u: Point
    d: Point
    value: int


@dataclass(frozen=True)
class PlayTrace:
    steps: tuple[StepRecord, ...]
    jumps: tuple[tuple[int, str], ...]
    termination: Termination
    final_state: Point
    position_axes: tuple[int, ...]
    goal_margin: int
    note: str = ""

    def states(self) -> list[Point]:
        return [s.x for s in self.steps] + [self.final_state]


def modal_scope_for_segment(task: TaskConfig, i: int, pad: int) -> ScopeBox:
    n = len(task.route)
    if not 0 <= i < n:
        raise IndexError(f"segment {i} outside route of {n} waypoints")
    a, b = (task.route[i], task.route[i + 1]) if i + 1 < n else (task.route[max(n - 2, 0)], task.route[-1])
    return ScopeBox.bounding([a, b]).dilate(pad).clip(task.arena)


def _area(cfg: Configuration, p: Point) -> Region:
    box = ScopeBox(p, p).dilate(cfg.margin).clip(cfg.task.arena)
    return Region.from_cells(iter(box), axes=cfg.space.position_axes)


def _unsafe(cfg: Configuration) -> Region:
    obs = cfg.task.obstacles
    if cfg.obstacle_margin:
        cells = {tuple(a + b for a, b in zip(c, m)) for c in obs.cells
                 for m in MoveSet.box(cfg.obstacle_margin, cfg.task.arena.dim)}
    else:
        cells = set(obs.cells)
    return Region(frozenset(cells), cfg.space.position_axes)


def segment_game(cfg: Configuration, i: int, x: Sequence[int] | None = None) -> ModalGame:
    """Modal game for segment i: goal is waypoint i+1's area, unsafe the obstacles."""
    task = cfg.task
    j = min(i + 1, len(task.route) - 1)
    pos_scope = modal_scope_for_segment(task, i, max(cfg.scope_pad, cfg.margin))
    scope = cfg.space.lift_box(pos_scope)
    goal = _area(cfg, task.route[j])
    if cfg.auto_horizon:
        src = cfg.space.position(x) if x is not None else task.route[i]
        N = horizon_heuristic(src, goal.cells, cfg.sigma, cfg.v_min, cfg.space.v_max) + 1
        N = max(N, 2)
    else:
        N = cfg.hyper.initial_N
    return ModalGame(scope, cfg.dynamics, cfg.U, cfg.D, goal, _unsafe(cfg), cfg.weights, N,
                     cfg.top_bound, cfg.hyper.delta)


def adversary_move(model: AdversaryModel, sol: Solution | None, x: Sequence[int], u: Sequence[int], k: int,
                   D: MoveSet, rng: np.random.Generator | None = None) -> Point:
    if model.kind is AdversaryKind.ZERO:
        return D.zero
    if model.kind is AdversaryKind.RANDOM:
        if rng is None:
            rng = np.random.default_rng(model.seed)
        return D.moves[int(rng.integers(len(D)))]
    d = worst_disturbance(sol, x, u, k) if sol is not None else None
    return d if d is not None else D.moves[-1]


def hybrid_play(cfg: Configuration, adversary: AdversaryModel | None = None, *,
                backend: str | None = None) -> PlayTrace:
    """Play the route segment by segment; failures end the trace, never raise."""
    model = adversary or AdversaryModel.parse(cfg.adversary, cfg.seed)
    rng = np.random.default_rng(model.seed)
    task, space = cfg.task, cfg.space
    route = task.route
    x = cfg.start
    steps: list[StepRecord] = []
    jumps: list[tuple[int, str]] = []
    pos_axes = space.position_axes

    def done(term: Termination, note: str = "") -> PlayTrace:
        return PlayTrace(tuple(steps), tuple(jumps), term, x, pos_axes, cfg.margin, note)

    def arrived(j: int) -> bool:
        return chebyshev(space.position(x), route[j]) <= cfg.margin

    if task.obstacles.contains(space.position(x)):
        return done(Termination.ENTERED_UNSAFE, "start state is unsafe")
    i = 0
    while True:
        if i >= len(route) - 1:
            if arrived(len(route) - 1):
                jumps.append((len(steps), "finish"))
                return done(Termination.FINISHED)
            i = len(route) - 1
        elif arrived(i + 1):
            if i + 1 == len(route) - 1:
                jumps.append((len(steps), "finish"))
                return done(Termination.FINISHED)
            jumps.append((len(steps), "waypoint"))
            i += 1
            continue
        g = segment_game(cfg, i, x)
        try:
            syn = hyper_policy_synthesize(cfg.hyper, g, x, space.ambient, backend=backend)
        except (Unsolvable, StageCostUnbounded, ValueError) as exc:
            return done(Termination.UNSOLVABLE_SEGMENT, f"segment {i}: {exc}")
        sol = syn.solution
        g = sol.game
        k = sol.stages_computed[0]
        target = min(i + 1, len(route) - 1)
        while True:
            if len(steps) >= cfg.max_steps:
                return done(Termination.BUDGET_EXCEEDED)
            if k >= sol.N:
                return done(Termination.HORIZON_EXHAUSTED, f"segment {i}: goal not reached by stage {sol.N}")
            u = argmin_move(sol, x, k)
            if u is None:
                return done(Termination.HORIZON_EXHAUSTED, f"segment {i}: left the winning region at stage {k}")
            d = adversary_move(model, sol, x, u, k, g.D, rng)
            steps.append(StepRecord(i, k, x, u, d, value(sol, x, k)))
            x = step(g, x, u, d, k)
            k += 1
            if task.obstacles.contains(space.position(x)):
                return done(Termination.ENTERED_UNSAFE)
            if arrived(target):
                break


def play_correct(trace: PlayTrace, task: TaskConfig) -> bool:
    if trace.termination is not Termination.FINISHED:
        return False
    pos = lambda s: tuple(s[a] for a in trace.position_axes)  # noqa: E731
    if chebyshev(pos(trace.final_state), task.route[-1]) > trace.goal_margin:
        return False
    return not any(task.obstacles.contains(pos(s)) for s in trace.states())
