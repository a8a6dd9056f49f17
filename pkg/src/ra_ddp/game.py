"""Modal integer difference games: dynamics, saturating values and costs."""
from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .lattice import MoveSet, Point, Region, ScopeBox, as_point, segment_cells

DEFAULT_TOP_BOUND = 10**6


@functools.total_ordering
class _Top:
    """The losing value. Absorbing under addition and above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TOP"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("ra_ddp.TOP")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()


def is_top(v) -> bool:
    return v is TOP


def sat_add(a, b, top_bound: int = DEFAULT_TOP_BOUND):
    if a is TOP or b is TOP:
        return TOP
    s = int(a) + int(b)
    return TOP if s >= top_bound else s


def from_raw(v: int, top_bound: int):
    """Decode a table entry (``top_bound`` encodes TOP)."""
    return TOP if v >= top_bound else int(v)


def to_raw(v, top_bound: int) -> int:
    return top_bound if v is TOP else min(int(v), top_bound)


class Dynamics:
    """Discrete dynamics: ``step`` returns the offset added to the state.

    Subclasses override ``step``; ``offsets`` is the batched form used by the
    solver and falls back to a Python loop.
    """

    name = "custom"
    time_invariant = False

    def __init__(self, state_dim: int, input_dim: int, position_axes: Sequence[int] | None = None,
                 velocity_axes: Sequence[int] = ()):
        self.state_dim = int(state_dim)
        self.input_dim = int(input_dim)
        self.position_axes = tuple(range(state_dim)) if position_axes is None else tuple(position_axes)
        self.velocity_axes = tuple(velocity_axes)

    def step(self, x: Point, u: Point, d: Point, k: int) -> Point:
        raise NotImplementedError

    def offsets(self, xs: np.ndarray, u: Point, d: Point, k: int) -> np.ndarray:
        return np.asarray([self.step(tuple(int(c) for c in x), u, d, k) for x in xs],
                          dtype=np.int64).reshape(len(xs), self.state_dim)

    def __repr__(self):
        return f"{type(self).__name__}(state_dim={self.state_dim})"


class FunctionDynamics(Dynamics):
    """Wrap a plain ``f(x, u, d, k) -> offset`` callable."""

    def __init__(self, fn: Callable, state_dim: int, input_dim: int, *, time_invariant: bool = False,
                 position_axes: Sequence[int] | None = None, velocity_axes: Sequence[int] = ()):
        super().__init__(state_dim, input_dim, position_axes, velocity_axes)
        self.fn = fn
        self.time_invariant = time_invariant

    def step(self, x, u, d, k):
        return as_point(self.fn(x, u, d, k))


class Kinematic(Dynamics):
    """Position-only dynamics: p' = p + u + d."""

    name = "kinematic"
    time_invariant = True

    def __init__(self, dim: int):
        super().__init__(dim, dim)

    def step(self, x, u, d, k):
        return tuple(int(a) + int(b) for a, b in zip(u, d))

    def offsets(self, xs, u, d, k):
        off = np.asarray(u, dtype=np.int64) + np.asarray(d, dtype=np.int64)
        return np.broadcast_to(off, (len(xs), self.state_dim)).copy()


class DoubleIntegrator(Dynamics):
    """State (p_1..p_n, v_1..v_n); v' = clamp(v + u + d, -v_max, v_max), p' = p + v'."""

    name = "double_integrator"
    time_invariant = True

    def __init__(self, npos: int, v_max: int):
        super().__init__(2 * npos, npos, tuple(range(npos)), tuple(range(npos, 2 * npos)))
        self.npos = npos
        self.v_max = int(v_max)

    def step(self, x, u, d, k):
        n = self.npos
        v = x[n:]
        vn = [max(-self.v_max, min(self.v_max, int(a) + int(b) + int(c))) for a, b, c in zip(v, u, d)]
        return tuple(vn) + tuple(b - int(a) for a, b in zip(v, vn))

    def offsets(self, xs, u, d, k):
        n = self.npos
        v = xs[:, n:]
        vn = np.clip(v + np.asarray(u, dtype=np.int64) + np.asarray(d, dtype=np.int64), -self.v_max, self.v_max)
        return np.concatenate([vn, vn - v], axis=1)

    def __repr__(self):
        return f"DoubleIntegrator(npos={self.npos}, v_max={self.v_max})"


@dataclass(frozen=True)
class GameSpace:
    """Ambient state box plus the role of each coordinate."""

    ambient: ScopeBox
    position_axes: tuple[int, ...]
    velocity_axes: tuple[int, ...] = ()
    v_max: int = 1
    v_min: int = 1

    def __post_init__(self):
        roles = set(self.position_axes) | set(self.velocity_axes)
        if len(roles) != len(self.position_axes) + len(self.velocity_axes) or roles != set(range(self.ambient.dim)):
            raise ValueError("coordinate roles must partition the state axes")
        if not self.v_max >= self.v_min >= 1:
            raise ValueError(f"need v_max >= v_min >= 1, got v_max={self.v_max} v_min={self.v_min}")

    @classmethod
    def for_dynamics(cls, arena: ScopeBox, dyn: Dynamics, v_min: int = 1, v_max: int | None = None) -> "GameSpace":
        """Lift a position arena to the state box of ``dyn``."""
        vm = getattr(dyn, "v_max", v_max if v_max is not None else 1)
        lo, hi = [0] * dyn.state_dim, [0] * dyn.state_dim
        for j, a in enumerate(dyn.position_axes):
            lo[a], hi[a] = arena.lo[j], arena.hi[j]
        for a in dyn.velocity_axes:
            lo[a], hi[a] = -vm, vm
        return cls(ScopeBox(tuple(lo), tuple(hi)), dyn.position_axes, dyn.velocity_axes, vm, v_min)

    def lift_box(self, pos_box: ScopeBox) -> ScopeBox:
        lo, hi = list(self.ambient.lo), list(self.ambient.hi)
        for j, a in enumerate(self.position_axes):
            lo[a], hi[a] = pos_box.lo[j], pos_box.hi[j]
        return ScopeBox(tuple(lo), tuple(hi))

    def lift_point(self, p: Sequence[int]) -> Point:
        """Position with zero velocity."""
        x = [0] * self.ambient.dim
        for j, a in enumerate(self.position_axes):
            x[a] = int(p[j])
        return tuple(x)

    def position(self, x: Sequence[int]) -> Point:
        return tuple(int(x[a]) for a in self.position_axes)


@dataclass(frozen=True)
class CostWeights:
    """Diagonal quadratic weights for state, control and disturbance."""

    P: tuple[int, ...]
    Q: tuple[int, ...]
    R: tuple[int, ...]

    def __post_init__(self):
        for name in ("P", "Q", "R"):
            w = as_point(getattr(self, name))
            if any(c < 0 for c in w):
                raise ValueError(f"weight {name} must be non-negative")
            object.__setattr__(self, name, w)

    @classmethod
    def zero(cls, state_dim: int, input_dim: int) -> "CostWeights":
        return cls((0,) * state_dim, (0,) * input_dim, (0,) * input_dim)

    def lam(self, x: Sequence[int], u: Sequence[int], d: Sequence[int]) -> int:
        return (sum(p * int(c) ** 2 for p, c in zip(self.P, x))
                + sum(q * int(c) ** 2 for q, c in zip(self.Q, u))
                + sum(r * int(c) ** 2 for r, c in zip(self.R, d)))


@dataclass(frozen=True)
class ModalGame:
    scope: ScopeBox
    dynamics: Dynamics = field(compare=False)
    U: MoveSet
    D: MoveSet
    goal: Region
    unsafe: Region
    weights: CostWeights
    N: int
    top_bound: int = DEFAULT_TOP_BOUND
    delta: int = 1
    crossing_shield: bool = True

    def __post_init__(self):
        dyn = self.dynamics
        if self.scope.dim != dyn.state_dim:
            raise ValueError(f"scope dimension {self.scope.dim} != state dimension {dyn.state_dim}")
        for name, ms in (("U", self.U), ("D", self.D)):
            if ms.dim != dyn.input_dim:
                raise ValueError(f"{name} dimension {ms.dim} != input dimension {dyn.input_dim}")
            if not ms.has_zero():
                raise ValueError(f"{name} must contain the zero move")
        w = self.weights
        if (len(w.P), len(w.Q), len(w.R)) != (dyn.state_dim, dyn.input_dim, dyn.input_dim):
            raise ValueError("weight dimensions do not match state/input dimensions")
        if self.N < 1:
            raise ValueError("horizon N must be >= 1")
        if self.delta < 1:
            raise ValueError("robustness margin delta must be >= 1")
        if self.top_bound < 1:
            raise ValueError("top_bound must be positive")
        if not np.any(self.goal_mask & ~self.unsafe_mask):
            raise ValueError("goal minus unsafe region is empty inside the scope")

    @cached_property
    def goal_mask(self) -> np.ndarray:
        return self.goal.mask(self.scope)

    @cached_property
    def unsafe_mask(self) -> np.ndarray:
        return self.unsafe.mask(self.scope)

    @property
    def m(self) -> int:
        return self.scope.dim

    def with_scope(self, scope: ScopeBox) -> "ModalGame":
        return replace(self, scope=scope)

    def with_horizon(self, N: int) -> "ModalGame":
        return replace(self, N=N)

    def in_goal(self, x: Sequence[int]) -> bool:
        """x satisfies goal and not unsafe."""
        return self.goal.contains(x) and not self.unsafe.contains(x)


def _check_moves(g: ModalGame, u, d) -> tuple[Point, Point]:
    u, d = as_point(u), as_point(d)
    if u not in g.U:
        raise ValueError(f"control move {u} not in U")
    if d not in g.D:
        raise ValueError(f"disturbance move {d} not in D")
    return u, d


def step(g: ModalGame, x: Sequence[int], u, d, k: int) -> Point:
    u, d = _check_moves(g, u, d)
    if k < 1:
        raise ValueError(f"stage must be >= 1, got {k}")
    x = as_point(x)
    off = g.dynamics.step(x, u, d, k)
    return tuple(a + b for a, b in zip(x, off))


def successors(g: ModalGame, x: Sequence[int], k: int) -> list[tuple[Point, Point, Point]]:
    return [(u, d, step(g, x, u, d, k)) for u in g.U for d in g.D]


def crosses_unsafe(g: ModalGame, x: Sequence[int], xn: Sequence[int]) -> bool:
    """True if a cell strictly between x and its successor is unsafe."""
    cells = segment_cells(x, xn)
    return any(g.unsafe.contains(c) for c in cells[1:-1])


def stage_cost(g: ModalGame, x: Sequence[int], u, d, k: int):
    u, d = _check_moves(g, u, d)
    x = as_point(x)
    if g.unsafe.contains(x):
        return TOP
    if g.crossing_shield and crosses_unsafe(g, x, step(g, x, u, d, k)):
        return TOP
    if g.goal.contains(x):
        return 0
    lam = g.weights.lam(x, u, d)
    return TOP if lam >= g.top_bound else lam


def terminal_cost(g: ModalGame, x: Sequence[int]):
    return 0 if g.in_goal(x) else TOP
