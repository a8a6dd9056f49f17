"""Hyper-policy: re-solve with a larger scope and horizon until x0 is winning."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .game import ModalGame
from .lattice import ScopeBox, as_point
from .solver import Approximate, Policy, PolicyMode, Solution, ddp_solve, extract_policy, winning_mask

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HyperPolicyConfig:
    delta: int = 1
    initial_N: int = 1
    horizon_step: int = 1
    scope_margin: int = 1
    max_extensions: int = 5

    def __post_init__(self):
        if self.max_extensions < 0 or self.scope_margin < 0 or self.horizon_step < 0:
            raise ValueError("extension budget and margins must be non-negative")
        if self.delta < 1 or self.initial_N < 1:
            raise ValueError("delta and initial_N must be positive")


class Unsolvable(RuntimeError):
    def __init__(self, scope: ScopeBox, N: int, region_size: int, extensions: int):
        self.scope, self.N, self.region_size, self.extensions = scope, N, region_size, extensions
        super().__init__(
            f"start state not winning after {extensions} extensions "
            f"(scope {scope.lo}..{scope.hi}, N={N}, |W(1)|={region_size})")


class Synthesis(NamedTuple):
    policy: Policy
    solution: Solution
    extensions: int


def extend(scope: ScopeBox, N: int, cfg: HyperPolicyConfig, arena: ScopeBox) -> tuple[ScopeBox, int]:
    if not scope.issubset(arena):
        raise ValueError("scope must lie inside the arena")
    return scope.dilate(cfg.scope_margin).clip(arena), N + cfg.horizon_step


def hyper_policy_synthesize(cfg: HyperPolicyConfig, game: ModalGame, x0: Sequence[int], arena: ScopeBox,
                            *, backend: str | None = None) -> Synthesis:
    """Solve, and while x0 is not in W(1) grow (scope, N) and solve again.

    At most ``max_extensions + 1`` solves. Raises :class:`Unsolvable`.
    """
    x0 = as_point(x0)
    g = game
    for ext in range(cfg.max_extensions + 1):
        sol = ddp_solve(g, Approximate(x0), backend=backend)
        if g.scope.contains(x0) and winning_mask(sol, 1)[g.scope.index(x0)]:
            mode = PolicyMode.NON_STATIONARY if sol.fixpoint_stage is None else PolicyMode.QUASI_STATIONARY
            log.debug("x0=%s winning with N=%d after %d extensions", x0, g.N, ext)
            return Synthesis(extract_policy(sol, mode), sol, ext)
        if ext == cfg.max_extensions:
            raise Unsolvable(g.scope, g.N, int(winning_mask(sol, 1).sum()), ext)
        scope, N = extend(g.scope, g.N, cfg, arena)
        g = g.with_scope(scope).with_horizon(N)
    raise AssertionError("unreachable")
