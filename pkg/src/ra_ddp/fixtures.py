"""Shipped fixture task files and small game builders used by tests and benchmarks."""
from __future__ import annotations

from dataclasses import replace
from importlib import resources

import numpy as np

from .game import CostWeights, DoubleIntegrator, FunctionDynamics, Kinematic, ModalGame
from .lattice import MoveSet, Region, ScopeBox
from .oracle import tree_size
from .player import Configuration, segment_game
from .solver import max_finite_lambda
from .taskfile import load

NAMES = ("line5", "gap9", "gap9_gapless", "gap9w", "int3", "jump", "arena20")


def path(name: str):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    return resources.files("ra_ddp") / "tasks" / f"{name}.yaml"


def config(name: str) -> Configuration:
    return load(path(name))


def game(name: str, *, crossing_shield: bool = True) -> ModalGame:
    """Segment-0 game of a fixture task."""
    g = segment_game(config(name), 0)
    if not crossing_shield:
        g = replace(g, crossing_shield=False)
    return g


def _subset(rng: np.random.Generator, ms: MoveSet, size: int) -> MoveSet:
    others = [m for m in ms.moves if any(m)]
    pick = rng.choice(len(others), size=min(size - 1, len(others)), replace=False)
    return MoveSet((ms.zero,) + tuple(others[i] for i in sorted(pick)))


def random_game(seed: int, *, max_cells: int = 120, node_budget: int = 60_000) -> ModalGame:
    """A small random modal game whose full oracle enumeration stays under ``node_budget``.

    Covers kinematic, double-integrator and time-varying dynamics, with
    and without the crossing shield.
    """
    rng = np.random.default_rng(seed)
    kind = rng.choice(["kin1", "kin2", "di1", "tv1", "tv2"])
    if kind in ("kin1", "tv1"):
        scope = ScopeBox((0,), (int(rng.integers(4, 16)),))
    elif kind == "di1":
        scope = ScopeBox((0, -2), (int(rng.integers(3, 12)), 2))
    else:
        w = int(rng.integers(3, 10))
        h = int(rng.integers(3, max(4, min(10, max_cells // w))))
        scope = ScopeBox((0, 0), (w - 1, h - 1))
    m_in = 1 if kind in ("kin1", "tv1", "di1") else 2

    if kind == "di1":
        dyn = DoubleIntegrator(1, 2)
    elif kind.startswith("kin"):
        dyn = Kinematic(m_in)
    else:
        drift = int(rng.integers(1, 3))

        def fn(x, u, d, k, _drift=drift):
            s = _drift if k % 2 == 0 else 0
            return (u[0] + d[0] + s,) + tuple(a + b for a, b in zip(u[1:], d[1:]))

        dyn = FunctionDynamics(fn, m_in, m_in)

    ubound = int(rng.integers(1, 3))
    U = _subset(rng, MoveSet.box(ubound, m_in), int(rng.integers(2, 10)))
    D = _subset(rng, MoveSet.box(1, m_in), int(rng.integers(1, 4)))

    pts = list(scope)
    cells = [pts[i] for i in rng.choice(len(pts), size=min(len(pts), int(rng.integers(1, 5))), replace=False)]
    n_bad = int(rng.integers(0, max(1, len(pts) // 6)))
    bad = [pts[i] for i in rng.choice(len(pts), size=n_bad, replace=False)]
    bad = [c for c in bad if c != cells[0]]
    if dyn.velocity_axes:
        goal = Region.from_cells({c[:1] for c in cells}, axes=(0,))
        unsafe = Region.from_cells({c[:1] for c in bad if c[:1] != cells[0][:1]}, axes=(0,))
    else:
        goal, unsafe = Region.from_cells(cells), Region.from_cells(bad)
    weights = CostWeights(tuple(int(v) for v in rng.integers(0, 2, dyn.state_dim)),
                          tuple(int(v) for v in rng.integers(0, 3, m_in)),
                          tuple(int(v) for v in rng.integers(0, 2, m_in)))
    shield = bool(rng.random() < 0.8)

    N = 2
    g = ModalGame(scope, dyn, U, D, goal, unsafe, weights, N, crossing_shield=shield)
    for cand in range(3, 7):
        trial = g.with_horizon(cand)
        work = scope.size * sum(tree_size(trial, k) for k in range(1, cand + 1))
        if work > node_budget:
            break
        g = trial
    top = 10**6 if rng.random() < 0.5 else g.N * max_finite_lambda(g) + int(rng.integers(1, 20))
    return replace(g, top_bound=max(top, 1))
