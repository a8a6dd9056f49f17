"""Acceptance criteria, one test per criterion."""
import time
from dataclasses import replace

import numpy as np
import pytest

from ra_ddp import fixtures
from ra_ddp.audit import hji_audit, monotonicity_audit, vector_field_certificate
from ra_ddp.cli import main
from ra_ddp.game import step
from ra_ddp.lattice import MoveSet, ScopeBox, segment_cells
from ra_ddp.oracle import brute_force_value, reach_avoid_sets, tree_size
from ra_ddp.player import AdversaryModel, Termination, hybrid_play, play_correct
from ra_ddp.solver import argmin_move, ddp_solve, hji_residual, value, winning_region, worst_disturbance
from ra_ddp.wellformed import (check_local_controllability, check_perforation, delay_bound, horizon_heuristic,
                               perforation_width)

SEEDS = range(50)
FULL_WALK = 200_000
SOLVED_FIXTURES = ("line5", "gap9", "gap9w", "int3", "jump", "arena20")


def _suite():
    named = [(n, fixtures.game(n)) for n in ("line5", "gap9", "int3")]
    return named + [(f"random{s}", fixtures.random_game(s)) for s in SEEDS]


@pytest.fixture(scope="module")
def suite():
    return [(name, g, ddp_solve(g)) for name, g in _suite()]


def test_c1_oracle_value_equivalence(suite):
    t0 = time.perf_counter()
    bad = []
    for name, g, sol in suite:
        assert g.scope.size <= 200 and g.N <= 6 or name in ("gap9", "line5", "int3")
        cache = {}
        for k in range(1, g.N + 1):
            shared = cache if tree_size(g, k) > FULL_WALK else None
            for x in g.scope:
                if brute_force_value(g, x, k, cache=shared) != value(sol, x, k):
                    bad.append((name, x, k))
    assert not bad, bad[:10]
    assert time.perf_counter() - t0 < 60


def test_c2_winning_region_equals_reach_avoid_set(suite):
    t0 = time.perf_counter()
    for name, g, sol in suite:
        sets = reach_avoid_sets(g)
        for k in range(1, g.N + 1):
            assert winning_region(sol, k).cells == set(sets[k]), (name, k)
    assert time.perf_counter() - t0 < 60


def test_c3_monotonicity(suite, line5_sol):
    tables = [(n, s) for n, _, s in suite] + [(n, ddp_solve(fixtures.game(n))) for n in SOLVED_FIXTURES]
    failing = [n for n, s in tables if not monotonicity_audit(s)]
    t = line5_sol.table
    vals = t.values.copy()
    vals[2, 3] = 50
    corrupted = replace(line5_sol, table=replace(t, values=vals))
    assert not monotonicity_audit(corrupted)
    assert not failing, f"monotonicity fails on {failing}"


def test_c4_hji_identity(suite):
    for name, g, sol in suite + [(n, None, ddp_solve(fixtures.game(n))) for n in SOLVED_FIXTURES]:
        r = hji_audit(sol)
        assert r, (name, r.violations[:3])
        for k in range(2, sol.N + 1):
            for x in sol.game.scope:
                assert hji_residual(sol, x, k).residual == 0


def test_c5_terminal_exactness(suite):
    for name, g, sol in suite:
        expect = {x for x in g.scope if g.goal.contains(x) and not g.unsafe.contains(x)}
        assert winning_region(sol, g.N).cells == expect, name


def _replay(g, sol, x0, budget=100_000):
    """DFS over disturbance sequences under u*; Worst adversary past the budget.

    A play's future depends only on (state, stage, goal seen), so sequences
    meeting in the same node are explored once.
    """
    goal = lambda x: g.goal.contains(x) and not g.unsafe.contains(x)  # noqa: E731
    nodes = 0
    stack = [(x0, 1, goal(x0))]
    seen = set()
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        x, k, reached = node
        if g.unsafe.contains(x):
            return f"unsafe {x} at {k}"
        if k == g.N:
            if not reached:
                return f"goal missed from {x0}"
            continue
        u = argmin_move(sol, x, k)
        if u is None:
            return f"no move at {x}, stage {k}"
        nodes += 1
        ds = g.D.moves if nodes <= budget else [worst_disturbance(sol, x, u, k)]
        for d in ds:
            xn = step(g, x, u, d, k)
            if any(g.unsafe.contains(c) for c in segment_cells(x, xn)):
                return f"crossed unsafe from {x} at {k}"
            stack.append((xn, k + 1, reached or goal(xn)))
    return None


@pytest.mark.parametrize("name", ["gap9", "gap9w"])
def test_c6_safety_liveness_replay(name):
    t0 = time.perf_counter()
    g = fixtures.game(name)
    sol = ddp_solve(g)
    starts = sorted(winning_region(sol, 1).cells)
    if name == "gap9w":
        assert starts
    for x in starts:
        assert _replay(g, sol, x) is None
    assert time.perf_counter() - t0 < 120


def test_c6_replay_detects_crossing():
    # shield-off table replayed against the shielded game must be flagged
    sol = ddp_solve(fixtures.game("jump", crossing_shield=False))
    g = fixtures.game("jump")
    assert any(_replay(g, sol, x) for x in winning_region(sol, 1).cells)


def test_c7_vector_field_certificate():
    for n in SOLVED_FIXTURES:
        assert vector_field_certificate(ddp_solve(fixtures.game(n))), n
    assert not vector_field_certificate(ddp_solve(fixtures.game("jump", crossing_shield=False)))


def test_c8_preservation():
    for n in SOLVED_FIXTURES:
        g = fixtures.game(n)
        assert g.dynamics.time_invariant
        g = replace(g, top_bound=max(g.top_bound, 10**6))
        a, b = ddp_solve(g), ddp_solve(g.with_horizon(g.N + 1))
        for k in range(1, g.N + 1):
            assert np.array_equal(b.table.row(k + 1), a.table.row(k)), (n, k)
        assert winning_region(a, 1).cells <= winning_region(b, 1).cells


def test_c9_side_condition_examples():
    assert check_local_controllability(MoveSet.of([-1, 0, 1]), MoveSet.of([-1, 0, 1]))
    assert not check_local_controllability(MoveSet.of([-1, 0, 1]), MoveSet.of([-2, 0, 2]))
    assert (delay_bound(2, 5), delay_bound(2, 4), delay_bound(3, 2)) == (2, 2, 0)
    assert horizon_heuristic((0, 0, 0), [(10, 0, 0)], 1, 1, 3) == 5
    assert horizon_heuristic((0, 0, 0), [(10, 0, 0)], 3, 1, 3) == 15
    assert check_perforation(fixtures.config("gap9").task, 0) is not None
    assert check_perforation(fixtures.config("gap9").task, 1) is None
    assert check_perforation(fixtures.config("gap9_gapless").task, 0) is None
    assert perforation_width(fixtures.config("gap9").task) == 0


@pytest.mark.parametrize("adv,seed", [("zero", 0)] + [("random", s) for s in range(5)] + [("worst", 0)])
def test_c10_global_play(adv, seed):
    cfg = fixtures.config("arena20")
    assert cfg.task.arena == ScopeBox((0, 0), (19, 19)) and len(cfg.task.route) == 3
    t0 = time.perf_counter()
    tr = hybrid_play(cfg, AdversaryModel.parse(adv, seed))
    assert tr.termination is Termination.FINISHED and play_correct(tr, cfg.task)
    assert time.perf_counter() - t0 < 30


def _artifacts(out, name):
    f = str(fixtures.path(name))
    assert main(["solve", f, "--dump-values", str(out / "v.csv"), "--dump-region", str(out / "r")]) == 0
    assert main(["play", f, "--adversary", "random", "--seed", "7", "--trace-out", str(out / "t.csv")]) == 0
    return {p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}


@pytest.mark.parametrize("name", ["gap9w", "arena20"])
def test_c11_determinism(tmp_path, name):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    first, second = _artifacts(a, name), _artifacts(b, name)
    assert len(first) > 2 and first == second
