import pytest
from hypothesis import given, strategies as st

from ra_ddp.game import (TOP, CostWeights, Kinematic, ModalGame, from_raw, sat_add, stage_cost, step, successors,
                         terminal_cost, to_raw)
from ra_ddp.lattice import MoveSet, Region, ScopeBox
from ra_ddp.solver import step_bound

vals = st.one_of(st.integers(0, 500), st.just(TOP))


def test_sat_add_examples():
    assert sat_add(2, 3) == 5
    assert sat_add(TOP, 5) is TOP and sat_add(TOP, TOP) is TOP
    assert sat_add(6, 5, top_bound=10) is TOP


@given(vals, vals, vals)
def test_sat_add_algebra(a, b, c):
    top = 700
    assert sat_add(a, b, top) == sat_add(b, a, top)
    assert sat_add(sat_add(a, b, top), c, top) == sat_add(a, sat_add(b, c, top), top)
    assert sat_add(a, 0, top) == (a if a is TOP or a < top else TOP)
    if a is not TOP and b is not TOP and a <= b:
        assert sat_add(a, c, top) <= sat_add(b, c, top)


def test_top_ordering_and_raw():
    assert TOP > 10**12 and not TOP < 3 and max(4, TOP) is TOP
    assert from_raw(100, 100) is TOP and to_raw(TOP, 100) == 100 and from_raw(7, 100) == 7


def test_step_examples(line5, gap9, int3):
    assert step(line5, (2,), (1,), (0,), 1) == (3,)
    assert step(gap9, (4, 2), (1, 0), (0, 1), 1) == (5, 3)
    assert step(int3, (0, 3), (1,), (1,), 1) == (3, 3)
    with pytest.raises(ValueError):
        step(line5, (2,), (2,), (0,), 1)


def test_successors_counts(line5, gap9):
    assert len(successors(line5, (0,), 1)) == 3
    assert len(successors(gap9, (1, 1), 1)) == 27


def test_stage_cost_branches(line5, gap9):
    assert stage_cost(line5, (2,), (1,), (0,), 1) == 1
    assert stage_cost(line5, (4,), (0,), (0,), 1) == 0
    assert stage_cost(gap9, (4, 0), (0, 0), (0, 0), 1) is TOP
    assert terminal_cost(line5, (4,)) == 0 and terminal_cost(line5, (3,)) is TOP


def test_crossing_shield_blocks_jump():
    g = ModalGame(ScopeBox((0,), (4,)), Kinematic(1), MoveSet.box(2, 1), MoveSet.of([0]),
                  Region.from_cells([(4,)]), Region.from_cells([(2,)]), CostWeights((0,), (1,), (0,)), 3)
    assert stage_cost(g, (1,), (2,), (0,), 1) is TOP
    assert stage_cost(g, (0,), (1,), (0,), 1) == 1


def test_goal_and_unsafe_overlap_is_unsafe():
    g = ModalGame(ScopeBox((0,), (4,)), Kinematic(1), MoveSet.of([-1, 0, 1]), MoveSet.of([0]),
                  Region.from_cells([(3,), (4,)]), Region.from_cells([(3,)]), CostWeights((0,), (1,), (0,)), 3)
    assert terminal_cost(g, (3,)) is TOP and stage_cost(g, (3,), (0,), (0,), 1) is TOP


def test_game_validation():
    kw = dict(scope=ScopeBox((0,), (4,)), dynamics=Kinematic(1), D=MoveSet.of([0]),
              weights=CostWeights((0,), (1,), (0,)), N=3)
    with pytest.raises(ValueError):
        ModalGame(U=MoveSet.of([1]), goal=Region.from_cells([(4,)]), unsafe=Region(), **kw)
    with pytest.raises(ValueError):
        ModalGame(U=MoveSet.of([0, 1]), goal=Region.from_cells([(4,)]), unsafe=Region.from_cells([(4,)]), **kw)


def test_step_bound(line5, gap9, int3):
    assert step_bound(line5) == 1
    assert step_bound(gap9) == 2
    assert step_bound(int3) == 3
