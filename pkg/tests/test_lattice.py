import numpy as np
import pytest
from hypothesis import given, strategies as st

from ra_ddp.lattice import (MoveSet, Region, ScopeBox, Trajectory, chebyshev, continuous_completion,
                            is_continuous, is_delta_trajectory, minkowski_dilate, segment_cells)

coords = st.integers(-6, 6)


def test_box_basics():
    b = ScopeBox((0, 0), (8, 4))
    assert b.size == 45 and b.shape == (9, 5)
    assert b.contains((4, 2)) and not b.contains((9, 0))
    assert b.index((0, 0)) == 0 and b.point(b.index((3, 1))) == (3, 1)
    with pytest.raises(ValueError):
        ScopeBox((1,), (0,))


def test_points_order_matches_index():
    b = ScopeBox((-1, 2), (1, 4))
    pts = b.points()
    assert [b.index(p) for p in pts] == list(range(b.size))
    assert b.indices(np.array([[5, 5], [0, 3]])).tolist() == [-1, b.index((0, 3))]


@given(st.tuples(coords, coords), st.tuples(coords, coords))
def test_segment_cells_continuous(a, b):
    cells = segment_cells(a, b)
    assert cells[0] == a and cells[-1] == b
    assert len(cells) == chebyshev(a, b) + 1
    assert is_continuous(cells)


def test_segment_cells_diagonal_then_straight():
    assert segment_cells((0, 0), (3, 1)) == [(0, 0), (1, 1), (2, 1), (3, 1)]


def test_delta_trajectory():
    delta = MoveSet.box(1, 2)
    assert is_delta_trajectory([(0, 0), (1, 1), (1, 2)], delta)
    assert not is_delta_trajectory([(0, 0), (2, 0)], delta)
    with pytest.raises(ValueError):
        is_delta_trajectory([(0,), (1,)], delta)


def test_completion_fills_jumps():
    t = continuous_completion(Trajectory(((0, 0), (2, 2), (2, 4))))
    assert t.points == ((0, 0), (1, 1), (2, 2), (2, 3), (2, 4))


def test_moveset_sorted_and_box():
    ms = MoveSet.of([1, -1, 0, 1])
    assert ms.moves == ((-1,), (0,), (1,))
    assert len(MoveSet.box(2, 2)) == 25 and MoveSet.box(1, 2).has_zero()
    with pytest.raises(ValueError):
        MoveSet(())


def test_region_cylinder_mask():
    box = ScopeBox((0, -1), (2, 1))
    r = Region.from_cells([(1,)], axes=(0,))
    assert r.contains((1, -1)) and not r.contains((0, 0))
    assert r.mask(box).sum() == 3


def test_minkowski_dilate_clips():
    r = minkowski_dilate(Region.from_cells([(0, 0)]), MoveSet.box(1, 2), clip=ScopeBox((0, 0), (5, 5)))
    assert r.cells == {(0, 0), (0, 1), (1, 0), (1, 1)}
