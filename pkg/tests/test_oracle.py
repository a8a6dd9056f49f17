import pytest

from ra_ddp import fixtures
from ra_ddp.game import TOP, terminal_cost
from ra_ddp.oracle import NodeBudgetExceeded, brute_force_value, reach_avoid_set, reach_avoid_sets, tree_size


def test_line5_oracle(line5):
    assert brute_force_value(line5, (0,), 1) == 4
    assert all(brute_force_value(line5, (x,), 5) == terminal_cost(line5, (x,)) for x in range(5))


def test_unsafe_state_is_top(gap9):
    assert brute_force_value(gap9, (4, 0), 11) is TOP


def test_reach_avoid_examples(line5, gap9):
    assert reach_avoid_set(line5, 5).cells == {(4,)}
    assert reach_avoid_set(line5, 1).cells == {(x,) for x in range(5)}
    assert reach_avoid_set(gap9, gap9.N).cells == {(8, 2)}


def test_node_budget(gap9):
    assert tree_size(gap9, 1) > 10**15
    with pytest.raises(NodeBudgetExceeded):
        brute_force_value(gap9, (0, 2), 1, node_budget=1000)


def test_memo_matches_full_walk(int3):
    for x in [(3, 3), (0, 3), (6, 3), (5, 0)]:
        for k in (1, 3):
            assert brute_force_value(int3, x, k) == brute_force_value(int3, x, k, memo=True)


@pytest.mark.parametrize("seed", range(6))
def test_value_and_set_formulations_agree(seed):
    g = fixtures.random_game(seed)
    sets = reach_avoid_sets(g)
    cache = {}
    for k in range(1, g.N + 1):
        finite = {x for x in g.scope if brute_force_value(g, x, k, cache=cache) is not TOP}
        assert finite == set(sets[k])
