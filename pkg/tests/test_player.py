from dataclasses import replace

import pytest

from ra_ddp import fixtures
from ra_ddp.lattice import MoveSet, ScopeBox
from ra_ddp.player import (AdversaryKind, AdversaryModel, Termination, TaskConfig, adversary_move, hybrid_play,
                           modal_scope_for_segment, play_correct, segment_game)


def test_modal_scope():
    task = TaskConfig(ScopeBox((0, 0), (19, 19)), ((1, 10), (10, 3), (18, 16)))
    assert modal_scope_for_segment(task, 0, 2) == ScopeBox((0, 1), (12, 12))
    assert modal_scope_for_segment(task, 1, 0) == ScopeBox((10, 3), (18, 16))
    assert modal_scope_for_segment(task, 1, 5) == ScopeBox((5, 0), (19, 19))
    with pytest.raises(IndexError):
        modal_scope_for_segment(task, 3, 0)


def test_adversary_parse():
    assert AdversaryModel.parse("Worst").kind is AdversaryKind.WORST
    with pytest.raises(ValueError):
        AdversaryModel.parse("greedy")


def test_adversary_moves():
    D = MoveSet.of([(0, 0), (0, 1), (0, -1)])
    assert adversary_move(AdversaryModel(), None, (0, 0), (1, 0), 1, D) == (0, 0)
    import numpy as np
    a = [adversary_move(AdversaryModel(AdversaryKind.RANDOM, 4), None, (0, 0), (1, 0), 1, D,
                        np.random.default_rng(4)) for _ in range(3)]
    b = [adversary_move(AdversaryModel(AdversaryKind.RANDOM, 4), None, (0, 0), (1, 0), 1, D,
                        np.random.default_rng(4)) for _ in range(3)]
    assert a == b and all(d in D.moves for d in a)


def test_segment_game_goal_and_scope():
    cfg = fixtures.config("gap9w")
    g = segment_game(cfg, 0)
    assert g.goal.contains((8, 2)) and g.goal.contains((7, 1)) and not g.goal.contains((6, 2))
    assert g.unsafe.contains((4, 0)) and g.N == cfg.hyper.initial_N


@pytest.mark.parametrize("adv", ["zero", "worst", "random"])
def test_gap9w_finishes(adv):
    cfg = fixtures.config("gap9w")
    tr = hybrid_play(cfg, AdversaryModel.parse(adv, 3))
    assert tr.termination is Termination.FINISHED and play_correct(tr, cfg.task)


def test_line5_zero_adversary():
    cfg = fixtures.config("line5")
    tr = hybrid_play(cfg)
    assert tr.termination is Termination.FINISHED
    assert tr.final_state == (4,) and len(tr.steps) == 4


def test_gapless_unsolvable():
    tr = hybrid_play(fixtures.config("gap9_gapless"))
    assert tr.termination is Termination.UNSOLVABLE_SEGMENT and not tr.steps
    assert not play_correct(tr, fixtures.config("gap9_gapless").task)


def test_gap9_literal_is_unwinnable():
    # exact goal cell plus y-disturbance through a one-cell gap: no winning start
    tr = hybrid_play(fixtures.config("gap9"))
    assert tr.termination is Termination.UNSOLVABLE_SEGMENT


def test_unsafe_start():
    cfg = replace(fixtures.config("gap9w"), x0=(4, 0))
    tr = hybrid_play(cfg)
    assert tr.termination is Termination.ENTERED_UNSAFE and not tr.steps


def test_budget():
    cfg = replace(fixtures.config("gap9w"), max_steps=2)
    assert hybrid_play(cfg).termination is Termination.BUDGET_EXCEEDED


def test_deterministic():
    cfg = fixtures.config("arena20")
    m = AdversaryModel.parse("random", 11)
    assert hybrid_play(cfg, m) == hybrid_play(cfg, m)


def test_arena20_worst_visits_waypoints():
    cfg = fixtures.config("arena20")
    tr = hybrid_play(cfg, AdversaryModel.parse("worst"))
    assert tr.termination is Termination.FINISHED and play_correct(tr, cfg.task)
    assert [name for _, name in tr.jumps] == ["waypoint", "finish"]
