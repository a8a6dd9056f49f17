import numpy as np
import pytest

from ra_ddp import fixtures
from ra_ddp.lattice import ScopeBox
from ra_ddp.scope import HyperPolicyConfig, Unsolvable, extend, hyper_policy_synthesize
from ra_ddp.solver import ddp_solve


def test_extend():
    arena = ScopeBox((0,), (9,))
    cfg = HyperPolicyConfig(delta=1, initial_N=5, horizon_step=1, scope_margin=2, max_extensions=3)
    assert extend(ScopeBox((0,), (4,)), 5, cfg, arena) == (ScopeBox((0,), (6,)), 6)
    assert extend(arena, 5, cfg, arena) == (arena, 6)
    flat = HyperPolicyConfig(1, 5, 1, 0, 3)
    assert extend(ScopeBox((2,), (4,)), 5, flat, arena) == (ScopeBox((2,), (4,)), 6)
    with pytest.raises(ValueError):
        extend(ScopeBox((0,), (12,)), 5, cfg, arena)


def test_config_validation():
    with pytest.raises(ValueError):
        HyperPolicyConfig(max_extensions=-1)


def test_line5_extends_horizon(line5):
    cfg = HyperPolicyConfig(delta=1, initial_N=2, horizon_step=1, scope_margin=0, max_extensions=5)
    syn = hyper_policy_synthesize(cfg, line5.with_horizon(2), (0,), line5.scope)
    assert syn.extensions == 3 and syn.solution.N == 5
    direct = ddp_solve(line5)
    for k in range(syn.solution.stages_computed[0], 5):
        assert np.array_equal(syn.solution.table.argmin[k - 1], direct.table.argmin[k - 1])


def test_line5_no_extension(line5):
    syn = hyper_policy_synthesize(HyperPolicyConfig(1, 5, 1, 0, 0), line5, (0,), line5.scope)
    assert syn.extensions == 0


def test_gapless_is_unsolvable():
    cfg = fixtures.config("gap9_gapless")
    g = fixtures.game("gap9_gapless")
    with pytest.raises(Unsolvable) as err:
        hyper_policy_synthesize(cfg.hyper, g, (0, 2), cfg.space.ambient)
    assert err.value.extensions == cfg.hyper.max_extensions and err.value.region_size == 0


def test_solves_at_most_budget_plus_one(monkeypatch):
    from ra_ddp import scope as mod
    calls = []
    real = mod.ddp_solve
    monkeypatch.setattr(mod, "ddp_solve", lambda *a, **k: calls.append(1) or real(*a, **k))
    cfg = fixtures.config("gap9_gapless")
    with pytest.raises(Unsolvable):
        hyper_policy_synthesize(cfg.hyper, fixtures.game("gap9_gapless"), (0, 2), cfg.space.ambient)
    assert len(calls) == cfg.hyper.max_extensions + 1


def test_extension_keeps_winning_start():
    cfg = fixtures.config("arena20")
    from ra_ddp.player import segment_game
    g = segment_game(cfg, 0)
    x0 = cfg.start
    syn = hyper_policy_synthesize(cfg.hyper, g, x0, cfg.space.ambient)
    g2 = syn.solution.game
    scope2, n2 = extend(g2.scope, g2.N, cfg.hyper, cfg.space.ambient)
    bigger = ddp_solve(g2.with_scope(scope2).with_horizon(n2))
    assert bigger.table.finite(1)[scope2.index(x0)]
