"""YAML task files: parse to a Configuration and print back.

Every number must be an integer and unknown keys are rejected. Printing
uses a fixed key order so dumps are reproducible byte for byte.
"""
from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from .game import DEFAULT_TOP_BOUND, CostWeights
from .lattice import MoveSet, Region, ScopeBox
from .player import Configuration, TaskConfig
from .scope import HyperPolicyConfig


class TaskFileError(ValueError):
    pass


SECTIONS = {
    "arena": {"lo", "hi"},
    "dynamics": {"family", "v_max", "v_min"},
    "players": {"U", "D"},
    "weights": {"P", "Q", "R"},
    "costs": {"top_bound"},
    "route": None,
    "obstacles": None,
    "robustness": {"delta", "sigma", "goal_margin", "obstacle_margin"},
    "horizon": {"initial_N", "delta_I", "scope_margin", "max_extensions", "scope_pad"},
    "run": {"adversary", "seed", "max_steps"},
    "x0": None,
}
REQUIRED = ("arena", "players", "route")


def _int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise TaskFileError(f"{where}: expected an integer, got {v!r}")
    return v


def _vec(v: Any, where: str, dim: int | None = None) -> tuple[int, ...]:
    if isinstance(v, int) and not isinstance(v, bool):
        v = [v]
    if not isinstance(v, list):
        raise TaskFileError(f"{where}: expected a list of integers, got {v!r}")
    out = tuple(_int(c, where) for c in v)
    if dim is not None and len(out) != dim:
        raise TaskFileError(f"{where}: expected {dim} components, got {len(out)}")
    return out


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name, {}) or {}
    if not isinstance(sec, dict):
        raise TaskFileError(f"{name}: expected a mapping")
    extra = set(sec) - SECTIONS[name]
    if extra:
        raise TaskFileError(f"{name}: unknown keys {sorted(extra)}")
    return sec


def _moves(v: Any, where: str, dim: int) -> MoveSet:
    if isinstance(v, dict):
        if set(v) != {"box"}:
            raise TaskFileError(f"{where}: only the 'box' shorthand is supported")
        return MoveSet.box(_int(v["box"], where), dim)
    if not isinstance(v, list) or not v:
        raise TaskFileError(f"{where}: expected a non-empty list of moves")
    return MoveSet(tuple(_vec(m, where, dim) for m in v))


def parse(text: str) -> Configuration:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise TaskFileError(f"YAML syntax: {exc}") from None
    if not isinstance(doc, dict):
        raise TaskFileError("task file must be a mapping")
    unknown = set(doc) - set(SECTIONS)
    if unknown:
        raise TaskFileError(f"unknown sections {sorted(unknown)}")
    for r in REQUIRED:
        if r not in doc:
            raise TaskFileError(f"missing section {r!r}")

    a = _section(doc, "arena")
    lo = _vec(a.get("lo"), "arena.lo")
    m = len(lo)
    hi = _vec(a.get("hi"), "arena.hi", m)
    try:
        arena = ScopeBox(lo, hi)
    except ValueError as exc:
        raise TaskFileError(f"arena: {exc}") from None

    dy = _section(doc, "dynamics")
    family = dy.get("family", "kinematic")
    if not isinstance(family, str):
        raise TaskFileError("dynamics.family: expected a name")
    v_max = _int(dy.get("v_max", 1), "dynamics.v_max")
    v_min = _int(dy.get("v_min", 1), "dynamics.v_min")

    pl = _section(doc, "players")
    U = _moves(pl.get("U"), "players.U", m)
    D = _moves(pl.get("D", [[0] * m]), "players.D", m)

    w = _section(doc, "weights")
    sdim = m if family == "kinematic" else 2 * m
    P = _vec(w.get("P", [0] * sdim), "weights.P", sdim)
    Q = _vec(w.get("Q", [1] * m), "weights.Q", m)
    R = _vec(w.get("R", [0] * m), "weights.R", m)

    top = _int(_section(doc, "costs").get("top_bound", DEFAULT_TOP_BOUND), "costs.top_bound")

    route_raw = doc["route"]
    if not isinstance(route_raw, list) or not route_raw:
        raise TaskFileError("route: expected a non-empty list of waypoints")
    route = tuple(_vec(p, "route", m) for p in route_raw)

    cells: set = set()
    for ob in doc.get("obstacles") or []:
        if isinstance(ob, dict):
            if set(ob) != {"lo", "hi"}:
                raise TaskFileError("obstacles: a box needs exactly lo and hi")
            try:
                cells.update(ScopeBox(_vec(ob["lo"], "obstacles.lo", m), _vec(ob["hi"], "obstacles.hi", m)))
            except ValueError as exc:
                raise TaskFileError(f"obstacles: {exc}") from None
        else:
            cells.add(_vec(ob, "obstacles", m))

    rb = _section(doc, "robustness")
    delta = _int(rb.get("delta", 1), "robustness.delta")
    sigma = _int(rb.get("sigma", 1), "robustness.sigma")
    gm = rb.get("goal_margin")
    gm = None if gm is None else _int(gm, "robustness.goal_margin")
    om = _int(rb.get("obstacle_margin", 0), "robustness.obstacle_margin")

    hz = _section(doc, "horizon")
    n0 = _int(hz.get("initial_N", 0), "horizon.initial_N")
    run = _section(doc, "run")
    adversary = run.get("adversary", "zero")
    if not isinstance(adversary, str):
        raise TaskFileError("run.adversary: expected a name")
    x0 = _vec(doc["x0"], "x0", sdim) if doc.get("x0") is not None else None

    try:
        hyper = HyperPolicyConfig(
            delta=delta, initial_N=max(n0, 1),
            horizon_step=_int(hz.get("delta_I", 1), "horizon.delta_I"),
            scope_margin=_int(hz.get("scope_margin", 1), "horizon.scope_margin"),
            max_extensions=_int(hz.get("max_extensions", 5), "horizon.max_extensions"))
        task = TaskConfig(arena, route, Region(frozenset(cells)))
        return Configuration(
            task=task, U=U, D=D, weights=CostWeights(P, Q, R), hyper=hyper, family=family,
            v_max=v_max, v_min=v_min, top_bound=top, sigma=sigma, goal_margin=gm,
            scope_pad=_int(hz.get("scope_pad", 2), "horizon.scope_pad"), obstacle_margin=om,
            auto_horizon=n0 == 0, x0=x0, adversary=adversary,
            seed=_int(run.get("seed", 0), "run.seed"),
            max_steps=_int(run.get("max_steps", 10_000), "run.max_steps"))
    except TaskFileError:
        raise
    except ValueError as exc:
        raise TaskFileError(str(exc)) from None


def load(path: str | Path) -> Configuration:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise TaskFileError(f"cannot read {path}: {exc}") from None
    return parse(text)


class _Flow(list):
    pass


def _flow_repr(dumper, data):
    return dumper.represent_sequence("tag:yaml.org,2002:seq", data, flow_style=True)


class _Dumper(yaml.SafeDumper):
    pass


_Dumper.add_representer(_Flow, _flow_repr)


def dump(cfg: Configuration) -> str:
    t, h = cfg.task, cfg.hyper
    doc: dict[str, Any] = {
        "arena": {"lo": _Flow(t.arena.lo), "hi": _Flow(t.arena.hi)},
        "dynamics": {"family": cfg.family, "v_max": cfg.v_max, "v_min": cfg.v_min},
        "players": {"U": [_Flow(u) for u in cfg.U], "D": [_Flow(d) for d in cfg.D]},
        "weights": {"P": _Flow(cfg.weights.P), "Q": _Flow(cfg.weights.Q), "R": _Flow(cfg.weights.R)},
        "costs": {"top_bound": cfg.top_bound},
        "route": [_Flow(p) for p in t.route],
        "obstacles": [_Flow(c) for c in sorted(t.obstacles.cells)],
        "robustness": {"delta": h.delta, "sigma": cfg.sigma, "obstacle_margin": cfg.obstacle_margin},
        "horizon": {"initial_N": 0 if cfg.auto_horizon else h.initial_N, "delta_I": h.horizon_step,
                    "scope_margin": h.scope_margin, "max_extensions": h.max_extensions,
                    "scope_pad": cfg.scope_pad},
        "run": {"adversary": cfg.adversary, "seed": cfg.seed, "max_steps": cfg.max_steps},
    }
    if cfg.goal_margin is not None:
        doc["robustness"]["goal_margin"] = cfg.goal_margin
    if cfg.x0 is not None:
        doc["x0"] = _Flow(cfg.x0)
    return yaml.dump(doc, Dumper=_Dumper, sort_keys=False, default_flow_style=False)
