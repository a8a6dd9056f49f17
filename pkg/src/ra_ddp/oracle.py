"""Brute-force reference semantics for small modal games.

Nothing here touches the solver's tables or kernels: costs and successors
are recomputed from the game definition on every visit.
"""
from __future__ import annotations

from typing import Sequence

from .game import TOP, ModalGame
from .lattice import Point, Region


class NodeBudgetExceeded(RuntimeError):
    pass


def _between(a: Point, b: Point) -> list[Point]:
    n = max((abs(q - p) for p, q in zip(a, b)), default=0)
    out = []
    for t in range(1, n):
        out.append(tuple(p + (1 if q > p else -1) * min(t, abs(q - p)) for p, q in zip(a, b)))
    return out


def _succ(g: ModalGame, x: Point, u: Point, d: Point, k: int) -> Point:
    off = g.dynamics.step(x, u, d, k)
    return tuple(a + b for a, b in zip(x, off))


def _L(g: ModalGame, x: Point, u: Point, d: Point, k: int, xn: Point):
    if x in g.unsafe:
        return TOP
    if g.crossing_shield and any(c in g.unsafe for c in _between(x, xn)):
        return TOP
    if x in g.goal:
        return 0
    lam = (sum(p * c * c for p, c in zip(g.weights.P, x))
           + sum(q * c * c for q, c in zip(g.weights.Q, u))
           + sum(r * c * c for r, c in zip(g.weights.R, d)))
    return TOP if lam >= g.top_bound else lam


def _phi(g: ModalGame, x: Point):
    return 0 if (x in g.goal and x not in g.unsafe) else TOP


def _add(a, b, top):
    if a is TOP or b is TOP:
        return TOP
    return TOP if a + b >= top else a + b


def tree_size(g: ModalGame, k: int) -> int:
    """Number of recursive visits a full walk from stage k makes."""
    b = len(g.U) * len(g.D)
    return sum(b**i for i in range(g.N - k + 1))


def brute_force_value(g: ModalGame, x: Sequence[int], k: int, *, node_budget: int = 2_000_000,
                      memo: bool = False, cache: dict | None = None):
    """Value of x at stage k by explicit min-max over the game tree.

    ``memo=True`` caches (state, stage) pairs within this one query, which
    makes deep horizons tractable; by default the tree is walked in full.
    Passing a ``cache`` dict shares that memo across queries on the same game.
    """
    if not 1 <= k <= g.N:
        raise ValueError(f"stage {k} outside 1..{g.N}")
    top = g.top_bound
    count = [0]
    if cache is not None:
        memo = True
    else:
        cache = {}

    def rec(x: Point, j: int):
        count[0] += 1
        if count[0] > node_budget:
            raise NodeBudgetExceeded(f"more than {node_budget} nodes")
        if x not in g.scope:
            return TOP
        if j == g.N:
            return _phi(g, x)
        if memo and (x, j) in cache:
            return cache[(x, j)]
        best = TOP
        for u in g.U.moves:
            worst = None
            for d in g.D.moves:
                xn = _succ(g, x, u, d, j)
                v = _add(_L(g, x, u, d, j, xn), rec(xn, j + 1), top)
                if worst is None or v > worst:
                    worst = v
            if worst < best:
                best = worst
        if memo:
            cache[(x, j)] = best
        return best

    return rec(tuple(int(c) for c in x), k)


def reach_avoid_sets(g: ModalGame) -> dict[int, frozenset]:
    """Controllable-predecessor recursion for every stage 1..N."""
    cells = [c for c in g.scope]
    T = {g.N: frozenset(c for c in cells if c in g.goal and c not in g.unsafe)}
    for j in range(g.N - 1, 0, -1):
        nxt = T[j + 1]
        keep = set()
        for x in cells:
            if x in g.unsafe:
                continue
            for u in g.U.moves:
                ok = True
                for d in g.D.moves:
                    xn = _succ(g, x, u, d, j)
                    if xn not in nxt or _L(g, x, u, d, j, xn) is TOP:
                        ok = False
                        break
                if ok:
                    keep.add(x)
                    break
        T[j] = frozenset(keep)
    return T


def reach_avoid_set(g: ModalGame, k: int) -> Region:
    if not 1 <= k <= g.N:
        raise ValueError(f"stage {k} outside 1..{g.N}")
    return Region(reach_avoid_sets(g)[k])
