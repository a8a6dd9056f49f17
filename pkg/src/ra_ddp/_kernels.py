"""Min-max backup kernels.

Two interchangeable implementations of one stage of the backward recursion:
a numba-compiled loop nest and a vectorised numpy version. ``RA_DDP_NUMBA=0``
selects numpy; numba is also skipped when it is not importable.

Tables are dense int64 arrays over (cell, u index, d index). ``top`` encodes
the losing value; every entry is clamped to ``top``.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    # the bundled TBB is often too old; prefer OpenMP / workqueue
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False


def numba_enabled() -> bool:
    return HAS_NUMBA and os.environ.get("RA_DDP_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


def set_threads(n: int | None) -> None:
    """Cap worker threads; ``RA_DDP_THREADS`` overrides the argument."""
    env = os.environ.get("RA_DDP_THREADS")
    if env:
        n = int(env)
    if n and HAS_NUMBA:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


def backup_numpy(cost, succ, vnext, top, u_rank):
    nc, nu, nd = cost.shape
    vs = np.where(succ >= 0, vnext[np.maximum(succ, 0)], top)
    tot = np.minimum(cost + vs, top)
    arg_d = tot.argmax(axis=2)
    worst = tot.max(axis=2)
    ranked = worst[:, u_rank]
    pick = ranked.argmin(axis=1)
    vrow = ranked[np.arange(nc), pick]
    arg_u = np.where(vrow < top, u_rank[pick], -1)
    return vrow.astype(np.int64), arg_u.astype(np.int64), arg_d.astype(np.int64)


if HAS_NUMBA:

    @njit(cache=True, parallel=True, nogil=True)
    def _backup_nb(cost, succ, vnext, top, u_rank):
        nc, nu, nd = cost.shape
        vrow = np.empty(nc, dtype=np.int64)
        arg_u = np.empty(nc, dtype=np.int64)
        arg_d = np.empty((nc, nu), dtype=np.int64)
        for c in prange(nc):
            best = top
            bu = -1
            for r in range(nu):
                iu = u_rank[r]
                worst = -1
                wd = 0
                for jd in range(nd):
                    s = succ[c, iu, jd]
                    v = top if s < 0 else vnext[s]
                    t = cost[c, iu, jd] + v
                    if t > top:
                        t = top
                    if t > worst:
                        worst = t
                        wd = jd
                arg_d[c, iu] = wd
                if worst < best:
                    best = worst
                    bu = iu
            vrow[c] = best
            arg_u[c] = bu
        return vrow, arg_u, arg_d


def backup_numba(cost, succ, vnext, top, u_rank):
    if not HAS_NUMBA:  # pragma: no cover
        raise RuntimeError("numba is not available")
    return _backup_nb(cost, succ, vnext, np.int64(top), u_rank)


def backup(cost, succ, vnext, top, u_rank, backend: str | None = None):
    """One min-max stage: returns (values, argmin u index, argmax d index per u).

    ``u_rank`` lists u indices in tie-break order; the first minimiser in
    that order wins. Maximising d ties go to the lowest d index.
    """
    if backend is None:
        backend = "numba" if numba_enabled() else "numpy"
    cost = np.ascontiguousarray(cost, dtype=np.int64)
    succ = np.ascontiguousarray(succ, dtype=np.int64)
    vnext = np.ascontiguousarray(vnext, dtype=np.int64)
    u_rank = np.ascontiguousarray(u_rank, dtype=np.int64)
    if backend == "numba":
        return backup_numba(cost, succ, vnext, top, u_rank)
    if backend == "numpy":
        return backup_numpy(cost, succ, vnext, top, u_rank)
    raise ValueError(f"unknown backend {backend!r}")
