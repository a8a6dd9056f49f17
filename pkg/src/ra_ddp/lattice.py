"""Integer lattice geometry: boxes, regions, move sets and trajectories."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

Point = tuple[int, ...]


def as_point(x: Iterable[int]) -> Point:
    return tuple(int(c) for c in x)


def chebyshev(a: Sequence[int], b: Sequence[int]) -> int:
    return max((abs(int(p) - int(q)) for p, q in zip(a, b)), default=0)


@dataclass(frozen=True)
class ScopeBox:
    """Inclusive axis-aligned box of lattice points."""

    lo: Point
    hi: Point

    def __post_init__(self):
        lo, hi = as_point(self.lo), as_point(self.hi)
        if len(lo) != len(hi):
            raise ValueError(f"box bounds differ in dimension: {lo} vs {hi}")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"empty box: lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.dim and all(a <= c <= b for a, c, b in zip(self.lo, x, self.hi))

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def index(self, x: Sequence[int]) -> int:
        if not self.contains(x):
            raise KeyError(f"{tuple(x)} outside box {self.lo}..{self.hi}")
        idx = 0
        for a, c, n in zip(self.lo, x, self.shape):
            idx = idx * n + (int(c) - a)
        return idx

    def point(self, idx: int) -> Point:
        coords = np.unravel_index(int(idx), self.shape)
        return tuple(int(a + c) for a, c in zip(self.lo, coords))

    def points(self) -> np.ndarray:
        """All cells as an (size, dim) int64 array in row-major order."""
        axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(self.lo, self.hi)]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=1)

    def indices(self, xs: np.ndarray) -> np.ndarray:
        """Row-major indices of an (n, dim) array; -1 where a row lies outside."""
        xs = np.asarray(xs, dtype=np.int64)
        lo = np.asarray(self.lo, dtype=np.int64)
        hi = np.asarray(self.hi, dtype=np.int64)
        inside = np.all((xs >= lo) & (xs <= hi), axis=-1)
        rel = np.where(inside[..., None], xs - lo, 0)
        flat = np.ravel_multi_index(tuple(np.moveaxis(rel, -1, 0)), self.shape)
        return np.where(inside, flat, -1).astype(np.int64)

    def __iter__(self) -> Iterator[Point]:
        return itertools.product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))

    def dilate(self, margin: int | Sequence[int]) -> "ScopeBox":
        m = [margin] * self.dim if isinstance(margin, int) else list(margin)
        return ScopeBox(tuple(a - w for a, w in zip(self.lo, m)), tuple(b + w for b, w in zip(self.hi, m)))

    def clip(self, other: "ScopeBox") -> "ScopeBox":
        lo = tuple(max(a, c) for a, c in zip(self.lo, other.lo))
        hi = tuple(min(b, d) for b, d in zip(self.hi, other.hi))
        return ScopeBox(lo, hi)

    def issubset(self, other: "ScopeBox") -> bool:
        return all(c <= a and b <= d for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def project(self, axes: Sequence[int]) -> "ScopeBox":
        return ScopeBox(tuple(self.lo[j] for j in axes), tuple(self.hi[j] for j in axes))

    @staticmethod
    def bounding(points: Iterable[Sequence[int]]) -> "ScopeBox":
        pts = np.asarray([as_point(p) for p in points], dtype=np.int64)
        return ScopeBox(tuple(pts.min(axis=0)), tuple(pts.max(axis=0)))


@dataclass(frozen=True)
class MoveSet:
    """Finite set of integer offset vectors, kept in lexicographic order."""

    moves: tuple[Point, ...]

    def __post_init__(self):
        moves = tuple(sorted({as_point(m) for m in self.moves}))
        if not moves:
            raise ValueError("move set must be non-empty")
        if len({len(m) for m in moves}) != 1:
            raise ValueError("moves differ in dimension")
        object.__setattr__(self, "moves", moves)

    @classmethod
    def box(cls, bounds: int | Sequence[int], dim: int | None = None) -> "MoveSet":
        """The centred box [-b, +b] per component."""
        if isinstance(bounds, int):
            if dim is None:
                raise ValueError("dim required for a scalar bound")
            bounds = [bounds] * dim
        ranges = [range(-b, b + 1) for b in bounds]
        return cls(tuple(itertools.product(*ranges)))

    @classmethod
    def of(cls, moves: Iterable[Iterable[int] | int]) -> "MoveSet":
        return cls(tuple((m,) if isinstance(m, (int, np.integer)) else as_point(m) for m in moves))

    @property
    def dim(self) -> int:
        return len(self.moves[0])

    @property
    def zero(self) -> Point:
        return (0,) * self.dim

    def has_zero(self) -> bool:
        return self.zero in self.moves

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.moves)

    def __contains__(self, m) -> bool:
        return as_point(m) in self._lookup

    @cached_property
    def _lookup(self) -> frozenset:
        return frozenset(self.moves)

    def index(self, m: Sequence[int]) -> int:
        return self.moves.index(as_point(m))

    def array(self) -> np.ndarray:
        return np.asarray(self.moves, dtype=np.int64).reshape(len(self.moves), self.dim)


@dataclass(frozen=True)
class Region:
    """Extensional cell set, optionally a cylinder over a subset of axes.

    With ``axes=None`` the cells are full state vectors. Otherwise a state
    ``x`` belongs to the region iff its projection onto ``axes`` is a cell.
    """

    cells: frozenset = field(default_factory=frozenset)
    axes: tuple[int, ...] | None = None

    def __post_init__(self):
        cells = frozenset(as_point(c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        if self.axes is not None:
            object.__setattr__(self, "axes", tuple(int(a) for a in self.axes))
            if cells and any(len(c) != len(self.axes) for c in cells):
                raise ValueError("cell dimension does not match region axes")

    @classmethod
    def from_cells(cls, cells: Iterable[Sequence[int]], axes: Sequence[int] | None = None) -> "Region":
        return cls(frozenset(as_point(c) for c in cells), None if axes is None else tuple(axes))

    @classmethod
    def from_boxes(cls, boxes: Iterable[ScopeBox], axes: Sequence[int] | None = None) -> "Region":
        cells: set[Point] = set()
        for b in boxes:
            cells.update(iter(b))
        return cls(frozenset(cells), None if axes is None else tuple(axes))

    def _proj(self, x: Sequence[int]) -> Point:
        if self.axes is None:
            return as_point(x)
        return tuple(int(x[j]) for j in self.axes)

    def contains(self, x: Sequence[int]) -> bool:
        return self._proj(x) in self.cells

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self) -> Iterator[Point]:
        return iter(sorted(self.cells))

    def __bool__(self) -> bool:
        return bool(self.cells)

    def mask(self, box: ScopeBox) -> np.ndarray:
        """Boolean membership of every cell of ``box`` (row-major)."""
        pts = box.points()
        if self.axes is None:
            sub_axes = tuple(range(box.dim))
        else:
            sub_axes = self.axes
        sub = box.project(sub_axes)
        grid = np.zeros(sub.shape, dtype=bool)
        for c in self.cells:
            if sub.contains(c):
                grid[tuple(a - l for a, l in zip(c, sub.lo))] = True
        rel = pts[:, list(sub_axes)] - np.asarray(sub.lo, dtype=np.int64)
        return grid[tuple(rel.T)]

    def restrict(self, box: ScopeBox) -> "Region":
        sub = box if self.axes is None else box.project(self.axes)
        return Region(frozenset(c for c in self.cells if sub.contains(c)), self.axes)

    def union(self, other: "Region") -> "Region":
        if self.axes != other.axes:
            raise ValueError("cannot unite regions over different axes")
        return Region(self.cells | other.cells, self.axes)

    def difference(self, other: "Region") -> "Region":
        if self.axes != other.axes:
            raise ValueError("cannot subtract regions over different axes")
        return Region(self.cells - other.cells, self.axes)

    def issubset(self, other: "Region") -> bool:
        return self.axes == other.axes and self.cells <= other.cells


@dataclass(frozen=True)
class Trajectory:
    points: tuple[Point, ...]

    def __post_init__(self):
        pts = tuple(as_point(p) for p in self.points)
        if not pts:
            raise ValueError("trajectory must be non-empty")
        if len({len(p) for p in pts}) != 1:
            raise ValueError("trajectory points differ in dimension")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def project(self, axes: Sequence[int]) -> "Trajectory":
        return Trajectory(tuple(tuple(p[j] for j in axes) for p in self.points))


def _as_traj(traj) -> Trajectory:
    return traj if isinstance(traj, Trajectory) else Trajectory(tuple(traj))


def is_delta_trajectory(traj, delta: MoveSet) -> bool:
    traj = _as_traj(traj)
    if traj.dim != delta.dim:
        raise ValueError(f"trajectory dimension {traj.dim} != granularity dimension {delta.dim}")
    allowed = delta._lookup
    return all(
        tuple(b - a for a, b in zip(p, q)) in allowed for p, q in zip(traj.points, traj.points[1:])
    )


def is_continuous(traj) -> bool:
    traj = _as_traj(traj)
    return all(chebyshev(p, q) <= 1 for p, q in zip(traj.points, traj.points[1:]))


def segment_cells(a: Sequence[int], b: Sequence[int]) -> list[Point]:
    """Shortest continuous path from a to b, endpoints included.

    Every component that still differs moves one unit per step, all at once,
    so the path has Chebyshev length.
    """
    a, b = as_point(a), as_point(b)
    steps = chebyshev(a, b)
    out = []
    for t in range(steps + 1):
        out.append(tuple(p + (1 if q > p else -1) * min(t, abs(q - p)) for p, q in zip(a, b)))
    return out


def continuous_completion(traj) -> Trajectory:
    traj = _as_traj(traj)
    pts = [traj.points[0]]
    for p, q in zip(traj.points, traj.points[1:]):
        pts.extend(segment_cells(p, q)[1:])
    return Trajectory(tuple(pts))


def minkowski_dilate(region: Region, delta: MoveSet, clip: ScopeBox | None = None) -> Region:
    """Minkowski sum of a region with a move set, clipped to ``clip`` if given.

    For a cylinder region the move set acts on the region's own axes and the
    clip box is given in full-state coordinates.
    """
    if region.cells and len(next(iter(region.cells))) != delta.dim:
        raise ValueError("region and move set differ in dimension")
    cells = {tuple(a + b for a, b in zip(c, m)) for c in region.cells for m in delta.moves}
    out = Region(frozenset(cells), region.axes)
    return out.restrict(clip) if clip is not None else out
