"""Grid-scale evidence for codimension >= 1 and >= 2.

A compact X in R^n has codimension >= 1 iff every non-empty open U leaves
``U \\ X`` non-empty, and codimension >= 2 iff every connected open U leaves
``U \\ X`` non-empty *and* connected.  Here U ranges over box windows of a
voxel grid and connectivity is face adjacency, so every verdict is relative
to the grid resolution.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

CODIM2 = "consistent with codim >= 2"
CODIM1 = "codim >= 1 only"
FULL = "full-dimensional evidence"
REFUSED = "no verdict: set flagged non-compact"


@dataclass(frozen=True)
class Box:
    """Half-open window ``lo <= idx < hi`` on each axis."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("box corners differ in dimension")

    def empty(self) -> bool:
        return any(h <= l for l, h in zip(self.lo, self.hi))

    def slices(self):
        return tuple(slice(l, h) for l, h in zip(self.lo, self.hi))

    def to_json(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class VoxelSet:
    dim: int
    resolution: int
    occupied: frozenset = field(default_factory=frozenset)
    compact: bool = True

    def __post_init__(self):
        if self.dim < 2 or self.resolution < 2:
            raise ValueError("need dim >= 2 and resolution >= 2")
        occ = frozenset(tuple(int(c) for c in cell) for cell in self.occupied)
        for cell in occ:
            if len(cell) != self.dim or not all(0 <= c < self.resolution for c in cell):
                raise ValueError(f"cell {cell} lies outside the {self.resolution}^{self.dim} grid")
        object.__setattr__(self, "occupied", occ)

    def mask(self) -> np.ndarray:
        m = np.zeros((self.resolution,) * self.dim, dtype=np.bool_)
        if self.occupied:
            idx = np.array(sorted(self.occupied), dtype=np.int64)
            m[tuple(idx.T)] = True
        return m

    def full_window(self) -> Box:
        return Box((0,) * self.dim, (self.resolution,) * self.dim)

    def with_cells(self, cells: Iterable[Sequence[int]]) -> "VoxelSet":
        return VoxelSet(self.dim, self.resolution, self.occupied | {tuple(c) for c in cells}, self.compact)


def _window_free(v: VoxelSet, window: Box) -> np.ndarray:
    if len(window.lo) != v.dim:
        raise ValueError("window dimension does not match the voxel set")
    if window.empty():
        raise ValueError("empty window")
    if any(l < 0 or h > v.resolution for l, h in zip(window.lo, window.hi)):
        raise ValueError("window exceeds the grid")
    return ~v.mask()[window.slices()]


def complement_nonempty(v: VoxelSet, window: Box) -> bool:
    return bool(_window_free(v, window).any())


def complement_components(v: VoxelSet, window: Box, use_numba: bool | None = None) -> int:
    return _kernels.count_components(_window_free(v, window), use_numba)


def complement_connected(v: VoxelSet, window: Box, use_numba: bool | None = None) -> bool:
    """Free cells of the window are non-empty and form one face-connected component."""
    return complement_components(v, window, use_numba) == 1


def bfs_component_count(free: np.ndarray) -> int:
    """Independent oracle: breadth-first search over free cells."""
    free = np.asarray(free, dtype=np.bool_)
    shape = free.shape
    seen = np.zeros(shape, dtype=np.bool_)
    count = 0
    for start in zip(*np.nonzero(free)):
        if seen[start]:
            continue
        count += 1
        seen[start] = True
        queue = deque([start])
        while queue:
            cell = queue.popleft()
            for ax in range(len(shape)):
                for step in (-1, 1):
                    c = cell[ax] + step
                    if 0 <= c < shape[ax]:
                        nb = cell[:ax] + (c,) + cell[ax + 1 :]
                        if free[nb] and not seen[nb]:
                            seen[nb] = True
                            queue.append(nb)
    return count


def octant_windows(dim: int, resolution: int) -> list[Box]:
    """Full grid, the 2^n half-size orthant boxes, and the central box."""
    r = resolution
    half = r // 2
    out = [Box((0,) * dim, (r,) * dim)]
    for corner in itertools.product((0, 1), repeat=dim):
        lo = tuple(0 if c == 0 else half for c in corner)
        hi = tuple(half if c == 0 else r for c in corner)
        out.append(Box(lo, hi))
    q = max(r // 4, 0)
    out.append(Box((q,) * dim, (r - q,) * dim))
    return [w for w in out if not w.empty()]


WINDOW_FAMILIES = {"octants": octant_windows}


@dataclass
class Report:
    verdict: str
    resolution: int
    windows: list = field(default_factory=list)  # (Box, nonempty, connected)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "resolution": self.resolution,
            "resolution_relative": True,
            "windows": [
                {**w.to_json(), "complement_nonempty": ne, "complement_connected": co}
                for w, ne, co in self.windows
            ],
        }


def classify(v: VoxelSet, windows: Sequence[Box], use_numba: bool | None = None) -> Report:
    if not v.compact:
        return Report(REFUSED, v.resolution)
    rows = []
    for w in windows:
        ne = complement_nonempty(v, w)
        co = ne and complement_connected(v, w, use_numba)
        rows.append((w, ne, co))
    if not all(ne for _, ne, _ in rows):
        verdict = FULL
    elif not all(co for _, _, co in rows):
        verdict = CODIM1
    else:
        verdict = CODIM2
    return Report(verdict, v.resolution, rows)


# --- fixtures -----------------------------------------------------------------


def slab(dim: int, resolution: int, axis: int = 0) -> VoxelSet:
    """The one-cell hyperplane slab at index r/2 on ``axis``."""
    mid = resolution // 2
    cells = [c for c in itertools.product(range(resolution), repeat=dim) if c[axis] == mid]
    return VoxelSet(dim, resolution, frozenset(cells))


def axis_line(dim: int, resolution: int, axis: int = 0) -> VoxelSet:
    """Voxelized axis-parallel line: every other coordinate fixed at r/2."""
    mid = resolution // 2
    cells = []
    for t in range(resolution):
        c = [mid] * dim
        c[axis] = t
        cells.append(tuple(c))
    return VoxelSet(dim, resolution, frozenset(cells))


# --- file format --------------------------------------------------------------


def write_voxels(v: VoxelSet, path) -> None:
    """JSON header line ``{dim, resolution}`` then one JSON array per occupied cell."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {"dim": v.dim, "resolution": v.resolution}
        if not v.compact:
            header["compact"] = False
        fh.write(json.dumps(header) + "\n")
        for cell in sorted(v.occupied):
            fh.write(json.dumps(list(cell)) + "\n")


def read_voxels(path) -> VoxelSet:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty voxel file")
    header = json.loads(lines[0])
    try:
        dim, res = int(header["dim"]), int(header["resolution"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: header needs 'dim' and 'resolution'") from exc
    cells = frozenset(tuple(json.loads(ln)) for ln in lines[1:])
    return VoxelSet(dim, res, cells, bool(header.get("compact", True)))
