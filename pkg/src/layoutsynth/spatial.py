"""Uniform-grid spatial hash for broad-phase pair generation.

Rebuilt from scratch every solver iteration; queries never miss a truly
overlapping pair (cells cover each circle's full extent) and always
return candidates in a deterministic order.
"""

from __future__ import annotations

import math
from collections import defaultdict


class SpatialHash:
    """Maps integer grid cells to the particles whose bounding circles
    overlap them."""

    def __init__(self, cell_size: float):
        if not cell_size > 0.0:
            raise ValueError("cell size must be positive")
        self.cell_size = cell_size
        self.cells: dict[tuple[int, int], list[int]] = defaultdict(list)

    def _cell_range(self, x: float, y: float, r: float):
        inv = 1.0 / self.cell_size
        x0 = math.floor((x - r) * inv)
        x1 = math.floor((x + r) * inv)
        y0 = math.floor((y - r) * inv)
        y1 = math.floor((y + r) * inv)
        return x0, x1, y0, y1

    def insert(self, index: int, x: float, y: float, r: float) -> None:
        x0, x1, y0, y1 = self._cell_range(x, y, r)
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                self.cells[(cx, cy)].append(index)

    def query(self, x: float, y: float, r: float) -> list[int]:
        """Indices of all particles whose circles might reach (x, y, r);
        a superset of the true neighbors, deduplicated, ascending."""
        x0, x1, y0, y1 = self._cell_range(x, y, r)
        seen: set[int] = set()
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                bucket = self.cells.get((cx, cy))
                if bucket:
                    seen.update(bucket)
        return sorted(seen)

    def candidate_pairs(self) -> list[tuple[int, int]]:
        return candidate_pairs(self)


class NaiveIndex:
    """All-pairs stand-in for the spatial hash, for benchmarking the
    broad phase against the O(n^2) baseline."""

    def __init__(self, indices):
        self.indices = sorted(indices)

    def query(self, x: float, y: float, r: float) -> list[int]:
        return self.indices

    def candidate_pairs(self) -> list[tuple[int, int]]:
        idx = self.indices
        return [(idx[a], idx[b]) for a in range(len(idx)) for b in range(a + 1, len(idx))]


def rebuild(px, py, radii, indices=None, cell_size=None) -> SpatialHash:
    """Fresh index over the given particles.

    Each particle covers every cell its circle's bounding box overlaps,
    so two circles whose boxes intersect always share a cell regardless
    of the cell size; the default size of twice the largest radius keeps
    buckets small.
    """
    if indices is None:
        indices = range(len(px))
    indices = list(indices)
    if cell_size is None:
        cell_size = 2.0 * max((radii[i] for i in indices), default=1.0)
    grid = SpatialHash(max(cell_size, 1e-6))
    for i in indices:
        grid.insert(i, px[i], py[i], radii[i])
    return grid


def candidate_pairs(grid: SpatialHash) -> list[tuple[int, int]]:
    """All same-cell index pairs (i < j), deduplicated, sorted."""
    pairs: set[tuple[int, int]] = set()
    for bucket in grid.cells.values():
        n = len(bucket)
        if n < 2:
            continue
        for a in range(n):
            ia = bucket[a]
            for b in range(a + 1, n):
                ib = bucket[b]
                if ia < ib:
                    pairs.add((ia, ib))
                elif ib < ia:
                    pairs.add((ib, ia))
    return sorted(pairs)


def overlapping_pairs(index, px, py, radii) -> list[tuple[int, int]]:
    """Candidate pairs narrowed to actual bounding-circle overlaps."""
    out = []
    for i, j in index.candidate_pairs():
        dx = px[i] - px[j]
        dy = py[i] - py[j]
        rsum = radii[i] + radii[j]
        if dx * dx + dy * dy < rsum * rsum:
            out.append((i, j))
    return out
