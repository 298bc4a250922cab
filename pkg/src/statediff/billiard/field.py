"""Immutable disc configurations with a uniform-grid spatial index."""

from __future__ import annotations

import math

import numpy as np

from ..errors import StateDiffError
from ._engine import worst_overlap
from ._geom import total_clipped_area

#: pairwise overlaps and line-margin violations are tolerated to this depth
GEOM_TOL = 1e-12


def _build_grid(cx, cy, rads, bx0, by0, bx1, by1, periodic):
    """Uniform grid; every disc registers in all cells its bbox overlaps.

    Cell sides stay at or above the largest disc diameter so one traversal
    step can never skip over a disc.
    """
    lx = bx1 - bx0
    ly = by1 - by0
    rmax = float(np.max(rads)) if rads.size else min(lx, ly) / 8.0
    dmin = 2.0 * rmax * 1.0000001
    ncx = max(1, min(int(lx / dmin), 512))
    ncy = max(1, min(int(ly / dmin), 512))
    cellx = lx / ncx
    celly = ly / ncy

    entries = []  # (cell_index, disc) pairs
    for i in range(cx.size):
        ix_lo = int(math.floor((cx[i] - rads[i] - bx0) / cellx))
        ix_hi = int(math.floor((cx[i] + rads[i] - bx0) / cellx))
        iy_lo = int(math.floor((cy[i] - rads[i] - by0) / celly))
        iy_hi = int(math.floor((cy[i] + rads[i] - by0) / celly))
        for ix in range(ix_lo, ix_hi + 1):
            jx = ix % ncx if periodic else ix
            if jx < 0 or jx >= ncx:
                continue
            for iy in range(iy_lo, iy_hi + 1):
                jy = iy % ncy if periodic else iy
                if jy < 0 or jy >= ncy:
                    continue
                entries.append((jx * ncy + jy, i))
    n_cells = ncx * ncy
    cell_start = np.zeros(n_cells + 1, dtype=np.int64)
    if entries:
        arr = np.array(entries, dtype=np.int64)
        order = np.lexsort((arr[:, 1], arr[:, 0]))
        arr = arr[order]
        cell_items = np.ascontiguousarray(arr[:, 1])
        counts = np.bincount(arr[:, 0], minlength=n_cells)
        cell_start[1:] = np.cumsum(counts)
    else:
        cell_items = np.zeros(0, dtype=np.int64)
    return cellx, celly, ncx, ncy, cell_start, cell_items


class DiscField:
    """A fixed set of non-overlapping discs in a box or a periodic cell.

    Immutable after construction and safe to share across workers.  ``side``
    is 0 for discs left of the dividing line, 1 right of it, and -1 when the
    field has no line.
    """

    def __init__(self, cx, cy, rads, box, periodic=False, x_mid=None, side=None):
        self.cx = np.ascontiguousarray(cx, dtype=float)
        self.cy = np.ascontiguousarray(cy, dtype=float)
        self.rads = np.ascontiguousarray(rads, dtype=float)
        if not (self.cx.size == self.cy.size == self.rads.size):
            raise ValueError("center/radius arrays must have equal length")
        self.bx0, self.by0, self.bx1, self.by1 = (float(v) for v in box)
        self.periodic = bool(periodic)
        self.x_mid = None if x_mid is None else float(x_mid)
        if side is None:
            if self.x_mid is None:
                side = np.full(self.cx.size, -1, dtype=np.int8)
            else:
                side = (self.cx > self.x_mid).astype(np.int8)
        self.side = np.ascontiguousarray(side, dtype=np.int8)
        (self.cellx, self.celly, self.ncx, self.ncy,
         self.cell_start, self.cell_items) = _build_grid(
            self.cx, self.cy, self.rads, self.bx0, self.by0, self.bx1, self.by1, self.periodic)
        self._validate()
        for a in (self.cx, self.cy, self.rads, self.side):
            a.setflags(write=False)

    # geometry kernels take the field as one flat tuple, in this order
    @property
    def kernel_args(self):
        return (self.cx, self.cy, self.rads, self.cell_start, self.cell_items,
                self.bx0, self.by0, self.bx1, self.by1,
                self.cellx, self.celly, self.ncx, self.ncy)

    @property
    def n(self):
        return self.cx.size

    @property
    def box(self):
        return (self.bx0, self.by0, self.bx1, self.by1)

    @property
    def area(self):
        return (self.bx1 - self.bx0) * (self.by1 - self.by0)

    def _validate(self):
        if self.n and np.any(self.rads <= 0):
            raise StateDiffError("disc radii must be positive")
        if self.n:
            gap = worst_overlap(self.cx, self.cy, self.rads, self.cell_start,
                                self.cell_items, self.bx0, self.by0,
                                self.bx1, self.by1, self.cellx, self.celly,
                                self.ncx, self.ncy, self.periodic)
            if gap < -GEOM_TOL:
                raise StateDiffError(f"disc overlap violation: worst gap {gap:.3e}")
        if self.x_mid is not None and self.n:
            margin = np.min(np.abs(self.cx - self.x_mid) - self.rads)
            if margin < -GEOM_TOL:
                raise StateDiffError(f"disc crosses the dividing line by {-margin:.3e}")

    def covered_area(self, region=None):
        """Exact disc area inside ``region`` (default: the whole box)."""
        if region is None:
            region = self.box if not self.periodic else None
        if self.periodic:
            return float(np.sum(math.pi * self.rads ** 2))
        x0, y0, x1, y1 = region
        return float(total_clipped_area(self.cx, self.cy, self.rads, x0, y0, x1, y1))

    def free_fraction(self, side=None):
        """Free area fraction of the box, or of one side of the line."""
        if self.periodic:
            return 1.0 - self.covered_area() / self.area
        if side is None:
            region = self.box
        elif side == 0:
            region = (self.bx0, self.by0, self.x_mid, self.by1)
        else:
            region = (self.x_mid, self.by0, self.bx1, self.by1)
        x0, y0, x1, y1 = region
        return 1.0 - self.covered_area(region) / ((x1 - x0) * (y1 - y0))

    # -- serialization -------------------------------------------------------

    def to_csv(self, path):
        """CSV with one disc per row plus '#' metadata for exact replay."""
        with open(path, "w", newline="\n") as f:
            f.write(f"# box = {self.bx0!r} {self.by0!r} {self.bx1!r} {self.by1!r}\n")
            f.write(f"# periodic = {int(self.periodic)}\n")
            f.write(f"# x_mid = {'nan' if self.x_mid is None else repr(self.x_mid)}\n")
            f.write("cx,cy,r,side\n")
            for i in range(self.n):
                f.write(f"{float(self.cx[i])!r},{float(self.cy[i])!r},"
                        f"{float(self.rads[i])!r},{int(self.side[i])}\n")

    @staticmethod
    def from_csv(path):
        meta = {}
        rows = []
        with open(path) as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, val = line[1:].partition("=")
                    meta[key.strip()] = val.strip()
                elif not line.startswith("cx"):
                    rows.append([float(v) for v in line.split(",")])
        box = tuple(float(v) for v in meta["box"].split())
        x_mid = float(meta["x_mid"])
        x_mid = None if math.isnan(x_mid) else x_mid
        arr = np.array(rows) if rows else np.zeros((0, 4))
        return DiscField(arr[:, 0], arr[:, 1], arr[:, 2],
                         (box[0], box[1], box[2], box[3]),
                         periodic=bool(int(meta["periodic"])), x_mid=x_mid,
                         side=arr[:, 3].astype(np.int8))

    def __repr__(self):
        mode = "periodic" if self.periodic else "box"
        return f"DiscField(n={self.n}, {mode}, box={self.box})"
