"""Uniform rectangular grids, sampled fields, cell masks and basic operators.

Everything downstream (rearrangement, perimeter estimation, PDE comparison)
consumes these types.  Grids are cell-centered: a grid with ``shape[d]``
cells of width ``spacing[d]`` along axis ``d`` has cell centers at
``(i - (shape[d]-1)/2) * spacing[d] - origin[d]`` so the rearrangement
center (coordinate 0) sits at the domain center by default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal


class GridMismatchError(ValueError):
    """Two fields/masks that must share a grid do not."""


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid in 1, 2 or 3 dimensions.

    ``origin`` is the coordinate of the rearrangement center relative to
    the domain center; (0, ..., 0) keeps the center at the domain center.
    """

    shape: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...] = ()

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        spacing = tuple(float(s) for s in self.spacing)
        origin = tuple(float(o) for o in self.origin) if self.origin else (0.0,) * len(shape)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)
        if not 1 <= len(shape) <= 3:
            raise ValueError(f"dim must be 1, 2 or 3, got {len(shape)}")
        if len(spacing) != len(shape) or len(origin) != len(shape):
            raise ValueError("shape, spacing and origin must have equal length")
        if any(s < 1 for s in shape):
            raise ValueError("all shape entries must be >= 1")
        if any(h <= 0 for h in spacing):
            raise ValueError("all spacings must be > 0")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_centers(self, axis: int) -> np.ndarray:
        """Center coordinates along one axis, relative to the rearrangement center."""
        n = self.shape[axis]
        return (np.arange(n) - (n - 1) / 2.0) * self.spacing[axis] - self.origin[axis]

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*(self.axis_centers(a) for a in range(self.dim)), indexing="ij")

    def center_cell_index(self) -> tuple[int, ...]:
        """Index of the cell whose center is nearest the rearrangement center."""
        idx = []
        for a in range(self.dim):
            i = int(round((self.shape[a] - 1) / 2.0 + self.origin[a] / self.spacing[a]))
            idx.append(min(max(i, 0), self.shape[a] - 1))
        return tuple(idx)


def cell_centers(grid: Grid) -> np.ndarray:
    """All cell-center coordinates, row-major, as an (n_cells, dim) array."""
    mesh = grid.meshgrid()
    return np.column_stack([m.ravel() for m in mesh])


def _as_grid_array(grid, values, dtype):
    arr = np.asarray(values, dtype=dtype)
    if arr.size != grid.size:
        raise ValueError(f"got {arr.size} values for a grid of {grid.size} cells")
    arr = arr.reshape(grid.shape).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values sampled at cell centers; stored shaped, serialized row-major."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = _as_grid_array(self.grid, self.values, float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", arr)

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values)

    def is_compact(self) -> bool:
        """True when the boundary ring of cells is exactly zero."""
        v = self.values
        for a in range(self.grid.dim):
            if self.grid.shape[a] < 2:
                continue
            if np.any(np.take(v, 0, axis=a)) or np.any(np.take(v, -1, axis=a)):
                return False
        return True

    def integral(self) -> float:
        return float(self.values.sum()) * self.grid.cell_volume

    def lp_norm(self, p) -> float:
        v = np.abs(self.values)
        if p == math.inf or p == "inf":
            return float(v.max()) if v.size else 0.0
        p = float(p)
        return float((v**p).sum() * self.grid.cell_volume) ** (1.0 / p)


@dataclass(frozen=True, eq=False)
class RegionMask:
    """Boolean cell membership; represents a finite-volume set."""

    grid: Grid
    members: np.ndarray

    def __post_init__(self):
        arr = _as_grid_array(self.grid, self.members, bool)
        object.__setattr__(self, "members", arr)

    @property
    def count(self) -> int:
        return int(self.members.sum())

    def indicator(self) -> ScalarField:
        return ScalarField(self.grid, self.members.astype(float))


@dataclass(frozen=True, eq=False)
class DistributionTable:
    """Sorted thresholds t with the super-level measures mu(t) = Vol({f > t})."""

    thresholds: np.ndarray
    measures: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.thresholds, float).copy()
        m = np.asarray(self.measures, float).copy()
        if t.ndim != 1 or t.shape != m.shape:
            raise ValueError("thresholds and measures must be 1-D of equal length")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("thresholds must be strictly increasing")
        if np.any(m < 0) or (m.size > 1 and np.any(np.diff(m) > 0)):
            raise ValueError("measures must be non-negative and non-increasing")
        t.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "measures", m)


def volume(mask: RegionMask) -> float:
    """Member count times the cell volume."""
    return mask.count * mask.grid.cell_volume


def unit_ball_volume(n: int) -> float:
    """Lebesgue measure of the unit ball, pi^(n/2) / Gamma(n/2 + 1)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def gradient_magnitude(f: ScalarField) -> ScalarField:
    """Euclidean norm of the central-difference gradient (one-sided at edges).

    Axes of extent 1 contribute zero derivative.
    """
    g = f.grid
    total = np.zeros(g.shape)
    for a in range(g.dim):
        if g.shape[a] < 2:
            continue
        d = np.gradient(f.values, g.spacing[a], axis=a)
        total += d * d
    return ScalarField(g, np.sqrt(total))


def convolve(f: ScalarField, g: ScalarField) -> ScalarField:
    """Direct discrete convolution scaled by cell volume, zero padded.

    The kernel ``g`` is anchored at its origin cell (``shape//2`` per axis),
    so a discrete delta there acts as the identity.  Compactly supported
    kernels are cropped to a window centered on the anchor before the direct
    convolution; zero padding makes this exact.
    """
    if f.grid != g.grid:
        raise GridMismatchError("convolve requires fields on the same grid")
    kernel, anchors = _crop_kernel(g.values, [s // 2 for s in g.grid.shape])
    full = signal.convolve(f.values, kernel, mode="full", method="direct")
    sl = tuple(slice(a, a + s) for a, s in zip(anchors, f.grid.shape))
    return ScalarField(f.grid, full[sl] * f.grid.cell_volume)


def _crop_kernel(values: np.ndarray, anchor):
    """Shrink a kernel array to an anchor-centered window covering its support."""
    nz = np.nonzero(values)
    if len(nz[0]) == 0:
        sl = tuple(slice(a, a + 1) for a in anchor)
        return values[sl], [0] * values.ndim
    slices = []
    anchors = []
    for a in range(values.ndim):
        lo, hi = int(nz[a].min()), int(nz[a].max())
        w = max(anchor[a] - lo, hi - anchor[a])
        if anchor[a] - w < 0 or anchor[a] + w >= values.shape[a]:
            # support is not centered inside the array; keep the full axis
            slices.append(slice(None))
            anchors.append(anchor[a])
        else:
            slices.append(slice(anchor[a] - w, anchor[a] + w + 1))
            anchors.append(w)
    return values[tuple(slices)], anchors


def random_smooth_field(grid: Grid, seed: int, k: int = 3) -> ScalarField:
    """Sum of k positive Gaussian bumps, deterministic in the seed.

    Bump centers stay in the central half of the domain and widths are at
    least four cells, so the tails are negligible at the edge; the boundary
    ring is then zeroed exactly to make the support compact.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    mesh = grid.meshgrid()
    vals = np.zeros(grid.shape)
    for _ in range(k):
        r2 = np.zeros(grid.shape)
        for a in range(grid.dim):
            half = grid.shape[a] * grid.spacing[a] / 2.0
            c = rng.uniform(-0.5 * half, 0.5 * half)
            width = rng.uniform(4 * grid.spacing[a], max(half / 6.0, 4.5 * grid.spacing[a]))
            r2 = r2 + ((mesh[a] - c) / width) ** 2
        vals += rng.uniform(0.25, 1.0) * np.exp(-0.5 * r2)
    vals = _zero_boundary_ring(vals)
    return ScalarField(grid, vals)


def _zero_boundary_ring(vals: np.ndarray) -> np.ndarray:
    out = vals.copy()
    for a in range(out.ndim):
        if out.shape[a] < 2:
            continue
        sl = [slice(None)] * out.ndim
        sl[a] = 0
        out[tuple(sl)] = 0.0
        sl[a] = -1
        out[tuple(sl)] = 0.0
    return out


# ---------------------------------------------------------------------------
# JSON file format:
#   field: {"dim": n, "shape": [...], "spacing": [...], "origin": [...],
#           "values": [row-major numbers]}
#   mask:  same with "members": [0/1]
# ---------------------------------------------------------------------------

def _grid_to_dict(grid: Grid) -> dict:
    return {
        "dim": grid.dim,
        "shape": list(grid.shape),
        "spacing": list(grid.spacing),
        "origin": list(grid.origin),
    }


def _grid_from_dict(d: dict) -> Grid:
    grid = Grid(tuple(d["shape"]), tuple(d["spacing"]), tuple(d.get("origin") or ()))
    if "dim" in d and int(d["dim"]) != grid.dim:
        raise ValueError(f"dim {d['dim']} inconsistent with shape of length {grid.dim}")
    return grid


def field_to_dict(f: ScalarField) -> dict:
    d = _grid_to_dict(f.grid)
    d["values"] = f.values.ravel().tolist()
    return d


def field_from_dict(d: dict) -> ScalarField:
    return ScalarField(_grid_from_dict(d), np.asarray(d["values"], float))


def mask_to_dict(m: RegionMask) -> dict:
    d = _grid_to_dict(m.grid)
    d["members"] = m.members.ravel().astype(int).tolist()
    return d


def mask_from_dict(d: dict) -> RegionMask:
    return RegionMask(_grid_from_dict(d), np.asarray(d["members"]) != 0)


def save_field(f: ScalarField, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(field_to_dict(f), fh)


def load_field(path) -> ScalarField:
    with open(path, encoding="utf-8") as fh:
        return field_from_dict(json.load(fh))


def save_mask(m: RegionMask, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mask_to_dict(m), fh)


def load_mask(path) -> RegionMask:
    with open(path, encoding="utf-8") as fh:
        return mask_from_dict(json.load(fh))
