"""Rearrangement on the weighted product manifold (0, inf) x Sigma.

All the geometry the rearrangement constructions consume is folded into a
single positive radial weight phi(r) and cross-section measure data: the
cell measure is phi_i * dr_i * w_j.  The cross-section is represented by
measure only, never by its own geometry.

Cell measures are generally unequal here, so rearrangement cannot split a
cell: every equality statement carries a one-transitional-cell tolerance
(the measure of the largest radial shell).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .checks import CheckResult, make_result, rel_scale


@dataclass(frozen=True, eq=False)
class WeightedRadialGrid:
    """Radial cells with weight phi per cell and cross-section measure data.

    ``sigma_cells`` optionally splits the cross-section measure; it must sum
    to ``sigma_measure``.  Without it the cross-section is a single cell.
    """

    r_edges: np.ndarray
    phi: np.ndarray
    sigma_measure: float
    sigma_cells: np.ndarray | None = None

    def __post_init__(self):
        edges = np.asarray(self.r_edges, float).copy()
        phi = np.asarray(self.phi, float).copy()
        if edges.ndim != 1 or edges.size < 2:
            raise ValueError("need at least two radial edges")
        if edges[0] < 0 or not np.all(np.diff(edges) > 0):
            raise ValueError("r_edges must be non-negative and strictly increasing")
        if phi.shape != (edges.size - 1,):
            raise ValueError("phi must have one sample per radial cell")
        if np.any(phi <= 0):
            raise ValueError("phi must be positive everywhere")
        if self.sigma_measure <= 0:
            raise ValueError("sigma_measure must be positive")
        if self.sigma_cells is None:
            sig = np.array([float(self.sigma_measure)])
        else:
            sig = np.asarray(self.sigma_cells, float).copy()
            if np.any(sig <= 0):
                raise ValueError("sigma_cells must be positive")
            if not math.isclose(sig.sum(), self.sigma_measure, rel_tol=1e-9):
                raise ValueError("sigma_cells must sum to sigma_measure")
        for arr in (edges, phi, sig):
            arr.setflags(write=False)
        object.__setattr__(self, "r_edges", edges)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "sigma_cells", sig)
        object.__setattr__(self, "sigma_measure", float(self.sigma_measure))

    @property
    def n_radial(self) -> int:
        return self.r_edges.size - 1

    @property
    def n_cross(self) -> int:
        return self.sigma_cells.size

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_radial, self.n_cross)

    @property
    def dr(self) -> np.ndarray:
        return np.diff(self.r_edges)

    @property
    def r_centers(self) -> np.ndarray:
        return 0.5 * (self.r_edges[:-1] + self.r_edges[1:])

    def shell_measures(self) -> np.ndarray:
        """Measure of each full radial shell: phi_i dr_i |Sigma|."""
        return self.phi * self.dr * self.sigma_measure

    def cell_measures(self) -> np.ndarray:
        """(n_radial, n_cross) array of cell measures phi_i dr_i w_j."""
        return np.outer(self.phi * self.dr, self.sigma_cells)

    def total_volume(self) -> float:
        return float(self.shell_measures().sum())


@dataclass(frozen=True, eq=False)
class ManifoldField:
    """One value per (radial, cross-section) cell."""

    grid: WeightedRadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if v.shape == (self.grid.n_radial,) and self.grid.n_cross == 1:
            v = v.reshape(-1, 1)
        if v.shape != self.grid.shape:
            raise ValueError(f"values must have shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def integral(self) -> float:
        return float((self.values * self.grid.cell_measures()).sum())

    def lp_norm(self, p) -> float:
        if p == math.inf or p == "inf":
            return float(np.abs(self.values).max())
        p = float(p)
        return float((np.abs(self.values) ** p * self.grid.cell_measures()).sum()) ** (1 / p)


def cumulative_volume(g: WeightedRadialGrid, r: float) -> float:
    """F(r) = measure of (0, r) x Sigma, with the partial cell interpolated
    linearly.  Strictly increasing; F(0) = 0."""
    if r < 0:
        raise ValueError("r must be >= 0")
    edges = g.r_edges
    if r <= edges[0]:
        # below the first edge the grid carries no volume (edges[0] >= 0)
        return 0.0
    shells = g.shell_measures()
    cum = np.concatenate([[0.0], np.cumsum(shells)])
    if r >= edges[-1]:
        return float(cum[-1])
    i = int(np.searchsorted(edges, r, side="right")) - 1
    frac = (r - edges[i]) / (edges[i + 1] - edges[i])
    return float(cum[i] + shells[i] * frac)


def rearrange_set(g: WeightedRadialGrid, vol_target: float, tol: float = 1e-10) -> float:
    """Radius r* with F(r*) = vol_target, by bisection on the monotone F.

    Exact edge hits are snapped to the edge radius.  A target of zero maps
    to r* = 0; a target beyond the grid capacity is an explicit error (the
    continuum statement would need r* = infinity).
    """
    if vol_target < 0:
        raise ValueError("volume target must be >= 0")
    if vol_target == 0:
        return 0.0
    cap = g.total_volume()
    abs_tol = tol * max(vol_target, 1.0)
    if vol_target > cap + abs_tol:
        raise ValueError(
            f"target volume {vol_target} exceeds grid capacity {cap}"
        )
    # snap to a cumulative edge when the target matches one
    cum = np.concatenate([[0.0], np.cumsum(g.shell_measures())])
    hit = np.nonzero(np.abs(cum - vol_target) <= abs_tol)[0]
    if hit.size:
        return float(g.r_edges[hit[0]])
    lo, hi = float(g.r_edges[0]), float(g.r_edges[-1])
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = cumulative_volume(g, mid)
        if abs(fm - vol_target) <= abs_tol or hi - lo <= 1e-15 * max(1.0, hi):
            return mid
        if fm < vol_target:
            lo = mid
        else:
            hi = mid
    return mid


def _radial_cell_order(g: WeightedRadialGrid) -> np.ndarray:
    """Flat cell order: by radial coordinate, cross-section ties by index."""
    n = g.n_radial * g.n_cross
    return np.arange(n)  # row-major (radial major) is already that order


def rearrange_field(f: ManifoldField) -> ManifoldField:
    """Symmetric decreasing rearrangement by the discrete sup-form.

    At the k-th cell in radial order the value is the largest stored level t
    whose super-level measure (counted with >= t, i.e. the measure of
    {f > s} just below t) still exceeds the cumulative measure of the
    strictly earlier cells.  On equal cell measures this reduces to the
    exact descending-sort permutation.
    """
    g = f.grid
    vals = f.values.ravel()
    if np.any(vals < 0):
        raise ValueError("rearrangement requires a non-negative field")
    measures = g.cell_measures().ravel()
    levels = np.unique(vals)[::-1]  # descending
    # measure of {f >= level} for each level
    order_by_val = np.argsort(vals, kind="stable")[::-1]
    sorted_meas = measures[order_by_val]
    cum_by_val = np.cumsum(sorted_meas)
    sorted_vals = vals[order_by_val]
    # ge_measure[j] = measure{f >= levels[j]}
    idx = np.searchsorted(-sorted_vals, -levels, side="right") - 1
    ge_measure = cum_by_val[idx]
    cell_order = _radial_cell_order(g)
    before = np.concatenate([[0.0], np.cumsum(measures[cell_order])])[:-1]
    out = np.zeros_like(vals)
    # for each cell, the last level (largest) with ge_measure > before[k]
    # ge_measure is increasing along descending levels
    pos = np.searchsorted(ge_measure, before, side="right")
    valid = pos < levels.size
    out[cell_order[valid]] = levels[pos[valid]]
    out[cell_order[~valid]] = 0.0
    return ManifoldField(g, out.reshape(g.shape))


def distribution_function(f: ManifoldField, thresholds) -> np.ndarray:
    """mu_f(t) = measure{f > t} at each threshold."""
    t = np.asarray(thresholds, float)
    vals = f.values.ravel()
    meas = f.grid.cell_measures().ravel()
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    cum = np.concatenate([[0.0], np.cumsum(meas[order])])
    total = cum[-1]
    pos = np.searchsorted(sv, t, side="right")
    return total - cum[pos]


def max_shell_measure(g: WeightedRadialGrid) -> float:
    return float(g.shell_measures().max())


def check_level_sets(f: ManifoldField, t: float, seed=0) -> CheckResult:
    """Measure of the symmetric difference between {f* > t} and the slab
    (0, r*(mu_f(t))) x Sigma, within one transitional shell.

    The symmetric difference is evaluated exactly: each cell contributes
    |indicator - slab overlap fraction| times its measure.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    g = f.grid
    fs = rearrange_field(f)
    mu = float(distribution_function(f, [t])[0])
    r_star = rearrange_set(g, mu)
    lo, hi = g.r_edges[:-1], g.r_edges[1:]
    frac = np.clip((r_star - lo) / (hi - lo), 0.0, 1.0)  # slab share per shell
    ind = (fs.values > t).astype(float)
    symdiff = float(
        (np.abs(ind - frac[:, None]) * g.cell_measures()).sum()
    )
    star_measure = float(distribution_function(fs, [t])[0])
    slab_measure = cumulative_volume(g, r_star)
    tol = max_shell_measure(g) + 1e-9 * max(mu, 1.0)
    return make_result(
        "level_sets_m", star_measure, slab_measure, tol - symdiff, 0.0, seed, t=t
    )


def _one_cell_tol(f: ManifoldField, g: ManifoldField | None, p) -> float:
    """One transitional cell's contribution to an L^p-power comparison."""
    gr = f.grid
    vmax = float(np.abs(f.values).max())
    if g is not None:
        vmax = max(vmax, float(np.abs(g.values).max()))
    if p == math.inf or p == "inf":
        return 0.0
    return max_shell_measure(gr) * vmax ** float(p)


def check_lp_preservation(f: ManifoldField, p, seed=0) -> CheckResult:
    """|..f..|_p^p preserved within one transitional cell's contribution."""
    fs = rearrange_field(f)
    if p == math.inf or p == "inf":
        lhs, rhs = f.lp_norm(p), fs.lp_norm(p)
        scale = rel_scale(lhs, rhs)
        return make_result("lp_preservation_m", lhs, rhs, -abs(lhs - rhs) / scale, 1e-9, seed, p="inf")
    lhs = f.lp_norm(p) ** float(p)
    rhs = fs.lp_norm(p) ** float(p)
    tol = _one_cell_tol(f, None, p) + 1e-9 * rel_scale(lhs, rhs)
    return make_result("lp_preservation_m", lhs, rhs, -abs(lhs - rhs), tol, seed, p=str(p))


def check_hardy_littlewood(f: ManifoldField, g: ManifoldField, seed=0) -> CheckResult:
    """int f g dV <= int f* g* dV within the transitional-cell allowance."""
    if f.grid is not g.grid and f.grid != g.grid:
        raise ValueError("fields must share a grid")
    meas = f.grid.cell_measures()
    lhs = float((f.values * g.values * meas).sum())
    fs, gs = rearrange_field(f), rearrange_field(g)
    rhs = float((fs.values * gs.values * meas).sum())
    vmax = float(np.abs(f.values).max()) * float(np.abs(g.values).max())
    tol = max_shell_measure(f.grid) * vmax + 1e-9 * rel_scale(lhs, rhs)
    return make_result("hardy_littlewood_m", lhs, rhs, rhs - lhs, tol, seed)


def check_lp_contraction(f: ManifoldField, g: ManifoldField, p, seed=0) -> CheckResult:
    """||f - g||_p >= ||f* - g*||_p within the transitional-cell allowance."""
    meas = f.grid.cell_measures()
    p = float(p)
    lhs = float((np.abs(f.values - g.values) ** p * meas).sum())
    fs, gs = rearrange_field(f), rearrange_field(g)
    rhs = float((np.abs(fs.values - gs.values) ** p * meas).sum())
    tol = _one_cell_tol(f, g, p) + 1e-9 * rel_scale(lhs, rhs)
    return make_result("lp_contraction_m", lhs, rhs, lhs - rhs, tol, seed, p=str(p))


def gram_jacobian(T) -> float:
    """sqrt(det(T^T T)) for an m x n matrix (m >= n), 0 when rank < n.

    The product of singular values; computed by SVD rather than forming the
    Gram matrix, with an explicit rank cutoff so rank-deficient maps return
    exactly zero.
    """
    A = np.asarray(T, float)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    m, n = A.shape
    if m < n:
        raise ValueError(f"need rows >= cols, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("entries must be finite")
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0:
        return 1.0
    cutoff = max(m, n) * np.finfo(float).eps * float(s[0]) if s[0] > 0 else 0.0
    if float(s[-1]) <= cutoff:
        return 0.0
    return float(np.prod(s))


def coarea_check(f: ManifoldField, seed=0) -> CheckResult:
    """Radial co-area identity: sum f phi w dr grouped by shells equals the
    plain cell sum exactly (the discrete Fubini for omega = dr wedge alpha_r).

    Only the radial coordinate is admitted as the slicing map; its gradient
    has unit length under the product-metric convention.
    """
    g = f.grid
    lhs = float((f.values * g.cell_measures()).sum())
    per_shell = (f.values * g.sigma_cells[None, :]).sum(axis=1) * g.phi
    rhs = float((per_shell * g.dr).sum())
    scale = rel_scale(lhs, rhs)
    return make_result("coarea_m", lhs, rhs, -abs(lhs - rhs) / scale, 1e-12, seed)


def _phi_at_radius(g: WeightedRadialGrid, r: float) -> float:
    """phi interpolated at a radius from the per-cell samples (cell centers)."""
    return float(np.interp(r, g.r_centers, g.phi))


def shell_set_perimeter(g: WeightedRadialGrid, shells: np.ndarray) -> float:
    """Per(A) for A a union of full radial shells: sum over boundary radii of
    |Sigma| phi(r_edge).

    The r = 0 end of (0, inf) x Sigma is not a boundary component, so a
    member first shell contributes no inner face when the grid starts at 0.
    """
    shells = np.asarray(shells, bool)
    if shells.shape != (g.n_radial,):
        raise ValueError("need one flag per radial shell")
    ext = np.concatenate([[False], shells, [False]])
    per = 0.0
    for i in range(g.n_radial + 1):
        if ext[i] != ext[i + 1]:
            if i == 0 and g.r_edges[0] == 0.0:
                continue
            per += g.sigma_measure * _phi_at_radius(g, float(g.r_edges[i]))
    return per


def check_isoperimetric(g: WeightedRadialGrid, shells, seed=0) -> CheckResult:
    """Per(A) >= Per(A*) for shell-union sets.

    Judged only when phi is non-decreasing (the regime where the inequality
    is expected); otherwise the slack is reported unjudged (infinite tol).
    """
    shells = np.asarray(shells, bool)
    vol = float(g.shell_measures()[shells].sum())
    lhs = shell_set_perimeter(g, shells)
    r_star = rearrange_set(g, vol)
    rhs = g.sigma_measure * _phi_at_radius(g, r_star) if vol > 0 else 0.0
    judged = bool(np.all(np.diff(g.phi) >= 0))
    scale = rel_scale(lhs, rhs)
    tol = 1e-10 * scale if judged else math.inf
    return make_result(
        "isoperimetric_m", lhs, rhs, lhs - rhs, tol, seed, judged=judged
    )


def radial_gradient_norm(g: WeightedRadialGrid, profile: np.ndarray, p) -> float:
    """(sum |f'(r)|^p phi |Sigma| dr)^(1/p) for a radial profile."""
    prof = np.asarray(profile, float)
    df = np.gradient(prof, g.r_centers)
    p = float(p)
    return float((np.abs(df) ** p * g.phi * g.sigma_measure * g.dr).sum()) ** (1 / p)


def check_polya_szego(f: ManifoldField, p, seed=0) -> CheckResult:
    """1-D weighted gradient norm does not increase under rearrangement.

    Requires a radial field (constant across the cross-section); judged at
    2% when phi is non-decreasing, otherwise reported unjudged.
    """
    if f.grid.n_cross > 1 and np.any(np.ptp(f.values, axis=1) > 0):
        raise ValueError("requires a radial field")
    g = f.grid
    prof = f.values[:, 0]
    fs = rearrange_field(f)
    lhs = radial_gradient_norm(g, prof, p)
    rhs = radial_gradient_norm(g, fs.values[:, 0], p)
    judged = bool(np.all(np.diff(g.phi) >= 0))
    scale = rel_scale(lhs, rhs)
    tol = 0.02 * scale if judged else math.inf
    return make_result(
        "polya_szego_m", lhs, rhs, lhs - rhs, tol, seed, judged=judged, p=str(p)
    )


# --- JSON grid format: {"r_edges": [...], "phi": [...], "sigma_measure": s,
#     "sigma_cells": [...] (optional)} ---

def grid_to_dict(g: WeightedRadialGrid) -> dict:
    d = {
        "r_edges": g.r_edges.tolist(),
        "phi": g.phi.tolist(),
        "sigma_measure": g.sigma_measure,
    }
    if g.n_cross > 1:
        d["sigma_cells"] = g.sigma_cells.tolist()
    return d


def grid_from_dict(d: dict) -> WeightedRadialGrid:
    return WeightedRadialGrid(
        np.asarray(d["r_edges"], float),
        np.asarray(d["phi"], float),
        float(d["sigma_measure"]),
        np.asarray(d["sigma_cells"], float) if d.get("sigma_cells") else None,
    )
