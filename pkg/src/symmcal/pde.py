"""Dirichlet Poisson solves, heat-kernel smoothing and the comparison
theorems: Talenti domination, gradient-norm domination, electrostatic
potential domination and Faber-Krahn.

The Laplacian is the 5-point (2-D) / 7-point (3-D) stencil with homogeneous
Dirichlet data imposed by zeroing cells outside the domain mask.  A domain
mask of w x w member cells therefore represents a continuum square of side
(w+1)h, with the Dirichlet wall through the first ring of outside cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .checks import CheckResult, make_result, rel_scale
from .grid import Grid, RegionMask, ScalarField, gradient_magnitude
from .rearrange import radial_order, rearrange_field, rearrange_mask


class SolverError(RuntimeError):
    """Iteration failed to reach the requested residual."""


@dataclass(frozen=True)
class PoissonSolution:
    u: ScalarField
    residual_norm: float
    iterations: int


@dataclass(frozen=True)
class EigenResult:
    lambda1: float
    eigenfield: ScalarField
    residual: float

    def __post_init__(self):
        if self.lambda1 <= 0:
            raise ValueError("principal Dirichlet eigenvalue must be positive")


def _neg_laplacian(u: np.ndarray, member: np.ndarray, spacing) -> np.ndarray:
    """(-Delta_h u) with u = 0 outside the member set."""
    out = np.zeros_like(u)
    for a in range(u.ndim):
        h2 = spacing[a] * spacing[a]
        out += 2.0 * u / h2
        lo = [slice(None)] * u.ndim
        hi = [slice(None)] * u.ndim
        lo[a] = slice(None, -1)
        hi[a] = slice(1, None)
        out[tuple(lo)] -= u[tuple(hi)] / h2
        out[tuple(hi)] -= u[tuple(lo)] / h2
    out[~member] = 0.0
    return out


def _cg(b: np.ndarray, member: np.ndarray, spacing, tol: float, maxiter: int):
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float((r * r).sum())
    bnorm = math.sqrt(rs)
    if bnorm == 0.0:
        return x, 0, 0.0
    it = 0
    while math.sqrt(rs) > tol * bnorm:
        if it >= maxiter:
            raise SolverError(
                f"CG did not converge in {maxiter} iterations "
                f"(relative residual {math.sqrt(rs)/bnorm:.3e})"
            )
        Ap = _neg_laplacian(p, member, spacing)
        alpha = rs / float((p * Ap).sum())
        x += alpha * p
        r -= alpha * Ap
        rs_new = float((r * r).sum())
        p = r + (rs_new / rs) * p
        rs = rs_new
        it += 1
    return x, it, math.sqrt(rs) / bnorm


def solve_poisson(f: ScalarField, omega: RegionMask, tol: float = 1e-10) -> PoissonSolution:
    """Solve -Delta u = f with u = 0 outside omega, by conjugate gradients."""
    if f.grid != omega.grid:
        raise ValueError("f and omega must share a grid")
    if f.grid.dim not in (2, 3):
        raise ValueError("Poisson comparisons support dim 2 and 3 only")
    b = np.where(omega.members, f.values, 0.0)
    x, it, res = _cg(b, omega.members, f.grid.spacing, tol, maxiter=50 * f.grid.size)
    return PoissonSolution(ScalarField(f.grid, x), res, it)


def default_talenti_domain(grid: Grid) -> RegionMask:
    """Centered square domain sized so its equal-measure ball fits the grid."""
    mesh = grid.meshgrid()
    extent = min(grid.shape[a] * grid.spacing[a] for a in range(grid.dim)) / 2.0
    side = 1.25 * extent  # ball radius ~0.705*extent for 2-D, inside the grid
    members = np.ones(grid.shape, bool)
    for m in mesh:
        members &= np.abs(m) < side / 2.0
    return RegionMask(grid, members)


def check_talenti(f: ScalarField, omega: RegionMask | None = None, seed=0) -> CheckResult:
    """u* <= v + 0.02 max(v) cellwise, u = solve(f, omega), v = solve(f*, omega*).

    v lives on the rearranged domain omega* = rearrange_mask(omega), the
    pairing under which the comparison theorem is stated.
    """
    if omega is None:
        omega = default_talenti_domain(f.grid)
    if np.any(f.values < 0):
        raise ValueError("requires a non-negative source")
    fv = np.where(omega.members, f.values, 0.0)
    f_om = ScalarField(f.grid, fv)
    fs = rearrange_field(f_om)
    omega_star = rearrange_mask(omega)
    u = solve_poisson(f_om, omega).u
    v = solve_poisson(fs, omega_star).u
    us = rearrange_field(u)
    vmax = float(v.values.max())
    viol = float((us.values - v.values).max())
    band = 0.02 * vmax
    return make_result(
        "talenti", viol, band, (band - viol) / vmax if vmax else 0.0, 0.0, seed
    )


def check_gradient_domination(f: ScalarField, omega: RegionMask | None = None, seed=0):
    """||grad u||_2 <= ||grad v||_2, plus the energy identity ||grad u||_2^2 = int u f.

    Returns two results: the domination check and the integration-by-parts
    consistency check (1% band).
    """
    if omega is None:
        omega = default_talenti_domain(f.grid)
    fv = np.where(omega.members, f.values, 0.0)
    f_om = ScalarField(f.grid, fv)
    fs = rearrange_field(f_om)
    u = solve_poisson(f_om, omega).u
    v = solve_poisson(fs, rearrange_mask(omega)).u
    nu = gradient_magnitude(u).lp_norm(2)
    nv = gradient_magnitude(v).lp_norm(2)
    scale = rel_scale(nu, nv)
    dom = make_result("gradient_domination", nu, nv, (nv - nu) / scale, 0.01, seed)
    energy = nu * nu
    work = float((u.values * f_om.values).sum()) * f.grid.cell_volume
    esc = rel_scale(energy, work)
    ident = make_result(
        "dirichlet_energy_identity", energy, work, -abs(energy - work) / esc, 0.01, seed
    )
    return [dom, ident]


def heat_kernel(grid: Grid, t: float) -> ScalarField:
    """Truncated Gaussian exp(-|x|^2 / 4t), normalized to unit discrete mass.

    Sampled at offsets from the grid's center cell (the convolution anchor),
    truncated at radius 5 sqrt(2 t).
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    radius = 5.0 * math.sqrt(2.0 * t)
    center = grid.center_cell_index()
    for a in range(grid.dim):
        half = grid.shape[a] * grid.spacing[a] / 2.0
        if radius > half:
            raise ValueError(
                f"heat kernel radius {radius:.3g} exceeds grid half-extent {half:.3g}"
            )
    r2 = np.zeros(grid.shape)
    for a, ax in enumerate(np.meshgrid(*[np.arange(s) for s in grid.shape], indexing="ij")):
        r2 += ((ax - center[a]) * grid.spacing[a]) ** 2
    vals = np.where(r2 <= radius * radius, np.exp(-r2 / (4.0 * t)), 0.0)
    vals /= vals.sum() * grid.cell_volume
    return ScalarField(grid, vals)


def heat_smooth(f: ScalarField, t: float) -> ScalarField:
    """Convolution with the discretely normalized truncated heat kernel."""
    from .grid import convolve

    return convolve(f, heat_kernel(f.grid, t))


def check_heat_functional(f: ScalarField, t: float, seed=0) -> CheckResult:
    """int heat(f) f <= int heat(f*) f* (the Riesz step of the p=2 energy proof)."""
    if np.any(f.values < 0):
        raise ValueError("requires a non-negative field")
    cv = f.grid.cell_volume
    fs = rearrange_field(f)
    lhs = float((heat_smooth(f, t).values * f.values).sum()) * cv
    rhs = float((heat_smooth(fs, t).values * fs.values).sum()) * cv
    scale = rel_scale(lhs, rhs)
    return make_result("heat_functional", lhs, rhs, (rhs - lhs) / scale, 1e-10, seed, t=t)


def riesz_potential(f: ScalarField, chunk: int = 1024) -> ScalarField:
    """u(x) = sum_y f(y) / max(|x-y|, h/2) * cellvol by direct kernel summation.

    3-D only; the kernel constant is left at 1 (domination statements are
    homogeneous in it) and the self-interaction is capped at 2/h.
    """
    g = f.grid
    if g.dim != 3:
        raise ValueError("potential kernel |x|^(-1) requires dim = 3")
    from .grid import cell_centers

    pts = cell_centers(g)
    w = f.values.ravel() * g.cell_volume
    hmin = min(g.spacing)
    nrm = (pts * pts).sum(axis=1)
    out = np.empty(g.size)
    for i0 in range(0, g.size, chunk):
        P = pts[i0 : i0 + chunk]
        d2 = P @ pts.T
        d2 *= -2.0
        d2 += nrm[i0 : i0 + chunk, None]
        d2 += nrm[None, :]
        np.maximum(d2, 0.0, out=d2)
        np.sqrt(d2, out=d2)
        np.maximum(d2, 0.5 * hmin, out=d2)
        np.reciprocal(d2, out=d2)
        out[i0 : i0 + chunk] = d2 @ w
    return ScalarField(g, out.reshape(g.shape))


def check_potential_domination(f: ScalarField, n_radii: int = 10, seed=0) -> CheckResult:
    """int_B u* <= int_B v over centered balls of n_radii radial ranks.

    u is the potential of f, v the potential of f*; the ball integrals are
    cumulative sums along the radial order, checked at every probe radius.
    The tolerance is a quadrature band: the sup side of the comparison takes
    the k largest values of u unconstrained, which picks up O(h^2) kernel
    quadrature noise at desk-scale 3-D resolutions.
    """
    if f.grid.dim != 3:
        raise ValueError("potential domination is restricted to dim = 3")
    if np.any(f.values < 0):
        raise ValueError("requires a non-negative field")
    fs = rearrange_field(f)
    u = riesz_potential(f)
    v = riesz_potential(fs)
    order = radial_order(f.grid).order
    cv = f.grid.cell_volume
    us_sorted = np.sort(u.values.ravel())[::-1]  # int_{B_k} u* = sum of k largest u
    cum_us = np.cumsum(us_sorted) * cv
    cum_v = np.cumsum(v.values.ravel()[order]) * cv
    ks = np.linspace(1, f.grid.size, n_radii, dtype=int) - 1
    worst = float(np.min(cum_v[ks] - cum_us[ks]))
    scale = max(float(cum_v[-1]), 1.0)
    return make_result(
        "potential_domination", float(cum_us[ks[-1]]), float(cum_v[ks[-1]]),
        worst / scale, 1e-3, seed, n_radii=n_radii,
    )


def _connected(member: np.ndarray) -> bool:
    structure = ndimage.generate_binary_structure(member.ndim, 1)
    _, n = ndimage.label(member, structure=structure)
    return n == 1


def _bounding_slices(member: np.ndarray, margin: int = 1):
    idx = np.nonzero(member)
    return tuple(
        slice(max(int(i.min()) - margin, 0), min(int(i.max()) + margin + 1, member.shape[a]))
        for a, i in enumerate(idx)
    )


def smallest_dirichlet_eigenvalue(
    omega: RegionMask, tol: float = 1e-10, max_outer: int = 500
) -> EigenResult:
    """Principal Dirichlet eigenvalue by inverse power iteration with CG solves.

    Converged when the Rayleigh quotient moves by at most tol * lambda.
    """
    if not omega.members.any():
        raise ValueError("domain is empty")
    if not _connected(omega.members):
        raise ValueError("domain must be connected")
    # crop to the bounding box (plus one Dirichlet ring) for speed
    sl = _bounding_slices(omega.members)
    member = omega.members[sl]
    spacing = omega.grid.spacing
    v = member.astype(float)
    v /= math.sqrt(float((v * v).sum()))
    lam_old = math.inf
    lam = math.nan
    for _ in range(max_outer):
        w, _, _ = _cg(v, member, spacing, tol=1e-12, maxiter=50 * v.size)
        w /= math.sqrt(float((w * w).sum()))
        Aw = _neg_laplacian(w, member, spacing)
        lam = float((w * Aw).sum())
        v = w
        if abs(lam - lam_old) <= tol * abs(lam):
            break
        lam_old = lam
    else:
        raise SolverError(f"inverse iteration did not converge (lambda = {lam})")
    if float(v.sum()) < 0:
        v = -v
    if float(v.min()) < -1e-8 * float(v.max()):
        raise SolverError("principal eigenfield came out sign-indefinite")
    v = np.maximum(v, 0.0)
    # L2-normalize in the cell measure
    cv = omega.grid.cell_volume
    full = np.zeros(omega.grid.shape)
    full[sl] = v
    full /= math.sqrt(float((full * full).sum()) * cv)
    resid = _neg_laplacian(full, omega.members, spacing) - lam * full
    resid_norm = math.sqrt(float((resid * resid).sum()) * cv)
    return EigenResult(lam, ScalarField(omega.grid, full), resid_norm)


def check_faber_krahn(omega: RegionMask, seed=0) -> CheckResult:
    """lambda_1(omega) >= lambda_1(omega*) within 1% of lambda_1(omega*)."""
    lam = smallest_dirichlet_eigenvalue(omega).lambda1
    lam_star = smallest_dirichlet_eigenvalue(rearrange_mask(omega)).lambda1
    return make_result(
        "faber_krahn", lam, lam_star, (lam - lam_star) / lam_star, 0.01, seed
    )


def disk_eigenvalue_shooting(radius: float, n_steps: int = 4000, bracket=(1.0, 100.0)) -> float:
    """Radial-shooting oracle for the first Dirichlet eigenvalue of a disk.

    Integrates u'' + u'/r + lam u = 0 from u(0)=1, u'(0)=0 with RK4 and
    bisects lam on a sign change of u(radius).
    """

    def endpoint(lam: float) -> float:
        dr = radius / n_steps
        u, w, r = 1.0, 0.0, 0.0

        def deriv(r, u, w):
            if r == 0.0:
                return w, -lam * u / 2.0
            return w, -w / r - lam * u

        for _ in range(n_steps):
            k1u, k1w = deriv(r, u, w)
            k2u, k2w = deriv(r + dr / 2, u + dr / 2 * k1u, w + dr / 2 * k1w)
            k3u, k3w = deriv(r + dr / 2, u + dr / 2 * k2u, w + dr / 2 * k2w)
            k4u, k4w = deriv(r + dr, u + dr * k3u, w + dr * k3w)
            u += dr / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
            w += dr / 6 * (k1w + 2 * k2w + 2 * k3w + k4w)
            r += dr
        return u

    lo, hi = bracket
    flo = endpoint(lo)
    if flo <= 0:
        raise ValueError("bracket low end already past the first eigenvalue")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if flo * endpoint(mid) <= 0:
            hi = mid
        else:
            lo = mid
            flo = endpoint(lo)
    return 0.5 * (lo + hi)
