"""Rearrangement inequalities on grids: norms, products, convolutions.

With equal cell measures every check here except the Riesz functional is an
exact finite rearrangement theorem, so the default tolerances only absorb
floating-point reordering noise.
"""

from __future__ import annotations

import math

import numpy as np

from .checks import CheckResult, make_result, rel_scale
from .grid import GridMismatchError, ScalarField, convolve
from .rearrange import rearrange_field

EXACT_TOL = 1e-12
CONVEX_TOL = 1e-10
RIESZ_TOL = 1e-10
SOBOLEV_TOL = 0.02

#: Convex functions J with J(0) = 0 admitted by check_nonexpansivity.
CONVEX_CATALOGUE = ("abs_p", "relu_sq", "smooth_hinge")


def _require_same_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise GridMismatchError("fields must share a grid")


def _require_nonnegative(*fields):
    for f in fields:
        if np.any(f.values < 0):
            raise ValueError("inputs must be non-negative")


def check_lp_preservation(f: ScalarField, p, seed=0) -> CheckResult:
    """||f||_p = ||f*||_p; exact because f* permutes the values of f."""
    _require_nonnegative(f)
    lhs = f.lp_norm(p)
    rhs = rearrange_field(f).lp_norm(p)
    scale = rel_scale(lhs, rhs)
    return make_result(
        "lp_preservation", lhs, rhs, -abs(lhs - rhs) / scale, EXACT_TOL, seed,
        p=str(p),
    )


def check_hardy_littlewood(f: ScalarField, g: ScalarField, seed=0) -> CheckResult:
    """int f g <= int f* g*."""
    _require_same_grid(f, g)
    _require_nonnegative(f, g)
    cv = f.grid.cell_volume
    lhs = float((f.values * g.values).sum()) * cv
    rhs = float((rearrange_field(f).values * rearrange_field(g).values).sum()) * cv
    scale = rel_scale(lhs, rhs)
    return make_result("hardy_littlewood", lhs, rhs, (rhs - lhs) / scale, EXACT_TOL, seed)


def check_complement_lemma(f: ScalarField, g: ScalarField, s, seed=0) -> CheckResult:
    """int f X_{g<=s} >= int f* X_{g*<=s}."""
    _require_same_grid(f, g)
    _require_nonnegative(f, g)
    cv = f.grid.cell_volume
    lhs = float(f.values[g.values <= s].sum()) * cv
    fs, gs = rearrange_field(f), rearrange_field(g)
    rhs = float(fs.values[gs.values <= s].sum()) * cv
    scale = rel_scale(lhs, rhs)
    return make_result(
        "complement_lemma", lhs, rhs, (lhs - rhs) / scale, EXACT_TOL, seed, s=float(s)
    )


def _lp_diff(a: np.ndarray, b: np.ndarray, p, cellvol) -> float:
    d = np.abs(a - b)
    if p == math.inf or p == "inf":
        return float(d.max()) if d.size else 0.0
    p = float(p)
    return float((d**p).sum() * cellvol) ** (1.0 / p)


def check_lp_contraction(f: ScalarField, g: ScalarField, p, seed=0) -> CheckResult:
    """||f - g||_p >= ||f* - g*||_p."""
    _require_same_grid(f, g)
    _require_nonnegative(f, g)
    cv = f.grid.cell_volume
    lhs = _lp_diff(f.values, g.values, p, cv)
    rhs = _lp_diff(rearrange_field(f).values, rearrange_field(g).values, p, cv)
    scale = rel_scale(lhs, rhs)
    return make_result(
        "lp_contraction", lhs, rhs, (lhs - rhs) / scale, EXACT_TOL, seed, p=str(p)
    )


def convex_function(kind: str, p: float = 2.0):
    """Member of the admitted convex catalogue, vectorized."""
    if kind == "abs_p":
        if p < 1:
            raise ValueError("abs_p requires p >= 1")
        return lambda x: np.abs(x) ** p
    if kind == "relu_sq":
        return lambda x: np.maximum(x, 0.0) ** 2
    if kind == "smooth_hinge":
        # 0 for x<=0, x^2/2 on (0,1), x-1/2 beyond: C^1, convex, J(0)=0
        def hinge(x):
            x = np.asarray(x, float)
            return np.where(x <= 0, 0.0, np.where(x < 1, 0.5 * x * x, x - 0.5))

        return hinge
    raise ValueError(f"J must be one of {CONVEX_CATALOGUE}, got {kind!r}")


def check_nonexpansivity(f: ScalarField, g: ScalarField, J="abs_p", p=2.0, seed=0) -> CheckResult:
    """int J(f - g) >= int J(f* - g*) for convex J with J(0) = 0."""
    _require_same_grid(f, g)
    _require_nonnegative(f, g)
    Jfun = convex_function(J, p)
    cv = f.grid.cell_volume
    lhs = float(Jfun(f.values - g.values).sum()) * cv
    rhs = float(Jfun(rearrange_field(f).values - rearrange_field(g).values).sum()) * cv
    scale = rel_scale(lhs, rhs)
    return make_result(
        "nonexpansivity", lhs, rhs, (lhs - rhs) / scale, CONVEX_TOL, seed, J=J, p=p
    )


def riesz_functional(f: ScalarField, g: ScalarField, h: ScalarField) -> float:
    """I(f, g, h) = int f (g * h), with * the direct grid convolution."""
    conv = convolve(g, h)
    return float((f.values * conv.values).sum()) * f.grid.cell_volume


def check_riesz(f: ScalarField, g: ScalarField, h: ScalarField, seed=0) -> CheckResult:
    """I(f, g, h) <= I(f*, g*, h*).

    Reliable when the rearrangement center coincides with a cell center
    (odd grids), where symmetric decreasing kernels are exact fixed points
    of the rearrangement; suites size their Riesz grids accordingly.
    """
    _require_same_grid(f, g, h)
    _require_nonnegative(f, g, h)
    lhs = riesz_functional(f, g, h)
    rhs = riesz_functional(rearrange_field(f), rearrange_field(g), rearrange_field(h))
    scale = rel_scale(lhs, rhs)
    return make_result("riesz", lhs, rhs, (rhs - lhs) / scale, RIESZ_TOL, seed)


def check_sobolev_quotient(f: ScalarField, p, seed=0) -> CheckResult:
    """The quotient ||grad f||_p / ||f||_{p*} does not increase under rearrangement.

    p* = np/(n-p) with 1 <= p < n; equivalent to the Sobolev inequality.
    """
    from .grid import gradient_magnitude

    n = f.grid.dim
    if not 1 <= p < n:
        raise ValueError(f"requires 1 <= p < dim; got p={p}, dim={n}")
    _require_nonnegative(f)
    pstar = n * p / (n - p)
    fs = rearrange_field(f)
    rhs = gradient_magnitude(f).lp_norm(p) / f.lp_norm(pstar)
    lhs = gradient_magnitude(fs).lp_norm(p) / fs.lp_norm(pstar)
    return make_result(
        "sobolev_quotient", lhs, rhs, (rhs - lhs) / rhs, SOBOLEV_TOL, seed, p=p, pstar=pstar
    )
