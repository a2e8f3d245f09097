import math

import numpy as np
import pytest

from symmcal import Grid, RegionMask, ScalarField, random_smooth_field
from symmcal.inequalities import (
    check_complement_lemma,
    check_hardy_littlewood,
    check_lp_contraction,
    check_lp_preservation,
    check_nonexpansivity,
    check_riesz,
    check_sobolev_quotient,
    convex_function,
    riesz_functional,
)


def grid2(size=16, h=0.25):
    return Grid((size, size), (h, h))


def gaussian_kernel(g, sigma):
    mesh = g.meshgrid()
    r2 = sum(m * m for m in mesh)
    vals = np.where(r2 <= (4 * sigma) ** 2, np.exp(-r2 / (2 * sigma**2)), 0.0)
    return ScalarField(g, vals)


def delta_kernel(g):
    vals = np.zeros(g.shape)
    vals[g.center_cell_index()] = 1.0 / g.cell_volume
    return ScalarField(g, vals)


def test_lp_preservation_constant_exact():
    g = grid2(8)
    f = ScalarField(g, np.full(g.shape, 2.5))
    for p in (1, 2, 3, math.inf):
        res = check_lp_preservation(f, p)
        assert res.passed and res.lhs == res.rhs


def test_lp_preservation_random():
    g = grid2(32)
    f = random_smooth_field(g, seed=1)
    for p in (1, 2, 3, math.inf):
        res = check_lp_preservation(f, p)
        assert res.passed, (p, res.slack)


def test_lp_preservation_sup_exact():
    g = grid2(16)
    f = random_smooth_field(g, seed=4)
    res = check_lp_preservation(f, math.inf)
    assert res.lhs == res.rhs  # max of a permutation is exact


def test_hardy_littlewood_constant_equality():
    g = grid2(12)
    f = random_smooth_field(g, seed=2)
    c = ScalarField(g, np.full(g.shape, 3.0))
    res = check_hardy_littlewood(f, c)
    assert res.passed and abs(res.lhs - res.rhs) <= 1e-12 * max(res.lhs, 1)


def test_hardy_littlewood_self_equality():
    g = grid2(12)
    f = random_smooth_field(g, seed=3)
    res = check_hardy_littlewood(f, f)
    assert res.passed and abs(res.lhs - res.rhs) <= 1e-12 * max(res.lhs, 1)


def test_hardy_littlewood_indicators_min_volume():
    # for indicators the rearranged product integrates to
    # min(Vol A, Vol B) >= Vol(A intersect B)
    rng = np.random.default_rng(5)
    g = grid2(10, h=1.0)
    A = RegionMask(g, rng.random(g.shape) < 0.4)
    B = RegionMask(g, rng.random(g.shape) < 0.5)
    res = check_hardy_littlewood(A.indicator(), B.indicator())
    inter = float((A.members & B.members).sum()) * g.cell_volume
    from symmcal import volume

    assert res.lhs == pytest.approx(inter)
    assert res.rhs == pytest.approx(min(volume(A), volume(B)))
    assert res.passed


def test_hardy_littlewood_equality_for_monotone_function_of_f():
    g = grid2(16)
    f = random_smooth_field(g, seed=8)
    g2 = ScalarField(g, f.values**2)  # phi(f) with phi nondecreasing
    res = check_hardy_littlewood(f, g2)
    assert abs(res.slack) <= 1e-12


def test_complement_lemma_extremes():
    g = grid2(10)
    f = random_smooth_field(g, seed=6)
    gg = random_smooth_field(g, seed=7)
    hi = check_complement_lemma(f, gg, float(gg.values.max()) + 1)
    assert hi.lhs == pytest.approx(f.integral()) and hi.rhs == pytest.approx(f.integral())
    lo = check_complement_lemma(f, gg, float(gg.values.min()) - 1)
    assert lo.lhs == 0.0 and lo.rhs == 0.0


def test_complement_lemma_median():
    g = grid2(16)
    f = random_smooth_field(g, seed=8)
    gg = random_smooth_field(g, seed=9)
    res = check_complement_lemma(f, gg, float(np.median(gg.values)))
    assert res.passed


def test_lp_contraction_zero_g_reduces_to_preservation():
    g = grid2(12)
    f = random_smooth_field(g, seed=10)
    z = ScalarField(g, np.zeros(g.shape))
    for p in (1, 2):
        res = check_lp_contraction(f, z, p)
        assert res.passed and abs(res.lhs - res.rhs) <= 1e-12 * max(res.lhs, 1)


def test_lp_contraction_same_level_sets_equality():
    g = grid2(12)
    f = random_smooth_field(g, seed=11)
    res = check_lp_contraction(f, ScalarField(g, 2.0 * f.values), 2)
    assert abs(res.slack) <= 1e-12


def test_lp_contraction_random_p1():
    g = grid2(24)
    f = random_smooth_field(g, seed=12)
    gg = random_smooth_field(g, seed=13)
    assert check_lp_contraction(f, gg, 1).passed


def test_nonexpansivity_abs2_matches_contraction():
    g = grid2(16)
    f = random_smooth_field(g, seed=14)
    gg = random_smooth_field(g, seed=15)
    ne = check_nonexpansivity(f, gg, "abs_p", 2.0)
    c2 = check_lp_contraction(f, gg, 2)
    assert ne.passed
    # int |f-g|^2 equals the squared L2 distance
    assert ne.lhs == pytest.approx(c2.lhs**2, rel=1e-12)


def test_nonexpansivity_identical_fields():
    g = grid2(8)
    f = random_smooth_field(g, seed=16)
    res = check_nonexpansivity(f, f, "relu_sq")
    assert res.lhs == 0.0 and res.rhs == 0.0 and res.passed


def test_nonexpansivity_relu_and_hinge_random():
    g = grid2(20)
    f = random_smooth_field(g, seed=17)
    gg = random_smooth_field(g, seed=18)
    assert check_nonexpansivity(f, gg, "relu_sq").passed
    assert check_nonexpansivity(f, gg, "smooth_hinge").passed


def test_nonexpansivity_rejects_unknown_J():
    g = grid2(4)
    f = ScalarField(g, np.zeros(g.shape))
    with pytest.raises(ValueError):
        check_nonexpansivity(f, f, "cube")


def test_convex_catalogue_members():
    hinge = convex_function("smooth_hinge")
    assert hinge(0.0) == 0.0 and hinge(-3.0) == 0.0
    assert hinge(0.5) == pytest.approx(0.125)
    assert hinge(2.0) == pytest.approx(1.5)


def test_riesz_delta_kernel_reduces_to_hardy_littlewood():
    g = Grid((17, 17), (0.25, 0.25))
    f = random_smooth_field(g, seed=19)
    gg = random_smooth_field(g, seed=20)
    riesz = check_riesz(f, gg, delta_kernel(g))
    hl = check_hardy_littlewood(f, gg)
    assert riesz.lhs == pytest.approx(hl.lhs, rel=1e-12)
    assert riesz.rhs == pytest.approx(hl.rhs, rel=1e-12)
    assert riesz.passed


def test_riesz_all_radial_is_fixed_point():
    g = Grid((33, 33), (0.25, 0.25))
    f = gaussian_kernel(g, 0.7)
    gg = gaussian_kernel(g, 0.5)
    h = gaussian_kernel(g, 0.4)
    res = check_riesz(f, gg, h)
    assert res.slack == 0.0  # all three are exact fixed points of *


def test_riesz_random_triples():
    g = Grid((33, 33), (0.25, 0.25))
    ker = gaussian_kernel(g, 3 * 0.25)
    for seed in range(8):
        f = random_smooth_field(g, seed=100 + seed)
        gg = random_smooth_field(g, seed=200 + seed)
        res = check_riesz(f, gg, ker)
        assert res.passed, (seed, res.slack)


def test_riesz_functional_definition():
    g = Grid((9, 9), (1.0, 1.0))
    f = random_smooth_field(g, seed=1)
    assert riesz_functional(f, f, delta_kernel(g)) == pytest.approx(
        float((f.values**2).sum()) * g.cell_volume, rel=1e-12
    )


def test_sobolev_quotient_radial_near_zero_slack():
    g = Grid((65, 65), (0.125, 0.125))
    f = gaussian_kernel(g, 0.8)
    res = check_sobolev_quotient(f, 1)
    assert abs(res.slack) <= 1e-6  # f* = f exactly


def test_sobolev_quotient_random_and_scaling():
    g = Grid((33, 33), (0.25, 0.25))
    f = random_smooth_field(g, seed=31)
    res = check_sobolev_quotient(f, 1)
    assert res.passed
    doubled = check_sobolev_quotient(ScalarField(g, 2 * f.values), 1)
    assert doubled.lhs == pytest.approx(res.lhs, rel=1e-12)
    assert doubled.rhs == pytest.approx(res.rhs, rel=1e-12)


def test_sobolev_quotient_rejects_p_at_least_n():
    g = grid2(8)
    f = random_smooth_field(g, seed=1)
    with pytest.raises(ValueError):
        check_sobolev_quotient(f, 2)


def test_checks_record_seed_and_reproduce():
    g = grid2(16)
    f = random_smooth_field(g, seed=50)
    gg = random_smooth_field(g, seed=51)
    a = check_hardy_littlewood(f, gg, seed=50)
    b = check_hardy_littlewood(f, gg, seed=50)
    assert a == b
