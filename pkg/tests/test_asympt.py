import math

import pytest

from levy_orthant.asympt import fit_a0, fit_exponent, predict
from levy_orthant.errors import ConditionError, FitError
from levy_orthant.sim import HitEstimate, SimConfig, simulate_hitting_is


def record(s, p, rel_se=0.01):
    return HitEstimate(
        s=s, method="importance", p_hat=p, std_err=rel_se * p, ci95=(p, p), n_paths=1, n_hits=1, delta=0.01,
        truncation_bias_flag=False,
    )


def synthetic(a0, d_of_g, dim, grid, rel_se=0.01):
    return [record(s, a0 * s ** (-(dim - 1) / 2) * math.exp(-s * d_of_g), rel_se) for s in grid]


def test_predict_bm(bm):
    e, poly, d = predict(bm, [1.0, 1.0], 2.0)
    assert e == pytest.approx(math.exp(-8.0), rel=1e-12)
    assert poly == pytest.approx(2 ** -0.5, rel=1e-15)
    assert d == pytest.approx(4.0, rel=1e-12)


def test_predict_one_dimension_has_no_polynomial_factor(cl1):
    e, poly, d = predict(cl1, [1.0], 3.0)
    assert poly == 1.0
    assert d == pytest.approx(1.0, rel=1e-10)
    assert e == pytest.approx(math.exp(-3.0), rel=1e-9)


def test_predict_refuses_without_c3(corr):
    with pytest.raises(ConditionError):
        predict(corr, [1.0, 4.0], 1.0)


def test_noiseless_records_recover_constant():
    fit = fit_a0(synthetic(0.7, 4.0, 2, [2.0, 4.0, 6.0]), 4.0, 2)
    assert fit.a0_hat == pytest.approx(0.7, rel=1e-10)
    assert fit.shape_slope == pytest.approx(0.0, abs=1e-10)
    lo, hi = fit.shape_slope_ci95
    assert lo < 0 < hi
    for _, ratio in fit.per_s_ratio:
        assert ratio == pytest.approx(0.7, rel=1e-10)


def test_wrong_polynomial_order_shows_in_slope():
    # records decaying like s^-1 instead of s^-1/2 bend the corrected log-curve
    recs = [record(s, 0.7 * s**-1 * math.exp(-4 * s), 1e-4) for s in (2.0, 4.0, 6.0)]
    fit = fit_a0(recs, 4.0, 2)
    assert fit.shape_slope_ci95[1] < 0


def test_zero_estimates_are_excluded(caplog):
    recs = synthetic(0.7, 4.0, 2, [1.0, 2.0, 3.0, 4.0]) + [record(5.0, 0.0)]
    fit = fit_a0(recs, 4.0, 2)
    assert len(fit.records) == 4
    assert "excluding record at s=5" in caplog.text


def test_too_few_usable_records():
    recs = synthetic(0.7, 4.0, 2, [1.0, 2.0]) + [record(3.0, 0.0)]
    with pytest.raises(FitError):
        fit_a0(recs, 4.0, 2)


def test_repeated_level_is_degenerate():
    with pytest.raises(FitError):
        fit_a0(synthetic(0.7, 4.0, 2, [2.0, 2.0, 2.0]), 4.0, 2)


def test_probability_scaling_scales_constant():
    base = synthetic(0.7, 4.0, 2, [1.0, 2.0, 3.0], rel_se=0.02)
    scaled = [record(r.s, 3.0 * r.p_hat, 0.02) for r in base]
    a, b = fit_a0(base, 4.0, 2), fit_a0(scaled, 4.0, 2)
    assert b.a0_hat == pytest.approx(3.0 * a.a0_hat, rel=1e-12)
    assert b.shape_slope == pytest.approx(a.shape_slope, abs=1e-12)


def test_exponent_fit_noiseless():
    fit = fit_exponent(synthetic(0.3, 2.5, 3, [1.0, 2.0, 5.0]), 3)
    assert fit.slope == pytest.approx(2.5, rel=1e-10)
    assert fit.intercept == pytest.approx(-math.log(0.3), rel=1e-10)


def test_fit_dict_keys():
    d = fit_a0(synthetic(0.7, 4.0, 2, [2.0, 4.0, 6.0]), 4.0, 2).to_dict()
    assert set(d) == {"a0_hat", "a0_ci95", "shape_slope", "shape_slope_ci95", "per_s_ratio"}


def _cl1_fit(delta, seed):
    from levy_orthant.model import reserve_process

    m = reserve_process([1.0], [1.0], 1.0, 2.0)
    recs = [simulate_hitting_is(m, [1.0], u, SimConfig(delta=delta, n_paths=40_000, master_seed=seed)) for u in (2.0, 5.0, 8.0)]
    return fit_a0(recs, 1.0, 1)


def test_cl1_constant_recovered():
    # exact ruin probability is 0.5 * exp(-u)
    fit = _cl1_fit(1.0, 0)
    lo, hi = fit.a0_ci95
    assert lo <= 0.5 <= hi
    assert fit.shape_slope_ci95[0] <= 0.0 <= fit.shape_slope_ci95[1]


def test_cl1_constant_stable_under_grid_refinement():
    a, b = _cl1_fit(1.0, 1), _cl1_fit(0.5, 2)
    se = lambda f: (math.log(f.a0_ci95[1]) - math.log(f.a0_ci95[0])) / (2 * 1.959963984540054)
    assert abs(math.log(a.a0_hat) - math.log(b.a0_hat)) <= 2 * math.hypot(se(a), se(b))
