import json
import math

import numpy as np
import pytest

from levy_orthant.conditions import check_c1, check_conditions
from levy_orthant.model import ExpAlong, GaussianJump, JumpComponent, LevyModel, PointMasses, reserve_process
from levy_orthant.rates import second_rate

from .conftest import zoo


def test_bm_fixture_report(bm):
    rep = check_conditions(bm, [1.0, 1.0])
    assert rep.c1.verdict == "holds"
    assert rep.c2.verdict == "holds"
    assert rep.c3.overall == "holds"
    assert rep.r_g == pytest.approx(1.0, abs=1e-12)
    assert rep.d_of_g == pytest.approx(4.0, abs=1e-12)
    np.testing.assert_allclose(rep.normal, [2.0, 2.0], atol=1e-12)
    assert rep.mean_inner == pytest.approx(-4.0, abs=1e-12)
    assert rep.theorem_applies


def test_correlated_fixture_fails_vertex_check(corr):
    rep = check_conditions(corr, [1.0, 4.0])
    assert rep.c3.vertex_is_mpp == "violated"
    assert rep.c3.overall == "violated"
    assert "vertex" in rep.c3.reason
    # the reported scale and rate come from the face MPP: only the second coordinate binds
    assert rep.normal[0] == 0.0
    assert rep.d_of_g == pytest.approx(8.0, rel=1e-6)  # 1-D Brownian level 4, adjustment 2
    assert not rep.theorem_applies


def test_parallel_claims_violate_c1(cl2):
    rep = check_conditions(cl2, [1.0, 1.0])
    assert rep.c1.verdict == "violated"
    assert "span(c)" in rep.c1.reason
    # degenerate Hessian: C3 cannot be evaluated, reported rather than raised
    assert rep.c3.overall == "unknown"
    assert "DegenerateModel" in rep.c3.reason


def test_reserve_process_in_the_plane_is_always_degenerate():
    # X(1) = drift + C * c always lies on the affine line drift + span(c)
    m = reserve_process([1.0, 0.5], [1.0, 1.0], 1.0, 3.0)
    assert check_c1(m).verdict == "violated"


@pytest.mark.parametrize(
    "model, verdict",
    [
        (LevyModel([-1.0, -1.0], np.eye(2)), "holds"),
        (LevyModel([-1.0, -1.0], [[1.0, 0.0], [0.0, 0.0]]), "violated"),
        # Brownian in x, exponential jumps along y: absolutely continuous in the plane
        (LevyModel([-1.0, -1.0], [[1.0, 0.0], [0.0, 0.0]], JumpComponent(1.0, ExpAlong([0.0, 1.0], 2.0))), "holds"),
        (LevyModel([-1.0, -1.0], np.zeros((2, 2)), JumpComponent(1.0, GaussianJump([0.0, 0.0], np.eye(2)))), "holds"),
        # lattice-valued jumps spanning the plane: cannot be decided by the rules
        (LevyModel([-1.0, -1.0], np.zeros((2, 2)), JumpComponent(1.0, PointMasses([[1, 0], [0, 1]], [0.5, 0.5]))), "unknown"),
        (LevyModel([-1.0, -1.0], np.zeros((2, 2)), JumpComponent(1.0, PointMasses([[1, 1], [2, 2]], [0.5, 0.5]))), "violated"),
        (reserve_process([1.0], [1.0], 1.0, 2.0), "holds"),
    ],
)
def test_c1_rules(model, verdict):
    assert check_c1(model).verdict == verdict


def test_assume_c1_override(cl2):
    rep = check_conditions(cl2, [1.0, 1.0], assume_c1=True)
    assert rep.c1.verdict == "holds"
    assert "override" in rep.c1.reason


def test_c2_always_holds(any_model):
    assert check_conditions(any_model, np.ones(any_model.dim)).c2.verdict == "holds"


@pytest.mark.parametrize("name, g", [("bm", [1.0, 1.0]), ("bm_exp", [1.0, 1.5]), ("cl1", [1.0]), ("bm3", [1.0, 1.2, 0.8])])
def test_holding_report_invariants(name, g):
    m = zoo()[name]
    rep = check_conditions(m, g)
    assert rep.c3.overall == "holds"
    assert rep.d_of_g > 0 and rep.mean_inner < 0
    assert rep.d_of_g == pytest.approx(float(np.dot(g, rep.normal)), rel=1e-12)
    # D(G) = D(g) when the vertex is the MPP
    assert rep.d_of_g == pytest.approx(second_rate(m, g).d_value, rel=1e-9)
    for c in (0.5, 2.0, 7.0):
        rc = check_conditions(m, c * np.asarray(g))
        np.testing.assert_allclose(rc.normal, rep.normal, rtol=1e-8)
        assert rc.d_of_g == pytest.approx(c * rep.d_of_g, rel=1e-8)


def test_report_deterministic_and_json(bm):
    a = check_conditions(bm, [1.0, 2.0]).to_dict()
    b = check_conditions(bm, [1.0, 2.0]).to_dict()
    assert json.dumps(a) == json.dumps(b)
    assert set(a) == {"c1", "c2", "c3", "r_g", "d_of_g", "normal", "mean_inner"}
    assert set(a["c3"]) >= {
        "vertex_is_mpp",
        "rg_in_cramer_range",
        "normal_strictly_positive",
        "drift_inner_product_negative",
        "overall",
    }


def test_mean_on_the_ray_gives_zero_rate():
    # the mean sits on the ray through g, so the root is the trivial tilt
    m = LevyModel([1.0, 1.0], np.eye(2))
    rep = check_conditions(m, [1.0, 1.0])
    assert rep.c3.overall == "violated"
    assert rep.d_of_g == 0.0
    assert "mean" in rep.c3.reason
    assert not rep.theorem_applies


def test_zero_normal_component_is_flagged():
    # the second coordinate drifts upward: only the first constraint costs anything
    m = LevyModel([-1.0, 1.0], np.eye(2))
    rep = check_conditions(m, [1.0, 1.0])
    assert rep.d_of_g == pytest.approx(2.0, rel=1e-9)
    assert rep.c3.normal_strictly_positive != "holds"
    assert "zero" in rep.c3.reason
    assert not rep.theorem_applies


def test_driftless_model_reports_unknown():
    rep = check_conditions(LevyModel([0.0, 0.0], np.eye(2)), [1.0, 1.0])
    assert rep.c3.overall == "unknown"
    assert "NoRoot" in rep.c3.reason
    assert math.isnan(rep.r_g) and rep.to_dict()["r_g"] is None
