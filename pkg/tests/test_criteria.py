# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from agents.criteria import (
    ClassifyParams,
    bound_verdict,
    chebyshev_lambda,
    classify,
    criterion_cone,
    criterion_fixed_plane,
    criterion_rotating,
    jones_integral_check,
    loglog_slope,
    modulus_criterion,
    query_indices,
    uniform_subset_member,
)
from agents.multiscale import ModulusSequence, PointProfile, ScaleGrid
from tools.constants import eps0
from tools.errors import InputError
from tools.file_util import dumps
from tools.geometry import LinearPlane

CORNER = 200


def _params(**kw):
    base = dict(alpha=1.0, grid=ScaleGrid(0.5, 0.5, 2), m_tail=3, stride=50, seed=0, threads=1)
    base.update(kw)
    return ClassifyParams.from_config(**base)


def test_fixed_plane_passes_on_tangent_line(circle_cloud, small_grid):
    x = circle_cloud.points[0]
    tangent = LinearPlane(np.array([[0.0], [1.0]]))
    v = criterion_fixed_plane(circle_cloud, x, tangent, small_grid, lam=4.0, alpha=1.0, m_tail=3, index=0)
    assert v.passed is True
    assert v.statistic == pytest.approx(0.0)
    assert v.threshold == pytest.approx(eps0(1))


def test_fixed_plane_fails_with_wrong_plane(circle_cloud, small_grid):
    x = circle_cloud.points[0]
    normal = LinearPlane(np.array([[1.0], [0.0]]))
    v = criterion_fixed_plane(circle_cloud, x, normal, small_grid, lam=4.0, alpha=1.0, m_tail=3, index=0)
    assert v.passed is False


def test_rotating_cylinder_passes_on_circle(circle_cloud, small_grid):
    v = criterion_rotating(circle_cloud, circle_cloud.points[0], small_grid, 4.0, 1.0, 3, index=0)
    assert v.passed is True
    assert v.details["theta_lower"] > 0


def test_rotating_cylinder_fails_at_corner(corner_cloud, small_grid):
    v = criterion_rotating(corner_cloud, corner_cloud.points[CORNER], small_grid, 1.0, 1.0, 3, index=CORNER)
    assert v.passed is False
    assert v.statistic > v.threshold


def test_cone_criterion(segment_cloud, small_grid):
    x = segment_cloud.points[CORNER]
    good = criterion_cone(segment_cloud, x, LinearPlane.coordinate(2, 1), small_grid, 1.0, 3, index=CORNER)
    bad = criterion_cone(segment_cloud, x, LinearPlane(np.array([[0.0], [1.0]])), small_grid, 1.0, 3, index=CORNER)
    assert good.passed is True
    assert bad.passed is False


def test_no_valid_scale_is_indeterminate(segment_cloud):
    fine = ScaleGrid(0.001, 0.5, 2)
    v = criterion_fixed_plane(segment_cloud, segment_cloud.points[CORNER], LinearPlane.coordinate(2, 1), fine, 4.0, 1.0, 3)
    assert v.passed is None


def test_modulus_criterion_reports_tail_sums(circle_cloud, small_grid):
    mod = ModulusSequence((1.0, 0.5, 0.25))
    v = modulus_criterion(circle_cloud, circle_cloud.points[0], small_grid, mod, 3, index=0)
    assert v.details["omegas"] == pytest.approx([1.75, 0.75, 0.25])
    assert v.passed is True


def test_modulus_criterion_needs_enough_terms(circle_cloud, small_grid):
    with pytest.raises(InputError):
        modulus_criterion(circle_cloud, circle_cloud.points[0], small_grid, ModulusSequence((1.0, 0.5)), 3)


def test_loglog_slope():
    radii = 0.5 ** np.arange(5)
    assert loglog_slope(2.0 * radii ** 1.5, radii) == pytest.approx(1.5)
    assert loglog_slope(np.array([0.0, 0.0, 1.0, np.nan, 0.0]), radii) is None


def test_bound_verdict_accepts_power_law_above_alpha():
    radii = 0.5 ** np.arange(8)
    v = bound_verdict("beta_bound_pinf", 0.3 * radii ** 0.5, radii, 0.45)
    assert v.passed is True
    assert v.statistic < 1.0
    assert v.threshold == pytest.approx(2.0)
    assert v.details["slope"] == pytest.approx(0.5)


def test_bound_verdict_rejects_growth_below_alpha():
    radii = 0.5 ** np.arange(8)
    v = bound_verdict("beta_bound_pinf", radii ** 0.25, radii, 1.0)
    assert v.passed is False
    assert v.statistic == pytest.approx(4.0 ** 0.75)
    assert v.details["fine_max"] == pytest.approx(radii[-1] ** -0.75)


def test_bound_verdict_ignores_invalid_scales():
    radii = 0.5 ** np.arange(6)
    betas = radii ** 0.5
    betas[-1] = np.nan
    v = bound_verdict("beta_bound_p2", betas, radii, 0.5)
    assert v.passed is True
    assert v.scales == [0, 1, 2, 3, 4]


def test_bound_verdict_edge_cases():
    radii = 0.5 ** np.arange(5)
    assert bound_verdict("b", np.zeros(5), radii, 1.0).details["at_floor"] is True
    only_fine = np.array([np.nan, np.nan, np.nan, 0.1, 0.1])
    assert bound_verdict("b", only_fine, radii, 1.0).passed is None
    coarse_flat = np.array([0.0, 0.0, 0.0, 0.0, 0.1])
    v = bound_verdict("b", coarse_flat, radii, 1.0)
    assert v.passed is False
    assert math.isinf(v.statistic)


def _flat_profile(parab_excess):
    radii = np.array([0.5, 0.25])
    nan = np.full(2, np.nan)
    return PointProfile(
        x=np.zeros(2), radii=radii, valid=np.ones(2, dtype=bool), planes=[None, None], betas={},
        cyl_excess=nan, parab_excess=np.asarray(parab_excess, dtype=float), thetas=nan,
        densities=np.ones(2), masses=radii.copy(),
    )


def test_uniform_subset_needs_excess_strictly_below_eps():
    assert uniform_subset_member(_flat_profile([0.05, 0.0]), 1, 0.5, 2.0, 0.1) is True
    assert uniform_subset_member(_flat_profile([0.1, 0.0]), 1, 0.5, 2.0, 0.1) is False
    assert uniform_subset_member(_flat_profile([0.0, 0.0]), 1, 1.5, 2.0, 0.1) is False


def test_chebyshev_lambda():
    assert chebyshev_lambda(0.3, math.inf, 1, 1.0) == pytest.approx(0.3)
    target = 0.5 * eps0(1)
    assert chebyshev_lambda(0.3, 2.0, 1, 1.0) == pytest.approx(0.3 * target ** -0.5)
    assert math.isinf(chebyshev_lambda(0.3, 2.0, 1, 0.0))


def test_jones_integral_check_bounds(circle_cloud):
    res = jones_integral_check(circle_cloud, circle_cloud.points[0], ScaleGrid(0.5, 0.5, 2), refine=4)
    assert res.ok
    assert res.lower <= res.averaged_sum <= res.upper * (1.0 + 0.05)


def test_params_validation():
    with pytest.raises(InputError):
        _params(alpha=1.5).validate()
    with pytest.raises(InputError):
        _params(delta=10.0, M=1.0).validate()
    with pytest.raises(InputError):
        _params(p_list=(0.5,)).validate()


def test_params_from_config_ignores_none():
    p = ClassifyParams.from_config(alpha=None, lam=2.0)
    assert p.alpha == 0.5
    assert p.lam == 2.0


def test_query_indices():
    class _Stub:
        def __len__(self):
            return 25

    assert query_indices(_Stub(), 10).tolist() == [0, 10, 20]


def test_classify_circle_passes_main_criteria(circle_cloud):
    report = classify(circle_cloud, _params())
    assert len(report.points) == 8
    for name in ("fixed_paraboloid", "rotating_cylinder", "approximate_cone"):
        assert report.pass_fraction(name) == pytest.approx(1.0)
    assert not report.all_indeterminate
    agg = report.aggregate
    assert agg["queries"] == 8
    assert agg["uniform_subset"]["count"] == 8
    assert agg["stabilization_certified"] == 8


def test_classify_corner_fails_rotating_cylinder(corner_cloud):
    report = classify(corner_cloud, _params(lam=1.0), queries=np.array([CORNER]))
    verdicts = report.points[0].verdicts
    assert verdicts["rotating_cylinder"].passed is False
    assert verdicts["fixed_paraboloid"].passed is False


def test_classify_is_independent_of_thread_count(circle_cloud):
    a = dumps(classify(circle_cloud, _params(threads=1)).to_dict())
    b = dumps(classify(circle_cloud, _params(threads=4)).to_dict())
    assert a == b


def test_classify_all_indeterminate_when_scales_too_fine(circle_cloud):
    report = classify(circle_cloud, _params(grid=ScaleGrid(0.01, 0.5, 2)))
    assert report.all_indeterminate


def test_classify_keeps_profiles_on_request(circle_cloud):
    report = classify(circle_cloud, _params(keep_profiles=True, stride=200))
    d = report.to_dict()
    assert "profile" in d["per_point"][0]
    assert set(d["per_point"][0]["profile"]["betas"]) == {"2.0", "inf"}


def test_classify_modulus_verdict(circle_cloud):
    mod = ModulusSequence((1.0, 0.5, 0.25))
    report = classify(circle_cloud, _params(modulus=mod, stride=200))
    assert "modulus" in report.points[0].verdicts
