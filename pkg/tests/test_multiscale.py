# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from agents.multiscale import (
    ModulusSequence,
    PointProfile,
    ScaleGrid,
    holder_fit,
    point_profile,
    sample_slab,
    stabilize_planes,
)
from tools.cloud import WeightedCloud
from tools.errors import InputError, NonSummableError
from tools.geometry import AffinePlane, LinearPlane


def test_grid_radii():
    g = ScaleGrid(1.0, 0.5, 3)
    assert g.radii.tolist() == [1.0, 0.5, 0.25, 0.125]


@pytest.mark.parametrize("args", [(0.0, 0.5, 3), (1.0, 1.0, 3), (1.0, 0.5, 0)])
def test_grid_rejects_bad_args(args):
    with pytest.raises(InputError):
        ScaleGrid(*args)


def test_resolution_marks_fine_scales_invalid(circle_cloud):
    g = ScaleGrid(0.5, 0.5, 5)
    ok = g.check_resolution(circle_cloud)
    assert ok[:3].all()
    assert not ok[-1]


def test_modulus_tail_sums():
    m = ModulusSequence((0.5, 0.25, 0.125, 0.0625))
    assert np.allclose(m.omegas, [0.9375, 0.4375, 0.1875, 0.0625])


def test_modulus_from_radii_and_inverse_power():
    g = ScaleGrid(1.0, 0.5, 4)
    m = ModulusSequence.power_of_radii(g, 1.0, lam=2.0)
    assert np.allclose(m.lambdas, 2.0 * g.radii)
    p = ModulusSequence.inverse_power(6, 2.0)
    assert p.lambdas[1] == pytest.approx(0.25)


def test_modulus_rejects_harmonic_tail():
    with pytest.raises(NonSummableError):
        ModulusSequence.inverse_power(400, 1.0)


def test_modulus_rejects_negative():
    with pytest.raises(InputError):
        ModulusSequence((1.0, -0.5))


def test_profile_on_circle(circle_cloud, small_grid):
    x = circle_cloud.points[0]
    prof = point_profile(circle_cloud, x, small_grid, alpha=1.0, lam=4.0, p_list=(2.0, math.inf), index=0)
    assert prof.valid.all()
    assert set(prof.betas) == {2.0, math.inf}
    assert np.allclose(prof.cyl_excess, 0.0)
    assert np.allclose(prof.parab_excess, 0.0)
    assert np.allclose(prof.densities, 1.0, rtol=0.1)
    assert prof.thetas.shape == (small_grid.radii.size - 1,)
    assert np.all(prof.thetas < 1e-6)


def test_profile_marks_truncated_scales_invalid():
    t = np.linspace(0.0, 1.0, 201)
    P = np.column_stack([t, np.zeros_like(t)])
    bd = np.minimum(t, 1.0 - t)
    cloud = WeightedCloud(P, np.full(t.size, 0.005), 1, bd)
    prof = point_profile(cloud, P[50], ScaleGrid(0.4, 0.5, 3), 1.0, 4.0, index=50)
    assert prof.valid.tolist() == [False, True, True, True]
    assert prof.planes[0] is None
    assert math.isnan(prof.cyl_excess[0])


def test_profile_dict_uses_string_keys(circle_cloud, small_grid):
    prof = point_profile(circle_cloud, circle_cloud.points[0], small_grid, 1.0, 4.0, p_list=(2.0, math.inf))
    d = prof.to_dict()
    assert set(d["betas"]) == {"2.0", "inf"}
    assert len(d["planes"]) == small_grid.radii.size


def test_stabilization_certified_on_circle(circle_cloud, small_grid):
    prof = point_profile(circle_cloud, circle_cloud.points[0], small_grid, 1.0, 4.0, index=0)
    res = stabilize_planes(prof, small_grid, lam=4.0, alpha=1.0, C=10.0, cloud=circle_cloud, samples=200, seed=0)
    assert res.certified, res.reason
    assert res.v_inf is not None
    assert res.checked_points > 0


def test_stabilization_flags_fast_rotation():
    grid = ScaleGrid(0.5, 0.5, 3)
    planes = [
        AffinePlane.through(np.zeros(2), LinearPlane(np.array([[math.cos(a)], [math.sin(a)]])))
        for a in (0.0, 0.5, 0.0, 0.5)
    ]
    prof = PointProfile.from_planes(np.zeros(2), grid, planes)
    res = stabilize_planes(prof, grid, lam=1.0, alpha=1.0, C=0.1)
    assert not res.certified
    assert res.first_violation == 0


def test_stabilization_needs_two_scales():
    grid = ScaleGrid(0.5, 0.5, 2)
    plane = AffinePlane.through(np.zeros(2), LinearPlane.coordinate(2, 1))
    prof = PointProfile.from_planes(np.zeros(2), grid, [plane, None, None])
    res = stabilize_planes(prof, grid, 1.0, 1.0, 1.0)
    assert not res.certified
    assert res.v_inf is None


def test_sample_slab_stays_in_slab_and_ball():
    rng = np.random.default_rng(0)
    V = AffinePlane.through([0.0, 0.0, 0.1], LinearPlane.coordinate(3, 2))
    x = np.zeros(3)
    Y = sample_slab(x, V, 0.05, 0.5, 500, rng)
    assert Y.shape[0] > 0
    assert np.all(V.dist_many(Y) < 0.05)
    assert np.all(np.linalg.norm(Y - x, axis=1) <= 0.5)


def test_holder_fit_recovers_power_law():
    radii = 0.5 ** np.arange(8)
    fit = holder_fit(3.0 * radii[:-1] ** 0.5, radii)
    assert fit.alpha_est == pytest.approx(0.5)
    assert fit.C_est == pytest.approx(3.0)
    assert fit.residual == pytest.approx(0.0, abs=1e-9)


def test_holder_fit_all_zero_means_stable():
    fit = holder_fit(np.zeros(5), 0.5 ** np.arange(6))
    assert math.isinf(fit.alpha_est)
    assert fit.excluded == 5


def test_holder_fit_needs_three_positive_angles():
    with pytest.raises(InputError):
        holder_fit([0.1, 0.05, 0.0], [1.0, 0.5, 0.25, 0.125])
