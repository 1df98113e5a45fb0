# -*- coding: utf-8 -*-
"""大规模点云上的端到端检查，默认不跑：pytest -m slow"""
import math
import time

import numpy as np
import pytest

from agents.criteria import ClassifyParams, classify, criterion_fixed_plane, loglog_slope
from agents.generators import GeneratorSpec, generate, generate_kind
from agents.multiscale import ScaleGrid
from tools.cloud import concatenate
from tools.file_util import dumps
from tools.geometry import Cylinder, LinearPlane

pytestmark = pytest.mark.slow


def _interior(report):
    """所有尺度都有效的查询点。"""
    return [p for p in report.points if p.profile is not None and bool(np.all(p.profile.valid))]


def test_circle_sits_inside_tangent_paraboloids():
    cloud = generate_kind("circle", 10000, seed=0)
    grid = ScaleGrid(0.5, 0.5, 8)
    for i in range(0, 10000, 1000):
        x = cloud.points[i]
        tangent = LinearPlane(np.array([[-x[1]], [x[0]]]))
        v = criterion_fixed_plane(cloud, x, tangent, grid, 1.0, 1.0, 20, index=i)
        assert v.passed is True
        assert v.statistic == 0.0


@pytest.mark.parametrize(
    "kind, count, stride",
    [("affine_plane", 10000, 50), ("circle", 10000, 50), ("sphere", 20000, 100), ("c1alpha_graph", 2 ** 14, 64)],
)
def test_smooth_kinds_pass_rotating_cylinder_with_defaults(kind, count, stride):
    cloud = generate_kind(kind, count, seed=0)
    report = classify(cloud, ClassifyParams.from_config(stride=stride))
    assert report.pass_fraction("rotating_cylinder") >= 0.9


def test_c1alpha_graph_beta_decay():
    cloud = generate_kind("c1alpha_graph", 2 ** 14, seed=0, alpha=0.5)
    grid = ScaleGrid(2.0 ** -3, 0.5, 7)
    params = ClassifyParams.from_config(alpha=0.45, grid=grid, p_list=(math.inf,), stride=64, keep_profiles=True)
    inner = _interior(classify(cloud, params))
    assert len(inner) >= 100
    curve = np.median(np.vstack([p.profile.betas[math.inf] for p in inner]), axis=0)
    assert 0.45 <= loglog_slope(curve, grid.radii) <= 0.6
    passed = [p.verdicts["beta_bound_pinf"].passed is True for p in inner]
    assert np.mean(passed) >= 0.9


def test_c1beta_graph_fails_beta_bound_at_larger_alpha():
    cloud = generate_kind("c1beta_graph", 2 ** 14, seed=0, beta=0.25)
    grid = ScaleGrid(2.0 ** -3, 0.5, 7)
    params = ClassifyParams.from_config(alpha=1.0, grid=grid, p_list=(math.inf,), stride=64, keep_profiles=True)
    inner = _interior(classify(cloud, params))
    assert len(inner) >= 100
    # 最细尺度从 2^-8 缩到 2^-10 时 sup r^{-1}β_∞ 的增长倍数
    growth = []
    for p in inner:
        q = p.profile.betas[math.inf] / grid.radii
        growth.append(np.max(q) / np.max(q[:6]))
    assert np.median(growth) >= 2.0
    failed = [p.verdicts["beta_bound_pinf"].passed is False for p in inner]
    assert np.mean(failed) >= 0.75


def test_four_corner_cantor_is_flagged():
    cloud = generate_kind("four_corner_cantor", 4 ** 7, seed=0, depth=7)
    # 10 个半径 0.5·2^-j，j = 0..9，都在 depth 7 的分辨率下限之上
    grid = ScaleGrid(0.5, 0.5, 9)
    report = classify(cloud, ClassifyParams.from_config(grid=grid, stride=64, keep_profiles=True))
    inner = _interior(report)
    assert len(inner) == len(report.points)
    # r ∈ [4^-5, 4^-1] 对应下标 1..9
    binf = np.vstack([p.profile.betas[math.inf][1:] for p in inner])
    assert np.median(binf) >= 0.02
    assert report.pass_fraction("rotating_cylinder") <= 0.1
    ratios = []
    for p in inner:
        b2 = p.profile.betas[2.0] ** 2
        ratios.append(np.sum(b2) / np.sum(b2[:5]))
    assert np.median(ratios) >= 1.8


def test_snowflake_jones_grows_while_cylinders_stay_full():
    grid = ScaleGrid(0.25, 0.5, 9)
    params = ClassifyParams.from_config(grid=grid, stride=512, keep_profiles=True)
    summary = {}
    for depth in (6, 10):
        cloud = generate_kind("snowflake", 2 ** 16, seed=0, depth=depth)
        report = classify(cloud, params)
        jones, excess = [], []
        for p in report.points:
            prof = p.profile
            tail = prof.tail_indices(params.m_tail)
            if tail.size == 0:
                continue
            jones.append(p.diagnostics[0].jones_sum)
            excess.append(max(
                cloud.excess_ratio(prof.x, prof.radii[j], Cylinder(prof.planes[j], 0.5 * prof.radii[j]))
                for j in tail
            ))
        summary[depth] = (float(np.median(jones)), float(np.median(excess)))
    assert summary[10][0] > 1.1 * summary[6][0]
    assert summary[10][1] < 0.05


def test_line_and_cantor_mixture_splits_rotating_verdict():
    line = generate(GeneratorSpec("affine_plane", 2, 1, 4 ** 7)).transformed(np.eye(2), [0.5, 3.0])
    cantor = generate_kind("four_corner_cantor", 4 ** 7, seed=0, depth=7)
    report = classify(concatenate([line, cantor]), ClassifyParams.from_config(stride=128))
    assert report.aggregate["queries"] == 256
    assert 0.4 <= report.pass_fraction("rotating_cylinder") <= 0.6


def test_hundred_thousand_points_sixteen_scales():
    cloud = generate_kind("circle", 10 ** 5, seed=3)
    grid = ScaleGrid(0.5, 0.5, 15)
    t0 = time.monotonic()
    report = classify(cloud, ClassifyParams.from_config(grid=grid, stride=500, threads=1))
    assert time.monotonic() - t0 < 60.0
    assert report.aggregate["queries"] == 200
    again = classify(cloud, ClassifyParams.from_config(grid=grid, stride=500, threads=4))
    assert dumps(report.to_dict()) == dumps(again.to_dict())


def test_report_independent_of_thread_count():
    cloud = generate_kind("sphere", 20000, seed=2)
    grid = ScaleGrid(0.5, 0.5, 5)
    reports = [
        dumps(classify(cloud, ClassifyParams.from_config(grid=grid, stride=500, threads=t)).to_dict())
        for t in (1, 4)
    ]
    assert reports[0] == reports[1]
