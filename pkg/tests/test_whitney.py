# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from agents.whitney import (
    JetData,
    geometric_lemma_check,
    graph_jet_from_cloud,
    lemma_diameter_bound,
    whitney_constants,
)
from tools.cloud import WeightedCloud
from tools.errors import InconsistentJetError, InputError, NonGraphError, TiltError
from tools.geometry import LinearPlane


def _line(angle):
    return LinearPlane(np.array([[math.cos(angle)], [math.sin(angle)]]))


def test_square_jet_constants():
    X = np.linspace(0.0, 1.0, 5)
    wc = whitney_constants(JetData(X, X ** 2, (2.0 * X).reshape(-1, 1, 1), 1.0))
    assert wc.M_taylor == pytest.approx(1.0)
    assert wc.M_holder == pytest.approx(2.0)
    assert wc.M_bound == pytest.approx(2.0)
    assert wc.M == pytest.approx(2.0)
    assert wc.pairs == 20


def test_affine_jet_has_zero_constants():
    g = np.linspace(-1.0, 1.0, 4)
    X = np.array(np.meshgrid(g, g, indexing="ij")).reshape(2, -1).T
    A = np.array([[1.0, -2.0], [0.5, 3.0]])
    jet = JetData(X, X @ A.T + 1.0, np.broadcast_to(A, (X.shape[0], 2, 2)), 0.5)
    wc = whitney_constants(jet)
    assert wc.M_taylor == pytest.approx(0.0, abs=1e-12)
    assert wc.M_holder == pytest.approx(0.0, abs=1e-12)


def test_holder_exponent_of_power_jet():
    alpha = 0.5
    X = np.linspace(0.0, 1.0, 11)
    jet = JetData(X, X ** 1.5, (1.5 * X ** 0.5).reshape(-1, 1, 1), alpha)
    wc = whitney_constants(jet)
    assert wc.M_holder == pytest.approx(1.5)


def test_identical_duplicates_are_merged():
    X = np.array([0.0, 1.0, 1.0])
    wc = whitney_constants(JetData(X, X ** 2, (2.0 * X).reshape(-1, 1, 1), 1.0))
    assert wc.pairs == 2


def test_conflicting_duplicates_raise():
    X = np.array([0.0, 1.0, 1.0])
    F = np.array([0.0, 1.0, 2.0])
    with pytest.raises(InconsistentJetError):
        whitney_constants(JetData(X, F, np.zeros((3, 1, 1)), 1.0))


def test_jet_shape_and_range_checks():
    with pytest.raises(InputError):
        JetData(np.zeros(3), np.zeros(2), np.zeros((3, 1, 1)), 1.0)
    with pytest.raises(InputError):
        JetData(np.zeros(3), np.zeros(3), np.zeros((3, 2, 1)), 1.0)
    with pytest.raises(InputError):
        JetData(np.arange(3.0), np.zeros(3), np.zeros((3, 1, 1)), 1.5)
    with pytest.raises(InputError):
        whitney_constants(JetData(np.zeros(2), np.zeros(2), np.zeros((2, 1, 1)), 1.0))


def test_jet_dict_roundtrip():
    X = np.linspace(0.0, 1.0, 3)
    jet = JetData(X, X, np.ones((3, 1, 1)), 0.7)
    back = JetData.from_dict(jet.to_dict())
    assert np.array_equal(back.base_points, jet.base_points)
    assert back.alpha == 0.7


def test_graph_jet_from_parabola():
    t = np.linspace(-0.5, 0.5, 21)
    cloud = WeightedCloud(np.column_stack([t, 0.1 * t ** 2]), k=1)
    planes = [_line(math.atan(0.2 * s)) for s in t]
    jet = graph_jet_from_cloud(cloud, planes, LinearPlane.coordinate(2, 1), 1.0)
    assert np.allclose(jet.base_points[:, 0], t)
    assert np.allclose(np.abs(jet.values[:, 0]), 0.1 * t ** 2)
    wc = whitney_constants(jet)
    assert wc.M_taylor == pytest.approx(0.1)
    assert wc.M_holder == pytest.approx(0.2)


def test_graph_jet_accepts_plane_dict():
    t = np.linspace(0.0, 1.0, 4)
    cloud = WeightedCloud(np.column_stack([t, t]), k=1)
    planes = {i: _line(math.pi / 4) for i in range(4)}
    with pytest.raises(TiltError) as e:
        graph_jet_from_cloud(cloud, planes, LinearPlane.coordinate(2, 1), 1.0)
    assert e.value.index == 0


def test_graph_jet_rejects_vertical_pair():
    cloud = WeightedCloud([[0.0, 0.0], [0.0, 0.1], [1.0, 0.0]], k=1)
    with pytest.raises(NonGraphError) as e:
        graph_jet_from_cloud(cloud, [_line(0.0)] * 3, LinearPlane.coordinate(2, 1), 1.0)
    assert e.value.pair == (0, 1)


def test_graph_jet_plane_count_mismatch():
    cloud = WeightedCloud([[0.0, 0.0], [1.0, 0.0]], k=1)
    with pytest.raises(InputError):
        graph_jet_from_cloud(cloud, [_line(0.0)], LinearPlane.coordinate(2, 1), 1.0)


def test_lemma_diameter_bound():
    assert lemma_diameter_bound(1.0, 0.0, 1.0) == pytest.approx(0.25)
    assert lemma_diameter_bound(1.0, 4.0, 1.0) == pytest.approx(1.0 / 16.0)
    assert lemma_diameter_bound(1.0, 1.0, 0.5) == pytest.approx(1.0 / 16.0)


def test_geometric_lemma_on_short_arc():
    th = np.linspace(-0.1, 0.1, 40)
    P = np.column_stack([np.cos(th), np.sin(th)])
    cloud = WeightedCloud(P, np.full(40, 0.005), 1)
    planes = [_line(a + math.pi / 2) for a in th]
    res = geometric_lemma_check(cloud, planes, 1.0, 1.0, 1.0)
    assert res.hypotheses_ok, res.reason
    assert res.diam_ok
    assert res.slant_violations == 0
    assert res.jet is not None
    assert res.constants.M_taylor <= 24.0


def test_geometric_lemma_reports_violations():
    th = np.linspace(-0.1, 0.1, 10)
    P = np.column_stack([np.cos(th), np.sin(th)])
    cloud = WeightedCloud(P, k=1)
    planes = [_line(0.0)] * 10
    res = geometric_lemma_check(cloud, planes, 1.0, 1.0, 1.0)
    assert not res.hypotheses_ok
    assert res.paraboloid_violations > 0
    assert res.jet is None
