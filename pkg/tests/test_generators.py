# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from agents.generators import (
    KINDS,
    GeneratorSpec,
    generate,
    generate_kind,
    lacunary,
    snowflake_angles,
    snowflake_polyline,
)
from tools.errors import InputError


@pytest.mark.parametrize("kind", [k for k in KINDS if k != "noisy"])
def test_every_kind_is_reproducible(kind):
    a = generate_kind(kind, 200, seed=3)
    b = generate_kind(kind, 200, seed=3)
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.weights, b.weights)
    assert np.all(a.weights > 0)


def test_circle_mass_is_circumference():
    c = generate_kind("circle", 500, seed=0, radius=2.0)
    assert len(c) == 500
    assert c.total_mass == pytest.approx(4.0 * math.pi)
    assert np.allclose(np.linalg.norm(c.points, axis=1), 2.0)


def test_sphere_density_matches_normalisation():
    c = generate_kind("sphere", 4000, seed=1)
    x = c.points[100]
    theta = c.density_ratio(x, 0.3).theta
    assert theta == pytest.approx(1.0, rel=0.1)


def test_affine_plane_grid_and_boundary():
    c = generate_kind("affine_plane", 400, seed=0)
    assert len(c) == 400
    assert c.k == 2 and c.ambient_dim == 3
    assert np.allclose(c.points[:, 2], 0.0)
    assert c.boundary_distance.min() > 0


def test_affine_plane_rotation_keeps_flatness():
    c = generate_kind("affine_plane", 400, seed=5, rotate=True)
    centred = c.points - c.points.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False)
    assert sv[-1] < 1e-9


def test_cantor_has_four_to_the_depth_points():
    c = generate_kind("four_corner_cantor", 1000, seed=0, depth=3)
    assert len(c) == 64
    assert c.total_mass == pytest.approx(1.0)
    assert c.points.min() > 0 and c.points.max() < 1


def test_graph_is_a_graph_over_unit_interval():
    c = generate_kind("c1alpha_graph", 300, seed=0, alpha=0.5)
    t = c.points[:, 0]
    assert np.all(np.diff(t) > 0)
    assert t.min() > 0 and t.max() < 1
    f = lacunary(t, 0.5, 4, 8)
    assert np.allclose(c.points[:, 1], f)


def test_snowflake_endpoints_and_angles():
    V = snowflake_polyline(4)
    assert V.shape == (17, 2)
    assert np.allclose(V[0], [0.0, 0.0]) and np.allclose(V[-1], [1.0, 0.0])
    ang = snowflake_angles(5)
    assert ang[0] == pytest.approx(min(1.0, math.pi / 3))
    assert ang[3] == pytest.approx(0.5)


def test_noisy_inherits_base_dimensions():
    base = GeneratorSpec.default("circle", 100, seed=2)
    spec = GeneratorSpec.default("noisy", 100, seed=4, base=base, sigma=0.01)
    assert (spec.n, spec.k) == (2, 1)
    noisy = generate(spec)
    clean = generate(base)
    diff = np.linalg.norm(noisy.points - clean.points, axis=1)
    assert 0 < diff.mean() < 0.05


def test_zero_noise_reproduces_base():
    base = GeneratorSpec.default("circle", 50, seed=2)
    noisy = generate(GeneratorSpec.default("noisy", 50, seed=9, base=base.to_dict(), sigma=0.0))
    assert np.array_equal(noisy.points, generate(base).points)


def test_spec_dict_roundtrip():
    spec = GeneratorSpec.default("snowflake", 100, seed=1, depth=3)
    assert GeneratorSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize(
    "kind, params",
    [
        ("circle", {"radius": -1.0}),
        ("c1alpha_graph", {"alpha": 1.5}),
        ("four_corner_cantor", {"depth": 0}),
        ("snowflake", {"depth": 3, "angles": [0.1, 2.0, 0.1]}),
        ("noisy", {}),
    ],
)
def test_invalid_specs(kind, params):
    with pytest.raises(InputError):
        GeneratorSpec.default(kind, 100, **params)


def test_unknown_kind_and_tiny_count():
    with pytest.raises(InputError):
        GeneratorSpec.default("torus", 100)
    with pytest.raises(InputError):
        GeneratorSpec.default("circle", 5)
