# -*- coding: utf-8 -*-
import math

import pytest

from tools.constants import cone_threshold, eps0, rectifiability_constants
from tools.errors import InputError


def test_eps0_values():
    assert eps0(1) == pytest.approx(2.0 / 240.0 ** 2)
    assert eps0(2) == pytest.approx(4.0 / 240.0 ** 3)


def test_cone_threshold_reduces_to_power_of_240_at_zero_aperture():
    assert cone_threshold(1, 0.0) == pytest.approx(240.0 ** -2)
    assert cone_threshold(2, 1.0) == pytest.approx(240.0 ** -3 / 2.0)


def test_constants_follow_closed_forms():
    c = rectifiability_constants(k=1, n=2, alpha=1.0, lam=4.0, delta=0.5, M=8.0, rho=0.5)
    expected_c = 20.0 ** 3 * 2.0 * 2 * 8.0 * 4.0 / (0.5 * math.pi)
    assert c.C_key == pytest.approx(expected_c)
    assert c.C == pytest.approx(expected_c)
    assert c.r1 == pytest.approx((4.0 * 4.0 * (2.0 + 16.0) + 8.0 * expected_c) ** -1.0)
    assert c.lambda_prime == pytest.approx(2.0 * expected_c + 17.0 * 4.0)
    assert c.lambda_dprime == pytest.approx(4.0 + expected_c + (8.0 + expected_c) / 0.75)
    assert c.parabequiv_lambda == pytest.approx(6.0 * 4.0 * 4.0)
    assert c.parabcyl_lambda == pytest.approx(16.0 * 4.0)
    assert c.uniform_eps == pytest.approx(0.5 / 5.0)
    assert c.canonical_excess == pytest.approx(1.0 / 40.0)


def test_constant_override_changes_derived_values_only():
    base = rectifiability_constants(1, 2, 1.0, 4.0, 0.5, 8.0, 0.5)
    zero = rectifiability_constants(1, 2, 1.0, 4.0, 0.5, 8.0, 0.5, C=0.0)
    assert zero.C == 0.0
    assert zero.C_key == pytest.approx(base.C_key)
    assert zero.r1 > base.r1
    assert zero.diameter_bound == pytest.approx((16.0) ** -1.0)


def test_constants_serialise_inputs():
    d = rectifiability_constants(2, 3, 0.5, 1.0, 0.5, 2.0, 0.5).to_dict()
    assert d["inputs"]["k"] == 2
    assert d["diameter_bound"] > 0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(k=0, n=2, alpha=1.0, lam=1.0, delta=1.0, M=1.0, rho=0.5),
        dict(k=2, n=2, alpha=1.0, lam=1.0, delta=1.0, M=1.0, rho=0.5),
        dict(k=1, n=2, alpha=0.0, lam=1.0, delta=1.0, M=1.0, rho=0.5),
        dict(k=1, n=2, alpha=1.0, lam=-1.0, delta=1.0, M=1.0, rho=0.5),
        dict(k=1, n=2, alpha=1.0, lam=1.0, delta=1.0, M=1.0, rho=1.0),
        dict(k=1, n=2, alpha=1.0, lam=1.0, delta=1.0, M=1.0, rho=0.5, C=-1.0),
    ],
)
def test_constants_reject_bad_inputs(kwargs):
    with pytest.raises(InputError):
        rectifiability_constants(**kwargs)
