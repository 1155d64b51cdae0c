"""Package outputs against the frozen closed-form values in oracles.json."""

import numpy as np
import pytest

from sigmakflow import SpeedParams, flow
from sigmakflow.expander import hyperboloid_radius
from sigmakflow.geometry import RadialField, klein_scalars, primal_curvature
from sigmakflow.legendre import legendre_transform
from sigmakflow.symfunc import speed_F_star


@pytest.mark.parametrize("n,k,alpha", [(2, 1, 1), (3, 2, 1), (2, 2, 2), (3, 1, 2), (3, 3, 1)])
def test_hyperboloid_radius(oracles, n, k, alpha):
    assert hyperboloid_radius(SpeedParams(n, k, alpha)) == pytest.approx(
        oracles[f"hyperboloid_radius_{n}_{k}_{alpha}"], rel=1e-15)


def test_clock(oracles):
    assert flow.time_change(4.0, 1.0) == pytest.approx(oracles["time_change_alpha1_t4"], rel=1e-15)
    assert flow.inverse_time_change(1.0, 1.0) == pytest.approx(oracles["inverse_time_change_alpha1_tau1"], rel=1e-15)
    assert flow.scale_factor(7 / 3, 2.0) == pytest.approx(oracles["scale_factor_alpha2_t7_3"], rel=1e-15)


def test_selfsimilar_pole(oracles):
    u = flow.shifted_hyperboloid_solution(np.sqrt(2), 0.0, SpeedParams(2, 1, 1))
    assert u(0.0, 4.0) == pytest.approx(oracles["selfsimilar_pole_t4"], rel=1e-14)


def test_fixed_speeds(oracles):
    assert speed_F_star(SpeedParams(3, 2), [1, 1, 1]) == pytest.approx(oracles["F_star_3_2_ones"], rel=1e-15)
    assert speed_F_star(SpeedParams(2, 1), [0.5, 0.25]) == pytest.approx(oracles["F_star_2_1_half_quarter"], rel=1e-15)


def test_condition_a_pole(oracles):
    u0 = RadialField.from_function(lambda r: 1 + np.sqrt(4 + r * r), 10.0, 2000)
    cd = primal_curvature(u0, SpeedParams(2, 1))
    assert cd.support[0] == pytest.approx(oracles["conditionA_support_pole"], abs=1e-5)


def test_legendre_pole(oracles):
    u = RadialField.from_function(lambda r: np.sqrt(2 + r * r), 10.0, 2000)
    d = legendre_transform(u, r=0.5, N=50)
    assert d.values[0] == pytest.approx(oracles["legendre_hyperboloid_pole_sqrt2"], abs=1e-12)


def test_klein(oracles):
    _, x = klein_scalars(0.8)
    assert x == pytest.approx(oracles["klein_x_0p8"], rel=1e-15)
