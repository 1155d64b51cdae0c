import json
from dataclasses import replace

import numpy as np
import pytest

import negative_controls as NC
from sigmakflow import DomainError, RadialField, SpeedParams, flow
from sigmakflow import diagnostics as D
from sigmakflow.expander import hyperboloid_radius

P21 = SpeedParams(2, 1, 1)


def dual(rho, c=0.0, r=0.9, N=45):
    return RadialField.from_function(lambda s: -rho * np.sqrt(1 - s * s) - c, r, N)


@pytest.mark.parametrize("name", sorted(NC.ALL))
def test_negative_control_fails(name):
    assert not NC.ALL[name]().verdict


def test_series_validation_and_io(tmp_path):
    with pytest.raises(DomainError):
        D.MonitorSeries("x", [0, 0], [1, 2], "min_ge", 0.0)
    with pytest.raises(DomainError):
        D.MonitorSeries("x", [0, 1], [1], "min_ge", 0.0)
    with pytest.raises(DomainError):
        D.MonitorSeries("x", [0], [1], "nonsense", 0.0)
    s = D.MonitorSeries("a b", [0.0, 0.5], [1e-3, np.pi], "max_le", 4.0)
    csv, js = s.write(tmp_path)
    block = json.loads(open(js).read())
    assert block["verdict"] == "pass" and csv.endswith("a_b.csv")
    t, v = np.loadtxt(csv, delimiter=",", skiprows=1, unpack=True)
    again = D.MonitorSeries("a b", t, v, block["predicate"], block["tol"], block["params"])
    assert np.array_equal(again.values, s.values) and again.verdict == s.verdict
    assert again.verdict_json() == s.verdict_json()


def test_measured_orders():
    assert np.allclose(D.measured_orders([1.0, 0.25, 0.0625]), 2.0)


def test_comparison_identical_and_grid_mismatch():
    st = flow.dual_state(dual(2.0, 1.0), P21)
    run = [st, flow.integrate(st, 0.01)[0]]
    s = D.comparison_check(run, run)
    assert s.verdict and np.all(s.values == 0) and s.details["premise"]
    with pytest.raises(DomainError):
        D.comparison_check([st], [flow.dual_state(dual(2.0, 1.0, N=30), P21)])


def test_boundary_extremum_hyperboloid_degenerate_pass():
    a = hyperboloid_radius(P21)
    st = flow.dual_state(dual(a), P21)
    st1, _ = flow.integrate(st, 0.01)
    assert D.boundary_extremum_check([st, st1]).verdict


def test_boundary_extremum_rejects_normalized():
    st = flow.dual_state(dual(2.0, 1.0), P21, "normalized")
    with pytest.raises(DomainError):
        D.boundary_extremum_check([st])


def test_residual_sign_condition_a_start():
    st = flow.dual_state(dual(2.0, 1.0), P21, "normalized")
    mon = D.ResidualSignMonitor()
    flow.integrate(st, 0.05, observer=mon)
    assert mon.series().verdict


def test_phi_bounds_alpha2_and_alpha1():
    for alpha, lower in ((2.0, True), (1.0, False)):
        p = SpeedParams(2, 1, alpha)
        ex = flow.shifted_hyperboloid_solution(2.0, 1.0, p)
        R = 4.0
        st = flow.primal_state(RadialField.from_function(lambda r: ex(r, 0.0), R, 64), p)
        run = [st]
        for t in (0.1, 0.2, 0.3):
            st, _ = flow.integrate(st, t, boundary_provider=lambda s: ex(R, s))
            run.append(st)
        s = D.phi_bounds_check(run, 6.0)
        assert s.verdict and s.details["lower_checked"] == lower
        assert s.details["gamma"] == pytest.approx(4 + 8 * s.details["V0"] ** 2)
        if not lower:
            assert s.details["notes"]


def test_phi_bounds_single_point_K():
    p = SpeedParams(2, 1, 2)
    st = flow.primal_state(RadialField.from_function(lambda r: 1 + np.sqrt(4 + r * r), 4.0, 64), p)
    s = D.phi_bounds_check([st], 3.0 + 1e-9)  # K is the pole only
    assert np.isfinite(s.details["gamma"])
    with pytest.raises(DomainError):
        D.phi_bounds_check([st], 1.0)


def test_evolution_identities_quick_ladder():
    triples = [D.self_similar_triple(P21, N) for N in (32, 64, 128)]
    out = D.evolution_identity_check(triples, P21)
    for s in out.values():
        assert s.verdict, (s.name, s.values, s.details)


def test_scaling_covariance_analytic():
    prof = D.hyperboloid_profile(1.3, 0.4)
    for p in (P21, SpeedParams(3, 2, 2)):
        dF, ds = D.scaling_covariance_analytic(prof, 2.0, p)
        assert dF < 1e-12 and ds < 1e-12
        assert D.scaling_covariance_analytic(prof, 1.0, p) == (0.0, 0.0)
    with pytest.raises(DomainError):
        D.scaling_covariance_analytic(prof, 0.0, P21)


def test_scaling_covariance_orbit_coarse():
    a = hyperboloid_radius(P21)
    s = D.scaling_covariance_check(D.hyperboloid_profile(a), 1.5, P21, times=(0.05,), h=1 / 16, R=2.0,
                                   exact=flow.shifted_hyperboloid_solution(a, 0.0, P21))
    assert s.verdict and s.details["analytic_pass"]


def test_convergence_report_flat_zero_series():
    a = hyperboloid_radius(P21)
    st = flow.dual_state(dual(a), P21, "normalized")
    target = lambda s: -a * np.sqrt(1 - s * s)
    s = D.convergence_report([st, replace(st, tau=0.1)], target)
    assert np.all(s.values == 0) and s.verdict


def test_domain_exhaustion_positive():
    limits = {r: dual(hyperboloid_radius(P21) + 0.1 * (1 - r), r=r, N=int(r * 100)) for r in (0.6, 0.75, 0.9)}
    s = D.domain_exhaustion_check(limits)
    assert s.verdict and len(s.details["consecutive_gaps"]) == 2
