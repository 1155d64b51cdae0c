"""Acceptance criteria 1-11, each reported as one PASS/FAIL line at the stated tolerance.

Runs with ``pytest tests/test_acceptance.py -v``; the lines are echoed live
and repeated in the terminal summary. Expensive runs are shared between
criteria through session-scoped fixtures.
"""

import time
from functools import lru_cache

import numpy as np
import pytest

import negative_controls as NC
from sigmakflow import BallField2D, GridField2D, RadialField, SpeedParams, flow
from sigmakflow import diagnostics as D
from sigmakflow.expander import hyperboloid_radius, solve_radial_shooting, solve_radial_truncated
from sigmakflow.legendre import legendre_inverse, legendre_transform
from sigmakflow.symfunc import sigma, speed_F_star

pytestmark = pytest.mark.slow

P = SpeedParams(2, 1, 1)
A_HYP = np.sqrt(2.0)
R_BALL = 0.9
H_RADIAL_STATIONARY = 0.01
COND_A_DUAL = lambda s: -2.0 * np.sqrt(1 - s * s) - 1.0  # Legendre transform of 1 + sqrt(4 + r^2)


# --------------------------------------------------------------------------
# shared runs


def selfsimilar_ball(h):
    f = BallField2D.from_function(lambda x, y: -A_HYP * np.sqrt(1 - x * x - y * y), R_BALL, h)
    mon = D.BoundaryExtremumMonitor(name=f"boundary_extremum_selfsimilar_h{1 / h:g}")
    st = flow.dual_state(f, P)
    t0 = time.perf_counter()
    st, steps = flow.integrate(st, 1.0, observer=mon)
    wall = time.perf_counter() - t0
    sup = f.support
    err = float(np.max(np.abs(st.field.values[sup] + A_HYP * st.A * np.sqrt(1 - f.rho[sup] ** 2))))
    return dict(err=err, wall=wall, steps=steps, extremum=mon.series())


def selfsimilar_primal(N, R=10.0):
    exact = lambda r, t: np.sqrt(A_HYP**2 * flow.scale_factor(t, 1.0) ** 2 + np.asarray(r) ** 2)
    st = flow.primal_state(RadialField.from_function(lambda r: exact(r, 0.0), R, N), P)
    t0 = time.perf_counter()
    st, steps = flow.integrate(st, 1.0, boundary_provider=lambda t: exact(R, t))
    wall = time.perf_counter() - t0
    return dict(err=float(np.max(np.abs(st.field.values - exact(st.field.r, 1.0)))), wall=wall, steps=steps)


@pytest.fixture(scope="session")
def acc1():
    return {"ball64": selfsimilar_ball(1 / 64), "ball128": selfsimilar_ball(1 / 128),
            "primal256": selfsimilar_primal(256), "primal512": selfsimilar_primal(512)}


@pytest.fixture(scope="session")
def expander_c1():
    return solve_radial_shooting(P, 1.0, R=50.0)


def condition_a_dual_run(field, expander):
    sandwich = D.SandwichMonitor(COND_A_DUAL, expander.dual, tol=1e-8)
    extremum = D.BoundaryExtremumMonitor(name=f"boundary_extremum_conditionA_{type(field).__name__}")
    obs = lambda s, ev: (sandwich(s, ev), extremum(s, ev))
    st, steps = flow.integrate(flow.dual_state(field, P), 1.0, observer=obs)
    return dict(sandwich=sandwich.series(), extremum=extremum.series(), steps=steps)


@pytest.fixture(scope="session")
def acc3(expander_c1):
    radial = RadialField.from_function(COND_A_DUAL, R_BALL, int(round(R_BALL / H_RADIAL_STATIONARY)))
    ball = BallField2D.from_function(lambda x, y: COND_A_DUAL(np.hypot(x, y)), R_BALL, 1 / 32)
    return {"radial": condition_a_dual_run(radial, expander_c1), "ball": condition_a_dual_run(ball, expander_c1)}


@lru_cache(maxsize=None)
def stationary(r, kind="radial", h=H_RADIAL_STATIONARY):
    if kind == "radial":
        f = RadialField.from_function(COND_A_DUAL, r, int(round(r / h)))
    else:
        f = BallField2D.from_function(lambda x, y: COND_A_DUAL(np.hypot(x, y)), r, h)
    mon = D.ResidualSignMonitor(tol=1e-8, name=f"residual_sign_{kind}_r{r:g}")
    res = flow.run_to_stationary(flow.dual_state(f, P, "normalized"), tol=1e-6, max_tau=50.0, observer=mon)
    return res, mon.series()


# --------------------------------------------------------------------------
# criteria


def test_01_selfsimilar_regression(acc1, report):
    b64, b128, p256, p512 = acc1["ball64"], acc1["ball128"], acc1["primal256"], acc1["primal512"]
    r_dual, r_primal = b64["err"] / b128["err"], p256["err"] / p512["err"]
    ok_dual = b128["err"] <= 5e-3 and r_dual >= 3 and b128["wall"] <= 60
    ok_primal = p512["err"] <= 5e-3 and r_primal >= 3 and p512["wall"] <= 60
    report("1a", ok_dual, f"dual B_0.9 h=1/128: sup err {b128['err']:.3e} <= 5e-3; halving ratio {r_dual:.2f} >= 3; "
                          f"runtime {b128['wall']:.1f}s <= 60s ({b128['steps']} steps)")
    report("1b", ok_primal, f"primal radial R=10 h=R/512: sup err {p512['err']:.3e} <= 5e-3; halving ratio "
                            f"{r_primal:.2f} >= 3; runtime {p512['wall']:.1f}s <= 60s")
    assert ok_dual and ok_primal


@pytest.mark.xfail(strict=True, reason="the r = 0.9 stationary limit is a truncated expander with a different "
                                       "pole value than the entire c = 1 expander; see the decisions ledger")
def test_02_two_solver_expander_agreement(expander_c1, report):
    res, _ = stationary(R_BALL)
    hist = D.residual_history_series(res, tol=1e-6)
    limit_primal = legendre_inverse(res.field)
    top = min(5.0, limit_primal.rmax, expander_c1.profile.rmax)
    x = np.linspace(0.0, top, 501)
    diff = float(np.max(np.abs(flow.radial_interpolant(limit_primal)(x) - expander_c1(x))))
    covers = limit_primal.rmax >= 5.0
    ok_profiles = covers and diff <= 1e-3
    report("2", ok_profiles and hist.verdict,
           f"stationary limit (r=0.9) vs shooting c=1: sup {diff:.3e} on [0, {top:.3f}] (tolerance 1e-3; limit's primal "
           f"domain reaches {limit_primal.rmax:.3f}, required 5); pole values {-res.field.values[0]:.6f} vs "
           f"{expander_c1.mu:.6f}; residual history monotone+summable: {hist.verdict} "
           f"(integral {hist.details['integral']:.4f})")
    assert ok_profiles and hist.verdict


def test_02s_stationary_limit_vs_truncated_shooting(report):
    res, _ = stationary(R_BALL)
    hist = D.residual_history_series(res, tol=1e-6)
    ref = solve_radial_truncated(P, R_BALL, COND_A_DUAL(R_BALL))
    diff = float(np.max(np.abs(res.field.values - ref.dual(res.field.r))))
    ok = res.converged and diff <= 1e-3 and hist.verdict
    report("2s", ok, f"supplement: same limit vs shooting with the truncated boundary condition: sup {diff:.3e} "
                     f"<= 1e-3; converged at tau={res.state.tau:.3f}; residual history pass={hist.verdict}")
    assert ok


def test_03_barrier_sandwich(acc3, report):
    rows = [(k, v["sandwich"]) for k, v in acc3.items()]
    ok = all(s.verdict for _, s in rows)
    report("3", ok, "; ".join(f"{k}: min margin {np.min(s.values):.3e} >= -1e-8 over {s.values.size} steps "
                              f"(lower {s.details['worst_lower']:.2e}, upper {s.details['worst_upper']:.2e})"
                              for k, s in rows))
    assert ok


def test_04_residual_positivity(report):
    runs = {"radial h=0.01": stationary(R_BALL), "ball h=1/32": stationary(R_BALL, "ball", 1 / 32)}
    parts, ok = [], True
    for name, (res, sign) in runs.items():
        good = sign.verdict and res.residual[-1] <= 1e-6
        ok &= good
        parts.append(f"{name}: min H~ {np.min(sign.values):.2e} >= -1e-8, final sup {res.residual[-1]:.2e} <= 1e-6")
    report("4", ok, "; ".join(parts))
    assert ok


def test_05_boundary_extremum(acc1, acc3, report):
    series = [acc1["ball64"]["extremum"], acc1["ball128"]["extremum"],
              acc3["radial"]["extremum"], acc3["ball"]["extremum"]]
    ok = all(s.verdict for s in series)
    worst = max(float(np.max(s.values)) for s in series)
    report("5", ok, f"{len(series)} dual runs; worst relative interior excess {worst:.3e} <= 1e-6")
    assert ok


def test_06_duality_identity(report):
    rng = np.random.default_rng(20241018)
    worst = 0.0
    for n, k in [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]:
        kap = rng.uniform(0.1, 10.0, size=(10_000, n))
        val = speed_F_star(SpeedParams(n, k), 1.0 / kap) * sigma(k, kap) ** (1.0 / k)
        worst = max(worst, float(np.max(np.abs(val - 1.0))))
    ok = worst <= 1e-12
    report("6", ok, f"max |F_*(1/kappa) sigma_k(kappa)^(1/k) - 1| = {worst:.2e} <= 1e-12 over 5 x 10^4 samples")
    assert ok


def test_07_legendre_involution_and_scaling(report):
    worst_ratio, worst_scale, worst_closed = 0.0, 0.0, 0.0
    R, N = 10.0, 1000
    for a in (0.5, 1.0, np.sqrt(2), 2.0, 3.0):
        for c in (0.0, 1.0):
            fn = lambda x: c + np.sqrt(a * a + x * x)
            u = RadialField.from_function(fn, R, N)
            back = legendre_inverse(legendre_transform(u, r=0.9, N=900))
            worst_ratio = max(worst_ratio, float(np.max(np.abs(back.values - fn(back.r)))) / u.h)
            d0 = legendre_transform(u, r=0.9, N=90)
            for A in (1.5, 2.0, 3.0):
                uA = RadialField.from_function(lambda x: A * fn(x / A), A * R, N)
                dA = legendre_transform(uA, r=0.9, N=90)
                worst_scale = max(worst_scale, float(np.max(np.abs(dA.values - A * d0.values))))
                closed = -A * (a * np.sqrt(1 - dA.r**2) + c)
                worst_closed = max(worst_closed, float(np.max(np.abs(dA.values - closed))))
    g = GridField2D.from_function(lambda x, y: np.sqrt(2 + x * x + y * y), 6.0, 0.05)
    back2 = legendre_inverse(legendre_transform(g, r=0.8, h=0.05))
    X, Y = back2.XY
    ratio2 = float(np.max(np.abs(back2.values - np.sqrt(2 + X * X + Y * Y)))) / 0.05
    ok = worst_ratio <= 5 and ratio2 <= 5 and worst_scale <= 1e-10
    report("7", ok, f"involution sup err / h: radial {worst_ratio:.3f}, 2-D {ratio2:.3f} (<= 5); scaling "
                    f"|T[A u(./A)] - A T[u]| = {worst_scale:.2e} <= 1e-10 (closed-form discretization gap "
                    f"{worst_closed:.1e})")
    assert ok


def test_08_scaling_covariance(report):
    prof = D.hyperboloid_profile(A_HYP)
    dF, ds = D.scaling_covariance_analytic(prof, 1.5, P)
    dF2, ds2 = D.scaling_covariance_analytic(D.hyperboloid_profile(1.3, 0.7), 2.0, SpeedParams(3, 2, 2))
    analytic = max(dF, ds, dF2, ds2)
    orbit = D.scaling_covariance_check(prof, 1.5, P, times=(0.1, 0.5), h=1 / 128, R=4.0,
                                       exact=flow.shifted_hyperboloid_solution(A_HYP, 0.0, P))
    ok_a = analytic <= 1e-12
    report("8a", ok_a, f"analytic covariance defects {analytic:.2e} <= 1e-12")
    report("8b", orbit.verdict, f"flow orbit beta=1.5, h=1/128: deviations {orbit.values[0]:.3e} (t=0.1), "
                                f"{orbit.values[1]:.3e} (t=0.5) <= 5e-3 on {orbit.details['compared_nodes']} nodes")
    assert ok_a and orbit.verdict


def test_09_evolution_identities(report):
    triples = [D.self_similar_triple(P, N) for N in (64, 128, 256)]
    out = D.evolution_identity_check(triples, P)
    ok = all(s.verdict for s in out.values())
    report("9", ok, "; ".join(f"{k}: residuals {', '.join(f'{v:.2e}' for v in s.values)} orders "
                              f"{', '.join(f'{o:.2f}' for o in s.details['orders'])} (>= 0.8)"
                              for k, s in out.items()))
    assert ok


def test_10_domain_exhaustion(report):
    limits = {r: stationary(r)[0].field for r in (0.6, 0.75, 0.9)}
    s = D.domain_exhaustion_check(limits)
    report("10", s.verdict, f"sup distance to the r=0.9 limit on |x| <= {s.details['disk']:.3f}: "
                            f"r=0.6 {s.values[0]:.4f}, r=0.75 {s.values[1]:.4f} (strictly decreasing); "
                            f"consecutive gaps {', '.join(f'{g:.4f}' for g in s.details['consecutive_gaps'])}")
    assert s.verdict


def test_11_negative_controls(report):
    verdicts = {name: build().verdict for name, build in NC.ALL.items()}
    ok = not any(verdicts.values())
    passed = [k for k, v in verdicts.items() if v]
    report("11", ok, f"{len(verdicts)} monitors, all fail on violating input" if ok
           else f"monitors that did not fail: {passed}")
    assert ok
