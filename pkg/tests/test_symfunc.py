import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from itertools import combinations

from sigmakflow import ConeError, DomainError, SpeedParams
from sigmakflow.symfunc import (
    cone_check, sigma, sigma_partial, sigma_partials, speed_F_alpha, speed_F_alpha_partials,
    speed_F_star, speed_F_star_partials,
)


def brute_sigma(k, kap):
    return sum(np.prod(c) for c in combinations(kap, k)) if k else 1.0


@pytest.mark.parametrize("k,kap,val", [(1, (1, 2, 3), 6), (2, (1, 2, 3), 11), (3, (1, 1, 1), 1), (0, (4, 5), 1)])
def test_sigma_examples(k, kap, val):
    assert sigma(k, kap) == val


def test_sigma_rejects_bad_order():
    with pytest.raises(DomainError):
        sigma(4, (1, 2, 3))


@pytest.mark.parametrize("k,kap,i,val", [(2, (1, 2, 3), 1, 5), (1, (7, -2, 3), 2, 1), (3, (1, 2, 3), 2, 3)])
def test_sigma_partial_examples(k, kap, i, val):
    assert sigma_partial(k, kap, i) == val


def test_sigma_partial_index_range():
    with pytest.raises(DomainError):
        sigma_partial(1, (1, 2), 0)
    with pytest.raises(DomainError):
        sigma_partial(1, (1, 2), 3)


def test_speed_examples():
    assert speed_F_alpha(SpeedParams(3, 2, 2), (1, 1, 1)) == pytest.approx(3)
    assert speed_F_alpha(SpeedParams(2, 1, 1), (0.5, 0.5)) == pytest.approx(1)
    assert speed_F_alpha(SpeedParams(2, 2, 1), (2, 2)) == pytest.approx(2)
    assert speed_F_star(SpeedParams(2, 2), (0.7, 0.7)) == pytest.approx(0.7)
    with pytest.raises(ConeError):
        speed_F_alpha(SpeedParams(3, 2), (1, -1, 0.5))
    with pytest.raises(ConeError):
        speed_F_star(SpeedParams(2, 1), (1, 0))


def test_cone_examples():
    p = SpeedParams(3, 2)
    assert cone_check(p, (1, 1, -0.1))
    assert not cone_check(p, (1, -1, 0.5))
    assert cone_check(p, (1, 2, 3), strict=True)
    assert not cone_check(p, (1, 1, -0.1), strict=True)


def test_params_validation():
    for bad in [(1, 1, 1), (2, 3, 1), (2, 0, 1), (2, 1, 0.5), (2.5, 1, 1)]:
        with pytest.raises(DomainError):
            SpeedParams(*bad)
    assert SpeedParams(4, 2).binom == 6


kappas = st.integers(2, 5).flatmap(
    lambda n: st.lists(st.floats(-3, 3, allow_nan=False), min_size=n, max_size=n))


@settings(max_examples=200, deadline=None)
@given(kappas, st.data())
def test_sigma_matches_brute_force(kap, data):
    k = data.draw(st.integers(0, len(kap)))
    assert sigma(k, kap) == pytest.approx(brute_sigma(k, kap), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(kappas, st.data())
def test_partials_match_finite_differences(kap, data):
    k = data.draw(st.integers(1, len(kap)))
    kap = np.array(kap)
    g = sigma_partials(k, kap)
    eps = 1e-6
    for i in range(kap.size):
        e = np.zeros_like(kap)
        e[i] = eps
        fd = (sigma(k, kap + e) - sigma(k, kap - e)) / (2 * eps)
        assert g[i] == pytest.approx(fd, abs=1e-5 * max(1.0, abs(fd)))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(1, n), st.sampled_from([1.0, 1.5, 2.0]),
    st.lists(st.floats(0.2, 5), min_size=n, max_size=n))))
def test_speed_partials_match_finite_differences(args):
    n, k, alpha, kap = args
    p = SpeedParams(n, k, alpha)
    kap = np.array(kap)
    g, gs = speed_F_alpha_partials(p, kap), speed_F_star_partials(p, kap)
    eps = 1e-6
    for i in range(n):
        e = np.zeros(n)
        e[i] = eps
        fd = (speed_F_alpha(p, kap + e) - speed_F_alpha(p, kap - e)) / (2 * eps)
        fds = (speed_F_star(p, kap + e) - speed_F_star(p, kap - e)) / (2 * eps)
        assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-7)
        assert gs[i] == pytest.approx(fds, rel=1e-5, abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.1, 10), min_size=3, max_size=3), st.floats(0.1, 10))
def test_homogeneity(kap, lam):
    p = SpeedParams(3, 2, 1.5)
    kap = np.array(kap)
    assert speed_F_alpha(p, lam * kap) == pytest.approx(lam**1.5 * speed_F_alpha(p, kap), rel=1e-12)
    assert speed_F_star(p, lam * kap) == pytest.approx(lam * speed_F_star(p, kap), rel=1e-12)


def test_batched_shapes():
    rng = np.random.default_rng(3)
    kap = rng.uniform(0.1, 2, size=(4, 5, 3))
    p = SpeedParams(3, 2)
    out = speed_F_alpha(p, kap)
    assert out.shape == (4, 5)
    assert out[2, 3] == pytest.approx(speed_F_alpha(p, kap[2, 3]))
    assert cone_check(p, kap).shape == (4, 5)
