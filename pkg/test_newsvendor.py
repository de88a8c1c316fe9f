import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from dist import Exponential, Lognormal, Uniform, point_mass, scaled_bernoulli
from errors import DomainError, ValidationError
from newsvendor import (
    NewsvendorInstance,
    additive_regret,
    binomial_cdf_below,
    binomial_sf_at,
    empirical_loss,
    exact_expected_multiplicative_regret,
    exact_expected_regret,
    expected_loss,
    expected_regret_with_budget,
    multiplicative_regret,
    optimal_action,
    order_index,
    pinball_loss,
    saa_action,
    saa_actions,
)
from seeding import derive_seed

quantiles = st.floats(min_value=0.01, max_value=0.99)
samples = st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=1, max_size=40)

# Pr[Bin(10, 0.55) <= 3]
TAIL_10 = sum(math.comb(10, k) * 0.55**k * 0.45 ** (10 - k) for k in range(4))


@pytest.fixture
def uniform_half():
    return NewsvendorInstance(0.5, Uniform(0.0, 1.0))


@pytest.fixture
def easy_bernoulli():
    return NewsvendorInstance(0.4, scaled_bernoulli(0.45))


def test_instance_validation():
    with pytest.raises(ValidationError):
        NewsvendorInstance(1.0, Uniform())
    with pytest.raises(ValidationError):
        NewsvendorInstance(0.0, Uniform())


def test_pinball_loss():
    assert pinball_loss(0.3, 1.0, 0.4) == pytest.approx(0.28)
    assert pinball_loss(1.0, 0.3, 0.4) == pytest.approx(0.42)
    assert pinball_loss(1.0, 1.0, 0.4) == 0.0


def test_expected_loss_uniform(uniform_half):
    assert expected_loss(uniform_half, 0.5) == pytest.approx(0.125)
    assert additive_regret(uniform_half, 0.7) == pytest.approx(0.02)
    value = multiplicative_regret(uniform_half, 0.7)
    assert value.defined
    assert value.multiplicative == pytest.approx(0.16)
    assert value.optimal_loss == pytest.approx(0.125)


def test_expected_loss_bernoulli(easy_bernoulli):
    assert optimal_action(easy_bernoulli) == 0.0
    assert expected_loss(easy_bernoulli, 0.0) == pytest.approx(0.18)
    assert additive_regret(easy_bernoulli, 1.0) == pytest.approx(0.15)


def test_negative_decision_is_outside_the_domain(uniform_half):
    with pytest.raises(DomainError):
        expected_loss(uniform_half, -1.0)
    with pytest.raises(DomainError):
        additive_regret(uniform_half, np.array([0.2, -0.1]))


def test_optimal_action_is_the_critical_quantile():
    assert optimal_action(NewsvendorInstance(0.5, Exponential(1.0))) == pytest.approx(math.log(2.0))


@given(q=quantiles, a=st.floats(min_value=0.0, max_value=20.0))
def test_regret_identity_and_sign(q, a):
    inst = NewsvendorInstance(q, Lognormal(0.0, 1.0))
    regret = additive_regret(inst, a)
    a_star = optimal_action(inst)
    assert regret >= 0.0
    assert regret == pytest.approx(expected_loss(inst, a) - expected_loss(inst, a_star), abs=1e-9)


def test_multiplicative_regret_undefined_for_point_mass():
    inst = NewsvendorInstance(0.5, point_mass(1.0))
    value = multiplicative_regret(inst, 2.0)
    assert not value.defined
    assert value.multiplicative is None
    assert value.additive == pytest.approx(0.5)


def test_order_index_rounds_products():
    assert order_index(10, 0.3) == 3
    assert order_index(10, 0.31) == 4
    assert order_index(5, 0.01) == 1
    assert order_index(5, 0.99) == 5


def test_saa_action_is_order_statistic():
    data = [5.0, 1.0, 3.0, 2.0, 4.0]
    assert saa_action(data, 0.4) == 2.0
    assert saa_action(data, 0.3) == 2.0
    assert saa_action(data, 0.1) == 1.0
    assert saa_action(data, 0.99) == 5.0
    with pytest.raises(ValidationError):
        saa_action([], 0.5)


@given(data=samples, q=quantiles)
def test_saa_minimizes_empirical_loss(data, q):
    a_hat = saa_action(data, q)
    best = empirical_loss(data, a_hat, q)
    candidates = np.array(sorted(set(data)) + [0.0, 50.0, 100.0])
    assert np.all(best <= empirical_loss(data, candidates, q) + 1e-9)


@given(data=st.lists(samples, min_size=1, max_size=5), q=quantiles)
def test_saa_actions_matches_rows(data, q):
    width = min(len(row) for row in data)
    assume(width > 0)
    matrix = np.array([row[:width] for row in data])
    expected = [saa_action(row, q) for row in matrix]
    assert np.array_equal(saa_actions(matrix, q), expected)


def test_binomial_tails():
    assert binomial_cdf_below(10, 0.55, 0.4) == pytest.approx(TAIL_10, rel=1e-10)
    assert TAIL_10 == pytest.approx(0.102, abs=1e-5)
    assert binomial_cdf_below(1, 0.55, 0.4) == pytest.approx(0.45)
    p = np.linspace(0.0, 1.0, 11)
    assert np.allclose(binomial_cdf_below(25, p, 0.3) + binomial_sf_at(25, p, 0.3), 1.0)
    with pytest.raises(ValidationError):
        binomial_cdf_below(0, 0.5, 0.5)


def test_exact_expected_regret_bernoulli(easy_bernoulli):
    assert exact_expected_regret(easy_bernoulli, 1) == pytest.approx(0.0675, rel=1e-12)
    # a_hat = 1 exactly when at most 3 of 10 samples are zero
    assert exact_expected_regret(easy_bernoulli, 10) == pytest.approx(0.15 * TAIL_10, rel=1e-7)


def test_exact_expected_regret_uniform_single_sample(uniform_half):
    # a_hat = Z, regret (Z - 1/2)^2 / 2
    assert exact_expected_regret(uniform_half, 1) == pytest.approx(1.0 / 24.0, rel=1e-7)
    assert exact_expected_multiplicative_regret(uniform_half, 1) == pytest.approx(1.0 / 3.0, rel=1e-7)


def test_exact_expected_regret_exponential_single_sample():
    inst = NewsvendorInstance(0.5, Exponential(1.0))
    value, budget = expected_regret_with_budget(inst, 1)
    assert value == pytest.approx(0.5 - 0.5 * math.log(2.0), abs=1e-7)
    assert 0.0 <= budget < 1e-8


def test_exact_expected_regret_decreases_with_n(uniform_half):
    values = [exact_expected_regret(uniform_half, n) for n in (1, 10, 100, 1000)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_exact_expected_multiplicative_regret_undefined_for_point_mass():
    assert exact_expected_multiplicative_regret(NewsvendorInstance(0.3, point_mass(2.0)), 5) is None


def test_exact_expected_regret_matches_simulation(easy_bernoulli):
    n, reps = 10, 20_000
    rng = np.random.default_rng(5)
    draws = (rng.random((reps, n)) < 0.45).astype(float)
    regrets = additive_regret(easy_bernoulli, saa_actions(draws, 0.4))
    se = regrets.std(ddof=1) / math.sqrt(reps)
    assert abs(regrets.mean() - exact_expected_regret(easy_bernoulli, n)) <= 3.0 * se


@pytest.mark.parametrize("scale", [0.5, 7.0, 23.0])
def test_rescaling_demand_rescales_additive_regret_only(scale):
    base = NewsvendorInstance(0.6, scaled_bernoulli(0.45))
    scaled = NewsvendorInstance(0.6, scaled_bernoulli(0.45, scale))
    assert optimal_action(scaled) == pytest.approx(scale * optimal_action(base))
    for a in (0.0, 0.3, 1.0):
        assert additive_regret(scaled, scale * a) == pytest.approx(scale * additive_regret(base, a))
        assert multiplicative_regret(scaled, scale * a).multiplicative == pytest.approx(
            multiplicative_regret(base, a).multiplicative
        )
    assert exact_expected_regret(scaled, 10) == pytest.approx(scale * exact_expected_regret(base, 10))
    assert exact_expected_multiplicative_regret(scaled, 10) == pytest.approx(
        exact_expected_multiplicative_regret(base, 10)
    )


@pytest.mark.parametrize("n", [1, 10, 50])
def test_exact_expected_regret_matches_simulation_uniform(uniform_half, n):
    reps = 20_000
    draws = uniform_half.d.sample(derive_seed(9, "uniform", n), reps * n).reshape(reps, n)
    regrets = additive_regret(uniform_half, saa_actions(draws, 0.5))
    se = regrets.std(ddof=1) / math.sqrt(reps)
    assert abs(regrets.mean() - exact_expected_regret(uniform_half, n)) <= 3.0 * se
