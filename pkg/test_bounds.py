import math

import numpy as np
import pytest

from bounds import (
    BOUND_COLUMNS,
    BoundQuery,
    bound_table,
    evaluate_all,
    exp_add_bound,
    exp_mult_bound,
    exp_mult_exact_worstcase,
    hp_add_bound,
    hp_mult_bound,
    hp_mult_sample_size,
    lower_additive,
    lower_bounds,
    lower_continuous,
    rate_exponent,
    worstcase_witness,
)
from clustered import ClusterParams
from dist import Uniform, scaled_bernoulli
from errors import ValidationError
from newsvendor import NewsvendorInstance, exact_expected_multiplicative_regret, exact_expected_regret

LOG40 = math.log(40.0)


def query(q=0.5, beta=0.0, gamma=1.0, zeta=0.5, tau=None, n=1000, delta=0.05, mean_cap=None):
    return BoundQuery(q=q, params=ClusterParams(beta, gamma, zeta, tau), n=n, delta=delta, mean_cap=mean_cap)


def test_rate_exponent():
    assert rate_exponent(0.0) == 1.0
    assert rate_exponent(1.0) == 0.75
    assert rate_exponent(4.0) == pytest.approx(0.6)
    assert rate_exponent(math.inf) == 0.5
    assert rate_exponent(1e6) == pytest.approx(0.5, abs=1e-5)


def test_hp_add_finite_beta():
    res = hp_add_bound(query())
    assert res.value == pytest.approx(LOG40 / 2000.0)
    assert res.value == pytest.approx(1.8445e-3, rel=1e-4)
    # strict threshold n > log(40) / (2 (gamma zeta)^2)
    assert res.min_n == math.floor(LOG40 / 0.5) + 1 == 8
    assert res.applicable
    assert res.theorem == "hp_additive"


def test_hp_add_below_threshold_still_reports_value():
    res = hp_add_bound(query(zeta=0.05, n=100))
    assert not res.applicable
    assert res.value > 0.0


def test_hp_add_infinite_beta():
    res = hp_add_bound(query(beta=math.inf))
    assert res.value == pytest.approx(4.0 * math.sqrt(LOG40 / 2000.0))
    assert res.value == pytest.approx(0.1717878, rel=1e-6)
    assert res.min_n == math.ceil(2.0 * LOG40 / 0.25)


def test_hp_add_needs_delta():
    with pytest.raises(ValidationError):
        hp_add_bound(query(delta=None))


def test_hp_mult_bounds():
    assert hp_mult_bound(query(zeta=0.25, tau=0.2)).value == pytest.approx(0.0368888, rel=1e-5)
    assert hp_mult_bound(query(beta=math.inf)).value == pytest.approx(0.187931, rel=1e-5)
    with pytest.raises(ValidationError, match="tau"):
        hp_mult_bound(query(zeta=0.25))


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.02])
def test_hp_mult_sample_size_inverts_the_bound(eps):
    n_star = hp_mult_sample_size(0.3, 0.05, eps)
    above = hp_mult_bound(query(q=0.3, beta=math.inf, n=math.ceil(n_star)))
    assert above.value <= eps * (1.0 + 1e-9)
    if math.floor(n_star) < n_star:
        below = hp_mult_bound(query(q=0.3, beta=math.inf, n=math.floor(n_star)))
        assert below.value > eps


def test_exp_add_bounds():
    assert exp_add_bound(query(beta=math.inf, n=100, mean_cap=1.0)).value == pytest.approx(0.521306, rel=1e-6)
    # 2 (1 + e^-1/2) / 400 + 1.5 / 50
    assert exp_add_bound(query(n=100)).value == pytest.approx((1.0 + math.exp(-0.5)) / 200.0 + 0.03, rel=1e-12)
    assert exp_add_bound(query(n=100)).value == pytest.approx(0.0380327, rel=1e-5)
    with pytest.raises(ValidationError, match="mean cap"):
        exp_add_bound(query(beta=math.inf, n=100))


def test_exp_add_scales_with_mean():
    base = exp_add_bound(query(beta=math.inf, n=100, mean_cap=1.0)).value
    assert exp_add_bound(query(beta=math.inf, n=100, mean_cap=14.0)).value == pytest.approx(14.0 * base)
    # a cap below 1 needs no rescaling
    assert exp_add_bound(query(beta=math.inf, n=100, mean_cap=0.5)).value == pytest.approx(base)


def test_exp_mult_finite_beta():
    res = exp_mult_bound(query(zeta=0.25, tau=0.2, n=400))
    assert res.value == pytest.approx(0.040163, rel=1e-5)


def test_worstcase_single_sample_tends_to_one():
    value = exp_mult_exact_worstcase(0.5, 1)
    assert value <= 1.0
    assert value == pytest.approx(1.0, abs=1e-3)
    assert exp_mult_bound(query(beta=math.inf, n=1)).value == value


def test_worstcase_grid_must_be_large_enough():
    with pytest.raises(ValidationError):
        worstcase_witness(0.5, 5, grid=50)


def test_worstcase_refinement_is_monotone():
    assert exp_mult_exact_worstcase(0.4, 7, grid=400) >= exp_mult_exact_worstcase(0.4, 7, grid=200) - 1e-6


def test_bernoulli_single_sample_regret():
    # Pr[Z = 0] = 0.3 < q: ratio (0.2 / 0.15) times Pr[Bin(1, 0.3) >= 0.5]
    inst = NewsvendorInstance(0.5, scaled_bernoulli(0.7))
    assert exact_expected_multiplicative_regret(inst, 1) == pytest.approx(0.4)


@pytest.mark.parametrize("n", [1, 5, 20])
def test_worstcase_dominates_bernoulli_instances(n):
    worst = exp_mult_exact_worstcase(0.5, n)
    for f in np.linspace(0.05, 0.95, 19):
        inst = NewsvendorInstance(0.5, scaled_bernoulli(1.0 - f))
        assert exact_expected_multiplicative_regret(inst, n) <= worst + 1e-9


def test_worstcase_witness_is_reproduced_exactly():
    w = worstcase_witness(0.5, 10)
    inst = NewsvendorInstance(0.5, w.distribution())
    assert w.branch in ("under", "over")
    assert exact_expected_multiplicative_regret(inst, 10) == pytest.approx(w.value, rel=1e-9)


def test_lower_bound_values():
    assert lower_additive(0.5, 0.0, 1.0, 100) == pytest.approx(8.6806e-6, rel=1e-4)
    assert lower_continuous(0.5, 1.0, 100) == pytest.approx(8.6806e-6, rel=1e-4)
    lows = lower_bounds(query(n=100))
    assert lows.additive.expected == pytest.approx(lows.additive.value / 3.0)
    assert lows.multiplicative is None
    assert lows.continuous.value == pytest.approx(lower_continuous(0.5, 1.0, 100))


def test_lower_multiplicative_needs_valid_tau():
    lows = lower_bounds(query(zeta=0.1, tau=0.2, n=9))
    assert lows.multiplicative.value > 0.0
    assert lows.continuous is not None
    with pytest.raises(ValidationError):
        lower_bounds(query(zeta=0.1, tau=0.45, n=9))
    with pytest.raises(ValidationError):
        lower_bounds(query(zeta=0.5, tau=0.1, n=9))


@pytest.mark.parametrize("beta", [0.0, 1.0, 4.0, math.inf])
def test_bounds_decay_at_their_rate(beta):
    n = 10**8
    target = -rate_exponent(beta) * math.log(4.0)
    evaluators = [hp_add_bound]
    if math.isfinite(beta):
        evaluators += [lambda qr: hp_mult_bound(BoundQuery(qr.q, ClusterParams(beta, 1.0, 0.25, 0.2), qr.n, qr.delta))]
    evaluators += [exp_add_bound]
    for evaluate in evaluators:
        v1 = evaluate(query(beta=beta, n=n, mean_cap=1.0)).value
        v4 = evaluate(query(beta=beta, n=4 * n, mean_cap=1.0)).value
        assert math.log(v4) - math.log(v1) == pytest.approx(target, rel=0.05)
    if math.isfinite(beta):
        slope = math.log(lower_additive(0.5, beta, 1.0, 4 * n)) - math.log(lower_additive(0.5, beta, 1.0, n))
        assert slope == pytest.approx(-((beta + 2.0) / (beta + 1.0)) * math.log(4.0) / 2.0)


@pytest.mark.parametrize("n", [1, 5, 25, 100, 1000])
def test_exact_expected_regret_below_expectation_bound(n):
    inst = NewsvendorInstance(0.5, Uniform())
    assert exact_expected_regret(inst, n) < exp_add_bound(query(n=n)).value


def test_bound_table_schema():
    table = bound_table([query(zeta=0.25, tau=0.2, n=400), query(beta=math.inf, n=400, mean_cap=2.0)])
    assert list(table.columns) == BOUND_COLUMNS
    assert set(table["theorem"]) >= {"hp_additive", "hp_multiplicative", "expected_additive", "lower_additive"}
    assert table["applicable"].dtype == bool


def test_evaluate_all_drops_invalid_multiplicative_lower_bound(caplog):
    results = evaluate_all(query(zeta=0.1, tau=0.45, n=50))
    names = [r.theorem for r in results]
    assert "lower_multiplicative" not in names
    assert "lower_additive" in names
    assert "multiplicative lower bound skipped" in caplog.text
