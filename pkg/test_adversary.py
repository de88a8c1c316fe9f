import math

import pytest

from adversary import (
    OUTCOME_COLUMNS,
    adversary_experiment,
    constant_algorithm,
    continuous_eta_cap,
    hard_pair_additive,
    hard_pair_continuous,
    hard_pair_multiplicative,
    hellinger_bound,
    hellinger_squared,
    min_slope,
    outcome_row,
    saa_algorithm,
    tv_upper_bound,
    two_point_probability,
)
from clustered import ClusterParams, check_tau, verify_clustered
from errors import ValidationError
from newsvendor import additive_regret, optimal_action


@pytest.fixture
def additive_pair():
    return hard_pair_additive(0.5, beta=0.0, gamma=1.0, n=9)


@pytest.fixture
def multiplicative_pair():
    return hard_pair_multiplicative(0.5, beta=0.0, gamma=1.0, zeta=0.1, tau=0.2, n=9)


def test_additive_pair_shape(additive_pair):
    pair = additive_pair
    assert pair.C == pytest.approx(1.0 / 12.0)
    assert pair.H == pytest.approx(1.0 / 36.0)
    assert pair.split_point == pytest.approx(1.0 / 72.0)
    assert pair.regret_floor == pytest.approx(9.6451e-5, rel=1e-4)
    inst_p, inst_q = pair.instances()
    assert optimal_action(inst_p) == pair.a_star_P == 0.0
    assert optimal_action(inst_q) == pytest.approx(pair.a_star_Q)
    assert pair.P.cdf(0.0) == pytest.approx(0.5)
    assert pair.Q.cdf(0.0) == pytest.approx(0.5 - 1.0 / 36.0)


@pytest.mark.parametrize("beta", [0.0, 1.0])
def test_split_point_costs_exactly_the_floor(beta):
    pair = hard_pair_additive(0.5, beta=beta, gamma=1.0, n=9)
    inst_p, inst_q = pair.instances()
    assert additive_regret(inst_p, pair.split_point) == pytest.approx(pair.regret_floor, rel=1e-9)
    assert additive_regret(inst_q, pair.split_point) == pytest.approx(pair.regret_floor, rel=1e-9)


@pytest.mark.parametrize("beta", [0.0, 1.0])
def test_additive_pair_is_clustered(beta):
    pair = hard_pair_additive(0.5, beta=beta, gamma=1.0, n=9)
    for inst in pair.instances():
        assert verify_clustered(inst, pair.params).holds
    if beta == 0.0:
        assert min_slope(pair) >= 1.0 - 1e-12
    else:
        # ramp slope is (C / sqrt(n))^(beta / (beta + 1))
        assert min_slope(pair) == pytest.approx((pair.C / 3.0) ** (beta / (beta + 1.0)))
    assert pair.P.support[1] <= 1.0


def test_multiplicative_pair_shape(multiplicative_pair):
    pair = multiplicative_pair
    assert pair.C == pytest.approx(0.03)
    assert pair.H == pytest.approx(0.01)
    assert pair.split_point == pytest.approx(0.205)
    assert pair.multiplicative
    inst_p, inst_q = pair.instances()
    assert optimal_action(inst_p) == pytest.approx(0.2)
    assert optimal_action(inst_q) == pytest.approx(0.21)
    for inst in (inst_p, inst_q):
        assert verify_clustered(inst, pair.params).holds
        assert check_tau(inst, pair.params)


def test_multiplicative_pair_rejects_bad_tau():
    with pytest.raises(ValidationError, match="tau"):
        hard_pair_multiplicative(0.5, beta=0.0, gamma=1.0, zeta=0.1, tau=0.45, n=9)


def test_continuous_pair():
    assert continuous_eta_cap(0.5, 1.0, 9) == pytest.approx(1.0 / 6.0)
    pair = hard_pair_continuous(0.5, gamma=1.0, n=9)
    assert pair.eta == pytest.approx(1.0 / 6.0)
    assert pair.P.atoms() == [] and pair.Q.atoms() == []
    assert min_slope(pair) >= 1.0 - 1e-12
    for inst in pair.instances():
        assert verify_clustered(inst, pair.params).holds
    with pytest.raises(ValidationError, match="eta"):
        hard_pair_continuous(0.5, gamma=1.0, n=9, eta=0.2)


def test_constructors_validate_inputs():
    with pytest.raises(ValidationError):
        hard_pair_additive(1.0, beta=0.0, gamma=1.0, n=9)
    with pytest.raises(ValidationError):
        hard_pair_additive(0.5, beta=0.0, gamma=1.0, n=0)
    with pytest.raises(ValidationError):
        hard_pair_continuous(0.5, gamma=0.0, n=9)


def test_hellinger_distances(additive_pair):
    h2 = hellinger_squared(additive_pair)
    assert h2 == pytest.approx(3.9693e-4, rel=1e-4)
    assert h2 <= hellinger_bound(additive_pair)
    assert hellinger_bound(additive_pair) == pytest.approx(1.5432e-3, rel=1e-4)
    # same atoms and chords up to a relabeling of the pieces
    assert hellinger_squared(hard_pair_continuous(0.5, gamma=1.0, n=9)) == pytest.approx(h2, rel=1e-9)


def test_multiplicative_hellinger_within_its_bound(multiplicative_pair):
    assert 0.0 < hellinger_squared(multiplicative_pair) <= hellinger_bound(multiplicative_pair)


def test_tv_bounds(additive_pair):
    h2 = hellinger_squared(additive_pair)
    loose = tv_upper_bound(h2, 9)
    assert loose == pytest.approx(0.084527, rel=1e-4)
    assert tv_upper_bound(h2, 9, tight=True) <= loose
    assert tv_upper_bound(0.0, 9) == 0.0
    assert tv_upper_bound(0.0, 9, tight=True) == 0.0
    assert tv_upper_bound(0.9, 100) == 1.0
    with pytest.raises(ValidationError):
        tv_upper_bound(1.5, 9)
    with pytest.raises(ValidationError):
        tv_upper_bound(0.1, 0)
    assert two_point_probability(loose) == pytest.approx(0.5 * (1.0 - loose))


def test_experiment_needs_enough_reps(additive_pair):
    with pytest.raises(ValidationError, match="reps"):
        adversary_experiment(saa_algorithm(0.5), additive_pair, n=9, reps=999, seed=1)


def test_constant_algorithms_pay_on_one_side_only(additive_pair):
    at_p = adversary_experiment(constant_algorithm(additive_pair.a_star_P), additive_pair, n=9, reps=1000, seed=1)
    assert at_p.freq_P == 0.0
    assert at_p.freq_Q == 1.0
    at_q = adversary_experiment(constant_algorithm(additive_pair.a_star_Q), additive_pair, n=9, reps=1000, seed=1)
    assert at_q.freq_P == 1.0
    assert at_q.freq_Q == 0.0
    assert at_q.max_freq == 1.0


def test_unbatched_algorithm_matches_batched(additive_pair):
    plain = saa_algorithm(0.5)
    del plain.batch
    a = adversary_experiment(plain, additive_pair, n=9, reps=1000, seed=3)
    b = adversary_experiment(saa_algorithm(0.5), additive_pair, n=9, reps=1000, seed=3)
    assert a == b


def test_experiment_is_deterministic(multiplicative_pair):
    a = adversary_experiment(saa_algorithm(0.5), multiplicative_pair, n=9, reps=1000, seed=11)
    b = adversary_experiment(saa_algorithm(0.5), multiplicative_pair, n=9, reps=1000, seed=11)
    assert a == b


def test_outcome_row(additive_pair):
    outcome = adversary_experiment(saa_algorithm(0.5), additive_pair, n=9, reps=1000, seed=2)
    row = outcome_row(additive_pair, outcome)
    assert list(row) == OUTCOME_COLUMNS
    assert row["tau"] is None
    assert row["tv_bound"] == pytest.approx(0.084527, rel=1e-4)


@pytest.mark.slow
@pytest.mark.parametrize("n", [25, 100])
@pytest.mark.parametrize("beta", [0.0, 1.0])
def test_saa_cannot_beat_the_floor(n, beta):
    pair = hard_pair_additive(0.5, beta=beta, gamma=1.0, n=n)
    outcome = adversary_experiment(saa_algorithm(0.5), pair, n=n, reps=10_000, seed=20240501)
    assert outcome.max_freq >= 1.0 / 3.0 - 0.02
    assert outcome.max_freq >= two_point_probability(tv_upper_bound(hellinger_squared(pair), n)) - 0.02


@pytest.mark.slow
def test_continuous_pair_defeats_saa():
    pair = hard_pair_continuous(0.4, gamma=1.0, n=50)
    outcome = adversary_experiment(saa_algorithm(0.4), pair, n=50, reps=10_000, seed=5)
    assert outcome.max_freq >= 1.0 / 3.0 - 0.02
    assert math.isfinite(outcome.threshold)


def test_params_carry_the_declared_zeta():
    pair = hard_pair_additive(0.5, beta=0.0, gamma=1.0, n=9, zeta=0.3)
    assert pair.params == ClusterParams(0.0, 1.0, 0.3)
