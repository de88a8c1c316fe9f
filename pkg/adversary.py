#!/usr/bin/env python3
"""
Hard instance pairs for the regret lower bounds.

Each constructor returns two piecewise CDFs P and Q that are close in
Hellinger distance yet have optimal actions H apart, so no algorithm can
tell them apart from n samples and some instance forces regret at least the
pair's ``regret_floor`` with probability about 1/3. ``adversary_experiment``
measures that frequency for a concrete decision rule.

Usage:
    pair = hard_pair_additive(0.5, beta=0.0, gamma=1.0, n=100)
    outcome = adversary_experiment(saa_algorithm(0.5), pair, n=100, reps=10_000, seed=7)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bounds import lower_additive, lower_continuous, lower_multiplicative, validate_multiplicative_preamble
from clustered import ClusterParams, max_zeta
from dist import PiecewiseCdf
from errors import ValidationError
from newsvendor import NewsvendorInstance, additive_regret, expected_loss, optimal_action, saa_action, saa_actions
from seeding import derive_seed

logger = logging.getLogger(__name__)

MIN_REPS = 1000
OUTCOME_COLUMNS = [
    "construction", "q", "beta", "gamma", "zeta", "tau", "n", "reps",
    "threshold", "freq_P", "freq_Q", "tv_bound", "h2",
]


@dataclass(frozen=True)
class HardPair:
    P: PiecewiseCdf
    Q: PiecewiseCdf
    a_star_P: float
    a_star_Q: float
    C: float
    H: float
    regret_floor: float
    split_point: float
    construction: str
    q: float
    params: ClusterParams
    n: int
    eta: float | None = None

    @property
    def multiplicative(self) -> bool:
        return self.construction == "multiplicative"

    def instances(self) -> tuple[NewsvendorInstance, NewsvendorInstance]:
        return NewsvendorInstance(self.q, self.P), NewsvendorInstance(self.q, self.Q)


@dataclass(frozen=True)
class AdversaryOutcome:
    freq_P: float
    freq_Q: float
    reps: int
    threshold: float

    @property
    def max_freq(self) -> float:
        return max(self.freq_P, self.freq_Q)


def _check_common(q: float, gamma: float, n: int) -> None:
    if not 0.0 < q < 1.0:
        raise ValidationError(f"q must lie in (0, 1), got {q}")
    if not (0.0 < gamma < math.inf):
        raise ValidationError(f"gamma must be positive and finite, got {gamma}")
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n}")


# =============================================================================
# Constructions
# =============================================================================


def hard_pair_additive(q: float, beta: float, gamma: float, n: int, zeta: float | None = None) -> HardPair:
    """P ramps from q to q + C/sqrt(n) on [0, H); Q is P shifted down by C/sqrt(n)."""
    _check_common(q, gamma, n)
    if not beta >= 0.0:
        raise ValidationError(f"beta must lie in [0, inf], got {beta}")
    c = q * (1.0 - q) / 3.0
    step = c / math.sqrt(n)
    exponent = 1.0 / (beta + 1.0) if math.isfinite(beta) else 0.0
    h = step**exponent / max(gamma, 1.0)
    params = ClusterParams(beta, gamma, zeta if zeta is not None else max_zeta(q, beta, gamma))

    p_dist = PiecewiseCdf([(0.0, 0.0, q), (h, q + step, 1.0)])
    q_dist = PiecewiseCdf([(0.0, 0.0, q - step), (h, q, 1.0)])
    return HardPair(
        P=p_dist,
        Q=q_dist,
        a_star_P=0.0,
        a_star_Q=h,
        C=c,
        H=h,
        regret_floor=lower_additive(q, beta, gamma, n),
        split_point=0.5 * h,
        construction="additive",
        q=q,
        params=params,
        n=int(n),
    )


def hard_pair_multiplicative(q: float, beta: float, gamma: float, zeta: float, tau: float, n: int) -> HardPair:
    """Four-piece CDFs on [0, 4 zeta + H] with plateaus at tau and 1 - tau around the ramp."""
    _check_common(q, gamma, n)
    params = ClusterParams(beta, gamma, zeta, tau)
    validate_multiplicative_preamble(q, params)
    c = (q - tau) * (1.0 - q - tau) / 3.0
    step = c / math.sqrt(n)
    h = step**params.exponent / gamma
    z2, z3, z4 = 2.0 * zeta, 2.0 * zeta + h, 4.0 * zeta + h

    p_dist = PiecewiseCdf([(0.0, 0.0, tau), (z2, tau, q), (z3, q + step, 1.0 - tau), (z4, 1.0 - tau, 1.0)])
    q_dist = PiecewiseCdf([(0.0, 0.0, tau), (z2, tau, q - step), (z3, q, 1.0 - tau), (z4, 1.0 - tau, 1.0)])
    return HardPair(
        P=p_dist,
        Q=q_dist,
        a_star_P=z2,
        a_star_Q=z3,
        C=c,
        H=h,
        regret_floor=lower_multiplicative(q, params, n),
        split_point=z2 + 0.5 * h,
        construction="multiplicative",
        q=q,
        params=params,
        n=int(n),
    )


def continuous_eta_cap(q: float, gamma: float, n: int) -> float:
    step = q * (1.0 - q) / (3.0 * math.sqrt(n))
    return min((min(q, 1.0 - q) - step) / gamma, q / 3.0)


def hard_pair_continuous(q: float, gamma: float, n: int, eta: float | None = None) -> HardPair:
    """Continuous pair with density at least gamma on [0, H + 2 eta]."""
    _check_common(q, gamma, n)
    cap = continuous_eta_cap(q, gamma, n)
    eta = cap if eta is None else float(eta)
    if not 0.0 < eta <= cap + 1e-12:
        raise ValidationError(f"eta={eta:.6g} must lie in (0, {cap:.6g}]")
    c = q * (1.0 - q) / 3.0
    step = c / math.sqrt(n)
    h = step / max(gamma, 1.0)
    params = ClusterParams(0.0, gamma, max_zeta(q, 0.0, gamma))

    p_dist = PiecewiseCdf([(0.0, 0.0, 0.0), (eta, q, q), (h + eta, q + step, q + step), (h + 2.0 * eta, 1.0, 1.0)])
    q_dist = PiecewiseCdf([(0.0, 0.0, 0.0), (eta, q - step, q - step), (h + eta, q, q), (h + 2.0 * eta, 1.0, 1.0)])
    return HardPair(
        P=p_dist,
        Q=q_dist,
        a_star_P=eta,
        a_star_Q=h + eta,
        C=c,
        H=h,
        regret_floor=lower_continuous(q, gamma, n),
        split_point=eta + 0.5 * h,
        construction="continuous",
        q=q,
        params=params,
        n=int(n),
        eta=eta,
    )


def min_slope(pair: HardPair) -> float:
    """Smallest density of either distribution on its support."""
    return float(min(pair.P.slopes().min(), pair.Q.slopes().min()))


# =============================================================================
# Distances
# =============================================================================


def hellinger_squared(pair: HardPair) -> float:
    """H^2(P, Q) = 1/2 sum over atoms and affine pieces of (sqrt(p) - sqrt(q))^2."""
    P, Q = pair.P, pair.Q
    knots = np.union1d(P.breakpoints(), Q.breakpoints())
    atoms_p = P.cdf(knots) - P.cdf_left(knots)
    atoms_q = Q.cdf(knots) - Q.cdf_left(knots)
    total = float(np.sum((np.sqrt(atoms_p) - np.sqrt(atoms_q)) ** 2))

    a, b = knots[:-1], knots[1:]
    width = b - a
    dens_p = np.maximum(P.cdf_left(b) - P.cdf(a), 0.0) / width
    dens_q = np.maximum(Q.cdf_left(b) - Q.cdf(a), 0.0) / width
    total += float(np.sum((np.sqrt(dens_p) - np.sqrt(dens_q)) ** 2 * width))
    return 0.5 * total


def hellinger_bound(pair: HardPair) -> float:
    """The closed-form upper bound on H^2 that each construction is designed around."""
    q, c, n = pair.q, pair.C, pair.n
    if pair.multiplicative:
        tau = pair.params.tau
        return 0.5 * (c**2 / ((q - tau) * n) + c**2 / ((1.0 - q - tau) * n))
    return c**2 / (2.0 * n * q * (1.0 - q))


def tv_upper_bound(h2: float, n: int, tight: bool = False) -> float:
    """Bound on TV(P^n, Q^n) from the single-sample Hellinger distance."""
    if not -1e-15 <= h2 <= 1.0:
        raise ValidationError(f"h2 must lie in [0, 1], got {h2}")
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n}")
    h2 = max(h2, 0.0)
    if not tight:
        return min(1.0, math.sqrt(2.0 * n * h2))
    # exact product Hellinger, then TV <= sqrt(2 h (1 - h/2))
    hn = -math.expm1(n * math.log1p(-h2)) if h2 < 1.0 else 1.0
    return min(1.0, math.sqrt(2.0 * hn * (1.0 - 0.5 * hn)))


def two_point_probability(tv: float) -> float:
    """Some instance of the pair sees the bad event with at least this probability."""
    return 0.5 * (1.0 - tv)


# =============================================================================
# Experiment
# =============================================================================


def saa_algorithm(q: float) -> Callable:
    def decide(samples):
        return saa_action(samples, q)

    decide.batch = lambda matrix: saa_actions(matrix, q)
    return decide


def constant_algorithm(a: float) -> Callable:
    def decide(samples):
        return a

    decide.batch = lambda matrix: np.full(len(matrix), float(a))
    return decide


def _decisions(algorithm: Callable, samples: np.ndarray) -> np.ndarray:
    batch = getattr(algorithm, "batch", None)
    if batch is not None:
        return np.asarray(batch(samples), dtype=float)
    return np.array([algorithm(row) for row in samples], dtype=float)


def adversary_experiment(algorithm: Callable, pair: HardPair, n: int, reps: int, seed: int) -> AdversaryOutcome:
    """Frequency, under P and under Q, with which ``algorithm`` pays at least the pair's floor."""
    if reps < MIN_REPS:
        raise ValidationError(f"reps must be at least {MIN_REPS}, got {reps}")
    threshold = pair.regret_floor
    freqs = {}
    for label, d in (("P", pair.P), ("Q", pair.Q)):
        inst = NewsvendorInstance(pair.q, d)
        rng_seed = derive_seed(seed, "adversary", pair.construction, pair.q, pair.params.beta, label, int(n))
        samples = d.sample(rng_seed, reps * n).reshape(reps, n)
        regrets = additive_regret(inst, _decisions(algorithm, samples))
        if pair.multiplicative:
            regrets = regrets / expected_loss(inst, optimal_action(inst))
        hits = int(np.count_nonzero(regrets >= threshold * (1.0 - 1e-12)))
        freqs[label] = hits / reps
        logger.info(f"{pair.construction} pair under {label}: {hits}/{reps} runs at or above {threshold:.4g}")
    return AdversaryOutcome(freq_P=freqs["P"], freq_Q=freqs["Q"], reps=int(reps), threshold=threshold)


def outcome_row(pair: HardPair, outcome: AdversaryOutcome) -> dict:
    h2 = hellinger_squared(pair)
    return {
        "construction": pair.construction,
        "q": pair.q,
        "beta": pair.params.beta,
        "gamma": pair.params.gamma,
        "zeta": pair.params.zeta,
        "tau": pair.params.tau,
        "n": pair.n,
        "reps": outcome.reps,
        "threshold": outcome.threshold,
        "freq_P": outcome.freq_P,
        "freq_Q": outcome.freq_Q,
        "tv_bound": tv_upper_bound(h2, pair.n),
        "h2": h2,
    }
