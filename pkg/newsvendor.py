#!/usr/bin/env python3
"""
Newsvendor loss and regret.

    loss            l(a, Z) = q (Z - a)^+ + (1 - q) (a - Z)^+
    expected loss   L(a) = int_0^a (1-q) F + int_a^inf q (1 - F) = G(a) - q a + q mu
    optimal action  a* = inf{a : F(a) >= q}
    SAA action      the ceil(n q)-th order statistic of the sample

G is the integrated CDF each distribution provides in closed form, so loss
and additive regret are exact for every family. The expected regret of SAA
is the integral of (q - F) Pr[F_hat >= q] left of a* plus (F - q) Pr[F_hat < q]
right of a*, with n F_hat(z) ~ Bin(n, F(z)).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from dist import Distribution
from errors import DomainError, ValidationError

logger = logging.getLogger(__name__)

EXPECTED_REGRET_TOL = 1e-8
TAIL_LEVEL = 1.0 - 1e-9
# multiples of 1/sqrt(n) around q where the expected-regret integrand changes fastest
_REFINE_STEPS = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)


@dataclass(frozen=True)
class NewsvendorInstance:
    q: float
    d: Distribution

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValidationError(f"Critical quantile q must lie in (0, 1), got {self.q}")
        mu = self.d.mean()
        if not (math.isfinite(mu) and mu >= 0.0):
            raise ValidationError(f"Demand distribution must have a finite nonnegative mean, got {mu}")


@dataclass(frozen=True)
class RegretValue:
    additive: float
    multiplicative: float | None
    optimal_loss: float

    @property
    def defined(self) -> bool:
        return self.multiplicative is not None


def _check_q(q: float) -> None:
    if not 0.0 < q < 1.0:
        raise ValidationError(f"Critical quantile q must lie in (0, 1), got {q}")


def _check_action(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if np.any(~(arr >= 0.0)):
        raise DomainError(f"Decision must be nonnegative, got {arr[~(arr >= 0.0)].flat[0]}")
    return arr


def _scalar(result, like):
    return float(result) if np.ndim(like) == 0 else result


def order_index(n: int, q: float) -> int:
    """k = ceil(n q), the rank of the SAA order statistic (1-based)."""
    # rounding guards against products like 3 * 0.1 = 0.30000000000000004
    return min(max(math.ceil(round(n * q, 9)), 1), n)


# =============================================================================
# Loss and decisions
# =============================================================================


def pinball_loss(a, z, q: float):
    """l(a, z) for scalars or broadcastable arrays."""
    a = np.asarray(a, dtype=float)
    z = np.asarray(z, dtype=float)
    out = q * np.maximum(z - a, 0.0) + (1.0 - q) * np.maximum(a - z, 0.0)
    return float(out) if out.ndim == 0 else out


def empirical_loss(samples, a, q: float):
    """(1/n) sum_i l(a, Z_i), the objective SAA minimizes."""
    z = np.asarray(samples, dtype=float).ravel()
    a_arr = np.asarray(a, dtype=float)
    out = np.mean(pinball_loss(a_arr[..., None], z, q), axis=-1)
    return _scalar(out, a)


def expected_loss(inst: NewsvendorInstance, a):
    a_arr = _check_action(a)
    q, d = inst.q, inst.d
    out = d.integrated_cdf(a_arr) - q * a_arr + q * d.mean()
    return _scalar(np.maximum(out, 0.0), a)


def optimal_action(inst: NewsvendorInstance) -> float:
    return float(inst.d.quantile(inst.q))


def saa_action(samples, q: float) -> float:
    """inf{a : F_hat(a) >= q}, i.e. the ceil(n q)-th smallest sample."""
    _check_q(q)
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise ValidationError("SAA needs at least one sample")
    k = order_index(arr.size, q)
    return float(np.partition(arr, k - 1)[k - 1])


def saa_actions(sample_matrix, q: float) -> np.ndarray:
    """Row-wise SAA decisions for a (reps, n) sample matrix."""
    _check_q(q)
    arr = np.atleast_2d(np.asarray(sample_matrix, dtype=float))
    if arr.shape[1] == 0:
        raise ValidationError("SAA needs at least one sample per row")
    k = order_index(arr.shape[1], q)
    return np.partition(arr, k - 1, axis=1)[:, k - 1]


# =============================================================================
# Regret
# =============================================================================


def additive_regret(inst: NewsvendorInstance, a):
    """L(a) - L(a*) = int_a^{a*} (q - F(z)) dz."""
    a_arr = _check_action(a)
    a_star = optimal_action(inst)
    g = inst.d.integrated_cdf
    out = (g(a_arr) - g(a_star)) - inst.q * (a_arr - a_star)
    return _scalar(np.maximum(out, 0.0), a)


def multiplicative_regret(inst: NewsvendorInstance, a) -> RegretValue:
    add = additive_regret(inst, a)
    opt = expected_loss(inst, optimal_action(inst))
    if opt <= 1e-14 * max(1.0, inst.d.mean()):
        return RegretValue(additive=add, multiplicative=None, optimal_loss=0.0)
    return RegretValue(additive=add, multiplicative=add / opt, optimal_loss=opt)


def binomial_cdf_below(n: int, p, q: float):
    """Pr[Bin(n, p) / n < q] = Pr[Bin(n, p) <= ceil(n q) - 1]."""
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n}")
    _check_q(q)
    k = order_index(int(n), q)
    out = stats.binom.cdf(k - 1, int(n), np.clip(np.asarray(p, dtype=float), 0.0, 1.0))
    return _scalar(out, p)


def binomial_sf_at(n: int, p, q: float):
    """Pr[Bin(n, p) / n >= q], computed directly rather than as 1 - cdf."""
    k = order_index(int(n), q)
    out = stats.binom.sf(k - 1, int(n), np.clip(np.asarray(p, dtype=float), 0.0, 1.0))
    return _scalar(out, p)


def _refinement_points(inst: NewsvendorInstance, n: int, lo: float, hi: float) -> list[float]:
    levels = []
    for c in _REFINE_STEPS:
        for p in (inst.q - c / math.sqrt(n), inst.q + c / math.sqrt(n)):
            if 0.0 < p < 1.0:
                levels.append(p)
    pts = {float(inst.d.quantile(p)) for p in levels}
    return sorted(x for x in pts if lo < x < hi and math.isfinite(x))


def _window_integral(inst: NewsvendorInstance, n: int, lo: float, hi: float, left_of_optimum: bool) -> float:
    q, d = inst.q, inst.d
    if left_of_optimum:
        def weight(f):
            return max(q - f, 0.0) * binomial_sf_at(n, f, q)
    else:
        def weight(f):
            return max(f - q, 0.0) * binomial_cdf_below(n, f, q)

    total = 0.0
    for seg in d.segments(lo, hi):
        if seg.value is not None:
            # F constant on the piece, so the integrand is too
            total += (seg.hi - seg.lo) * weight(seg.value)
            continue
        points = _refinement_points(inst, n, seg.lo, seg.hi)
        value, abserr = integrate.quad(
            lambda z: weight(float(d.cdf(z))),
            seg.lo,
            seg.hi,
            points=points or None,
            epsabs=EXPECTED_REGRET_TOL,
            epsrel=1e-10,
            limit=200,
        )
        logger.debug(f"quad on [{seg.lo:.6g}, {seg.hi:.6g}]: {value:.6g} +/- {abserr:.2g}")
        total += value
    return total


def expected_regret_with_budget(inst: NewsvendorInstance, n: int) -> tuple[float, float]:
    """E[L(a_hat)] - L(a*) for SAA on n samples, plus the truncated-tail error budget."""
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n}")
    n = int(n)
    d = inst.d
    a_star = optimal_action(inst)
    hi_support = d.support[1]
    upper = hi_support if math.isfinite(hi_support) else float(d.quantile(TAIL_LEVEL))
    upper = max(upper, a_star)

    left = _window_integral(inst, n, 0.0, a_star, left_of_optimum=True)
    right = _window_integral(inst, n, a_star, upper, left_of_optimum=False)
    # beyond the cutoff the integrand is at most 1 - F
    budget = max(d.mean() - upper + float(d.integrated_cdf(upper)), 0.0)
    if budget > 0.0:
        logger.debug(f"expected regret tail budget beyond {upper:.6g}: {budget:.3g}")
    return left + right, budget


def exact_expected_regret(inst: NewsvendorInstance, n: int) -> float:
    return expected_regret_with_budget(inst, n)[0]


def exact_expected_multiplicative_regret(inst: NewsvendorInstance, n: int) -> float | None:
    """(E[L(a_hat)] - L(a*)) / L(a*); None when L(a*) = 0."""
    opt = expected_loss(inst, optimal_action(inst))
    if opt <= 1e-14 * max(1.0, inst.d.mean()):
        return None
    return exact_expected_regret(inst, n) / opt
