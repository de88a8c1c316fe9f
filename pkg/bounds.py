#!/usr/bin/env python3
"""
Closed-form regret bounds for SAA on clustered distributions.

Upper bounds (high probability and in expectation, additive and
multiplicative) carry the smallest n at which they apply; lower bounds hold
for every n. Bounds that assume a demand mean of at most 1 are reported for
the instance rescaled by ``mean_cap`` and scaled back.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from clustered import ClusterParams, cluster_mass, max_tau, max_zeta
from dist import ScaledBernoulli
from errors import ValidationError
from newsvendor import binomial_cdf_below, binomial_sf_at

logger = logging.getLogger(__name__)

INV_SQRT_E = math.exp(-0.5)
MAX_N = 10**18
WORSTCASE_GRID = 200
WORSTCASE_TOL = 1e-6
WORSTCASE_MAX_DOUBLINGS = 10

BOUND_COLUMNS = ["theorem", "q", "beta", "gamma", "zeta", "tau", "delta", "n", "value", "min_n", "applicable"]


@dataclass(frozen=True)
class BoundQuery:
    q: float
    params: ClusterParams
    n: int
    delta: float | None = None
    mean_cap: float | None = None

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValidationError(f"q must lie in (0, 1), got {self.q}")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n}")
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise ValidationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.mean_cap is not None and not self.mean_cap > 0.0:
            raise ValidationError(f"mean_cap must be positive, got {self.mean_cap}")

    @property
    def log_term(self) -> float:
        if self.delta is None:
            raise ValidationError("This bound needs delta")
        return math.log(2.0 / self.delta)


@dataclass(frozen=True)
class BoundResult:
    value: float
    min_n: int
    applicable: bool
    theorem: str
    expected: float | None = None
    note: str = ""


@dataclass(frozen=True)
class LowerBounds:
    additive: BoundResult
    multiplicative: BoundResult | None
    continuous: BoundResult | None


@dataclass(frozen=True)
class WorstCaseWitness:
    value: float
    F: float
    branch: str
    grid: int

    def distribution(self) -> ScaledBernoulli:
        """The Bernoulli on {0, 1} with Pr[Z = 0] = F."""
        return ScaledBernoulli(1.0 - self.F, 1.0)


def rate_exponent(beta: float) -> float:
    """(beta + 2) / (2 beta + 2), the rate in n; 1/2 at beta = inf."""
    return (beta + 2.0) / (2.0 * beta + 2.0) if math.isfinite(beta) else 0.5


def _strict_min_n(threshold: float) -> int:
    """Smallest integer n with n > threshold."""
    if not math.isfinite(threshold) or threshold >= MAX_N:
        return MAX_N
    return max(math.floor(threshold) + 1, 1)


def _result(value: float, min_n: int, n: int, theorem: str, note: str = "", expected: float | None = None) -> BoundResult:
    return BoundResult(value=float(value), min_n=int(min_n), applicable=n >= min_n, theorem=theorem, expected=expected, note=note)


def _mean_scale(qr: BoundQuery) -> float:
    return max(qr.mean_cap, 1.0) if qr.mean_cap is not None else 1.0


def _finite_threshold(qr: BoundQuery) -> int:
    p = qr.params
    return _strict_min_n(qr.log_term / (2.0 * (p.gamma * p.zeta) ** (2.0 * p.beta + 2.0)))


# =============================================================================
# Upper bounds
# =============================================================================


def hp_add_bound(qr: BoundQuery) -> BoundResult:
    """Additive regret bound holding with probability 1 - delta."""
    p, n, log_term = qr.params, qr.n, qr.log_term
    if p.finite:
        value = (log_term / (2.0 * n)) ** rate_exponent(p.beta) / p.gamma
        return _result(value, _finite_threshold(qr), n, "hp_additive")
    scale = _mean_scale(qr)
    value = scale * (2.0 / (1.0 - qr.q)) * math.sqrt(log_term / (2.0 * n))
    min_n = math.ceil(2.0 * log_term / (1.0 - qr.q) ** 2)
    note = f"rescaled by mean {scale:g}" if qr.mean_cap is not None else "assumes mean <= 1"
    return _result(value, min_n, n, "hp_additive", note)


def hp_mult_bound(qr: BoundQuery) -> BoundResult:
    """Multiplicative regret bound holding with probability 1 - delta."""
    p, n, log_term = qr.params, qr.n, qr.log_term
    if p.finite:
        if p.tau is None:
            raise ValidationError("The finite-beta multiplicative bound needs tau")
        value = (log_term / (2.0 * n)) ** rate_exponent(p.beta) / (p.gamma * p.zeta * p.tau)
        return _result(value, _finite_threshold(qr), n, "hp_multiplicative")
    m = min(qr.q, 1.0 - qr.q)
    denom = m * math.sqrt(2.0 * n / log_term) - 1.0
    value = 2.0 / denom if denom > 0.0 else math.inf
    return _result(value, _strict_min_n(log_term / (2.0 * m**2)), n, "hp_multiplicative")


def hp_mult_sample_size(q: float, delta: float, eps: float) -> float:
    """Samples needed for the beta = inf multiplicative bound to drop to eps."""
    m = min(q, 1.0 - q)
    return ((2.0 + eps) ** 2 / eps**2) * math.log(2.0 / delta) / (2.0 * m**2)


def exp_add_bound(qr: BoundQuery) -> BoundResult:
    """Expected additive regret bound, valid for every n."""
    p, n, q = qr.params, qr.n, qr.q
    scale = _mean_scale(qr)
    if p.finite:
        # demand / scale is (beta, gamma * scale, zeta / scale)-clustered with mean <= 1
        gamma = p.gamma * scale
        lead = (2.0 / gamma) * (1.0 / (p.beta + 1.0) + INV_SQRT_E) * (1.0 / (2.0 * math.sqrt(n))) ** ((p.beta + 2.0) / (p.beta + 1.0))
        tail = (q + 1.0) / (n * (p.gamma * p.zeta) ** (p.beta + 1.0))
        note = f"rescaled by mean {scale:g}" if qr.mean_cap is not None else "assumes mean <= 1"
        return _result(scale * (lead + tail), 1, n, "expected_additive", note)
    if qr.mean_cap is None:
        raise ValidationError("The beta = inf expected additive bound needs a declared mean cap")
    value = scale * (INV_SQRT_E + 2.0) / ((1.0 - q) * math.sqrt(n))
    return _result(value, 1, n, "expected_additive", f"rescaled by mean {scale:g}")


def exp_mult_bound(qr: BoundQuery, grid: int = WORSTCASE_GRID) -> BoundResult:
    """Expected multiplicative regret bound, valid for every n."""
    p, n, q = qr.params, qr.n, qr.q
    if not p.finite:
        return _result(exp_mult_exact_worstcase(q, n, grid), 1, n, "expected_multiplicative", "exact supremum over Bernoulli instances")
    if p.tau is None:
        raise ValidationError("The finite-beta multiplicative bound needs tau")
    m = min(q, 1.0 - q)
    first = 1.0 / (n * cluster_mass(p) * m)
    second = (2.0 / (p.gamma * p.zeta * p.tau)) * (1.0 / (p.beta + 1.0) + INV_SQRT_E) * (
        1.0 / (2.0 * math.sqrt(n))
    ) ** ((p.beta + 2.0) / (p.beta + 1.0))
    return _result(max(first, second), 1, n, "expected_multiplicative")


# =============================================================================
# beta = inf worst case
# =============================================================================


def _worstcase_grid(q: float, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Nested F-grid: i/size, 2^-j and 1 - 2^-j; doubling ``size`` only adds points."""
    depth = np.arange(1, min(size, 200) + 1, dtype=float)
    pts = np.concatenate([np.arange(1, size) / size, 2.0**-depth, 1.0 - 2.0**-depth, [q]])
    pts = np.unique(pts[(pts > 0.0) & (pts < 1.0)])
    return pts[pts < q], pts[pts >= q]


def _worstcase_on_grid(q: float, n: int, size: int) -> WorstCaseWitness:
    below, above = _worstcase_grid(q, size)
    b1 = (q - below) / ((1.0 - q) * below) * binomial_sf_at(n, below, q)
    b2 = (above - q) / (q * (1.0 - above)) * binomial_cdf_below(n, above, q)
    i1, i2 = int(np.argmax(b1)), int(np.argmax(b2))
    if b1[i1] >= b2[i2]:
        return WorstCaseWitness(float(b1[i1]), float(below[i1]), "under", size)
    return WorstCaseWitness(float(b2[i2]), float(above[i2]), "over", size)


def worstcase_witness(q: float, n: int, grid: int = WORSTCASE_GRID) -> WorstCaseWitness:
    """Grid maximizer of the beta = inf expected multiplicative regret, refined by doubling."""
    if grid < 100:
        raise ValidationError(f"grid must be at least 100, got {grid}")
    if not 0.0 < q < 1.0:
        raise ValidationError(f"q must lie in (0, 1), got {q}")
    best = _worstcase_on_grid(q, n, grid)
    size = grid
    for _ in range(WORSTCASE_MAX_DOUBLINGS):
        size *= 2
        refined = _worstcase_on_grid(q, n, size)
        done = abs(refined.value - best.value) < WORSTCASE_TOL
        best = refined if refined.value >= best.value else best
        if done:
            break
    else:
        logger.warning(f"worst-case grid still moving after {WORSTCASE_MAX_DOUBLINGS} doublings (q={q}, n={n})")
    logger.debug(f"worst case q={q} n={n}: {best.value:.8g} at F={best.F:.6g} ({best.branch})")
    return best


def exp_mult_exact_worstcase(q: float, n: int, grid: int = WORSTCASE_GRID) -> float:
    return worstcase_witness(q, n, grid).value


# =============================================================================
# Lower bounds
# =============================================================================


def validate_multiplicative_preamble(q: float, p: ClusterParams) -> None:
    cap = max_zeta(q, p.beta, p.gamma)
    if not p.zeta < cap:
        raise ValidationError(f"zeta={p.zeta:.6g} must lie strictly below its cap {cap:.6g}")
    top = max_tau(q, p)
    if not 0.0 < p.tau <= top + 1e-12:
        raise ValidationError(f"tau={p.tau:.6g} must lie in (0, {top:.6g}]")


def lower_additive(q: float, beta: float, gamma: float, n: int) -> float:
    c = q * (1.0 - q) / 3.0
    power = (beta + 2.0) / (beta + 1.0) if math.isfinite(beta) else 1.0
    return (c / math.sqrt(n)) ** power / (8.0 * max(gamma, 1.0))


def lower_multiplicative(q: float, params: ClusterParams, n: int) -> float:
    p = params
    c = (q - p.tau) * (1.0 - q - p.tau) / 3.0
    power = (p.beta + 2.0) / (p.beta + 1.0) if p.finite else 1.0
    return (c / math.sqrt(n)) ** power / (16.0 * p.gamma * p.zeta * p.tau + 8.0 * q * (1.0 - q))


def lower_continuous(q: float, gamma: float, n: int) -> float:
    return q**2 * (1.0 - q) ** 2 / (72.0 * max(gamma, 1.0) * n)


def lower_bounds(qr: BoundQuery) -> LowerBounds:
    """Regret some instance forces on every algorithm with probability 1/3 (``expected`` holds in expectation)."""
    p, n, q = qr.params, qr.n, qr.q
    value = lower_additive(q, p.beta, p.gamma, n)
    additive = _result(value, 1, n, "lower_additive", expected=value / 3.0)

    multiplicative = None
    if p.tau is not None:
        validate_multiplicative_preamble(q, p)
        value = lower_multiplicative(q, p, n)
        multiplicative = _result(value, 1, n, "lower_multiplicative", expected=value / 3.0)

    continuous = None
    if p.beta == 0.0:
        value = lower_continuous(q, p.gamma, n)
        continuous = _result(value, 1, n, "lower_continuous", expected=value / 3.0)
    return LowerBounds(additive, multiplicative, continuous)


# =============================================================================
# Tables
# =============================================================================


def evaluate_all(qr: BoundQuery) -> list[BoundResult]:
    """Every bound that the query carries enough parameters for."""
    p = qr.params
    out = []
    if qr.delta is not None:
        out.append(hp_add_bound(qr))
        if p.tau is not None or not p.finite:
            out.append(hp_mult_bound(qr))
    if p.finite or qr.mean_cap is not None:
        out.append(exp_add_bound(qr))
    if p.tau is not None or not p.finite:
        out.append(exp_mult_bound(qr))
    try:
        lows = lower_bounds(qr)
    except ValidationError as e:
        logger.warning(f"multiplicative lower bound skipped: {e}")
        lows = lower_bounds(replace(qr, params=replace(p, tau=None)))
    out.extend(r for r in (lows.additive, lows.multiplicative, lows.continuous) if r is not None)
    return out


def bound_table(queries) -> pd.DataFrame:
    rows = []
    for qr in queries:
        p = qr.params
        for res in evaluate_all(qr):
            rows.append(
                {
                    "theorem": res.theorem,
                    "q": qr.q,
                    "beta": p.beta,
                    "gamma": p.gamma,
                    "zeta": p.zeta,
                    "tau": p.tau,
                    "delta": qr.delta,
                    "n": qr.n,
                    "value": res.value,
                    "min_n": res.min_n,
                    "applicable": res.applicable,
                }
            )
    return pd.DataFrame(rows, columns=BOUND_COLUMNS)
