#!/usr/bin/env python3
"""
(beta, gamma, zeta)-clustered distributions.

A distribution is clustered around a* = F^{-1}(q) when

    |a - a*| <= (1/gamma) |F(a) - q|^(1/(beta+1))   for all a in [a* - zeta, a* + zeta].

beta = inf is a distinguished value: the exponent becomes 0 and the condition
reads |a - a*| <= 1/gamma. Verification reports the worst ratio
gamma|a - a*| / |F(a) - q|^(1/(beta+1)); the condition holds iff it is <= 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from dist import Distribution, EqualityClustered, PiecewiseCdf
from errors import ValidationError
from newsvendor import NewsvendorInstance, optimal_action

logger = logging.getLogger(__name__)

HOLD_TOLERANCE = 1e-12
# |F(a*) - q| below this is treated as an exact crossing at a*
_SNAP = 1e-12
BETA_CEILING = 1e3
BETA_RESOLUTION = 1e-3


@dataclass(frozen=True)
class ClusterParams:
    beta: float
    gamma: float
    zeta: float
    tau: float | None = None

    def __post_init__(self):
        if not self.beta >= 0.0:
            raise ValidationError(f"beta must lie in [0, inf], got {self.beta}")
        if not (0.0 < self.gamma < math.inf):
            raise ValidationError(f"gamma must be positive and finite, got {self.gamma}")
        if not (0.0 < self.zeta < math.inf):
            raise ValidationError(f"zeta must be positive and finite, got {self.zeta}")
        if self.tau is not None and not 0.0 < self.tau < 1.0:
            raise ValidationError(f"tau must lie in (0, 1), got {self.tau}")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.beta)

    @property
    def exponent(self) -> float:
        """1 / (beta + 1), which is 0 at beta = inf."""
        return 1.0 / (self.beta + 1.0) if self.finite else 0.0

    def validate_for(self, q: float) -> None:
        cap = max_zeta(q, self.beta, self.gamma)
        if self.zeta > cap * (1.0 + HOLD_TOLERANCE):
            raise ValidationError(
                f"Infeasible cluster parameters: zeta={self.zeta:.6g} exceeds "
                f"min(q, 1-q)^(1/(beta+1))/gamma={cap:.6g} for q={q}"
            )
        if self.tau is not None:
            top = max_tau(q, self)
            if self.tau > top + HOLD_TOLERANCE:
                raise ValidationError(f"tau={self.tau:.6g} exceeds min(q, 1-q) - (gamma*zeta)^(beta+1)={top:.6g}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ClusterReport:
    holds: bool
    worst_point: float
    worst_ratio: float
    grid_size: int

    def to_row(self) -> dict:
        return asdict(self)


def cluster_mass(params: ClusterParams) -> float:
    """(gamma zeta)^(beta + 1), with the beta = inf limits 0, 1 or inf."""
    g = params.gamma * params.zeta
    if params.finite:
        return g ** (params.beta + 1.0)
    if g < 1.0:
        return 0.0
    return 1.0 if g == 1.0 else math.inf


def max_zeta(q: float, beta: float, gamma: float) -> float:
    m = min(q, 1.0 - q)
    exponent = 1.0 / (beta + 1.0) if math.isfinite(beta) else 0.0
    return m**exponent / gamma


def max_tau(q: float, params: ClusterParams) -> float:
    return min(q, 1.0 - q) - cluster_mass(params)


def delta_bound(params: ClusterParams, eps: float) -> float:
    """(1/gamma) eps^(1/(beta+1)): how far a quantile error eps can move the action."""
    return eps**params.exponent / params.gamma


# =============================================================================
# Verification
# =============================================================================


def _ratios(u: np.ndarray, gap: np.ndarray, params: ClusterParams) -> np.ndarray:
    """gamma|u| / |gap|^(1/(beta+1)) with 0 at u = 0 and inf where gap = 0 elsewhere."""
    u = np.abs(np.asarray(u, dtype=float))
    gap = np.abs(np.asarray(gap, dtype=float))
    if not params.finite:
        return params.gamma * u
    with np.errstate(divide="ignore", invalid="ignore"):
        r = params.gamma * u / gap**params.exponent
    return np.where(u == 0.0, 0.0, np.where(gap == 0.0, np.inf, r))


def _affine_ratio(u: float, c: float, s: float, params: ClusterParams) -> float:
    """Ratio at offset u from a* on a piece where F - q = c + s u."""
    gamma, beta = params.gamma, params.beta
    if not params.finite:
        return gamma * abs(u)
    if u == 0.0:
        # the piece reaches a* along F - q = s u; for beta = 0 the ratio tends to gamma/|s|
        if c == 0.0 and beta == 0.0 and s != 0.0:
            return gamma / abs(s)
        return 0.0
    if c == 0.0:
        if s == 0.0:
            return math.inf
        return gamma * abs(u) ** (beta / (beta + 1.0)) / abs(s) ** params.exponent
    g = abs(c + s * u)
    return math.inf if g == 0.0 else gamma * abs(u) / g**params.exponent


def _piecewise_candidates(d: PiecewiseCdf, a_star: float, q: float, params: ClusterParams, lo: float, hi: float):
    """Exact extrema of the ratio over every affine piece meeting [lo, hi]."""
    pts = d.points
    pieces = []
    if pts[0][0] > lo:
        pieces.append((lo, pts[0][0], 0.0, 0.0))
    for (z0, _, r0), (z1, l1, _) in zip(pts[:-1], pts[1:]):
        pieces.append((z0, z1, r0, (l1 - r0) / (z1 - z0)))
    pieces.append((pts[-1][0], math.inf, 1.0, 0.0))

    out = []
    for start, end, r, s in pieces:
        s0, s1 = max(start, lo), min(end, hi)
        if s0 > s1:
            continue
        c = (r - q) + s * (a_star - start)
        if abs(c) <= _SNAP:
            c = 0.0
        offsets = [s0 - a_star, s1 - a_star]
        if s0 <= a_star <= s1:
            offsets.append(0.0)
        if c != 0.0 and s != 0.0:
            crossing = -c / s
            if s0 <= a_star + crossing <= s1 and params.finite:
                out.append((a_star + crossing, math.inf))
            if params.finite and params.beta > 0.0:
                critical = -(params.beta + 1.0) * c / (params.beta * s)
                if s0 <= a_star + critical <= s1:
                    offsets.append(critical)
        for u in offsets:
            out.append((a_star + u, _affine_ratio(u, c, s, params)))
    return out


def _grid_candidates(d: Distribution, a_star: float, q: float, params: ClusterParams, lo: float, hi: float, grid_size: int):
    zeta = params.zeta
    near = a_star + np.concatenate([zeta * 10.0 ** -np.arange(1, 13), -zeta * 10.0 ** -np.arange(1, 13)])
    bps = np.asarray(d.breakpoints(), dtype=float)
    bps = bps[(bps >= lo) & (bps <= hi)]
    pts = np.unique(np.concatenate([np.linspace(lo, hi, grid_size), near, bps, [lo, hi, a_star]]))
    pts = pts[(pts >= lo) & (pts <= hi)]

    ratios = _ratios(pts - a_star, d.cdf_gap(pts, q), params)
    out = list(zip(pts.tolist(), ratios.tolist()))
    if bps.size:
        left = _ratios(bps - a_star, d.cdf_left_gap(bps, q), params)
        out.extend(zip(bps.tolist(), left.tolist()))
    return out


def verify_clustered(inst: NewsvendorInstance, params: ClusterParams, grid_size: int = 1000) -> ClusterReport:
    """Check the clustering inequality on [a* - zeta, a* + zeta]."""
    params.validate_for(inst.q)
    if grid_size < 3:
        raise ValidationError(f"grid_size must be at least 3, got {grid_size}")
    a_star = optimal_action(inst)
    # the domain is [0, inf), so the interval is clipped at 0
    lo, hi = max(a_star - params.zeta, 0.0), a_star + params.zeta

    if isinstance(inst.d, PiecewiseCdf):
        candidates = _piecewise_candidates(inst.d, a_star, inst.q, params, lo, hi)
    else:
        candidates = _grid_candidates(inst.d, a_star, inst.q, params, lo, hi, grid_size)

    worst_point, worst_ratio = max(candidates, key=lambda c: c[1])
    holds = worst_ratio <= 1.0 + HOLD_TOLERANCE
    logger.debug(f"verify_clustered beta={params.beta} gamma={params.gamma} zeta={params.zeta}: worst {worst_ratio:.6g} at {worst_point:.6g}")
    return ClusterReport(holds=bool(holds), worst_point=float(worst_point), worst_ratio=float(worst_ratio), grid_size=int(grid_size))


def check_tau(inst: NewsvendorInstance, params: ClusterParams) -> bool:
    """F(a* - zeta) >= tau and F(a* + zeta) <= 1 - tau."""
    if params.tau is None:
        raise ValidationError("check_tau needs ClusterParams with tau")
    a_star = optimal_action(inst)
    below = float(inst.d.cdf(a_star - params.zeta))
    above = float(inst.d.cdf(a_star + params.zeta))
    return below >= params.tau - HOLD_TOLERANCE and above <= 1.0 - params.tau + HOLD_TOLERANCE


# =============================================================================
# Proxies and constructions
# =============================================================================


def delta_epsilon(inst: NewsvendorInstance, eps: float) -> float:
    """max{F^{-1}(min(q+eps, 1)) - a*, a* - F^{-1}(max(q-eps, 0))}, with F^{-1}(0) the support's left end."""
    if not eps > 0.0:
        raise ValidationError(f"eps must be positive, got {eps}")
    d, q = inst.d, inst.q
    a_star = optimal_action(inst)
    upper = float(d.quantile(min(q + eps, 1.0))) - a_star
    low_level = max(q - eps, 0.0)
    lower_action = d.support[0] if low_level == 0.0 else float(d.quantile(low_level))
    return max(upper, a_star - lower_action, 0.0)


def min_beta_proxy(
    inst: NewsvendorInstance,
    gamma: float,
    zeta: float,
    grid_size: int = 1000,
    ceiling: float = BETA_CEILING,
    resolution: float = BETA_RESOLUTION,
) -> float:
    """Smallest beta (to ``resolution``) for which verify_clustered holds; inf if none up to ``ceiling``."""
    m = min(inst.q, 1.0 - inst.q)
    g = gamma * zeta
    if g >= 1.0:
        logger.warning(f"gamma*zeta={g:.6g} >= 1 is infeasible for every finite beta")
        return math.inf
    # feasibility needs (beta + 1) log(g) <= log(m)
    beta_lo = max(math.log(m) / math.log(g) - 1.0, 0.0)
    if beta_lo > ceiling:
        logger.warning(f"gamma={gamma}, zeta={zeta} only feasible for beta >= {beta_lo:.6g}")
        return math.inf

    def holds(beta: float) -> bool:
        return verify_clustered(inst, ClusterParams(beta, gamma, zeta), grid_size).holds

    if holds(beta_lo):
        return beta_lo
    if not holds(ceiling):
        logger.warning(f"clustering fails up to beta={ceiling:g}; reporting inf")
        return math.inf
    lo, hi = beta_lo, ceiling
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    logger.debug(f"min_beta_proxy bracket [{lo:.6g}, {hi:.6g}]")
    return hi


def equality_clustered(q: float, a_star: float, params: ClusterParams) -> EqualityClustered:
    """CDF meeting the clustering inequality with equality, atoms at a* +/- zeta."""
    params.validate_for(q)
    return EqualityClustered(q, a_star, params.beta, params.gamma, params.zeta)


def min_density(d: Distribution, center: float, zeta: float, grid_size: int = 1001) -> float:
    """Minimum density over [center - zeta, center + zeta] (clipped at 0)."""
    lo, hi = max(center - zeta, 0.0), center + zeta
    bps = np.asarray(d.breakpoints(), dtype=float)
    pts = np.concatenate([np.linspace(lo, hi, grid_size), [center], bps[(bps >= lo) & (bps <= hi)]])
    return float(np.min(d.pdf(pts)))
