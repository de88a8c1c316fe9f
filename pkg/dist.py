#!/usr/bin/env python3
"""
Demand distributions on [0, inf).

Every distribution exposes the same surface: right-continuous CDF, left-limit
CDF, quantile (inf{a : F(a) >= p}), mean, density of the continuous part,
the integrated CDF G(x) = int_0^x F(z) dz, a split of the support into
constant/smooth pieces, and inverse-transform sampling.

Families:
    uniform, exponential, pareto, lognormal   scipy.stats backed
    piecewise                                 breakpoint triples (z, F_left, F_right)
    scaled-bernoulli, empirical               piecewise specialisations
    equality-clustered                        F = q +/- (gamma|a - a*|)^(beta+1) with end atoms
    v-shaped                                  density a + b|2z - 1| on [0, 1]

Usage:
    from dist import Uniform, scaled_bernoulli, quantile
    quantile(scaled_bernoulli(0.45), 0.4)   # -> 0.0
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from errors import DomainError, ValidationError
from seeding import make_rng

logger = logging.getLogger(__name__)

# Largest double below 1; keeps inverse-transform draws finite on unbounded supports
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


def _wrap(result, like):
    """Return a Python float for scalar input, the array otherwise."""
    if np.ndim(like) == 0:
        return float(np.asarray(result).reshape(-1)[0])
    return result


def _check_probability(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    bad = ~((arr > 0.0) & (arr <= 1.0))
    if np.any(bad):
        raise DomainError(f"Quantile level must lie in (0, 1], got {arr[bad].flat[0]}")
    return arr


@dataclass(frozen=True)
class Segment:
    """A piece [lo, hi) of the support; ``value`` is the CDF there if it is constant."""

    lo: float
    hi: float
    value: float | None


# =============================================================================
# Base class
# =============================================================================


class Distribution:
    """A probability distribution on [0, inf) with finite mean."""

    family = ""

    # ---------- core API ----------

    def cdf(self, z):
        raise NotImplementedError

    def cdf_left(self, z):
        """Left limit of the CDF; equals cdf() for continuous families."""
        return self.cdf(z)

    def cdf_gap(self, z, level: float):
        """F(z) - level; families that can avoid the cancellation near ``level`` override this."""
        return self.cdf(z) - level

    def cdf_left_gap(self, z, level: float):
        return self.cdf_left(z) - level

    def quantile(self, p):
        arr = _check_probability(p)
        return _wrap(self._quantile(arr), p)

    def _quantile(self, p: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def pdf(self, z):
        raise NotImplementedError

    def integrated_cdf(self, x):
        """G(x) = int_0^x F(z) dz, in closed form."""
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def breakpoints(self) -> np.ndarray:
        """Points where F jumps or changes its analytic form."""
        lo, hi = self.support
        return np.array([b for b in (lo, hi) if math.isfinite(b)], dtype=float)

    def params(self) -> dict:
        raise NotImplementedError

    # ---------- derived ----------

    def _constant_on(self, a: float, b: float) -> float | None:
        lo, hi = self.support
        if b <= lo:
            return 0.0
        if a >= hi:
            return 1.0
        return None

    def segments(self, lo: float, hi: float) -> list[Segment]:
        """Split [lo, hi] at every breakpoint; flag pieces on which F is constant."""
        if hi <= lo:
            return []
        knots = [lo] + [float(b) for b in self.breakpoints() if lo < b < hi] + [hi]
        return [Segment(a, b, self._constant_on(a, b)) for a, b in zip(knots[:-1], knots[1:])]

    def sample(self, seed, count: int) -> np.ndarray:
        """IID draws by inverse transform; deterministic given the seed."""
        if int(count) != count or count < 1:
            raise ValidationError(f"Sample count must be a positive integer, got {count}")
        rng = make_rng(seed)
        p = 1.0 - rng.random(int(count))  # (0, 1]
        if not math.isfinite(self.support[1]):
            p = np.minimum(p, _BELOW_ONE)
        return np.asarray(self._quantile(p), dtype=float)

    def to_dict(self) -> dict:
        return {"family": self.family, "params": self.params()}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


# =============================================================================
# Parametric families (scipy.stats backed)
# =============================================================================


class _ScipyDistribution(Distribution):
    """Shared plumbing for families that wrap a frozen scipy distribution."""

    @cached_property
    def _dist(self):
        raise NotImplementedError

    def cdf(self, z):
        return _wrap(np.clip(self._dist.cdf(np.asarray(z, dtype=float)), 0.0, 1.0), z)

    def _quantile(self, p):
        return self._dist.ppf(p)

    def pdf(self, z):
        return _wrap(self._dist.pdf(np.asarray(z, dtype=float)), z)

    def mean(self) -> float:
        return float(self._dist.mean())


class Uniform(_ScipyDistribution):
    family = "uniform"

    def __init__(self, low: float = 0.0, high: float = 1.0):
        if not (0.0 <= low < high < math.inf):
            raise ValidationError(f"Uniform needs 0 <= low < high < inf, got low={low}, high={high}")
        self.low = float(low)
        self.high = float(high)

    @cached_property
    def _dist(self):
        return stats.uniform(loc=self.low, scale=self.high - self.low)

    @property
    def support(self):
        return (self.low, self.high)

    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    def integrated_cdf(self, x):
        xa = np.asarray(x, dtype=float)
        width = self.high - self.low
        inside = np.clip(xa, self.low, self.high) - self.low
        out = inside**2 / (2.0 * width) + np.maximum(xa - self.high, 0.0)
        return _wrap(out, x)

    def params(self):
        return {"low": self.low, "high": self.high}


class Exponential(_ScipyDistribution):
    family = "exponential"

    def __init__(self, mean: float = 1.0):
        if not (0.0 < mean < math.inf):
            raise ValidationError(f"Exponential mean must be positive and finite, got {mean}")
        self.scale = float(mean)

    @cached_property
    def _dist(self):
        return stats.expon(scale=self.scale)

    @property
    def support(self):
        return (0.0, math.inf)

    def mean(self) -> float:
        return self.scale

    def integrated_cdf(self, x):
        xa = np.maximum(np.asarray(x, dtype=float), 0.0)
        return _wrap(xa + self.scale * np.expm1(-xa / self.scale), x)

    def params(self):
        return {"mean": self.scale}


class Pareto(_ScipyDistribution):
    family = "pareto"

    def __init__(self, shape: float = 2.0, scale: float = 1.0):
        if not shape > 1.0:
            # infinite mean makes every decision's expected loss infinite
            raise ValidationError(f"Pareto shape must exceed 1 for a finite mean, got {shape}")
        if not (0.0 < scale < math.inf):
            raise ValidationError(f"Pareto scale must be positive and finite, got {scale}")
        self.shape = float(shape)
        self.scale = float(scale)

    @cached_property
    def _dist(self):
        return stats.pareto(b=self.shape, scale=self.scale)

    @property
    def support(self):
        return (self.scale, math.inf)

    def mean(self) -> float:
        return self.shape * self.scale / (self.shape - 1.0)

    def integrated_cdf(self, x):
        xa = np.maximum(np.asarray(x, dtype=float), self.scale)
        tail = self.scale / (self.shape - 1.0) * (1.0 - (self.scale / xa) ** (self.shape - 1.0))
        return _wrap((xa - self.scale) - tail, x)

    def params(self):
        return {"shape": self.shape, "scale": self.scale}


class Lognormal(_ScipyDistribution):
    """ln Z ~ N(mu, sigma^2)."""

    family = "lognormal"

    def __init__(self, mu: float = 0.0, sigma: float = 1.5):
        if not (0.0 < sigma < math.inf) or not math.isfinite(mu):
            raise ValidationError(f"Lognormal needs finite mu and sigma > 0, got mu={mu}, sigma={sigma}")
        self.mu = float(mu)
        self.sigma = float(sigma)

    @cached_property
    def _dist(self):
        return stats.lognorm(s=self.sigma, scale=math.exp(self.mu))

    @property
    def support(self):
        return (0.0, math.inf)

    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def integrated_cdf(self, x):
        xa = np.asarray(x, dtype=float)
        pos = np.where(xa > 0.0, xa, 1.0)
        log_x = np.log(pos)
        first = pos * stats.norm.cdf((log_x - self.mu) / self.sigma)
        partial_mean = self.mean() * stats.norm.cdf((log_x - self.mu - self.sigma**2) / self.sigma)
        return _wrap(np.where(xa > 0.0, first - partial_mean, 0.0), x)

    def params(self):
        return {"mu": self.mu, "sigma": self.sigma}


# =============================================================================
# Piecewise-linear CDFs with atoms
# =============================================================================


class PiecewiseCdf(Distribution):
    """
    CDF given by breakpoints (z, F_left, F_right).

    F is 0 left of the first breakpoint, jumps from F_left to F_right at each
    breakpoint, is affine between consecutive breakpoints and is 1 from the
    last breakpoint on. Internally the CDF is the monotone polyline through
    (z0, L0), (z0, R0), (z1, L1), (z1, R1), ...
    """

    family = "piecewise"

    def __init__(self, points: Iterable[Sequence[float]]):
        pts = [tuple(float(v) for v in p) for p in points]
        _validate_breakpoints(pts)
        # snap the tail value so the polyline ends exactly at 1
        z_last, left_last, _ = pts[-1]
        pts[-1] = (z_last, left_last, 1.0)
        self.points = tuple(pts)

        z = np.array([p[0] for p in pts])
        left = np.array([p[1] for p in pts])
        right = np.array([p[2] for p in pts])
        self._z, self._left, self._right = z, left, right
        self._x = np.repeat(z, 2)
        self._y = np.column_stack([left, right]).reshape(-1)

        # G at each breakpoint (trapezoids between R_i and L_{i+1})
        widths = np.diff(z)
        self._g = np.concatenate([[0.0], np.cumsum(0.5 * (right[:-1] + left[1:]) * widths)])
        for arr in (self._z, self._left, self._right, self._x, self._y, self._g):
            arr.flags.writeable = False

    # ---------- evaluation ----------

    def _interpolate(self, z: np.ndarray, idx: np.ndarray) -> np.ndarray:
        x, y = self._x, self._y
        last = len(x) - 1
        out = np.where(idx >= last, 1.0, 0.0).astype(float)
        inside = (idx >= 0) & (idx < last)
        if np.any(inside):
            i = idx[inside]
            x0, x1, y0, y1 = x[i], x[i + 1], y[i], y[i + 1]
            out[inside] = y0 + (y1 - y0) * (z[inside] - x0) / (x1 - x0)
        return out

    def cdf(self, z):
        za = np.atleast_1d(np.asarray(z, dtype=float))
        idx = np.searchsorted(self._x, za, side="right") - 1
        return _wrap(self._interpolate(za, idx), z)

    def cdf_left(self, z):
        za = np.atleast_1d(np.asarray(z, dtype=float))
        idx = np.searchsorted(self._x, za, side="left") - 1
        return _wrap(self._interpolate(za, idx), z)

    def _quantile(self, p):
        pa = np.atleast_1d(p)
        x, y = self._x, self._y
        k = np.searchsorted(y, pa, side="left")
        x0, x1, y0, y1 = x[k - 1], x[k], y[k - 1], y[k]
        # y0 < p <= y1; on a jump x0 == x1 and the fraction is irrelevant
        frac = np.where(x1 > x0, (pa - y0) / np.where(y1 > y0, y1 - y0, 1.0), 1.0)
        out = x0 + np.clip(frac, 0.0, 1.0) * (x1 - x0)
        return out.reshape(np.shape(p))

    def slopes(self) -> np.ndarray:
        """Density on each open segment between consecutive breakpoints."""
        return (self._left[1:] - self._right[:-1]) / np.diff(self._z)

    def pdf(self, z):
        za = np.atleast_1d(np.asarray(z, dtype=float))
        slopes = self.slopes()
        i = np.searchsorted(self._z, za, side="right") - 1
        inside = (i >= 0) & (i < len(self._z) - 1)
        out = np.zeros_like(za)
        out[inside] = slopes[i[inside]]
        return _wrap(out, z)

    def integrated_cdf(self, x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        z, right, left, g = self._z, self._right, self._left, self._g
        i = np.searchsorted(z, xa, side="right") - 1
        out = np.zeros_like(xa)
        tail = i >= len(z) - 1
        out[tail] = g[-1] + (xa[tail] - z[-1])
        inside = (i >= 0) & ~tail
        if np.any(inside):
            j = i[inside]
            d = xa[inside] - z[j]
            slope = (left[j + 1] - right[j]) / (z[j + 1] - z[j])
            out[inside] = g[j] + right[j] * d + 0.5 * slope * d**2
        return _wrap(out, x)

    def mean(self) -> float:
        z, left, right = self._z, self._left, self._right
        atoms = float(np.sum(z * (right - left)))
        # int z dF over each affine piece: mass * midpoint
        pieces = float(np.sum((left[1:] - right[:-1]) * 0.5 * (z[1:] + z[:-1])))
        return atoms + pieces

    # ---------- structure ----------

    @property
    def support(self):
        x, y = self._x, self._y
        lo = x[int(np.argmax(y > 0.0)) - 1]
        hi = x[int(np.argmax(y >= 1.0))]
        return (float(lo), float(hi))

    def breakpoints(self) -> np.ndarray:
        return self._z

    def atoms(self) -> list[tuple[float, float]]:
        """(location, mass) for every breakpoint with a positive jump."""
        return [(z, r - l) for z, l, r in self.points if r > l]

    def _constant_on(self, a, b):
        if b <= self._z[0]:
            return 0.0
        if a >= self._z[-1]:
            return 1.0
        v0, v1 = self.cdf(a), self.cdf_left(b)
        return v0 if v0 == v1 else None

    def params(self):
        return {"points": [list(p) for p in self.points]}


def _validate_breakpoints(pts: list[tuple[float, ...]]) -> None:
    if not pts:
        raise ValidationError("Piecewise CDF needs at least one breakpoint")
    prev_z, prev_right = -math.inf, 0.0
    for i, p in enumerate(pts):
        if len(p) != 3:
            raise ValidationError(f"Breakpoint {i}: expected (z, F_left, F_right), got {p}")
        z, left, right = p
        if not (math.isfinite(z) and z >= 0.0):
            raise ValidationError(f"Breakpoint {i}: z must be finite and nonnegative, got {z}")
        if z <= prev_z:
            raise ValidationError(f"Breakpoint {i}: z={z} is not strictly increasing")
        if not (0.0 <= left <= right <= 1.0):
            raise ValidationError(f"Breakpoint {i}: need 0 <= F_left <= F_right <= 1, got ({left}, {right})")
        if i == 0 and left != 0.0:
            raise ValidationError(f"Breakpoint 0: F_left must be 0 (F vanishes below the support), got {left}")
        if left < prev_right:
            raise ValidationError(f"Breakpoint {i}: F_left={left} is below the previous F_right={prev_right}")
        prev_z, prev_right = z, right
    if abs(pts[-1][2] - 1.0) > 1e-12:
        raise ValidationError(f"Breakpoint {len(pts) - 1}: final F_right must be 1, got {pts[-1][2]}")


class ScaledBernoulli(PiecewiseCdf):
    """scale * Ber(p): mass 1 - p at 0 and p at ``scale``."""

    family = "scaled-bernoulli"

    def __init__(self, p: float, scale: float = 1.0):
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"Bernoulli p must lie in [0, 1], got {p}")
        if not (0.0 < scale < math.inf):
            raise ValidationError(f"Bernoulli scale must be positive and finite, got {scale}")
        self.p = float(p)
        self.scale = float(scale)
        super().__init__([(0.0, 0.0, 1.0 - self.p), (self.scale, 1.0 - self.p, 1.0)])

    def mean(self) -> float:
        return self.p * self.scale

    def params(self):
        return {"p": self.p, "scale": self.scale}


class EmpiricalCdf(PiecewiseCdf):
    """Step CDF of a sample: F(z) = #{Z_i <= z} / n."""

    family = "empirical"

    def __init__(self, samples: Iterable[float]):
        values = np.sort(np.asarray(list(samples), dtype=float))
        if values.size == 0:
            raise ValidationError("Empirical CDF needs at least one sample")
        if np.any(~np.isfinite(values)) or values[0] < 0.0:
            raise ValidationError(f"Samples must be finite and nonnegative, got min {values[0]}")
        self.values = values
        self.values.flags.writeable = False
        self.n = int(values.size)
        unique, counts = np.unique(values, return_counts=True)
        cum = np.cumsum(counts) / self.n
        prev = np.concatenate([[0.0], cum[:-1]])
        super().__init__(zip(unique, prev, cum))

    def mean(self) -> float:
        return float(self.values.mean())

    def params(self):
        return {"samples": self.values.tolist()}


def piecewise_from_breakpoints(points: Iterable[Sequence[float]]) -> PiecewiseCdf:
    return PiecewiseCdf(points)


def empirical_from_samples(samples: Iterable[float]) -> EmpiricalCdf:
    return EmpiricalCdf(samples)


def scaled_bernoulli(p: float, scale: float = 1.0) -> ScaledBernoulli:
    return ScaledBernoulli(p, scale)


def point_mass(z: float) -> PiecewiseCdf:
    """Degenerate distribution with all mass at z."""
    return PiecewiseCdf([(z, 0.0, 1.0)])


# =============================================================================
# Closed-form special families
# =============================================================================


class EqualityClustered(Distribution):
    """
    F(a) = q + sign(a - a*) (gamma |a - a*|)^(beta + 1) on [a* - zeta, a* + zeta],
    with an atom of mass q - m at a* - zeta and 1 - q - m at a* + zeta,
    m = (gamma zeta)^(beta + 1).
    """

    family = "equality-clustered"

    def __init__(self, q: float, a_star: float, beta: float, gamma: float, zeta: float):
        if not 0.0 < q < 1.0:
            raise ValidationError(f"q must lie in (0, 1), got {q}")
        if not (0.0 <= beta < math.inf):
            raise ValidationError(f"Equality-clustered family needs a finite beta >= 0, got {beta}")
        if not (gamma > 0.0 and zeta > 0.0):
            raise ValidationError(f"gamma and zeta must be positive, got gamma={gamma}, zeta={zeta}")
        if a_star < zeta:
            raise ValidationError(f"a_star={a_star} must be at least zeta={zeta} to keep the support in [0, inf)")
        m = (gamma * zeta) ** (beta + 1.0)
        if m > min(q, 1.0 - q) + 1e-12:
            raise ValidationError(
                f"Infeasible parameters: (gamma*zeta)^(beta+1)={m:.6g} exceeds min(q, 1-q)={min(q, 1 - q):.6g}"
            )
        self.q, self.a_star = float(q), float(a_star)
        self.beta, self.gamma, self.zeta = float(beta), float(gamma), float(zeta)
        self.mass = min(m, min(q, 1.0 - q))
        self.lo, self.hi = self.a_star - self.zeta, self.a_star + self.zeta

    def _core(self, z):
        return self.q + self._signed_power(z)

    def cdf(self, z):
        za = np.asarray(z, dtype=float)
        out = np.where(za < self.lo, 0.0, np.where(za >= self.hi, 1.0, self._core(za)))
        return _wrap(out, z)

    def cdf_left(self, z):
        za = np.asarray(z, dtype=float)
        out = np.where(za <= self.lo, 0.0, np.where(za > self.hi, 1.0, self._core(za)))
        return _wrap(out, z)

    def _signed_power(self, za):
        u = za - self.a_star
        return np.sign(u) * (self.gamma * np.abs(u)) ** (self.beta + 1.0)

    def cdf_gap(self, z, level):
        if level != self.q:
            return super().cdf_gap(z, level)
        za = np.asarray(z, dtype=float)
        inside = (za >= self.lo) & (za < self.hi)
        return _wrap(np.where(inside, self._signed_power(za), self.cdf(za) - level), z)

    def cdf_left_gap(self, z, level):
        if level != self.q:
            return super().cdf_left_gap(z, level)
        za = np.asarray(z, dtype=float)
        inside = (za > self.lo) & (za <= self.hi)
        return _wrap(np.where(inside, self._signed_power(za), self.cdf_left(za) - level), z)

    def _quantile(self, p):
        d = p - self.q
        inner = self.a_star + np.sign(d) * np.abs(d) ** (1.0 / (self.beta + 1.0)) / self.gamma
        return np.where(p <= self.q - self.mass, self.lo, np.where(p > self.q + self.mass, self.hi, inner))

    def pdf(self, z):
        za = np.asarray(z, dtype=float)
        u = np.abs(za - self.a_star)
        dens = (self.beta + 1.0) * self.gamma ** (self.beta + 1.0) * u**self.beta
        return _wrap(np.where((za > self.lo) & (za < self.hi), dens, 0.0), z)

    def integrated_cdf(self, x):
        xa = np.asarray(x, dtype=float)
        k = self.gamma ** (self.beta + 1.0)
        e = self.beta + 2.0
        s = np.clip(self.a_star - xa, 0.0, self.zeta)
        t = np.clip(xa - self.a_star, 0.0, self.zeta)
        left = self.q * (self.zeta - s) - k * (self.zeta**e - s**e) / e
        right = self.q * t + k * t**e / e
        out = np.where(xa <= self.lo, 0.0, left + right) + np.maximum(xa - self.hi, 0.0)
        return _wrap(out, x)

    def mean(self) -> float:
        return float(self.hi - self.integrated_cdf(self.hi))

    @property
    def support(self):
        return (self.lo, self.hi)

    def breakpoints(self):
        return np.array([self.lo, self.a_star, self.hi])

    def params(self):
        return {"q": self.q, "a_star": self.a_star, "beta": self.beta, "gamma": self.gamma, "zeta": self.zeta}


class VShaped(Distribution):
    """Density a + b|2z - 1| on [0, 1] with a + b/2 = 1; minimum density a at z = 0.5."""

    family = "v-shaped"

    def __init__(self, a: float = 0.5, b: float = 1.0):
        if not (0.0 <= a < 1.0) or b < 0.0 or abs(a + 0.5 * b - 1.0) > 1e-12:
            raise ValidationError(f"V-shaped density needs 0 <= a < 1 and a + b/2 = 1, got a={a}, b={b}")
        self.a, self.b = float(a), float(b)

    def _half_mass(self, s):
        return self.a * s + self.b * s**2

    def cdf(self, z):
        za = np.asarray(z, dtype=float)
        u = np.clip(za, 0.0, 1.0) - 0.5
        core = 0.5 + np.sign(u) * self._half_mass(np.abs(u))
        return _wrap(np.where(za <= 0.0, 0.0, np.where(za >= 1.0, 1.0, core)), z)

    def _quantile(self, p):
        d = np.abs(p - 0.5)
        root = self.a + np.sqrt(self.a**2 + 4.0 * self.b * d)
        s = np.where(root > 0.0, 2.0 * d / np.where(root > 0.0, root, 1.0), 0.0)
        return np.clip(0.5 + np.sign(p - 0.5) * s, 0.0, 1.0)

    def pdf(self, z):
        za = np.asarray(z, dtype=float)
        dens = self.a + self.b * np.abs(2.0 * za - 1.0)
        return _wrap(np.where((za >= 0.0) & (za <= 1.0), dens, 0.0), z)

    def integrated_cdf(self, x):
        xa = np.asarray(x, dtype=float)
        a, b = self.a, self.b
        h = np.clip(xa, 0.0, 0.5)
        t = np.clip(xa - 0.5, 0.0, 0.5)
        left = 0.5 * (a + b) * h**2 - b * h**3 / 3.0
        right = 0.5 * t + 0.5 * a * t**2 + b * t**3 / 3.0
        return _wrap(left + right + np.maximum(xa - 1.0, 0.0), x)

    def mean(self) -> float:
        return 0.5

    @property
    def support(self):
        return (0.0, 1.0)

    def breakpoints(self):
        return np.array([0.0, 0.5, 1.0])

    def params(self):
        return {"a": self.a, "b": self.b}


# =============================================================================
# Functional surface and config literals
# =============================================================================


def cdf(d: Distribution, z):
    return d.cdf(z)


def cdf_left(d: Distribution, z):
    return d.cdf_left(z)


def quantile(d: Distribution, p):
    return d.quantile(p)


def mean(d: Distribution) -> float:
    return d.mean()


def pdf(d: Distribution, z):
    return d.pdf(z)


def integrated_cdf(d: Distribution, x):
    return d.integrated_cdf(x)


def sample(d: Distribution, seed, count: int) -> np.ndarray:
    return d.sample(seed, count)


FAMILIES = {
    "uniform": Uniform,
    "exponential": Exponential,
    "pareto": Pareto,
    "lognormal": Lognormal,
    "piecewise": PiecewiseCdf,
    "scaled-bernoulli": ScaledBernoulli,
    "empirical": EmpiricalCdf,
    "equality-clustered": EqualityClustered,
    "v-shaped": VShaped,
}


def distribution_from_dict(literal: dict) -> Distribution:
    """Build a distribution from ``{"family": ..., "params": {...}}``."""
    family = literal.get("family")
    if family not in FAMILIES:
        raise ValidationError(f"Unknown distribution family: {family!r}")
    params = dict(literal.get("params", {}))
    try:
        return FAMILIES[family](**params)
    except TypeError as e:
        raise ValidationError(f"Bad parameters for {family}: {e}") from e


def to_dict(d: Distribution) -> dict:
    return d.to_dict()
