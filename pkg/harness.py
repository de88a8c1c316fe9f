#!/usr/bin/env python3
"""
Monte-Carlo harness for SAA regret experiments.

Runs regret sweeps over n grids, Delta(eps) sweeps, bound-validity checks,
cluster verification, the min-PDF counterexample, the beta = inf worst case,
convergence-rate fits and hard-pair adversary runs, and writes the results
as CSV tables or log-axis SVG charts.

Usage:
    python3 harness.py sweep --config config.json          # regret curves
    python3 harness.py delta --format svg                  # Delta(eps) vs 1/eps^2
    python3 harness.py bounds --config config.json         # exit 3 on a violated bound
    python3 harness.py adversary --reps 10000
    python3 harness.py verify --config config.json
    python3 harness.py minpdf
    python3 harness.py worstcase --q 0.5 --n 5 10 20
    python3 harness.py rates --betas 0 1 4

Setup:
    python3 -m venv venv && venv/bin/pip install -r requirements.txt
    Optional knobs (NEWSVENDOR_*) go in .env
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from adversary import (  # noqa: E402
    OUTCOME_COLUMNS,
    adversary_experiment,
    constant_algorithm,
    hard_pair_additive,
    hard_pair_continuous,
    hard_pair_multiplicative,
    outcome_row,
    saa_algorithm,
)
from bounds import BoundQuery, exp_add_bound, hp_add_bound, rate_exponent, worstcase_witness  # noqa: E402
from clustered import (  # noqa: E402
    ClusterParams,
    check_tau,
    delta_epsilon,
    equality_clustered,
    min_beta_proxy,
    min_density,
    verify_clustered,
)
from dist import Distribution, Uniform, VShaped, distribution_from_dict  # noqa: E402
from errors import BoundViolationError, DomainError, ValidationError  # noqa: E402
from newsvendor import (  # noqa: E402
    NewsvendorInstance,
    additive_regret,
    exact_expected_multiplicative_regret,
    exact_expected_regret,
    expected_loss,
    optimal_action,
    order_index,
    saa_actions,
)
from seeding import derive_seed  # noqa: E402

logger = logging.getLogger(__name__)


def load_env(env_path=None) -> int:
    """Read NEWSVENDOR_* knobs from a .env file; values already in the environment win."""
    env_path = Path(env_path) if env_path else Path(__file__).parent / ".env"
    if not env_path.exists():
        return 0
    loaded = 0
    for line in env_path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("NEWSVENDOR_") and key not in os.environ:
            os.environ[key] = value.split(" #", 1)[0].strip().strip("'\"")
            loaded += 1
    return loaded


load_env()

# =============================================================================
# CONFIGURATION
# =============================================================================

WORKERS = int(os.environ.get("NEWSVENDOR_WORKERS", "1"))
LOG_LEVEL = os.environ.get("NEWSVENDOR_LOG_LEVEL", "INFO")
OUT_DIR = os.environ.get("NEWSVENDOR_OUT_DIR", "reports")
LOG_FLOOR = float(os.environ.get("NEWSVENDOR_LOG_FLOOR", "1e-12"))
MEAN_CAP = float(os.environ.get("NEWSVENDOR_MEAN_CAP", "14"))

# Repetitions are simulated in fixed blocks, each with its own derived seed,
# so results do not depend on how blocks are spread over workers.
REP_BLOCK = 1000

DEFAULT_SEED = 20240501
DEFAULT_N_GRID = tuple(range(1, 201, 5))
DEFAULT_Q_VALUES = (0.4, 0.9)
DEFAULT_REPS = 10_000
DEFAULT_PERCENTILE = 0.95
DEFAULT_DELTA = 0.05
DEFAULT_EPS_GRID = (0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001)
DEFAULT_RATE_N_GRID = (100, 1000, 10_000, 100_000)
DEFAULT_RATE_BETAS = (0.0, 1.0, 4.0)
RATE_SLOPE_TOL = 0.1

DEFAULT_DISTRIBUTIONS = (
    {"label": "uniform", "family": "uniform", "params": {"low": 0.0, "high": 1.0}},
    {"label": "exponential", "family": "exponential", "params": {"mean": 1.0}},
    {"label": "pareto", "family": "pareto", "params": {"shape": 2.0, "scale": 1.0}},
    {"label": "lognormal", "family": "lognormal", "params": {"mu": 0.0, "sigma": 1.5}},
    {"label": "easy-bernoulli", "family": "scaled-bernoulli", "params": {"p": 0.45, "scale": 1.0}, "q_values": [0.4]},
    {"label": "easy-bernoulli", "family": "scaled-bernoulli", "params": {"p": 0.25, "scale": 1.0}, "q_values": [0.9]},
    {"label": "hard-bernoulli", "family": "scaled-bernoulli", "params": {"p": 0.59, "scale": 23.0}, "q_values": [0.4]},
    {"label": "hard-bernoulli", "family": "scaled-bernoulli", "params": {"p": 0.11, "scale": 127.0}, "q_values": [0.9]},
)

DEFAULT_ADVERSARY = {
    "reps": DEFAULT_REPS,
    "algorithm": "saa",
    "constructions": [
        {"construction": "additive", "q": 0.5, "beta": 0.0, "gamma": 1.0, "n": [25, 100]},
        {"construction": "additive", "q": 0.5, "beta": 1.0, "gamma": 1.0, "n": [25, 100]},
    ],
}

DEFAULT_MINPDF = {"a": 0.5, "b": 1.0, "q": 0.5, "zeta": (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)}

SWEEP_COLUMNS = ["label", "q", "n", "mean_regret", "percentile_regret", "std_error", "reps", "exact_expected"]

# table name -> (x column, y columns, series column)
PLOT_SPECS = {
    "sweep": ("n", ["mean_regret", "percentile_regret"], "label"),
    "delta": ("inv_eps2", ["delta"], "label"),
    "bounds": ("n", ["percentile_regret", "hp_add_bound"], "label"),
    "minpdf_regret": ("n", ["mean_regret"], "label"),
    "minpdf_density": ("zeta", ["inverse_min_density"], "label"),
    "minpdf_delta": ("inv_eps2", ["delta"], "label"),
    "worstcase": ("n", ["worst_value", "sim_mean"], "q"),
    "rates": ("n", ["exact_expected"], "beta"),
    "adversary": ("n", ["freq_P", "freq_Q"], "construction"),
}


# =============================================================================
# Configuration objects
# =============================================================================


@dataclass(frozen=True)
class DistributionSpec:
    label: str
    literal: dict
    q_values: tuple[float, ...] | None = None

    def build(self) -> Distribution:
        return distribution_from_dict(self.literal)

    def applies_to(self, q: float) -> bool:
        return self.q_values is None or any(math.isclose(q, v) for v in self.q_values)


def _parse_distribution(literal) -> DistributionSpec:
    if not isinstance(literal, dict) or "label" not in literal:
        raise ValidationError(f"Distribution literal needs a label, got {literal!r}")
    label = str(literal["label"])
    core = {"family": literal.get("family"), "params": dict(literal.get("params", {}))}
    d = distribution_from_dict(core)
    mu = d.mean()
    if not math.isfinite(mu):
        raise ValidationError(f"Distribution {label!r} has infinite mean")
    q_values = literal.get("q_values")
    if q_values is not None:
        q_values = tuple(float(v) for v in q_values)
    return DistributionSpec(label=label, literal=core, q_values=q_values)


def _parse_cluster_params(raw: dict) -> dict[str, ClusterParams]:
    out = {}
    for label, values in raw.items():
        try:
            tau = values.get("tau")
            out[label] = ClusterParams(
                beta=float(values["beta"]),
                gamma=float(values["gamma"]),
                zeta=float(values["zeta"]),
                tau=None if tau is None else float(tau),
            )
        except (KeyError, TypeError, AttributeError) as e:
            raise ValidationError(f"Bad cluster_params entry for {label!r}: {e}") from e
    return out


@dataclass(frozen=True)
class SweepConfig:
    distributions: tuple[DistributionSpec, ...]
    q_values: tuple[float, ...] = DEFAULT_Q_VALUES
    n_grid: tuple[int, ...] = DEFAULT_N_GRID
    reps: int = DEFAULT_REPS
    percentile: float = DEFAULT_PERCENTILE
    master_seed: int = DEFAULT_SEED
    eps_grid: tuple[float, ...] = DEFAULT_EPS_GRID
    delta: float = DEFAULT_DELTA
    exact: bool = False
    mean_cap: float = MEAN_CAP
    cluster_params: dict = field(default_factory=dict)
    adversary: dict = field(default_factory=lambda: dict(DEFAULT_ADVERSARY))
    minpdf: dict = field(default_factory=lambda: dict(DEFAULT_MINPDF))
    out_dir: str = OUT_DIR
    fmt: str = "csv"

    def __post_init__(self):
        if not self.distributions:
            raise ValidationError("Config needs at least one distribution")
        if not self.q_values or not all(0.0 < q < 1.0 for q in self.q_values):
            raise ValidationError(f"q_values must be nonempty and inside (0, 1), got {self.q_values}")
        if not self.n_grid or not all(int(n) == n and n >= 1 for n in self.n_grid):
            raise ValidationError(f"n grid must be nonempty positive integers, got {self.n_grid}")
        if int(self.reps) != self.reps or self.reps < 1:
            raise ValidationError(f"reps must be a positive integer, got {self.reps}")
        if not 0.0 < self.percentile < 1.0:
            raise ValidationError(f"percentile must lie in (0, 1), got {self.percentile}")
        if not self.eps_grid or not all(e > 0.0 for e in self.eps_grid):
            raise ValidationError(f"eps grid must be nonempty and strictly positive, got {self.eps_grid}")
        if not 0.0 < self.delta < 1.0:
            raise ValidationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.master_seed < 0:
            raise ValidationError(f"seed must be nonnegative, got {self.master_seed}")
        if self.fmt not in ("csv", "svg"):
            raise ValidationError(f"format must be csv or svg, got {self.fmt!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> SweepConfig:
        if not isinstance(raw, dict):
            raise ValidationError("Config must be a JSON object")
        grids = raw.get("grids", {})
        outputs = raw.get("outputs", {})
        distributions = tuple(_parse_distribution(lit) for lit in raw.get("distributions", DEFAULT_DISTRIBUTIONS))
        try:
            return cls(
                distributions=distributions,
                q_values=tuple(float(q) for q in grids.get("q", DEFAULT_Q_VALUES)),
                n_grid=tuple(int(n) for n in grids.get("n", DEFAULT_N_GRID)),
                reps=int(grids.get("reps", DEFAULT_REPS)),
                percentile=float(grids.get("percentile", DEFAULT_PERCENTILE)),
                master_seed=int(grids.get("seed", DEFAULT_SEED)),
                eps_grid=tuple(float(e) for e in grids.get("eps", DEFAULT_EPS_GRID)),
                delta=float(grids.get("delta", DEFAULT_DELTA)),
                exact=bool(grids.get("exact", False)),
                mean_cap=float(grids.get("mean_cap", MEAN_CAP)),
                cluster_params=_parse_cluster_params(raw.get("cluster_params", {})),
                adversary={**DEFAULT_ADVERSARY, **raw.get("adversary", {})},
                minpdf={**DEFAULT_MINPDF, **raw.get("minpdf", {})},
                out_dir=str(outputs.get("dir", OUT_DIR)),
                fmt=str(outputs.get("format", "csv")),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ValidationError):
                raise
            raise ValidationError(f"Malformed config: {e}") from e

    @classmethod
    def from_json(cls, path) -> SweepConfig:
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except OSError as e:
            raise ValidationError(f"Cannot read config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ValidationError(f"Config {path} is not valid JSON: {e}") from e
        return cls.from_dict(raw)

    @classmethod
    def default(cls) -> SweepConfig:
        return cls.from_dict({})

    def cells(self):
        """(spec, q) pairs in configuration order."""
        for spec in self.distributions:
            for q in self.q_values:
                if spec.applies_to(q):
                    yield spec, q


@dataclass(frozen=True)
class SweepResult:
    label: str
    q: float
    n: int
    mean_regret: float
    percentile_regret: float
    std_error: float
    reps: int
    exact_expected: float | None = None

    def to_row(self) -> dict:
        return asdict(self)


def results_frame(results: list[SweepResult]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in results], columns=SWEEP_COLUMNS)


# =============================================================================
# Simulation
# =============================================================================


def _simulate_block(args):
    """
    Regrets of SAA for one block of repetitions in one cell.

    Must be at module level so ProcessPoolExecutor can pickle it. The block's
    seed depends only on (master seed, label, q, n, block start).
    """
    literal, label, q, n, start, count, master_seed, multiplicative = args
    d = distribution_from_dict(literal)
    inst = NewsvendorInstance(q, d)
    seed = derive_seed(master_seed, label, q, n, start)
    samples = d.sample(seed, count * n).reshape(count, n)
    regrets = additive_regret(inst, saa_actions(samples, q))
    if multiplicative:
        regrets = regrets / expected_loss(inst, optimal_action(inst))
    return (label, q, n, start), np.atleast_1d(regrets)


def _blocks(reps: int):
    for start in range(0, reps, REP_BLOCK):
        yield start, min(REP_BLOCK, reps - start)


def _run_blocks(tasks: list[tuple], workers: int) -> dict:
    """Run block tasks, serially or across a process pool; returns {cell: {start: regrets}}."""
    out: dict = {}
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            (label, q, n, start), regrets = _simulate_block(task)
            out.setdefault((label, q, n), {})[start] = regrets
        return out

    logger.info(f"Distributing {len(tasks)} blocks across {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(_simulate_block, task): i for i, task in enumerate(tasks)}
        for future in as_completed(futures):
            (label, q, n, start), regrets = future.result()
            out.setdefault((label, q, n), {})[start] = regrets
    return out


def _summarize(regrets: np.ndarray, percentile: float) -> tuple[float, float, float]:
    """Mean, standard error and the ceil(reps * percentile)-th order statistic."""
    reps = regrets.size
    mean = float(regrets.mean())
    se = float(regrets.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    k = order_index(reps, percentile)
    pct = float(np.partition(regrets, k - 1)[k - 1])
    return mean, se, pct


def simulate_cells(cells, n_grid, reps: int, master_seed: int, workers: int = 1, multiplicative: bool = False) -> dict:
    """Per-cell regret arrays for (label, literal, q) cells over ``n_grid``; {(label, q, n): regrets}."""
    tasks = [
        (literal, label, q, int(n), start, count, master_seed, multiplicative)
        for label, literal, q in cells
        for n in n_grid
        for start, count in _blocks(reps)
    ]
    blocks = _run_blocks(tasks, workers)
    return {cell: np.concatenate([parts[s] for s in sorted(parts)]) for cell, parts in blocks.items()}


def run_regret_sweep(cfg: SweepConfig, workers: int | None = None) -> list[SweepResult]:
    """Mean and percentile additive regret of SAA for every (distribution, q, n) cell."""
    workers = WORKERS if workers is None else workers
    cells = [(spec.label, spec.literal, q) for spec, q in cfg.cells()]
    logger.info(f"Sweeping {len(cells)} cells x {len(cfg.n_grid)} sample sizes x {cfg.reps} reps")
    regrets = simulate_cells(cells, cfg.n_grid, cfg.reps, cfg.master_seed, workers)
    literals = {(label, q): literal for label, literal, q in cells}

    results = []
    for (label, q, n) in sorted(regrets):
        mean, se, pct = _summarize(regrets[(label, q, n)], cfg.percentile)
        exact = None
        if cfg.exact:
            inst = NewsvendorInstance(q, distribution_from_dict(literals[(label, q)]))
            exact = exact_expected_regret(inst, n)
        results.append(SweepResult(label, q, n, mean, pct, se, cfg.reps, exact))
    return results


def run_delta_sweep(distributions, q: float, eps_grid) -> pd.DataFrame:
    """Delta(eps) for each (label, distribution) pair, with 1/eps^2 as the plotting abscissa."""
    rows = []
    for label, d in distributions:
        inst = NewsvendorInstance(q, d)
        for eps in eps_grid:
            rows.append({"label": label, "q": q, "eps": eps, "inv_eps2": 1.0 / eps**2, "delta": delta_epsilon(inst, eps)})
    table = pd.DataFrame(rows, columns=["label", "q", "eps", "inv_eps2", "delta"])
    unbounded = table[~np.isfinite(table["delta"].to_numpy(dtype=float))]
    if len(unbounded):
        logger.warning(
            f"Delta is infinite for {len(unbounded)} cells at q={q} (q + eps reaches 1 on an unbounded support): "
            f"{sorted(set(unbounded['label']))}"
        )
    return table


def run_config_delta_sweep(cfg: SweepConfig) -> pd.DataFrame:
    frames = []
    for q in cfg.q_values:
        dists = [(spec.label, spec.build()) for spec in cfg.distributions if spec.applies_to(q)]
        frames.append(run_delta_sweep(dists, q, cfg.eps_grid))
    return pd.concat(frames, ignore_index=True)


def _bound_query(q: float, params: ClusterParams, n: int, delta: float, mean: float) -> BoundQuery:
    # declared mean cap for the rescaled bounds; 1 means no rescaling
    return BoundQuery(q=q, params=params, n=n, delta=delta, mean_cap=max(mean, 1.0))


def run_bound_check(cfg: SweepConfig, workers: int | None = None, strict: bool = True) -> pd.DataFrame:
    """
    Empirical (1 - delta)-percentile regret against the high-probability bound
    and expected regret against the expectation bound, for every distribution
    with cluster parameters. Raises BoundViolationError when an applicable cell
    breaks a bound and ``strict`` is set.
    """
    verified = []
    for spec, q in cfg.cells():
        params = cfg.cluster_params.get(spec.label)
        if params is None:
            continue
        d = spec.build()
        if d.mean() > cfg.mean_cap:
            logger.warning(f"Skipping {spec.label} at q={q}: mean {d.mean():.4g} exceeds cap {cfg.mean_cap:g}")
            continue
        report = verify_clustered(NewsvendorInstance(q, d), params)
        if not report.holds:
            logger.warning(
                f"Skipping {spec.label} at q={q}: not clustered with {params} "
                f"(ratio {report.worst_ratio:.4g} at {report.worst_point:.4g})"
            )
            continue
        verified.append((spec, q, params, d))

    if not verified:
        raise ValidationError("No distribution has verified cluster parameters; nothing to check")

    cells = [(spec.label, spec.literal, q) for spec, q, _, _ in verified]
    regrets = simulate_cells(cells, cfg.n_grid, cfg.reps, cfg.master_seed, WORKERS if workers is None else workers)

    rows = []
    for spec, q, params, d in verified:
        inst = NewsvendorInstance(q, d)
        for n in cfg.n_grid:
            mean, se, pct = _summarize(regrets[(spec.label, q, int(n))], 1.0 - cfg.delta)
            qr = _bound_query(q, params, int(n), cfg.delta, d.mean())
            hp = hp_add_bound(qr)
            ex = exp_add_bound(qr)
            expected = exact_expected_regret(inst, n) if cfg.exact else None
            hp_violation = hp.applicable and pct > hp.value
            # without the exact value, only flag means clearly above the bound
            observed = expected if expected is not None else mean - 3.0 * se
            exp_violation = observed > ex.value
            rows.append(
                {
                    "label": spec.label,
                    "q": q,
                    "n": int(n),
                    "beta": params.beta,
                    "gamma": params.gamma,
                    "zeta": params.zeta,
                    "delta": cfg.delta,
                    "mean_regret": mean,
                    "std_error": se,
                    "percentile_regret": pct,
                    "exact_expected": expected,
                    "hp_add_bound": hp.value,
                    "hp_min_n": hp.min_n,
                    "hp_applicable": hp.applicable,
                    "exp_add_bound": ex.value,
                    "violation": bool(hp_violation or exp_violation),
                }
            )
    table = pd.DataFrame(rows)
    bad = table[table["violation"]]
    if strict and len(bad):
        raise BoundViolationError(f"{len(bad)} applicable cells violate an upper bound", rows=table)
    return table


def run_cluster_verification(cfg: SweepConfig) -> pd.DataFrame:
    """ClusterReport, tau check and the smallest feasible beta for each configured distribution."""
    rows = []
    for spec, q in cfg.cells():
        params = cfg.cluster_params.get(spec.label)
        if params is None:
            continue
        inst = NewsvendorInstance(q, spec.build())
        report = verify_clustered(inst, params)
        rows.append(
            {
                "label": spec.label,
                "q": q,
                **params.to_dict(),
                **report.to_row(),
                "tau_ok": check_tau(inst, params) if params.tau is not None else None,
                "min_beta": min_beta_proxy(inst, params.gamma, params.zeta),
            }
        )
        logger.info(f"{spec.label} q={q}: holds={report.holds} worst ratio {report.worst_ratio:.4g}")
    if not rows:
        raise ValidationError("No distribution in the config has cluster_params")
    return pd.DataFrame(rows)


def run_minpdf_counterexample(
    n_grid=DEFAULT_N_GRID,
    reps: int = DEFAULT_REPS,
    seed: int = DEFAULT_SEED,
    a: float = 0.5,
    b: float = 1.0,
    q: float = 0.5,
    zetas=DEFAULT_MINPDF["zeta"],
    eps_grid=DEFAULT_EPS_GRID,
    workers: int | None = None,
) -> dict[str, pd.DataFrame]:
    """
    Regret, inverse minimum density and Delta(eps) for the v-shaped density
    against Uniform(0, 1). The v-shaped density is smallest exactly at a* = 0.5,
    so its inverse-min-PDF curve is flat in zeta while its regret is not worse.
    """
    dists = [("v-shaped", VShaped(a, b)), ("uniform", Uniform(0.0, 1.0))]
    cells = [(label, d.to_dict(), q) for label, d in dists]
    regrets = simulate_cells(cells, n_grid, reps, seed, WORKERS if workers is None else workers)
    regret_rows = []
    for label, _, _ in cells:
        for n in n_grid:
            mean, se, _ = _summarize(regrets[(label, q, int(n))], DEFAULT_PERCENTILE)
            regret_rows.append({"label": label, "q": q, "n": int(n), "mean_regret": mean, "std_error": se})

    density_rows = []
    for label, d in dists:
        center = optimal_action(NewsvendorInstance(q, d))
        for zeta in zetas:
            m = min_density(d, center, zeta)
            density_rows.append(
                {"label": label, "zeta": zeta, "min_density": m, "inverse_min_density": 1.0 / m if m > 0 else math.inf}
            )
    return {
        "minpdf_regret": pd.DataFrame(regret_rows),
        "minpdf_density": pd.DataFrame(density_rows),
        "minpdf_delta": run_delta_sweep(dists, q, eps_grid),
    }


def run_worstcase_check(q: float, n_grid, reps: int = DEFAULT_REPS, seed: int = DEFAULT_SEED, workers: int | None = None) -> pd.DataFrame:
    """Simulated multiplicative regret of SAA on each n's worst-case Bernoulli against the grid supremum."""
    witnesses = {int(n): worstcase_witness(q, int(n)) for n in n_grid}
    rows = []
    for n, w in witnesses.items():
        d = w.distribution()
        label = f"witness-n{n}"
        regrets = simulate_cells([(label, d.to_dict(), q)], [n], reps, seed, WORKERS if workers is None else workers, multiplicative=True)
        mean, se, _ = _summarize(regrets[(label, q, n)], DEFAULT_PERCENTILE)
        exact = exact_expected_multiplicative_regret(NewsvendorInstance(q, d), n)
        rows.append(
            {
                "q": q,
                "n": n,
                "F": w.F,
                "branch": w.branch,
                "worst_value": w.value,
                "exact_expected": exact,
                "sim_mean": mean,
                "std_error": se,
                "within_3se": abs(mean - w.value) <= 3.0 * se,
            }
        )
        logger.info(f"worst case q={q} n={n}: grid {w.value:.6g}, simulated {mean:.6g} +/- {se:.2g}")
    return pd.DataFrame(rows)


def run_rate_check(
    betas=DEFAULT_RATE_BETAS,
    n_grid=DEFAULT_RATE_N_GRID,
    q: float = 0.5,
    a_star: float = 0.5,
    gamma: float = 1.0,
    zeta: float = 0.5,
) -> dict[str, pd.DataFrame]:
    """Exact expected regret on equality-clustered instances and its log-log slope in n."""
    value_rows, slope_rows = [], []
    for beta in betas:
        inst = NewsvendorInstance(q, equality_clustered(q, a_star, ClusterParams(beta, gamma, zeta)))
        values = [exact_expected_regret(inst, int(n)) for n in n_grid]
        value_rows.extend({"beta": beta, "n": int(n), "exact_expected": v} for n, v in zip(n_grid, values))
        slope = float(np.polyfit(np.log(n_grid), np.log(values), 1)[0])
        target = -rate_exponent(beta)
        slope_rows.append({"beta": beta, "slope": slope, "expected_slope": target, "within_tol": abs(slope - target) <= RATE_SLOPE_TOL})
        logger.info(f"beta={beta}: slope {slope:.4f} (target {target:.4f})")
    return {"rates": pd.DataFrame(value_rows), "rate_slopes": pd.DataFrame(slope_rows)}


def _pair_for(entry: dict, n: int):
    kind = entry.get("construction")
    q, gamma = float(entry["q"]), float(entry["gamma"])
    if kind == "additive":
        return hard_pair_additive(q, float(entry.get("beta", 0.0)), gamma, n, entry.get("zeta"))
    if kind == "multiplicative":
        return hard_pair_multiplicative(q, float(entry["beta"]), gamma, float(entry["zeta"]), float(entry["tau"]), n)
    if kind == "continuous":
        return hard_pair_continuous(q, gamma, n, entry.get("eta"))
    raise ValidationError(f"Unknown hard-pair construction: {kind!r}")


def _algorithm_for(spec, q: float):
    if spec == "saa":
        return saa_algorithm(q)
    try:
        return constant_algorithm(float(spec))
    except (TypeError, ValueError) as e:
        raise ValidationError(f"algorithm must be 'saa' or a constant decision, got {spec!r}") from e


def run_adversary_grid(cfg: SweepConfig) -> pd.DataFrame:
    """Frequency with which the configured algorithm pays the regret floor on each hard pair."""
    settings = cfg.adversary
    reps = int(settings.get("reps", cfg.reps))
    rows = []
    for entry in settings.get("constructions", []):
        try:
            n_values = [int(n) for n in entry.get("n", [])]
            for n in n_values:
                pair = _pair_for(entry, n)
                algorithm = _algorithm_for(settings.get("algorithm", "saa"), pair.q)
                outcome = adversary_experiment(algorithm, pair, n, reps, cfg.master_seed)
                rows.append(outcome_row(pair, outcome))
        except (KeyError, TypeError) as e:
            raise ValidationError(f"Bad adversary entry {entry!r}: {e}") from e
    if not rows:
        raise ValidationError("Adversary config has no constructions")
    return pd.DataFrame(rows, columns=OUTCOME_COLUMNS)


# =============================================================================
# Output
# =============================================================================


def clamp_for_log(df: pd.DataFrame, columns, floor: float = LOG_FLOOR) -> pd.DataFrame:
    """
    Copy of ``df`` ready for a log axis. Nonpositive values are raised to
    ``floor`` and flagged in ``clamped``; infinite or missing values are
    blanked and flagged in ``nonfinite`` so the chart can mark them.
    """
    out = df.copy()
    clamped = np.zeros(len(out), dtype=bool)
    nonfinite = np.zeros(len(out), dtype=bool)
    for col in columns:
        values = pd.to_numeric(out[col], errors="coerce").to_numpy(dtype=float)
        bad = ~np.isfinite(values)
        low = ~bad & (values < floor)
        clamped |= low
        nonfinite |= bad
        out[col] = np.where(low, floor, np.where(bad, np.nan, values))
    out["clamped"] = clamped
    out["nonfinite"] = nonfinite
    return out


def save_table(df: pd.DataFrame, filepath) -> Path:
    """Save a table as CSV (header row, full-precision floats)."""
    filepath = Path(filepath)
    try:
        filepath.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(filepath, index=False, lineterminator="\n")
    except OSError as e:
        raise OSError(f"Cannot write {filepath}: {e}") from e
    logger.info(f"Report saved: {filepath}")
    return filepath


def save_chart(df: pd.DataFrame, name: str, filepath, floor: float = LOG_FLOOR) -> Path:
    """Line chart of ``df`` with a logarithmic vertical axis, written as deterministic SVG."""
    x, ys, series = PLOT_SPECS[name]
    data = clamp_for_log(df, ys, floor)
    filepath = Path(filepath)

    plt.rcParams["svg.hashsalt"] = "newsvendor"
    fig, ax = plt.subplots(figsize=(7, 4.5))
    groups = data.groupby(series, sort=True) if series in data.columns else [(name, data)]
    for key, part in groups:
        part = part.sort_values(x)
        for y in ys:
            ax.plot(part[x], part[y], marker=".", label=f"{key} {y}" if len(ys) > 1 else str(key))
        flagged = part[part["clamped"]]
        if len(flagged):
            ax.scatter(flagged[x], [floor] * len(flagged), marker="v", color="black", zorder=3)
        # infinite values sit on the top edge of the axes
        off_scale = part[part["nonfinite"]]
        if len(off_scale):
            ax.scatter(
                off_scale[x], [1.0] * len(off_scale), marker="^", color="red", zorder=3,
                transform=ax.get_xaxis_transform(), clip_on=False,
            )
    ax.set_yscale("log")
    ax.set_xlabel(x)
    ax.set_ylabel(", ".join(ys))
    ax.set_title(name)
    ax.legend(fontsize="small")
    fig.tight_layout()
    try:
        filepath.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(filepath, format="svg", metadata={"Date": None})
    except OSError as e:
        raise OSError(f"Cannot write {filepath}: {e}") from e
    finally:
        plt.close(fig)
    logger.info(f"Chart saved: {filepath}")
    return filepath


def emit_outputs(tables: dict, fmt: str, out_dir, floor: float = LOG_FLOOR) -> list[Path]:
    """
    Write each named table to ``out_dir``. ``csv`` writes <name>.csv; ``svg``
    writes <name>.svg plus <name>_plotted.csv holding the clamped values that
    were drawn. Tables without a chart layout are always written as CSV.
    """
    if not tables or all(len(df) == 0 for df in tables.values()):
        raise ValidationError("Nothing to emit: no results")
    if fmt not in ("csv", "svg"):
        raise ValidationError(f"format must be csv or svg, got {fmt!r}")
    out_dir = Path(out_dir)
    written = []
    for name, df in tables.items():
        if isinstance(df, list):
            df = results_frame(df)
        if fmt == "svg" and name in PLOT_SPECS:
            written.append(save_chart(df, name, out_dir / f"{name}.svg", floor))
            _, ys, _ = PLOT_SPECS[name]
            written.append(save_table(clamp_for_log(df, ys, floor), out_dir / f"{name}_plotted.csv"))
        else:
            written.append(save_table(df, out_dir / f"{name}.csv"))
    return written


# =============================================================================
# CLI
# =============================================================================


def _load_config(args) -> SweepConfig:
    cfg = SweepConfig.from_json(args.config) if args.config else SweepConfig.default()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.reps is not None:
        overrides["reps"] = args.reps
    if args.percentile is not None:
        overrides["percentile"] = args.percentile
    if args.format is not None:
        overrides["fmt"] = args.format
    if args.out is not None:
        overrides["out_dir"] = args.out
    if getattr(args, "exact", False):
        overrides["exact"] = True
    cfg = replace(cfg, **overrides) if overrides else cfg
    if args.reps is not None:
        cfg = replace(cfg, adversary={**cfg.adversary, "reps": args.reps})
    return cfg


def _run(args, cfg: SweepConfig) -> dict:
    workers = args.workers if args.workers is not None else WORKERS
    if args.command == "sweep":
        return {"sweep": results_frame(run_regret_sweep(cfg, workers))}
    if args.command == "delta":
        return {"delta": run_config_delta_sweep(cfg)}
    if args.command == "bounds":
        return {"bounds": run_bound_check(cfg, workers)}
    if args.command == "adversary":
        return {"adversary": run_adversary_grid(cfg)}
    if args.command == "verify":
        return {"verify": run_cluster_verification(cfg)}
    if args.command == "minpdf":
        m = cfg.minpdf
        return run_minpdf_counterexample(
            cfg.n_grid, cfg.reps, cfg.master_seed, float(m["a"]), float(m["b"]), float(m["q"]), m["zeta"], cfg.eps_grid, workers
        )
    if args.command == "worstcase":
        return {"worstcase": run_worstcase_check(args.q, args.n, cfg.reps, cfg.master_seed, workers)}
    if args.command == "rates":
        return run_rate_check(args.betas, args.n)
    raise ValidationError(f"Unknown command {args.command!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config (default: built-in grids)")
    common.add_argument("--out", help=f"Output directory (default: {OUT_DIR})")
    common.add_argument("--seed", type=int, help="Master seed")
    common.add_argument("--reps", type=int, help="Repetitions per cell")
    common.add_argument("--format", choices=["csv", "svg"], help="Output format (default: csv)")
    common.add_argument("--percentile", type=float, help="Regret percentile in (0, 1)")
    common.add_argument("--workers", type=int, help=f"Process-pool size (default: {WORKERS})")

    parser = argparse.ArgumentParser(description="SAA regret experiments for the data-driven newsvendor")
    sub = parser.add_subparsers(dest="command", required=True)
    sweep = sub.add_parser("sweep", parents=[common], help="Mean and percentile regret over n")
    sweep.add_argument("--exact", action="store_true", help="Add the exact expected regret column")
    sub.add_parser("delta", parents=[common], help="Delta(eps) curves")
    bounds = sub.add_parser("bounds", parents=[common], help="Check empirical regret against the upper bounds")
    bounds.add_argument("--exact", action="store_true", help="Compare exact expected regret with the expectation bound")
    sub.add_parser("adversary", parents=[common], help="Hard-pair lower-bound experiment")
    sub.add_parser("verify", parents=[common], help="Verify configured cluster parameters")
    sub.add_parser("minpdf", parents=[common], help="Min-PDF counterexample")
    worst = sub.add_parser("worstcase", parents=[common], help="beta = inf worst-case multiplicative regret")
    worst.add_argument("--q", type=float, default=0.5)
    worst.add_argument("--n", type=int, nargs="+", default=[5, 10, 20])
    rates = sub.add_parser("rates", parents=[common], help="Exact convergence-rate slopes")
    rates.add_argument("--betas", type=float, nargs="+", default=list(DEFAULT_RATE_BETAS))
    rates.add_argument("--n", type=int, nargs="+", default=list(DEFAULT_RATE_N_GRID))
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = _load_config(args)
        tables = _run(args, cfg)
        emit_outputs(tables, cfg.fmt, cfg.out_dir)
    except BoundViolationError as e:
        logger.error(f"Bound violation: {e}")
        if e.rows is not None and len(e.rows):
            save_table(e.rows, Path(cfg.out_dir) / "bounds.csv")
        sys.exit(3)
    except (ValidationError, DomainError) as e:
        logger.error(f"Invalid input: {e}")
        sys.exit(2)


if __name__ == "__main__":
    main()
