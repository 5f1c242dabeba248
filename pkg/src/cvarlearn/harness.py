"""Experiment harness: configuration, seeded multi-trial runs, CSV output.

A flat key-value config file (plus CLI flag overrides) selects a scenario and
all run parameters. Each trial ``i`` runs with seed ``base_seed + i``; trials
execute in parallel processes by default and are aggregated by trial index,
so results are byte-identical regardless of scheduling. All output is CSV
(17-significant-digit floats, LF endings, UTF-8); plotting is left to
external tools.
"""

from __future__ import annotations

import dataclasses
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import environment, learner, oracle, schedule
from .core import AdmissibleSet, Box, ConfigurationError, CostModel, NoiseSequence
from .schedule import (
    ConstantRate,
    ConstantSampling,
    InverseEpochRate,
    check_sampling_requirement,
    theorem1_params,
    theorem2_params,
)

__all__ = [
    "ExperimentConfig",
    "Scenario",
    "TrialAggregate",
    "BudgetReport",
    "load_config_file",
    "make_config",
    "build_scenario",
    "run_experiment",
    "run_ablation",
    "compute_budget",
]

logger = logging.getLogger(__name__)

SCENARIOS = ("parking", "brownian", "custom")

TRAJECTORY_HEADER = "t,j,tau,x,x_hat,n_t,cvar_est,grad,eta,c_hat,c_star,dr,acc_loss"
AGGREGATE_COLUMNS = ("x", "c_hat", "dr", "acc_loss")


@dataclass
class ExperimentConfig:
    """All knobs of an experiment; defaults reproduce the parking-lot study."""

    scenario: str = "parking"
    horizon: int = 6000
    batch_size: int = 200
    delta: float = 0.05
    alpha: float = 0.5
    samples: int = 8
    eta: float = 0.03
    rate_rule: str = "constant"  # "constant" or "inverse" (1/(m*tau))
    x0: float = 1.0
    trials: int = 10
    base_seed: int = 0
    jobs: int = 0  # 0 = one worker per trial up to the CPU count
    oracle_k: int = 100
    oracle_grid: int = 2000
    out_prefix: str = "ra"
    # declared sampling-requirement parameters
    sampling_a: float = 2.0 / 3.0
    sampling_c: float = 10.0
    # parking / custom pricing scenario
    elasticity: float = -0.15
    regularization: float = 0.001
    target_occupancy: float = 0.7
    price_low: float = 1.0
    price_high: float = 5.0
    # custom scenario: static uniform noise band
    noise_low: float = 0.85
    noise_high: float = 1.1
    # brownian scenario
    diffusivity: float = 1e-4
    track_low: float = -2.0
    track_high: float = 2.0

    def validate(self) -> "ExperimentConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(
                f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        if self.batch_size < 2:
            raise ConfigurationError("batch size must be >= 2")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigurationError(f"risk level alpha={self.alpha} must lie in (0, 1]")
        if self.delta <= 0:
            raise ConfigurationError("smoothing radius must be positive")
        if self.eta <= 0:
            raise ConfigurationError("learning rate must be positive")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.base_seed < 0:
            raise ConfigurationError("base seed must be >= 0")
        if self.rate_rule not in ("constant", "inverse"):
            raise ConfigurationError("rate_rule must be 'constant' or 'inverse'")
        if self.samples < 1:
            raise ConfigurationError("samples must be >= 1")
        if self.jobs < 0:
            raise ConfigurationError("jobs must be >= 0")
        if self.oracle_k < 2:
            raise ConfigurationError("oracle action grid needs >= 2 points")
        if self.oracle_grid < 1000:
            raise ConfigurationError("oracle quantile grid needs >= 1000 points")
        return self


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def load_config_file(path) -> dict:
    """Parse a flat ``key = value`` config file (# starts a comment)."""
    values: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def make_config(*sources: dict) -> ExperimentConfig:
    """Build a validated config from dicts of increasing precedence.

    String values are coerced to the field's type; the ``RA_SEED``
    environment variable, when set, overrides the base seed last.
    """
    merged: dict = {}
    for source in sources:
        for key, value in source.items():
            if value is None:
                continue
            if key not in _FIELD_TYPES:
                raise ConfigurationError(f"unknown configuration key {key!r}")
            merged[key] = value
    coerced = {}
    for key, value in merged.items():
        ftype = _FIELD_TYPES[key]
        try:
            if ftype == "int" or ftype is int:
                coerced[key] = int(float(value)) if isinstance(value, str) else int(value)
            elif ftype == "float" or ftype is float:
                coerced[key] = float(value)
            else:
                coerced[key] = str(value)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad value for {key!r}: {value!r}") from exc
    config = ExperimentConfig(**coerced)
    env_seed = os.environ.get("RA_SEED")
    if env_seed is not None:
        try:
            config.base_seed = int(env_seed)
        except ValueError as exc:
            raise ConfigurationError(f"RA_SEED must be an integer, got {env_seed!r}") from exc
    return config.validate()


@dataclass(frozen=True)
class Scenario:
    cost: CostModel
    noise: NoiseSequence
    region: AdmissibleSet


def _pricing_cost(a_el: float, nu: float, target: float,
                  x_bounds: tuple[float, float],
                  xi_bounds: tuple[float, float]) -> CostModel:
    """Quadratic occupancy-tracking cost with exact corner bounds.

    ``J(x, xi) = (xi + a_el * x - target)^2 + nu/2 * x^2``. Both ``|J|`` and
    ``|dJ/dx|`` are convex in ``(x, xi)``, so their maxima over the
    box-times-interval domain sit at corners.
    """

    def fn(x, xi):
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        return (xi + a_el * x - target) ** 2 + 0.5 * nu * x ** 2

    corners = [(x, xi) for x in x_bounds for xi in xi_bounds]
    bound = max(abs(float(fn(np.array(x), np.array(xi)))) for x, xi in corners)
    lipschitz = max(
        abs(2.0 * a_el * (xi + a_el * x - target) + nu * x) for x, xi in corners
    )
    return CostModel(fn=fn, bound=bound, lipschitz=lipschitz,
                     strong_convexity=2.0 * a_el ** 2 + nu)


def _tracking_cost(x_bounds: tuple[float, float],
                   xi_bounds: tuple[float, float]) -> CostModel:
    """Plain tracking cost ``(x - xi)^2`` with corner-exact bounds."""

    def fn(x, xi):
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        return (x - xi) ** 2

    span = max(abs(x - xi) for x in x_bounds for xi in xi_bounds)
    return CostModel(fn=fn, bound=span ** 2, lipschitz=2.0 * span,
                     strong_convexity=2.0)


def build_scenario(config: ExperimentConfig) -> Scenario:
    """Assemble cost, noise, and admissible set for the configured scenario.

    The cost's U and L0 are computed from the admissible set and the noise
    support (the Gaussian support is taken as its +/-10 sigma truncation)
    and logged, since the sampling-requirement constant and the DKW
    diagnostics reference them.
    """
    config.validate()
    horizon = config.horizon
    if config.scenario == "parking":
        noise: NoiseSequence = environment.parking_noise(horizon)
        region: AdmissibleSet = Box([config.price_low], [config.price_high])
        bounds = [noise.bounds(t) for t in range(1, horizon + 1)]
        xi_lo = min(b[0] for b in bounds)
        xi_hi = max(b[1] for b in bounds)
        cost = _pricing_cost(config.elasticity, config.regularization,
                             config.target_occupancy,
                             (config.price_low, config.price_high),
                             (xi_lo, xi_hi))
    elif config.scenario == "custom":
        if config.noise_high < config.noise_low:
            raise ConfigurationError("custom scenario needs noise_low <= noise_high")
        noise = environment.constant_uniform(horizon, config.noise_low,
                                             config.noise_high)
        region = Box([config.price_low], [config.price_high])
        cost = _pricing_cost(config.elasticity, config.regularization,
                             config.target_occupancy,
                             (config.price_low, config.price_high),
                             (config.noise_low, config.noise_high))
    else:  # brownian
        noise = environment.BrownianSeq(horizon, config.diffusivity)
        region = Box([config.track_low], [config.track_high])
        xi_lo, xi_hi = noise.support(horizon)
        cost = _tracking_cost((config.track_low, config.track_high),
                              (xi_lo, xi_hi))
    logger.info("scenario %s: U=%.6g L0=%.6g m=%.6g", config.scenario,
                cost.bound, cost.lipschitz, cost.strong_convexity)
    return Scenario(cost=cost, noise=noise, region=region)


def _learner_config(config: ExperimentConfig, scenario: Scenario,
                    seed: int) -> learner.LearnerConfig:
    if config.rate_rule == "inverse":
        modulus = scenario.cost.strong_convexity
        if modulus <= 0:
            raise ConfigurationError(
                "the inverse-epoch rate needs a strictly convex cost (m > 0)")
        rate: schedule.LearningRateSchedule = InverseEpochRate(modulus)
    else:
        rate = ConstantRate(config.eta)
    return learner.LearnerConfig(
        horizon=config.horizon,
        batch_size=config.batch_size,
        delta=config.delta,
        alpha=config.alpha,
        sampling=ConstantSampling(config.samples),
        rate=rate,
        x0=np.array([config.x0]),
        seed=seed,
    )


def _run_trial(config: ExperimentConfig, trial: int,
               optima: tuple[np.ndarray, np.ndarray]
               ) -> tuple[list, oracle.RegretReport]:
    scenario = build_scenario(config)
    lconf = _learner_config(config, scenario, seed=config.base_seed + trial)
    records = learner.run(lconf, scenario.cost, scenario.noise, scenario.region)
    report = oracle.dynamic_regret(records, scenario.cost, scenario.noise,
                                   scenario.region, config.alpha,
                                   k=config.oracle_k, grid_n=config.oracle_grid,
                                   optima=optima)
    return records, report


@dataclass
class TrialAggregate:
    """Per-step statistics across trials (population standard deviation)."""

    t: np.ndarray
    x: np.ndarray            # (trials, T) pre-perturbation decisions
    x_hat: np.ndarray        # (trials, T) played (perturbed) actions
    played_cvar: np.ndarray  # (trials, T)
    regret: np.ndarray       # (trials, T) cumulative
    acc_loss: np.ndarray     # (trials, T) cumulative
    optimal_actions: np.ndarray  # (T,)
    optimal_cvar: np.ndarray     # (T,)

    def column(self, name: str) -> np.ndarray:
        return {"x": self.x, "c_hat": self.played_cvar, "dr": self.regret,
                "acc_loss": self.acc_loss}[name]

    def mean(self, name: str) -> np.ndarray:
        return self.column(name).mean(axis=0)

    def std(self, name: str) -> np.ndarray:
        return self.column(name).std(axis=0)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_trajectory_csv(path: Path, records, report: oracle.RegretReport) -> None:
    if records and records[0].x.size != 1:
        raise ConfigurationError("trajectory CSV output supports 1-D decisions only")
    rows = []
    for i, rec in enumerate(records):
        rows.append((
            rec.t, rec.batch, rec.epoch,
            rec.x[0], rec.x_hat[0], rec.n_samples,
            rec.cvar_estimate, rec.gradient[0], rec.eta,
            report.played_cvar[i], report.optimal_cvar[i],
            report.cumulative_regret[i], report.accumulated_loss[i],
        ))
    _write_csv(path, TRAJECTORY_HEADER, rows)


def _write_aggregate_csv(path: Path, agg: TrialAggregate) -> None:
    header = "t," + ",".join(
        f"mean_{c},std_{c}" for c in AGGREGATE_COLUMNS)
    stats = [(agg.mean(c), agg.std(c)) for c in AGGREGATE_COLUMNS]
    rows = []
    for i, t in enumerate(agg.t):
        row: list = [int(t)]
        for mean, std in stats:
            row.extend((mean[i], std[i]))
        rows.append(tuple(row))
    _write_csv(path, header, rows)


def run_experiment(config: ExperimentConfig, write: bool = True,
                   optima: tuple[np.ndarray, np.ndarray] | None = None
                   ) -> TrialAggregate:
    """Run all trials, write per-trial and aggregate CSVs, return the aggregate.

    Trial ``i`` uses seed ``base_seed + i``. The per-step optimal-action
    series is trajectory-independent, so it is computed once (or supplied)
    and shared across trials and workers.
    """
    config.validate()
    scenario = build_scenario(config)
    check = check_sampling_requirement(ConstantSampling(config.samples),
                                       config.batch_size, config.sampling_a,
                                       config.sampling_c)
    if not check.satisfied:
        logger.warning(
            "sampling requirement violated for n=%d: sum 1/sqrt(phi)=%.4g exceeds "
            "%.4g; proceeding anyway", config.samples, check.achieved, check.allowed)
    if optima is None:
        optima = oracle.optimal_action_series(
            scenario.cost, scenario.noise, scenario.region, config.alpha,
            config.horizon, k=config.oracle_k, grid_n=config.oracle_grid)

    jobs = config.jobs or min(config.trials, os.cpu_count() or 1)
    results: list[tuple[list, oracle.RegretReport]] = []
    if jobs <= 1 or config.trials == 1:
        for i in range(config.trials):
            try:
                results.append(_run_trial(config, i, optima))
            except Exception as exc:
                raise RuntimeError(
                    f"trial {i} (seed {config.base_seed + i}) failed: {exc}") from exc
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_trial, config, i, optima)
                       for i in range(config.trials)]
            for i, future in enumerate(futures):
                try:
                    results.append(future.result())
                except Exception as exc:
                    raise RuntimeError(
                        f"trial {i} (seed {config.base_seed + i}) failed: {exc}"
                    ) from exc

    horizon = config.horizon
    agg = TrialAggregate(
        t=np.arange(1, horizon + 1),
        x=np.array([[rec.x[0] for rec in records] for records, _ in results]),
        x_hat=np.array([[rec.x_hat[0] for rec in records]
                        for records, _ in results]),
        played_cvar=np.array([rep.played_cvar for _, rep in results]),
        regret=np.array([rep.cumulative_regret for _, rep in results]),
        acc_loss=np.array([rep.accumulated_loss for _, rep in results]),
        optimal_actions=optima[0][:horizon],
        optimal_cvar=optima[1][:horizon],
    )
    if write:
        prefix = Path(config.out_prefix)
        if prefix.parent != Path("."):
            prefix.parent.mkdir(parents=True, exist_ok=True)
        for i, (records, report) in enumerate(results):
            _write_trajectory_csv(Path(f"{prefix}_trial{i}.csv"), records, report)
        _write_aggregate_csv(Path(f"{prefix}_aggregate.csv"), agg)
    return agg


def run_ablation(config: ExperimentConfig, sample_counts,
                 write: bool = True) -> dict[int, TrialAggregate]:
    """Re-run the experiment for each sample count and tabulate final losses.

    Counts violating the declared sampling requirement produce a warning but
    still run. Writes one aggregate per count plus a comparison table.
    """
    counts = [int(n) for n in sample_counts]
    if len(counts) < 2:
        raise ConfigurationError("ablation needs at least two sample counts")
    scenario = build_scenario(config)
    optima = oracle.optimal_action_series(
        scenario.cost, scenario.noise, scenario.region, config.alpha,
        config.horizon, k=config.oracle_k, grid_n=config.oracle_grid)
    aggregates: dict[int, TrialAggregate] = {}
    rows = []
    for n in counts:
        sub = dataclasses.replace(config, samples=n,
                                  out_prefix=f"{config.out_prefix}_n{n}")
        aggregates[n] = run_experiment(sub, write=write, optima=optima)
        final_losses = aggregates[n].acc_loss[:, -1]
        check = check_sampling_requirement(ConstantSampling(n), config.batch_size,
                                           config.sampling_a, config.sampling_c)
        rows.append((n, final_losses.mean(), final_losses.std(),
                     int(check.satisfied), check.achieved, check.allowed))
    if write:
        _write_csv(Path(f"{config.out_prefix}_ablation.csv"),
                   "n,mean_final_loss,std_final_loss,requirement_ok,"
                   "requirement_achieved,requirement_allowed", rows)
    return aggregates


@dataclass
class BudgetReport:
    budget: float
    profile: np.ndarray  # W1(D_{t-1}, D_t) for t = 2..horizon
    theorem1: schedule.Theorem1Params | None
    theorem2: schedule.Theorem2Params | None


def compute_budget(config: ExperimentConfig, write: bool = True) -> BudgetReport:
    """Variation budget of the configured scenario plus parameter suggestions.

    A zero budget (static sequence) degenerates the batch-size formulas, so
    no suggestions are emitted in that case.
    """
    config.validate()
    scenario = build_scenario(config)
    profile = environment.variation_profile(scenario.noise, config.horizon)
    budget = float(profile.sum())
    if budget <= 0.0:
        logger.warning("variation budget is zero (static distribution); "
                       "batch-size selection formulas degenerate")
        t1 = t2 = None
    elif budget >= config.horizon:
        logger.warning("variation budget %.4g is not below the horizon %d; "
                       "no sub-linear selection exists", budget, config.horizon)
        t1 = t2 = None
    else:
        t1 = theorem1_params(config.horizon, budget, config.sampling_a)
        modulus = scenario.cost.strong_convexity
        t2 = (theorem2_params(config.horizon, budget, config.sampling_a, modulus)
              if modulus > 0 else None)
    if write:
        _write_csv(Path(f"{config.out_prefix}_budget.csv"), "t,w1",
                   [(t, w) for t, w in zip(range(2, config.horizon + 1), profile)])
    return BudgetReport(budget=budget, profile=profile, theorem1=t1, theorem2=t2)
