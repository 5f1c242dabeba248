"""Restarted zeroth-order CVaR descent.

Each step identifies its batch and within-batch epoch, perturbs the current
decision along a fresh unit-sphere direction, queries the cost the scheduled
number of times, estimates the CVaR of the sampled costs, forms the one-point
gradient estimate, and takes a projected step inside the delta-shrunk
admissible set. At batch boundaries only the schedule state (epoch, hence
sample count and learning rate) resets; the decision carries over from the
previous batch.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import AdmissibleSet, ConfigurationError, CostModel, NoiseSequence, as_vector
from .risk import cvar_of_values
from .schedule import LearningRateSchedule, SamplingStrategy, batch_epoch
from .smoothing import gradient_estimate, sample_unit_sphere

__all__ = ["LearnerConfig", "IterationRecord", "run"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LearnerConfig:
    """Inputs of a single learning run."""

    horizon: int
    batch_size: int
    delta: float
    alpha: float
    sampling: SamplingStrategy
    rate: LearningRateSchedule
    x0: np.ndarray
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "x0", as_vector(self.x0))
        if int(self.horizon) < 1:
            raise ConfigurationError("horizon must be >= 1")
        if int(self.batch_size) < 2:
            raise ConfigurationError("batch size must be >= 2")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigurationError(f"risk level alpha={self.alpha} must lie in (0, 1]")
        if not self.delta > 0.0:
            raise ConfigurationError("smoothing radius must be positive")


@dataclass(frozen=True)
class IterationRecord:
    """Full trace of one algorithm step."""

    t: int
    batch: int
    epoch: int
    x: np.ndarray          # decision before perturbation, in the shrunk set
    u: np.ndarray          # unit-sphere direction
    x_hat: np.ndarray      # played (perturbed) action, in the admissible set
    n_samples: int
    costs: np.ndarray      # the sampled cost values at x_hat
    cvar_estimate: float
    gradient: np.ndarray
    eta: float


def run(config: LearnerConfig, cost: CostModel, noise: NoiseSequence,
        region: AdmissibleSet, rng: np.random.Generator | None = None
        ) -> list[IterationRecord]:
    """Run the full loop for ``config.horizon`` steps and return its trace.

    Deterministic given the seed: a single generator is consumed in a fixed
    order (direction first, then the step's noise draws).
    """
    if config.delta >= region.inradius:
        raise ConfigurationError(
            f"smoothing radius {config.delta} must be below the set inradius "
            f"{region.inradius}")
    if config.x0.size != region.dim:
        raise ConfigurationError(
            f"initial decision is {config.x0.size}-D, set is {region.dim}-D")
    if config.horizon > noise.horizon:
        raise ConfigurationError(
            f"run horizon {config.horizon} exceeds noise horizon {noise.horizon}")
    if rng is None:
        rng = np.random.default_rng(config.seed)

    inner = region.shrink(config.delta)
    x = inner.project(config.x0)
    if not np.array_equal(x, config.x0):
        logger.info("initial decision projected into the shrunk set: %s -> %s",
                    config.x0, x)

    d = region.dim
    records: list[IterationRecord] = []
    for t in range(1, int(config.horizon) + 1):
        j, tau = batch_epoch(t, config.batch_size)
        n_t = config.sampling.count(tau, config.batch_size)
        eta_t = config.rate.rate(tau)
        u = sample_unit_sphere(d, rng)
        x_hat = x + config.delta * u
        if not region.contains(x_hat):
            raise RuntimeError(
                f"feasibility violated at t={t}: played action {x_hat} left the "
                "admissible set")
        xi = noise.sample(t, n_t, rng)
        costs = np.asarray(cost(x_hat, xi), dtype=float)
        if costs.shape != (n_t,):
            raise ConfigurationError(
                f"cost model returned shape {costs.shape} for {n_t} noise draws")
        if not np.all(np.isfinite(costs)):
            raise ConfigurationError(
                f"cost model returned non-finite values at t={t}, x={x_hat}")
        cvar_est = float(cvar_of_values(costs, config.alpha))
        grad = gradient_estimate(cvar_est, u, config.delta, d)
        records.append(IterationRecord(
            t=t, batch=j, epoch=tau,
            x=x.copy(), u=u, x_hat=x_hat,
            n_samples=n_t, costs=costs,
            cvar_estimate=cvar_est, gradient=grad, eta=eta_t,
        ))
        x = inner.project(x - eta_t * grad)
    return records
