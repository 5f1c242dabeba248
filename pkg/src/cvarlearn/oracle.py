"""Ground-truth evaluation of per-step CVaR and dynamic regret.

The true CVaR of a decision is computed on a deterministic mid-quantile grid
of the step's noise distribution (bias O(1/grid_n) for Lipschitz costs,
reproducible without Monte Carlo). Per-step optimal actions come from an
exhaustive 1-D action grid, matching the evaluation protocol of the pricing
study.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import AdmissibleSet, Ball, Box, ConfigurationError, CostModel, NoiseSequence, as_vector
from .risk import cvar_of_values

__all__ = [
    "true_cvar",
    "action_grid",
    "optimal_action_grid",
    "optimal_action_series",
    "RegretReport",
    "dynamic_regret",
    "accumulated_loss",
    "batch_optimal_actions",
]


def _mid_quantiles(grid_n: int) -> np.ndarray:
    grid_n = int(grid_n)
    if grid_n < 1000:
        raise ConfigurationError("quantile grid needs >= 1000 points")
    return (np.arange(grid_n) + 0.5) / grid_n


def true_cvar(cost: CostModel, noise: NoiseSequence, t: int, x, alpha: float,
              grid_n: int = 10_000) -> float:
    """Deterministic CVaR of ``J(x, xi_t)`` via a mid-quantile noise grid."""
    x = as_vector(x)
    xi = np.asarray(noise.quantile(t, _mid_quantiles(grid_n)), dtype=float)
    values = np.asarray(cost(x, xi), dtype=float)
    return float(cvar_of_values(values, alpha))


def action_grid(region: AdmissibleSet, k: int) -> np.ndarray:
    """``k`` grid points at the centers of equal subintervals of a 1-D set."""
    k = int(k)
    if k < 2:
        raise ConfigurationError("action grid needs at least 2 points")
    if region.dim != 1:
        raise ConfigurationError(
            "grid search over optimal actions supports 1-D decision sets only")
    if isinstance(region, Box):
        lo, hi = float(region.lower[0]), float(region.upper[0])
    elif isinstance(region, Ball):
        lo, hi = float(region.center[0] - region.radius), float(region.center[0] + region.radius)
    else:  # pragma: no cover - union is exhaustive
        raise ConfigurationError(f"unsupported set type {type(region)!r}")
    return lo + (np.arange(k) + 0.5) * (hi - lo) / k


def _grid_cvars(cost: CostModel, noise: NoiseSequence, t: int, xs: np.ndarray,
                alpha: float, grid_n: int) -> np.ndarray:
    """CVaR at step ``t`` for every action in ``xs`` (1-D decisions)."""
    xi = np.asarray(noise.quantile(t, _mid_quantiles(grid_n)), dtype=float)
    if cost.vectorized:
        values = np.asarray(cost(xs[:, None], xi[None, :]), dtype=float)
        if values.shape != (xs.size, xi.size):
            raise ConfigurationError(
                "a cost marked vectorized must broadcast to (actions, noise); "
                f"got shape {values.shape}")
    else:
        values = np.stack([np.asarray(cost(np.atleast_1d(x), xi), dtype=float)
                           for x in xs])
    return cvar_of_values(values, alpha)


def optimal_action_grid(cost: CostModel, noise: NoiseSequence, t: int,
                        region: AdmissibleSet, alpha: float, k: int = 100,
                        grid_n: int = 10_000) -> tuple[np.ndarray, float]:
    """Grid minimizer of the step-``t`` CVaR and its value.

    Ties break toward the smaller coordinate (first grid hit).
    """
    xs = action_grid(region, k)
    cv = _grid_cvars(cost, noise, t, xs, alpha, grid_n)
    i = int(np.argmin(cv))
    return np.array([xs[i]]), float(cv[i])


def optimal_action_series(cost: CostModel, noise: NoiseSequence,
                          region: AdmissibleSet, alpha: float, horizon: int,
                          k: int = 100, grid_n: int = 10_000
                          ) -> tuple[np.ndarray, np.ndarray]:
    """Per-step grid-optimal actions and CVaR values for ``t = 1..horizon``.

    Trajectory-independent, so one series can be shared across trials.
    """
    xs = action_grid(region, k)
    x_star = np.empty(horizon)
    c_star = np.empty(horizon)
    for t in range(1, horizon + 1):
        cv = _grid_cvars(cost, noise, t, xs, alpha, grid_n)
        i = int(np.argmin(cv))
        x_star[t - 1] = xs[i]
        c_star[t - 1] = cv[i]
    return x_star, c_star


@dataclass(frozen=True)
class RegretReport:
    """Per-step ground-truth evaluation of a played trajectory."""

    played_cvar: np.ndarray       # C_t at the played (perturbed) actions
    optimal_cvar: np.ndarray      # C_t at the per-step grid optima
    optimal_actions: np.ndarray   # the grid optima themselves
    cumulative_regret: np.ndarray  # running sum of (played - optimal)
    accumulated_loss: np.ndarray   # running sum of played CVaR

    @property
    def final_regret(self) -> float:
        return float(self.cumulative_regret[-1])


def _played_actions(trajectory: Sequence) -> list[np.ndarray]:
    return [rec.x_hat for rec in trajectory]


def dynamic_regret(trajectory: Sequence, cost: CostModel, noise: NoiseSequence,
                   region: AdmissibleSet, alpha: float, k: int = 100,
                   grid_n: int = 10_000,
                   optima: tuple[np.ndarray, np.ndarray] | None = None
                   ) -> RegretReport:
    """Evaluate a trajectory against the per-step best actions in hindsight.

    ``optima`` may carry a precomputed ``(x_star, c_star)`` series (e.g.
    shared across trials); otherwise it is computed here.
    """
    horizon = len(trajectory)
    if horizon == 0:
        raise ConfigurationError("empty trajectory")
    if optima is None:
        optima = optimal_action_series(cost, noise, region, alpha, horizon, k, grid_n)
    x_star, c_star = optima
    if len(c_star) < horizon:
        raise ConfigurationError("optima series shorter than the trajectory")
    played = np.array([
        true_cvar(cost, noise, rec.t, rec.x_hat, alpha, grid_n)
        for rec in trajectory
    ])
    gaps = played - c_star[:horizon]
    return RegretReport(
        played_cvar=played,
        optimal_cvar=np.asarray(c_star[:horizon], dtype=float),
        optimal_actions=np.asarray(x_star[:horizon], dtype=float),
        cumulative_regret=np.cumsum(gaps),
        accumulated_loss=np.cumsum(played),
    )


def accumulated_loss(trajectory: Sequence, cost: CostModel, noise: NoiseSequence,
                     alpha: float, grid_n: int = 10_000) -> np.ndarray:
    """Running sum of the true CVaR at the played actions."""
    played = np.array([
        true_cvar(cost, noise, rec.t, rec.x_hat, alpha, grid_n)
        for rec in trajectory
    ])
    return np.cumsum(played)


def batch_optimal_actions(cost: CostModel, noise: NoiseSequence,
                          steps: Iterable[int], region: AdmissibleSet,
                          alpha: float, k: int = 100, grid_n: int = 10_000
                          ) -> tuple[np.ndarray, float]:
    """Single best grid action over a batch of steps and its summed CVaR."""
    steps = list(steps)
    if not steps:
        raise ConfigurationError("batch must contain at least one step")
    xs = action_grid(region, k)
    totals = np.zeros_like(xs)
    for t in steps:
        totals += _grid_cvars(cost, noise, t, xs, alpha, grid_n)
    i = int(np.argmin(totals))
    return np.array([xs[i]]), float(totals[i])
