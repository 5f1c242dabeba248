"""Geometry and problem-definition primitives.

Decision vectors are plain 1-D numpy arrays. Admissible sets are axis-aligned
boxes or Euclidean balls with exact projections, an inradius/diameter, and a
centered shrink operation that keeps sphere-perturbed actions feasible. Cost
models bundle an evaluation rule with its declared bound, Lipschitz constant,
and strong-convexity modulus. Noise sequences expose a per-step CDF, quantile
function, and inverse-CDF sampler.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

__all__ = [
    "ConfigurationError",
    "as_vector",
    "Box",
    "Ball",
    "AdmissibleSet",
    "project",
    "shrunk_set",
    "set_diameter",
    "CostModel",
    "NoiseSequence",
]

#: Absolute tolerance for set-membership tests (double precision, unit scale).
MEMBERSHIP_TOL = 1e-12


class ConfigurationError(ValueError):
    """Invalid parameter or incompatible problem setup."""


def as_vector(x) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float array of dimension >= 1."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1 or v.size < 1:
        raise ConfigurationError(f"decision vector must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ConfigurationError("decision vector has non-finite coordinates")
    return v


def _frozen_array(obj, field: str, value) -> None:
    arr = np.asarray(value, dtype=float)
    arr.flags.writeable = False
    object.__setattr__(obj, field, arr)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``{x : lower <= x <= upper}``.

    The inradius is the smallest half-width, the diameter is the Euclidean
    length of the main diagonal, and the center is the midpoint (which is
    also the Chebyshev center).
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ConfigurationError("box bounds must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ConfigurationError("box bounds must be finite")
        if not np.all(lo < hi):
            raise ConfigurationError("box requires lower < upper in every coordinate")
        _frozen_array(self, "lower", lo)
        _frozen_array(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def inradius(self) -> float:
        return float(0.5 * np.min(self.upper - self.lower))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def project(self, x) -> np.ndarray:
        x = as_vector(x)
        if x.size != self.dim:
            raise ConfigurationError(
                f"dimension mismatch: point is {x.size}-D, set is {self.dim}-D"
            )
        return np.clip(x, self.lower, self.upper)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        x = as_vector(x)
        if x.size != self.dim:
            return False
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def shrink(self, delta: float) -> "Box":
        factor = _shrink_factor(self, delta)
        half = 0.5 * (self.upper - self.lower) * factor
        c = self.center
        return Box(c - half, c + half)


@dataclass(frozen=True)
class Ball:
    """Euclidean ball with given center and radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise ConfigurationError("ball center must be a finite 1-D array")
        r = float(self.radius)
        if not (np.isfinite(r) and r > 0):
            raise ConfigurationError("ball radius must be positive")
        _frozen_array(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def inradius(self) -> float:
        return self.radius

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def project(self, x) -> np.ndarray:
        x = as_vector(x)
        if x.size != self.dim:
            raise ConfigurationError(
                f"dimension mismatch: point is {x.size}-D, set is {self.dim}-D"
            )
        offset = x - self.center
        dist = float(np.linalg.norm(offset))
        # ulp-scale slack keeps the projection exactly idempotent: a point just
        # rescaled onto the sphere may re-measure a few ulps outside it.
        if dist <= self.radius * (1.0 + 1e-14):
            return x
        return self.center + offset * (self.radius / dist)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        x = as_vector(x)
        if x.size != self.dim:
            return False
        return float(np.linalg.norm(x - self.center)) <= self.radius + tol

    def shrink(self, delta: float) -> "Ball":
        factor = _shrink_factor(self, delta)
        return Ball(self.center, self.radius * factor)


AdmissibleSet = Union[Box, Ball]


def _shrink_factor(region: AdmissibleSet, delta: float) -> float:
    delta = float(delta)
    r = region.inradius
    if not (0.0 <= delta < r):
        raise ConfigurationError(
            f"smoothing radius {delta} must satisfy 0 <= delta < inradius {r}"
        )
    return 1.0 - delta / r


def project(region: AdmissibleSet, x) -> np.ndarray:
    """Euclidean projection of ``x`` onto ``region``.

    Interior points are returned unchanged; the result always lies in the set.
    """
    return region.project(x)


def shrunk_set(region: AdmissibleSet, delta: float) -> AdmissibleSet:
    """Contract ``region`` about its center by the factor ``1 - delta/inradius``.

    Every point of the shrunk set stays feasible in the original set after an
    arbitrary perturbation of Euclidean length ``delta``. The contraction is
    performed about the set's own center, so it is coordinate-frame-free and
    works for sets that do not contain the origin.
    """
    return region.shrink(delta)


def set_diameter(region: AdmissibleSet) -> float:
    """Largest Euclidean distance between two points of the set."""
    return region.diameter


@dataclass(frozen=True)
class CostModel:
    """Random cost ``J(x, xi)`` with declared regularity metadata.

    Parameters
    ----------
    fn:
        Evaluation rule. Must accept a decision (1-D array or scalar) and a
        scalar or 1-D array of noise values, broadcasting over the noise.
        When ``vectorized`` is true, ``fn`` is additionally expected to obey
        full numpy broadcasting in both arguments (used to batch grid
        evaluations); this holds for any formula built from ufuncs.
    bound:
        Uniform bound ``U`` on ``|J|`` over the admissible set and the
        declared noise support.
    lipschitz:
        Lipschitz constant ``L0`` of ``J`` in the decision.
    strong_convexity:
        Strong-convexity modulus ``m`` in the decision; 0 if merely convex.
    """

    fn: Callable[..., np.ndarray]
    bound: float
    lipschitz: float
    strong_convexity: float = 0.0
    vectorized: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.bound) and self.bound > 0):
            raise ConfigurationError("cost bound U must be positive and finite")
        if not (np.isfinite(self.lipschitz) and self.lipschitz > 0):
            raise ConfigurationError("Lipschitz constant L0 must be positive and finite")
        if self.strong_convexity < 0:
            raise ConfigurationError("strong-convexity modulus must be >= 0")

    def __call__(self, x, xi):
        return self.fn(x, xi)


class NoiseSequence(ABC):
    """Time-indexed family of scalar noise distributions over ``t = 1..horizon``.

    Subclasses provide the per-step CDF and quantile function; sampling is
    derived by inverse transform, so a single uniform draw is consumed per
    sample regardless of the distribution family.
    """

    horizon: int

    def __init__(self, horizon: int):
        horizon = int(horizon)
        if horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        self.horizon = horizon

    def _check_t(self, t: int) -> int:
        t = int(t)
        if not 1 <= t <= self.horizon:
            raise ConfigurationError(f"step {t} outside horizon [1, {self.horizon}]")
        return t

    @abstractmethod
    def cdf(self, t: int, y):
        """P(xi_t <= y); vectorized in ``y``."""

    @abstractmethod
    def quantile(self, t: int, q):
        """Generalized inverse of the CDF at levels ``q`` in [0, 1]."""

    def sample(self, t: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``size`` i.i.d. values of xi_t by inverse transform."""
        t = self._check_t(t)
        return np.asarray(self.quantile(t, rng.random(size)), dtype=float)

    def support(self, t: int) -> tuple[float, float]:
        """Interval certainly containing the mass of xi_t (used for quadrature
        and bound estimation); defaults to the 1e-12 .. 1-1e-12 quantile range."""
        t = self._check_t(t)
        return (float(self.quantile(t, 1e-12)), float(self.quantile(t, 1.0 - 1e-12)))
