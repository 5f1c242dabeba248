"""Runtime property suites behind the ``verify`` CLI subcommand.

Each suite re-checks the mathematical invariants of one module with fixed
seeds and returns one result per property, so a corrupted build fails loudly
at the command line without needing the development test suite installed.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from . import environment, harness, risk, smoothing
from .risk import EmpiricalCdf, build_ecdf, cvar_discrete

__all__ = ["CheckResult", "risk_suite", "smoothing_suite", "environment_suite",
           "run_suites", "SUITES"]


class CheckResult(NamedTuple):
    suite: str
    name: str
    passed: bool
    detail: str


def _result(suite: str, name: str, passed: bool, detail: str = "") -> CheckResult:
    return CheckResult(suite, name, bool(passed), detail)


def _random_samples(rng: np.random.Generator, max_n: int = 40) -> np.ndarray:
    n = int(rng.integers(1, max_n + 1))
    return rng.uniform(-5.0, 5.0, size=n)


def risk_suite(seed: int = 20240617,
               cvar_fn: Callable[[EmpiricalCdf, float], float] = cvar_discrete
               ) -> list[CheckResult]:
    # one generator per property so each check is deterministic on its own
    streams = [np.random.default_rng([seed, i]) for i in range(4)]
    out: list[CheckResult] = []

    rng = streams[0]
    worst = 0.0
    ok = True
    for _ in range(500):
        ecdf = build_ecdf(_random_samples(rng))
        a1, a2 = sorted(rng.uniform(0.02, 1.0, size=2))
        gap = cvar_fn(ecdf, a1) - cvar_fn(ecdf, a2)
        worst = min(worst, gap)
        ok &= gap >= -1e-12
    out.append(_result("risk", "cvar-monotone-in-alpha", ok, f"worst gap {worst:.3e}"))

    rng = streams[1]
    ok = True
    worst = 0.0
    for _ in range(200):
        s = _random_samples(rng)
        alpha = float(rng.uniform(0.05, 1.0))
        c = float(rng.uniform(-10, 10))
        lam = float(rng.uniform(0.1, 10))
        base = cvar_fn(build_ecdf(s), alpha)
        shift = cvar_fn(build_ecdf(s + c), alpha) - (base + c)
        scale = cvar_fn(build_ecdf(lam * s), alpha) - lam * base
        worst = max(worst, abs(shift), abs(scale))
        ok &= abs(shift) <= 1e-12 and abs(scale) <= 1e-12
    out.append(_result("risk", "cvar-translation-and-scaling", ok,
                       f"worst deviation {worst:.3e}"))

    rng = streams[2]
    ok = True
    worst = 0.0
    for _ in range(50):
        s = _random_samples(rng)
        alpha = float(rng.uniform(0.05, 1.0))
        ecdf = build_ecdf(s)
        got = cvar_fn(ecdf, alpha)
        vgrid = np.linspace(s.min(), s.max(), 100_000)
        ru = vgrid + np.maximum(s[None, :] - vgrid[:, None], 0.0).mean(axis=1) / alpha
        spacing = (s.max() - s.min()) / (len(vgrid) - 1) if s.size > 1 else 0.0
        tol = spacing / alpha + 1e-12
        gap = abs(got - ru.min())
        var = risk.empirical_quantile(ecdf, 1.0 - alpha)
        exact = abs(got - risk.ru_functional(ecdf, alpha, var))
        worst = max(worst, gap, exact)
        ok &= gap <= tol and exact <= 1e-12
    out.append(_result("risk", "cvar-equals-ru-minimum", ok, f"worst gap {worst:.3e}"))

    rng = streams[3]
    ok = True
    worst = -np.inf
    for _ in range(1000):
        # U is the length of the value range (nonnegative bounded costs)
        bound = float(rng.uniform(0.5, 5.0))
        f = build_ecdf(rng.uniform(0.0, bound, size=int(rng.integers(1, 40))))
        g = build_ecdf(rng.uniform(0.0, bound, size=int(rng.integers(1, 40))))
        alpha = float(rng.uniform(0.05, 1.0))
        lhs = abs(cvar_fn(f, alpha) - cvar_fn(g, alpha))
        rhs = risk.cvar_error_bound(bound, alpha, risk.sup_cdf_distance(f, g))
        worst = max(worst, lhs - rhs)
        ok &= lhs <= rhs + 1e-12
    out.append(_result("risk", "cvar-kolmogorov-bound", ok,
                       f"worst excess {worst:.3e}"))

    reps, n = 2000, 100
    eps = risk.dkw_epsilon(n, 0.05)
    draws = np.sort(np.random.default_rng(0).random((reps, n)), axis=1)
    ranks = np.arange(1, n + 1) / n
    dev = np.maximum(ranks - draws, draws - (np.arange(n) / n)).max(axis=1)
    freq = float(np.mean(dev >= eps))
    out.append(_result("risk", "dkw-band-validity", freq <= 0.05,
                       f"violation frequency {freq:.4f} vs 0.05"))
    return out


def smoothing_suite(seed: int = 20240617) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out: list[CheckResult] = []

    ok = all(float(smoothing.sample_unit_sphere(1, rng)[0]) in (-1.0, 1.0)
             for _ in range(100))
    norms = [abs(np.linalg.norm(smoothing.sample_unit_sphere(d, rng)) - 1.0)
             for d in (2, 3, 7) for _ in range(100)]
    ok &= max(norms) <= 1e-12
    out.append(_result("smoothing", "sphere-unit-norm", ok,
                       f"max norm error {max(norms):.2e}"))

    mean = np.mean([smoothing.sample_unit_sphere(2, rng) for _ in range(100_000)],
                   axis=0)
    drift = float(np.linalg.norm(mean))
    out.append(_result("smoothing", "sphere-symmetry", drift <= 0.02,
                       f"mean-direction norm {drift:.4f} vs 0.02"))

    ok = True
    worst = 0.0
    for x in np.arange(-2.0, 2.25, 0.25):
        # dyadic x and delta keep every float operation exact (zero tolerance)
        delta = 0.25
        avg = 0.5 * sum(
            smoothing.gradient_estimate((x + delta * s) ** 2, np.array([s]), delta)[0]
            for s in (1.0, -1.0))
        worst = max(worst, abs(avg - 2.0 * x))
        ok &= avg == 2.0 * x
    out.append(_result("smoothing", "two-direction-quadratic-gradient", ok,
                       f"worst error {worst:.3e}"))

    ok = True
    for _ in range(200):
        d = int(rng.integers(1, 6))
        delta = float(rng.uniform(0.01, 1.0))
        bound = float(rng.uniform(0.5, 5.0))
        cv = float(rng.uniform(-bound, bound))
        g = smoothing.gradient_estimate(cv, smoothing.sample_unit_sphere(d, rng), delta)
        ok &= np.linalg.norm(g) <= d * bound / delta + 1e-12
    out.append(_result("smoothing", "gradient-norm-bound", ok, "||g|| <= dU/delta"))

    out.append(_mc_consistency_check(rng, n_draws=20_000))
    return out


def _mc_consistency_check(rng: np.random.Generator, n_draws: int,
                          suite: str = "smoothing") -> CheckResult:
    """Mean of the one-point estimator vs finite differences of the smoothed
    CVaR, at a fixed interior point of the pricing scenario."""
    config = harness.ExperimentConfig(horizon=6000)
    scenario = harness.build_scenario(config)
    t, x, delta, alpha, n_per_draw = 3000, np.array([2.0]), 0.05, 0.5, 200
    est = np.empty(n_draws)
    for i in range(n_draws):
        u = smoothing.sample_unit_sphere(1, rng)
        xi = scenario.noise.sample(t, n_per_draw, rng)
        cv = risk.cvar_of_values(np.asarray(scenario.cost(x + delta * u, xi)), alpha)
        est[i] = smoothing.gradient_estimate(cv, u, delta)[0]
    se = est.std(ddof=1) / math.sqrt(n_draws)
    h = 1e-4
    fd = (smoothing.smoothed_cvar_mc(scenario.cost, scenario.noise, t, x + h,
                                     delta, alpha, n_noise=20_000)
          - smoothing.smoothed_cvar_mc(scenario.cost, scenario.noise, t, x - h,
                                       delta, alpha, n_noise=20_000)) / (2 * h)
    gap = abs(est.mean() - fd)
    return _result(suite, "estimator-matches-smoothed-gradient", gap <= 3 * se,
                   f"gap {gap:.5f} vs 3*SE {3 * se:.5f}")


def environment_suite(seed: int = 20240617) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out: list[CheckResult] = []

    def random_interval():
        a = float(rng.uniform(-3, 3))
        return a, a + float(rng.uniform(0.01, 4.0))

    ok = True
    worst = 0.0
    for _ in range(500):
        i1, i2, i3 = random_interval(), random_interval(), random_interval()
        d12 = environment.w1_uniform(*i1, *i2)
        d21 = environment.w1_uniform(*i2, *i1)
        d13 = environment.w1_uniform(*i1, *i3)
        d32 = environment.w1_uniform(*i3, *i2)
        self_d = environment.w1_uniform(*i1, *i1)
        ok &= d12 >= 0 and abs(d12 - d21) <= 1e-12 and self_d <= 1e-12
        ok &= d12 <= d13 + d32 + 1e-10
        worst = max(worst, d12 - (d13 + d32))
    out.append(_result("environment", "w1-metric-axioms", ok,
                       f"worst triangle excess {worst:.3e}"))

    ok = True
    worst = 0.0
    for _ in range(500):
        i1, i2 = random_interval(), random_interval()
        closed = environment.w1_uniform(*i1, *i2)
        lo = min(i1[0], i2[0])
        hi = max(i1[1], i2[1])
        seqs = [environment.constant_uniform(1, *iv) for iv in (i1, i2)]
        numeric = environment.w1_numeric(lambda y: seqs[0].cdf(1, y),
                                         lambda y: seqs[1].cdf(1, y),
                                         (lo, hi), grid=200_000)
        worst = max(worst, abs(closed - numeric))
        ok &= abs(closed - numeric) <= 1e-6
    out.append(_result("environment", "w1-closed-vs-numeric", ok,
                       f"worst gap {worst:.3e}"))

    ok = True
    worst = -np.inf
    grid = (np.arange(100_000) + 0.5) / 100_000
    for _ in range(200):
        i1, i2 = random_interval(), random_interval()
        lipschitz = float(rng.uniform(0.1, 5.0))
        alpha = float(rng.uniform(0.05, 1.0))
        c1 = risk.cvar_of_values(lipschitz * (i1[0] + grid * (i1[1] - i1[0])), alpha)
        c2 = risk.cvar_of_values(lipschitz * (i2[0] + grid * (i2[1] - i2[0])), alpha)
        rhs = lipschitz / alpha * environment.w1_uniform(*i1, *i2)
        worst = max(worst, abs(c1 - c2) - rhs)
        ok &= abs(c1 - c2) <= rhs + 1e-6
    out.append(_result("environment", "cvar-wasserstein-bound", ok,
                       f"worst excess {worst:.3e}"))

    rates = []
    for horizon in (1500, 3000, 6000):
        noise = environment.parking_noise(horizon)
        rates.append(environment.variation_budget(noise, horizon) / horizon)
    ok = rates[0] > rates[1] > rates[2]
    out.append(_result("environment", "sublinear-variation-budget", ok,
                       "V(T)/T = " + ", ".join(f"{r:.3e}" for r in rates)))
    return out


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "risk": risk_suite,
    "smoothing": smoothing_suite,
    "environment": environment_suite,
}


def run_suites(which: str = "all") -> list[CheckResult]:
    """Run one named suite or all of them."""
    if which == "all":
        results: list[CheckResult] = []
        for fn in SUITES.values():
            results.extend(fn())
        return results
    if which not in SUITES:
        raise ValueError(f"unknown suite {which!r}; expected one of "
                         f"{(*SUITES, 'all')}")
    return SUITES[which]()
