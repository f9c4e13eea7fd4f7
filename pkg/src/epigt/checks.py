"""Property suites behind the verify command and the test suite.

Each suite returns CheckReport rows: decoder optimality and monotonicity
on exhaustively decodable instances, structural decoder guarantees, grid
monotonicity of the ratio functions behind the prior bounds, and prior
boundedness along simulated trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .decoders import (
    comp_decode,
    dd_decode,
    exact_error_probability,
    make_random_decoder,
    map_decoder_for,
)
from .designs import TestMatrix, apply_tests
from .model import ModelParams
from .pipeline import DecoderName, Strategy, run_fixed_budget_trajectory
from .priors import PriorVector

TOL = 1e-12

GRID_STEP = 1e-2


@dataclass
class CheckReport:
    """Outcome of one property suite."""

    name: str
    passed: bool
    trials: int
    violations: int
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.name}: {self.violations} violations in {self.trials} trials{extra}"


def random_instance(
    rng: np.random.Generator, max_n: int = 6, max_t: int = 6
) -> tuple[TestMatrix, PriorVector]:
    """A small random design with priors in (0, 1/2]."""
    n = int(rng.integers(1, max_n + 1))
    T = int(rng.integers(1, max_t + 1))
    tests = []
    for _ in range(T):
        size = int(rng.integers(1, n + 1))
        tests.append(np.sort(rng.choice(n, size=size, replace=False)).astype(np.int64))
    pool = np.arange(n, dtype=np.int64)
    tm = TestMatrix(pool=pool, tests=tests)
    p = rng.uniform(1e-3, 0.5, size=n)
    return tm, PriorVector(pool=pool, p=p)


def check_map_optimality(
    n_instances: int = 200,
    seed: int = 0,
    rivals_per_instance: int = 3,
    tol: float = TOL,
) -> CheckReport:
    """Exhaustive decoder never loses to COMP, DD, or random decoders."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(n_instances):
        tm, pv = random_instance(rng)
        err_map = exact_error_probability(tm, pv, map_decoder_for(pv))
        rivals: list[Callable] = [comp_decode, dd_decode]
        for _ in range(rivals_per_instance):
            rivals.append(make_random_decoder(tm.T, tm.n, rng))
        for rival in rivals:
            err = exact_error_probability(tm, pv, rival)
            gap = err_map - err
            if gap > tol:
                violations += 1
                worst = max(worst, gap)
    return CheckReport(
        name="map_optimality",
        passed=violations == 0,
        trials=n_instances,
        violations=violations,
        detail=f"worst gap {worst:.3g}" if violations else "",
    )


def check_prior_monotonicity(
    n_instances: int = 200, seed: int = 1, tol: float = TOL
) -> CheckReport:
    """Raising one prior within (0, 1/2] never lowers the exact error."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(n_instances):
        tm, pv = random_instance(rng)
        err = exact_error_probability(tm, pv, map_decoder_for(pv))
        j = int(rng.integers(tm.n))
        raised = pv.p.copy()
        raised[j] = rng.uniform(raised[j], 0.5)
        pv2 = PriorVector(pool=pv.pool, p=raised)
        err2 = exact_error_probability(tm, pv2, map_decoder_for(pv2))
        gap = err - err2
        if gap > tol:
            violations += 1
            worst = max(worst, gap)
    return CheckReport(
        name="prior_monotonicity",
        passed=violations == 0,
        trials=n_instances,
        violations=violations,
        detail=f"worst gap {worst:.3g}" if violations else "",
    )


def check_prior_sandwich(
    n_instances: int = 200, seed: int = 2, tol: float = TOL
) -> CheckReport:
    """Uniform p_min and p_max instances bracket the exact error."""
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(n_instances):
        tm, pv = random_instance(rng)
        err = exact_error_probability(tm, pv, map_decoder_for(pv))
        lo = PriorVector(pool=pv.pool, p=np.full(tm.n, pv.p_min))
        hi = PriorVector(pool=pv.pool, p=np.full(tm.n, pv.p_max))
        err_lo = exact_error_probability(tm, lo, map_decoder_for(lo))
        err_hi = exact_error_probability(tm, hi, map_decoder_for(hi))
        if err_lo > err + tol or err > err_hi + tol:
            violations += 1
    return CheckReport(
        name="prior_sandwich",
        passed=violations == 0,
        trials=n_instances,
        violations=violations,
    )


def check_decoder_guarantees(
    n_instances: int = 200, seed: int = 3
) -> CheckReport:
    """DD never reports a false positive; COMP never a false negative."""
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(n_instances):
        tm, pv = random_instance(rng)
        truth = rng.random(tm.n) < pv.p
        results = apply_tests(tm, truth)
        dd = dd_decode(tm, results)
        comp = comp_decode(tm, results)
        if np.any(dd.estimate & ~truth):
            violations += 1
        if np.any(truth & ~comp.estimate):
            violations += 1
        if np.any(dd.estimate & ~comp.estimate):
            violations += 1
    return CheckReport(
        name="decoder_guarantees",
        passed=violations == 0,
        trials=n_instances,
        violations=violations,
    )


def _grid_monotone(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    step: float,
    increasing: bool,
    tol: float,
) -> tuple[int, int]:
    xs = np.arange(lo, hi + step / 2, step)
    vals = np.array([f(float(x)) for x in xs])
    diffs = np.diff(vals)
    bad = diffs < -tol if increasing else diffs > tol
    return int(bad.sum()), len(diffs)


def ratio_shrink(x: float, kappa: float) -> float:
    """(1 - kappa x) / (1 - x), increasing on (0, 1) for kappa in (0, 1)."""
    return (1.0 - kappa * x) / (1.0 - x)


def escape_decay(x: float, q2: float) -> float:
    """(1 - q2)^x, decreasing in x for q2 in (0, 1)."""
    return (1.0 - q2) ** x

def risk_ratio(x: float, q1: float, q2: float) -> float:
    """(1 - (1-q1)^x) / (1 - (1-q2)^x), non-increasing for x >= 1, q1 >= q2."""
    return -np.expm1(x * np.log1p(-q1)) / -np.expm1(x * np.log1p(-q2))


def check_ratio_grids(
    step: float = GRID_STEP, tol: float = TOL, x_hi: float = 50.0
) -> list[CheckReport]:
    """Grid monotonicity of the three ratio functions behind the bounds."""
    reports = []
    sqrt_half = 1.0 - 1.0 / np.sqrt(2.0)
    q_pairs = [
        (0.012, 0.0004),
        (0.03, 0.0004),
        (sqrt_half / 20.0, sqrt_half / 1000.0),
        (0.2, 0.2),
    ]
    violations = trials = 0
    for kappa in (0.1, 0.3, 0.5, 0.7, 0.9):
        v, t = _grid_monotone(
            lambda x: ratio_shrink(x, kappa), step, 1.0 - step, step, True, tol
        )
        violations += v
        trials += t
    reports.append(
        CheckReport("shrink_ratio_increasing", violations == 0, trials, violations)
    )
    violations = trials = 0
    for _, q2 in q_pairs:
        v, t = _grid_monotone(
            lambda x: escape_decay(x, q2), step, x_hi, step, False, tol
        )
        violations += v
        trials += t
    reports.append(
        CheckReport("escape_decay_decreasing", violations == 0, trials, violations)
    )
    violations = trials = 0
    for q1, q2 in q_pairs:
        v, t = _grid_monotone(
            lambda x: risk_ratio(x, q1, q2), 1.0, x_hi, step, False, tol
        )
        violations += v
        trials += t
    reports.append(
        CheckReport("risk_ratio_nonincreasing", violations == 0, trials, violations)
    )
    return reports


def check_prior_boundedness(
    params: ModelParams,
    horizon: int,
    n_trajectories: int,
    base_seed: int = 0,
    strategy: Strategy = Strategy.COMPLETE,
) -> CheckReport:
    """Daily priors stay at or below 1/2 and their spread below q1/q2.

    Runs believed-state trajectories (exact under the complete strategy)
    and inspects each day's prior extremes; the ratio check skips days with
    an empty pool or a zero minimum.
    """
    ratio_cap = params.q1 / params.q2 if params.q2 > 0 else np.inf
    violations = 0
    trials = 0
    worst_p = 0.0
    worst_ratio = 0.0
    for i in range(n_trajectories):
        records = run_fixed_budget_trajectory(
            params, horizon, strategy, DecoderName.DD, base_seed, i
        )
        for rec in records:
            trials += 1
            worst_p = max(worst_p, rec.p_max)
            if rec.p_max > 0.5 + TOL:
                violations += 1
            if rec.pool_size > 0 and rec.p_min > 0.0:
                ratio = rec.p_max / rec.p_min
                worst_ratio = max(worst_ratio, ratio)
                if ratio > ratio_cap + 1e-9:
                    violations += 1
    return CheckReport(
        name="prior_boundedness",
        passed=violations == 0,
        trials=trials,
        violations=violations,
        detail=f"max prior {worst_p:.6f}, max ratio {worst_ratio:.3f}",
    )


def run_all(
    n_instances: int = 200, seed: int = 0, fast: bool = False
) -> list[CheckReport]:
    """The full verify menu; fast mode trims instance counts."""
    count = 40 if fast else n_instances
    reports = [
        check_map_optimality(count, seed),
        check_prior_monotonicity(count, seed + 1),
        check_prior_sandwich(count, seed + 2),
        check_decoder_guarantees(count, seed + 3),
    ]
    reports.extend(check_ratio_grids())
    sqrt_half = 1.0 - 1.0 / np.sqrt(2.0)
    params = ModelParams(
        N=1000,
        C=20,
        p_init=0.5,
        q1=sqrt_half / 20.0,
        q2=sqrt_half / 1000.0,
        r=0.1,
    )
    reports.append(
        check_prior_boundedness(params, 20 if fast else 50, 5 if fast else 20, seed)
    )
    return reports
