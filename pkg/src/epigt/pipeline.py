"""Daily testing and intervention loop over the block-model epidemic.

Each simulated day runs five steps: decode yesterday's pooled results,
isolate the decoded positives, refresh the per-community priors from the
newly decoded counts, test today's pool against the pre-step truth, then
advance the epidemic one step.  Results therefore act with a one-day lag:
the cohort infected during day d's step is caught by day d+1's tests and
isolated at the start of day d+2.

Two experiment modes share that loop.  The minimum-tests mode evolves the
epidemic under complete information (decoded = truth, so every strategy
shares one trajectory per seed) and searches each day for the smallest
test count at which a fresh random design decodes the day's pool exactly.
The fixed-budget mode spends a heuristic budget each day and lets the
estimator's own decodes drive isolation and priors, so decoding errors
propagate: missed infected stay in the pool and remain catchable while
they last.

Reported infected counts include isolated individuals, and recovery draws
apply to them as well; transmission, pools, and priors use only the free
population.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from ._fastpath import (
    EMPTY_TEST_GUARD,
    cca_empty_test_bound,
    ccw_empty_test_bound,
    dd_success_cca,
    dd_success_ccw,
)
from .bounds import BoundParams, entropy_lower_bound, heuristic_budget
from .decoders import comp_decode, dd_decode, map_decode
from .designs import (
    TestMatrix,
    TestResults,
    apply_tests,
    cca_design,
    cca_inclusion_probabilities,
    column_weight,
    complete_design,
    constant_column_weight_design,
)
from .model import (
    INFECTED,
    ModelParams,
    PopulationState,
    gillespie_trajectory,
    init_population,
    isolate,
    step,
)
from .priors import EstimatorState, PriorVector, compute_priors, update_from_decode

DEFAULT_TEST_CAP = 1000


class Strategy(str, Enum):
    NO_TESTING = "no_testing"
    COMPLETE = "complete"
    RND_MEAN = "rnd_mean"
    RND_MAX = "rnd_max"
    CCA = "cca"


GROUP_STRATEGIES = (Strategy.RND_MEAN, Strategy.RND_MAX, Strategy.CCA)


class Mode(str, Enum):
    MIN_TESTS = "min_tests"
    FIXED_BUDGET = "fixed_budget"


class DecoderName(str, Enum):
    DD = "dd"
    COMP = "comp"
    MAP = "map"


# stream codes keep per-strategy randomness stable no matter which
# strategies a run includes; 0 is the shared epidemic stream
_STREAM_CODE = {
    Strategy.COMPLETE: 1,
    Strategy.RND_MEAN: 2,
    Strategy.RND_MAX: 3,
    Strategy.CCA: 4,
    Strategy.NO_TESTING: 5,
}


def _rng(base_seed: int, index: int, code: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((base_seed, index, code)))


@dataclass
class DayRecord:
    """One day of one trajectory under one strategy."""

    day: int
    pool_size: int
    tests: int
    infected: int
    isolated: int
    false_neg: int
    false_pos: int
    entropy_lb: float
    p_min: float
    p_mean: float
    p_max: float
    search_failed: bool = False


def _day_record(
    day: int,
    pv: PriorVector,
    tests: int,
    state: PopulationState,
    failed: bool = False,
) -> DayRecord:
    return DayRecord(
        day=day,
        pool_size=pv.size,
        tests=tests,
        infected=int((state.states == INFECTED).sum()),
        isolated=int(state.isolated.sum()),
        false_neg=0,
        false_pos=0,
        entropy_lb=entropy_lower_bound(pv.p),
        p_min=pv.p_min,
        p_mean=pv.p_mean,
        p_max=pv.p_max,
        search_failed=failed,
    )


def _decode(decoder: DecoderName, tm: TestMatrix, results: TestResults, pv: PriorVector):
    if decoder is DecoderName.DD:
        return dd_decode(tm, results)
    if decoder is DecoderName.COMP:
        return comp_decode(tm, results)
    return map_decode(tm, results, pv)


def _design_for(
    strategy: Strategy, T: int, pv: PriorVector, rng: np.random.Generator
) -> TestMatrix:
    if strategy is Strategy.COMPLETE:
        return complete_design(pv.pool)
    if strategy is Strategy.RND_MEAN:
        return constant_column_weight_design(T, pv.pool, pv.p_mean, rng)
    if strategy is Strategy.RND_MAX:
        return constant_column_weight_design(T, pv.pool, pv.p_max, rng)
    if strategy is Strategy.CCA:
        return cca_design(T, pv, rng)
    raise ValueError(f"{strategy} has no test design")


def _success_once(
    strategy: Strategy,
    decoder: DecoderName,
    T: int,
    pv: PriorVector,
    truth: np.ndarray,
    rng: np.random.Generator,
) -> bool:
    """Draw one fresh design of T tests and report whether decoding is exact.

    ``truth`` is a bool vector over the pool.  The lazy kernels carry the
    load when the decoder is DD and an empty test is overwhelmingly
    unlikely; otherwise the design is materialized and decoded in full.
    """
    n = pv.size
    infected = np.flatnonzero(truth)
    if infected.size == 0:
        return True
    if decoder is DecoderName.DD:
        seed = int(rng.integers(0, np.iinfo(np.int64).max))
        if strategy in (Strategy.RND_MEAN, Strategy.RND_MAX):
            p_ref = pv.p_mean if strategy is Strategy.RND_MEAN else pv.p_max
            L = column_weight(T, n, p_ref)
            if ccw_empty_test_bound(n, T, L) < EMPTY_TEST_GUARD:
                return dd_success_ccw(n, T, L, infected, seed)
        elif strategy is Strategy.CCA:
            nu = cca_inclusion_probabilities(pv.p)
            if cca_empty_test_bound(T, nu) < EMPTY_TEST_GUARD:
                return dd_success_cca(n, T, nu, infected, seed)
    tm = _design_for(strategy, T, pv, rng)
    if tm.degenerate:
        return False
    results = apply_tests(tm, truth)
    outcome = _decode(decoder, tm, results, pv)
    return bool(np.array_equal(outcome.estimate, truth))


def _make_evaluator(
    strategy: Strategy,
    decoder: DecoderName,
    pv: PriorVector,
    truth: np.ndarray,
    rng: np.random.Generator,
):
    """Per-candidate success oracle with the per-search invariants hoisted."""
    n = pv.size
    infected = np.flatnonzero(truth).astype(np.int64)
    seed_cap = np.iinfo(np.int64).max
    if decoder is DecoderName.DD and strategy in (Strategy.RND_MEAN, Strategy.RND_MAX):
        p_ref = float(pv.p_mean if strategy is Strategy.RND_MEAN else pv.p_max)

        def evaluate(T: int) -> bool:
            L = column_weight(T, n, p_ref)
            if ccw_empty_test_bound(n, T, L) < EMPTY_TEST_GUARD:
                return dd_success_ccw(n, T, L, infected, int(rng.integers(0, seed_cap)))
            return _success_once(strategy, decoder, T, pv, truth, rng)

        return evaluate
    if decoder is DecoderName.DD and strategy is Strategy.CCA:
        nu = cca_inclusion_probabilities(pv.p)

        def evaluate(T: int) -> bool:
            if cca_empty_test_bound(T, nu) < EMPTY_TEST_GUARD:
                return dd_success_cca(n, T, nu, infected, int(rng.integers(0, seed_cap)))
            return _success_once(strategy, decoder, T, pv, truth, rng)

        return evaluate
    return lambda T: _success_once(strategy, decoder, T, pv, truth, rng)


def min_tests_for_day(
    pv: PriorVector,
    truth: np.ndarray,
    strategy: Strategy,
    decoder: DecoderName,
    rng: np.random.Generator,
    test_cap: int = DEFAULT_TEST_CAP,
) -> tuple[int, bool]:
    """Smallest test count at which a fresh design decodes the pool exactly.

    Scans candidate counts upward from one on a coarse grid of step
    pool/100, one fresh design per candidate; the first success brackets
    the answer and a unit-step rescan upward from the last coarse failure
    settles it.  Returns (tests, failed); failed means no candidate up to
    min(test_cap, pool) succeeded, in which case that cap is returned.  An
    infection-free pool needs a single test: every test comes back negative
    and all decoders clear the whole pool.
    """
    n = pv.size
    if n == 0:
        return 0, False
    if strategy is Strategy.NO_TESTING:
        return 0, False
    if strategy is Strategy.COMPLETE:
        return n, False
    truth = np.asarray(truth, dtype=bool)
    if truth.shape != (n,):
        raise ValueError("truth must be a bool vector over the pool")
    if not truth.any():
        return 1, False
    cap = min(test_cap, n)
    evaluate = _make_evaluator(strategy, decoder, pv, truth, rng)
    coarse = max(1, n // 100)
    T = 1
    last_fail = 0
    while not evaluate(T):
        last_fail = T
        if T >= cap:
            return cap, True
        T = min(T + coarse, cap)
    for t in range(last_fail + 1, T):
        if evaluate(t):
            return t, False
    return T, False


def run_min_tests_trajectory(
    params: ModelParams,
    horizon: int,
    strategies: Sequence[Strategy],
    decoder: DecoderName,
    base_seed: int,
    index: int,
    test_cap: int = DEFAULT_TEST_CAP,
) -> dict[Strategy, list[DayRecord]]:
    """One complete-information trajectory scored by several strategies.

    Isolation uses the truth, so the epidemic is identical for every
    strategy; only the per-day test counts differ.
    """
    strategies = [Strategy(s) for s in strategies]
    decoder = DecoderName(decoder)
    epi_rng = _rng(base_seed, index, 0)
    search_rngs = {s: _rng(base_seed, index, _STREAM_CODE[s]) for s in strategies}
    state = init_population(params, epi_rng)
    records: dict[Strategy, list[DayRecord]] = {s: [] for s in strategies}
    caught: np.ndarray | None = None
    for day in range(horizon):
        if caught is not None:
            state = isolate(state, caught)
            counts = np.bincount(
                caught // params.C, minlength=params.n_communities
            ).astype(np.int64)
        pool = np.flatnonzero(~state.isolated)
        if day == 0:
            pv = PriorVector(pool, np.full(pool.size, params.p_init))
        else:
            pv = compute_priors(counts, pool, params)
        truth = state.states[pool] == INFECTED
        for s in strategies:
            tests, failed = min_tests_for_day(
                pv, truth, s, decoder, search_rngs[s], test_cap
            )
            records[s].append(_day_record(day, pv, tests, state, failed))
        caught = pool[truth]
        state, _ = step(state, params, epi_rng)
    return records


def run_fixed_budget_trajectory(
    params: ModelParams,
    horizon: int,
    strategy: Strategy,
    decoder: DecoderName,
    base_seed: int,
    index: int,
    bound_params: BoundParams | None = None,
) -> list[DayRecord]:
    """One believed-state trajectory under a per-day test budget.

    The complete strategy tests everyone individually; group strategies
    spend the heuristic budget on their random design and isolate whatever
    the decoder reports.  Decoding errors feed the next day's priors.
    """
    strategy = Strategy(strategy)
    decoder = DecoderName(decoder)
    bp = bound_params or BoundParams()
    epi_rng = _rng(base_seed, index, 0)
    design_rng = _rng(base_seed, index, _STREAM_CODE[strategy])
    state = init_population(params, epi_rng)
    est = EstimatorState.fresh(params)
    records: list[DayRecord] = []
    pending: tuple[TestMatrix, TestResults, np.ndarray, PriorVector, int] | None = None
    for day in range(horizon):
        if pending is not None:
            tm, results, truth, old_pv, rec_day = pending
            outcome = _decode(decoder, tm, results, old_pv)
            records[rec_day].false_neg = int(np.sum(truth & ~outcome.estimate))
            records[rec_day].false_pos = int(np.sum(outcome.estimate & ~truth))
            est, positives = update_from_decode(est, outcome.estimate, tm.pool)
            state = isolate(state, positives)
            counts = est.believed_new_infections
            pending = None
        elif day > 0:
            counts = np.zeros(params.n_communities, dtype=np.int64)
        pool = np.flatnonzero(est.pool_mask(state.isolated))
        if day == 0:
            pv = PriorVector(pool, np.full(pool.size, params.p_init))
        else:
            pv = compute_priors(counts, pool, params)
        if strategy is Strategy.NO_TESTING:
            tests = 0
        elif strategy is Strategy.COMPLETE:
            tests = pool.size
        else:
            tests = heuristic_budget(pool.size, pv.p_mean, bp.heuristic_multiplier)
        records.append(_day_record(day, pv, tests, state))
        if tests > 0:
            tm = _design_for(strategy, tests, pv, design_rng)
            if not tm.degenerate:
                truth = state.states[pool] == INFECTED
                results = apply_tests(tm, truth)
                pending = (tm, results, truth, pv, day)
        state, _ = step(state, params, epi_rng)
    if pending is not None:
        tm, results, truth, old_pv, rec_day = pending
        outcome = _decode(decoder, tm, results, old_pv)
        records[rec_day].false_neg = int(np.sum(truth & ~outcome.estimate))
        records[rec_day].false_pos = int(np.sum(outcome.estimate & ~truth))
    return records


def run_free_trajectory(
    params: ModelParams, horizon: int, base_seed: int, index: int
) -> list[DayRecord]:
    """One untested, unisolated trajectory.

    Prior columns report the observer's one-step-ahead infection
    probabilities from the current free infected counts.
    """
    epi_rng = _rng(base_seed, index, 0)
    state = init_population(params, epi_rng)
    records: list[DayRecord] = []
    pool = np.arange(params.N, dtype=np.int64)
    for day in range(horizon):
        if day == 0:
            pv = PriorVector(pool, np.full(params.N, params.p_init))
        else:
            counts = np.bincount(
                np.flatnonzero(state.free_infected_mask) // params.C,
                minlength=params.n_communities,
            ).astype(np.int64)
            pv = compute_priors(counts, pool, params)
        records.append(_day_record(day, pv, 0, state))
        state, _ = step(state, params, epi_rng)
    return records


def run_trajectory(
    params: ModelParams,
    horizon: int,
    strategy: Strategy,
    mode: Mode,
    decoder: DecoderName,
    base_seed: int,
    index: int,
    bound_params: BoundParams | None = None,
    test_cap: int = DEFAULT_TEST_CAP,
) -> list[DayRecord]:
    """One trajectory of one strategy in either mode."""
    strategy = Strategy(strategy)
    mode = Mode(mode)
    if strategy is Strategy.NO_TESTING:
        return run_free_trajectory(params, horizon, base_seed, index)
    if mode is Mode.MIN_TESTS:
        return run_min_tests_trajectory(
            params, horizon, [strategy], decoder, base_seed, index, test_cap
        )[strategy]
    return run_fixed_budget_trajectory(
        params, horizon, strategy, decoder, base_seed, index, bound_params
    )


_CURVE_FIELDS = (
    "tests",
    "infected",
    "isolated",
    "false_neg",
    "false_pos",
    "entropy_lb",
    "p_min",
    "p_mean",
    "p_max",
    "search_failed",
)


@dataclass
class StrategyCurve:
    """Per-day means over trajectories for one strategy."""

    strategy: Strategy
    days: np.ndarray
    mean_infected: np.ndarray
    mean_tests: np.ndarray
    mean_false_neg: np.ndarray
    mean_false_pos: np.ndarray
    mean_isolated: np.ndarray
    entropy_lb: np.ndarray
    p_min: np.ndarray
    p_mean: np.ndarray
    p_max: np.ndarray
    search_failure_rate: np.ndarray


def _curve_from_stack(strategy: Strategy, stacks: dict[str, np.ndarray]) -> StrategyCurve:
    horizon = stacks["tests"].shape[1]
    mean = {k: v.mean(axis=0) for k, v in stacks.items()}
    return StrategyCurve(
        strategy=strategy,
        days=np.arange(horizon, dtype=np.int64),
        mean_infected=mean["infected"],
        mean_tests=mean["tests"],
        mean_false_neg=mean["false_neg"],
        mean_false_pos=mean["false_pos"],
        mean_isolated=mean["isolated"],
        entropy_lb=mean["entropy_lb"],
        p_min=mean["p_min"],
        p_mean=mean["p_mean"],
        p_max=mean["p_max"],
        search_failure_rate=mean["search_failed"],
    )


def _record_row(rec: DayRecord) -> list[float]:
    return [getattr(rec, f) for f in _CURVE_FIELDS]


def _min_tests_task(args) -> dict[Strategy, np.ndarray]:
    params, horizon, strategies, decoder, base_seed, index, test_cap = args
    recs = run_min_tests_trajectory(
        params, horizon, strategies, decoder, base_seed, index, test_cap
    )
    return {
        s: np.array([_record_row(r) for r in recs[s]], dtype=np.float64)
        for s in strategies
    }


def _fixed_budget_task(args) -> dict[Strategy, np.ndarray]:
    params, horizon, strategies, decoder, base_seed, index, bound_params = args
    out = {}
    for s in strategies:
        if s is Strategy.NO_TESTING:
            recs = run_free_trajectory(params, horizon, base_seed, index)
        else:
            recs = run_fixed_budget_trajectory(
                params, horizon, s, decoder, base_seed, index, bound_params
            )
        out[s] = np.array([_record_row(r) for r in recs], dtype=np.float64)
    return out


def monte_carlo(
    params: ModelParams,
    horizon: int,
    strategies: Sequence[Strategy],
    mode: Mode,
    n_trajectories: int,
    base_seed: int,
    decoder: DecoderName = DecoderName.DD,
    bound_params: BoundParams | None = None,
    test_cap: int = DEFAULT_TEST_CAP,
    workers: int | None = None,
) -> dict[Strategy, StrategyCurve]:
    """Mean curves over trajectories for each strategy.

    Trajectory index i uses seed sequence (base_seed, i, stream), so curves
    are reproducible and independent of strategy order and of the worker
    count.  In minimum-tests mode every strategy shares the trajectory; in
    fixed-budget mode strategies share the epidemic random numbers but
    diverge once their isolation decisions differ.
    """
    strategies = [Strategy(s) for s in strategies]
    mode = Mode(mode)
    decoder = DecoderName(decoder)
    if len(set(strategies)) != len(strategies):
        raise ValueError("strategies must be distinct")
    if n_trajectories <= 0:
        raise ValueError("n_trajectories must be positive")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if mode is Mode.MIN_TESTS:
        testing = [s for s in strategies if s is not Strategy.NO_TESTING]
        free = [s for s in strategies if s is Strategy.NO_TESTING]
        task, extra = _min_tests_task, (test_cap,)

        def args_for(i):
            return (params, horizon, testing, decoder, base_seed, i) + extra
    else:
        testing, free = strategies, []
        task = _fixed_budget_task

        def args_for(i):
            return (params, horizon, testing, decoder, base_seed, i, bound_params)

    stacks = {
        s: {f: np.zeros((n_trajectories, horizon)) for f in _CURVE_FIELDS}
        for s in strategies
    }

    def absorb(index: int, result: dict[Strategy, np.ndarray]) -> None:
        for s, arr in result.items():
            for j, f in enumerate(_CURVE_FIELDS):
                stacks[s][f][index] = arr[:, j]

    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            for i, res in enumerate(ex.map(task, [args_for(i) for i in range(n_trajectories)])):
                absorb(i, res)
    else:
        for i in range(n_trajectories):
            absorb(i, task(args_for(i)))

    if mode is Mode.MIN_TESTS and free:
        for i in range(n_trajectories):
            recs = run_free_trajectory(params, horizon, base_seed, i)
            arr = np.array([_record_row(r) for r in recs], dtype=np.float64)
            absorb(i, {Strategy.NO_TESTING: arr})

    return {s: _curve_from_stack(s, stacks[s]) for s in strategies}


def monte_carlo_gillespie(
    params: ModelParams, horizon: int, n_trajectories: int, base_seed: int
) -> np.ndarray:
    """Mean daily infected counts of the continuous-time comparator."""
    if n_trajectories <= 0:
        raise ValueError("n_trajectories must be positive")
    total = np.zeros(horizon, dtype=np.float64)
    for i in range(n_trajectories):
        rng = _rng(base_seed, i, 6)
        total += gillespie_trajectory(params, horizon, rng)
    return total / n_trajectories
