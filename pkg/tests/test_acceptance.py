"""Acceptance gate: one test and one printed verdict line per criterion.

Each test exercises a headline capability end to end at its stated scale
and tolerance, so this file is slower than the unit suites.  Every test
prints exactly one ``PASS``/``FAIL`` line with the measured numbers.
"""

import math
import time

import numpy as np
import pytest

from epigt.bounds import entropy_lower_bound, heuristic_budget
from epigt.checks import (
    check_map_optimality,
    check_prior_boundedness,
    check_prior_monotonicity,
    check_prior_sandwich,
    check_ratio_grids,
)
from epigt.cli import parse_config, run_experiment
from epigt.model import ModelParams
from epigt.pipeline import (
    DecoderName,
    Mode,
    Strategy,
    monte_carlo,
    monte_carlo_gillespie,
)

EPIDEMIC_PARAMS = ModelParams(
    N=1000, C=50, p_init=0.02, q1=0.012, q2=0.0004, r=0.1
)
SEARCH_PARAMS = ModelParams(
    N=1000, C=20, p_init=0.02, q1=0.03, q2=0.0004, r=0.1
)
GROUP_STRATEGIES = (Strategy.RND_MEAN, Strategy.RND_MAX, Strategy.CCA)


def report(capsys, name, passed, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if passed else 'FAIL'} {name}: {detail}")
    assert passed, f"{name}: {detail}"


@pytest.fixture(scope="module")
def epidemic_curves():
    start = time.perf_counter()
    curves = monte_carlo(
        EPIDEMIC_PARAMS,
        horizon=50,
        strategies=(Strategy.NO_TESTING, Strategy.COMPLETE),
        mode=Mode.FIXED_BUDGET,
        n_trajectories=200,
        base_seed=0,
    )
    return curves, time.perf_counter() - start


@pytest.fixture(scope="module")
def search_curves():
    start = time.perf_counter()
    curves = monte_carlo(
        SEARCH_PARAMS,
        horizon=51,
        strategies=(Strategy.COMPLETE,) + GROUP_STRATEGIES,
        mode=Mode.MIN_TESTS,
        n_trajectories=200,
        base_seed=0,
        decoder=DecoderName.DD,
    )
    return curves, time.perf_counter() - start


def test_c1_entropy_lower_bound(capsys):
    start = time.perf_counter()
    value = entropy_lower_bound(np.full(1000, 0.02))
    elapsed = time.perf_counter() - start
    target = 141.440543
    passed = abs(value - target) <= 1e-4 and elapsed < 1.0
    report(
        capsys,
        "entropy-day0",
        passed,
        f"{value:.6f} vs {target} (tol 1e-4), {elapsed * 1e3:.1f}ms < 1s",
    )


def test_c2_epidemic_peaks(capsys, epidemic_curves):
    curves, elapsed = epidemic_curves
    free = curves[Strategy.NO_TESTING].mean_infected
    ctrl = curves[Strategy.COMPLETE].mean_infected
    free_day, free_peak = int(np.argmax(free)), float(np.max(free))
    ctrl_day, ctrl_peak = int(np.argmax(ctrl)), float(np.max(ctrl))
    passed = (
        580.0 <= free_peak <= 720.0
        and 8 <= free_day <= 10
        and 70.0 <= ctrl_peak <= 95.0
        and 6 <= ctrl_day <= 9
        and elapsed < 120.0
    )
    report(
        capsys,
        "epidemic-peaks",
        passed,
        f"no-testing {free_peak:.1f}@{free_day} in [580,720]x[8,10], "
        f"complete {ctrl_peak:.1f}@{ctrl_day} in [70,95]x[6,9], "
        f"{elapsed:.1f}s < 120s",
    )


def test_c3_min_tests_curves(capsys, search_curves):
    curves, elapsed = search_curves
    complete = curves[Strategy.COMPLETE].mean_tests
    problems = []
    if complete[0] != 1000.0:
        problems.append(f"complete day0 {complete[0]}")
    for strat in GROUP_STRATEGIES:
        tests = curves[strat].mean_tests
        if not 180.0 <= tests[0] <= 330.0:
            problems.append(f"{strat.value} day0 {tests[0]:.1f}")
        tail = float(tests[45:].max())
        if tail > 25.0:
            problems.append(f"{strat.value} tail {tail:.1f}")
        ratio = float((tests[3:] / complete[3:]).max())
        if ratio > 0.5:
            problems.append(f"{strat.value} ratio {ratio:.3f}")
    if elapsed >= 900.0:
        problems.append(f"{elapsed:.0f}s")
    day0 = ", ".join(
        f"{s.value} {curves[s].mean_tests[0]:.1f}" for s in GROUP_STRATEGIES
    )
    report(
        capsys,
        "min-tests-curves",
        not problems,
        "; ".join(problems)
        if problems
        else f"day0 {day0} in [180,330], tails <= 25, "
        f"ratios <= 0.5x complete from day 3, {elapsed:.0f}s < 900s",
    )


def test_c4_heuristic_budget_dd(capsys):
    budget = heuristic_budget(1000, 0.02)
    curves = monte_carlo(
        EPIDEMIC_PARAMS,
        horizon=50,
        strategies=(Strategy.RND_MEAN,),
        mode=Mode.FIXED_BUDGET,
        n_trajectories=20,
        base_seed=0,
        decoder=DecoderName.DD,
    )
    false_pos = curves[Strategy.RND_MEAN].mean_false_pos
    passed = budget == 1000 and float(false_pos.max()) == 0.0
    report(
        capsys,
        "heuristic-dd",
        passed,
        f"budget {budget} == 1000, max mean false positives "
        f"{float(false_pos.max()):.6f} over 20 trajectories x 50 days",
    )


def test_c5_prior_boundedness(capsys):
    rate = 1.0 - 1.0 / math.sqrt(2.0)
    params = ModelParams(
        N=1000, C=20, p_init=0.5, q1=rate / 20, q2=rate / 1000, r=0.1
    )
    rep = check_prior_boundedness(params, horizon=50, n_trajectories=100)
    report(
        capsys,
        "prior-boundedness",
        rep.passed,
        f"{rep.violations} violations in {rep.trials} trajectory-days "
        f"(cap 1/2, ratio cap {params.q1 / params.q2:.0f})",
    )


def test_c6_map_oracle(capsys):
    start = time.perf_counter()
    reports = [
        check_map_optimality(n_instances=200),
        check_prior_monotonicity(n_instances=200),
        check_prior_sandwich(n_instances=200),
    ]
    elapsed = time.perf_counter() - start
    bad = [r for r in reports if not r.passed]
    passed = not bad and elapsed < 120.0
    report(
        capsys,
        "map-oracle",
        passed,
        "; ".join(r.line() for r in bad)
        if bad
        else f"optimality, monotonicity, sandwich: 0 violations in "
        f"3x200 instances, {elapsed:.1f}s < 120s",
    )


def test_c7_ratio_grids(capsys):
    reports = check_ratio_grids()
    bad = [r for r in reports if not r.passed]
    trials = sum(r.trials for r in reports)
    report(
        capsys,
        "ratio-grids",
        not bad,
        "; ".join(r.line() for r in bad)
        if bad
        else f"0 violations across {trials} grid points",
    )


def test_c8_gillespie_peak(capsys, epidemic_curves):
    curves, _ = epidemic_curves
    discrete_peak = float(curves[Strategy.NO_TESTING].mean_infected.max())
    mean = monte_carlo_gillespie(
        EPIDEMIC_PARAMS, horizon=50, n_trajectories=200, base_seed=0
    )
    peak = float(mean.max())
    rel = abs(peak - discrete_peak) / discrete_peak
    report(
        capsys,
        "gillespie-peak",
        rel <= 0.25,
        f"continuous {peak:.1f} vs discrete {discrete_peak:.1f}, "
        f"relative gap {rel:.3f} <= 0.25",
    )


def test_c9_deterministic_outputs(capsys, tmp_path):
    cfg = parse_config(
        assignments=[
            "N=200", "C=10", "horizon=12", "n_trajectories=5",
            "strategies=no_testing,complete,rnd_mean",
        ]
    )
    first, second = tmp_path / "a", tmp_path / "b"
    run_experiment(cfg, first)
    run_experiment(cfg, second)
    names = sorted(p.name for p in first.iterdir())
    same = names == sorted(p.name for p in second.iterdir()) and all(
        (first / n).read_bytes() == (second / n).read_bytes() for n in names
    )
    report(
        capsys,
        "determinism",
        same,
        f"{len(names)} files byte-identical across independent reruns",
    )
