"""Lazy success-kernel tests.

The crucial checks here rebuild each kernel's implied test matrix in plain
Python from the same counter-based streams, run the ordinary decoder on
the materialized matrix, and demand bit-exact agreement with the kernel's
success verdict.
"""

import math

import numpy as np
import pytest

from epigt._fastpath import (
    EMPTY_TEST_GUARD,
    _member_state,
    _next_below,
    _next_unit,
    cca_empty_test_bound,
    ccw_empty_test_bound,
    dd_success_cca,
    dd_success_ccw,
)
from epigt.decoders import dd_decode
from epigt.designs import TestMatrix, apply_tests


def ccw_row(seed, i, T, L):
    """Member i's tests under the lazy constant-column-weight kernel."""
    scratch = list(range(T))
    state = _member_state(np.uint64(seed), np.int64(i))
    row = []
    for j in range(L):
        state, off = _next_below(np.uint64(state), np.int64(T - j))
        r = j + int(off)
        scratch[j], scratch[r] = scratch[r], scratch[j]
        row.append(scratch[j])
    return row


def cca_row(seed, i, T, nu_i):
    """Member i's tests under the lazy Bernoulli kernel."""
    if nu_i >= 1.0:
        return list(range(T))
    if nu_i <= 0.0:
        return []
    state = _member_state(np.uint64(seed), np.int64(i))
    row = []
    t = 0
    log_q = math.log1p(-nu_i)
    while t < T:
        state, u = _next_unit(np.uint64(state))
        t += int(np.int64(math.log(u) / log_q))
        if t >= T:
            break
        row.append(t)
        t += 1
    return row


def matrix_from_rows(rows, n, T):
    """Materialize the kernel's implied matrix, dropping empty tests.

    An empty test is negative and touches nobody, so removing it leaves
    the decoder's verdict unchanged; the kernels never materialize them.
    """
    tests = [[] for _ in range(T)]
    for i, row in enumerate(rows):
        for t in row:
            tests[t].append(i)
    return TestMatrix(
        pool=np.arange(n),
        tests=[np.array(sorted(m), dtype=np.int64) for m in tests if m],
    )


def dd_succeeds(tm, truth):
    res = apply_tests(tm, truth)
    return bool(np.array_equal(dd_decode(tm, res).estimate, truth))


class TestCCWKernelExact:
    def test_matches_materialized_decode(self):
        rng = np.random.default_rng(0)
        agree = 0
        for trial in range(250):
            n = int(rng.integers(5, 40))
            T = int(rng.integers(3, 25))
            L = int(rng.integers(1, T + 1))
            k = int(rng.integers(0, min(6, n) + 1))
            infected = np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)
            seed = int(rng.integers(0, 2**63 - 1))
            rows = [ccw_row(seed, i, T, L) for i in range(n)]
            tm = matrix_from_rows(rows, n, T)
            truth = np.zeros(n, dtype=bool)
            truth[infected] = True
            expected = dd_succeeds(tm, truth)
            got = dd_success_ccw(n, T, L, infected, seed)
            assert got == expected, (n, T, L, infected.tolist(), seed)
            agree += 1
        assert agree == 250

    def test_no_infected_always_succeeds(self):
        assert dd_success_ccw(50, 10, 3, np.array([], dtype=np.int64), 123)

    def test_seed_determinism(self):
        infected = np.array([2, 9], dtype=np.int64)
        a = [dd_success_ccw(30, 12, 4, infected, 77) for _ in range(3)]
        assert len(set(a)) == 1


class TestCCAKernelExact:
    def test_matches_materialized_decode(self):
        rng = np.random.default_rng(1)
        for trial in range(250):
            n = int(rng.integers(5, 40))
            T = int(rng.integers(3, 25))
            nu = rng.uniform(0.05, 0.6, size=n)
            if trial % 7 == 0:
                nu[rng.integers(n)] = 1.0
            if trial % 11 == 0:
                nu[rng.integers(n)] = 0.0
            k = int(rng.integers(0, min(6, n) + 1))
            infected = np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)
            seed = int(rng.integers(0, 2**63 - 1))
            rows = [cca_row(seed, i, T, float(nu[i])) for i in range(n)]
            tm = matrix_from_rows(rows, n, T)
            truth = np.zeros(n, dtype=bool)
            truth[infected] = True
            expected = dd_succeeds(tm, truth)
            got = dd_success_cca(n, T, nu, infected, seed)
            assert got == expected, (n, T, infected.tolist(), seed)

    def test_no_infected_always_succeeds(self):
        assert dd_success_cca(20, 8, np.full(20, 0.3), np.array([], dtype=np.int64), 5)

    def test_infected_with_empty_row_fails(self):
        nu = np.full(10, 0.4)
        nu[3] = 0.0
        assert not dd_success_cca(10, 6, nu, np.array([3], dtype=np.int64), 42)


class TestEmptyTestBounds:
    def test_ccw_bound_formula(self):
        n, T, L = 100, 20, 3
        expected = T * (1 - L / T) ** n
        assert ccw_empty_test_bound(n, T, L) == pytest.approx(expected, rel=1e-9)

    def test_ccw_full_weight_zero(self):
        assert ccw_empty_test_bound(10, 5, 5) == 0.0

    def test_ccw_bound_dominates_empirical(self):
        n, T, L = 30, 15, 2
        rng = np.random.default_rng(2)
        bound = ccw_empty_test_bound(n, T, L)
        empties = 0
        trials = 3000
        for _ in range(trials):
            seed = int(rng.integers(0, 2**63 - 1))
            rows = [ccw_row(seed, i, T, L) for i in range(n)]
            hit = np.zeros(T, dtype=bool)
            for row in rows:
                hit[row] = True
            empties += int(not hit.all())
        assert empties / trials <= bound * 1.5 + 0.01

    def test_cca_bound_formula(self):
        nu = np.array([0.2, 0.3, 0.1])
        T = 7
        expected = T * np.prod(1 - nu)
        assert cca_empty_test_bound(T, nu) == pytest.approx(expected, rel=1e-9)

    def test_cca_bound_certain_inclusion(self):
        assert cca_empty_test_bound(5, np.array([0.2, 1.0])) == 0.0

    def test_guard_is_tiny(self):
        assert EMPTY_TEST_GUARD <= 1e-6
