"""Decoder and exact-error-oracle tests."""

import numpy as np
import pytest

from epigt.decoders import (
    ENUMERATION_CAP,
    comp_decode,
    dd_decode,
    exact_error_probability,
    make_random_decoder,
    map_decode,
    map_decoder_for,
)
from epigt.designs import TestMatrix, TestResults, apply_tests, complete_design
from epigt.priors import PriorVector

from reference import (
    comp_naive,
    dd_naive,
    error_probability_naive,
    map_naive,
)


def random_instance(rng, n_max=6, T_max=6):
    n = int(rng.integers(2, n_max + 1))
    T = int(rng.integers(1, T_max + 1))
    tests = []
    for _ in range(T):
        size = int(rng.integers(1, n + 1))
        tests.append(np.sort(rng.choice(n, size=size, replace=False)))
    tm = TestMatrix(pool=np.arange(n), tests=tests)
    p = rng.uniform(1e-3, 0.5, size=n)
    return tm, p


class TestComp:
    def test_example(self):
        tm = TestMatrix(pool=np.arange(3), tests=[np.array([0, 1]), np.array([1, 2])])
        res = TestResults(y=np.array([False, True]))
        out = comp_decode(tm, res)
        assert out.estimate.tolist() == [False, False, True]
        assert out.resolved.tolist() == [True, True, False]

    def test_no_false_negatives(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            tm, _ = random_instance(rng)
            truth = rng.random(tm.n) < 0.4
            res = apply_tests(tm, truth)
            est = comp_decode(tm, res).estimate
            assert not np.any(truth & ~est)

    def test_against_reference(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            tm, _ = random_instance(rng)
            truth = rng.random(tm.n) < 0.4
            res = apply_tests(tm, truth)
            np.testing.assert_array_equal(
                comp_decode(tm, res).estimate, comp_naive(tm, res)
            )


class TestDD:
    def test_example(self):
        tm = TestMatrix(
            pool=np.arange(3),
            tests=[np.array([0, 1]), np.array([1, 2]), np.array([2])],
        )
        truth = np.array([False, False, True])
        res = apply_tests(tm, truth)
        out = dd_decode(tm, res)
        assert out.estimate.tolist() == [False, False, True]

    def test_no_false_positives(self):
        rng = np.random.default_rng(2)
        for _ in range(300):
            tm, _ = random_instance(rng)
            truth = rng.random(tm.n) < 0.4
            res = apply_tests(tm, truth)
            est = dd_decode(tm, res).estimate
            assert not np.any(est & ~truth)

    def test_subset_of_comp(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            tm, _ = random_instance(rng)
            truth = rng.random(tm.n) < 0.4
            res = apply_tests(tm, truth)
            dd = dd_decode(tm, res).estimate
            comp = comp_decode(tm, res).estimate
            assert not np.any(dd & ~comp)

    def test_against_reference(self):
        rng = np.random.default_rng(4)
        for _ in range(300):
            tm, _ = random_instance(rng)
            truth = rng.random(tm.n) < 0.4
            res = apply_tests(tm, truth)
            np.testing.assert_array_equal(
                dd_decode(tm, res).estimate, dd_naive(tm, res)
            )


class TestMAP:
    def test_frozen_example(self):
        # Tests {0,1} positive and {1,2} negative force member 0 infected.
        tm = TestMatrix(pool=np.arange(3), tests=[np.array([0, 1]), np.array([1, 2])])
        res = TestResults(y=np.array([True, False]))
        pv = PriorVector(pool=np.arange(3), p=np.array([0.3, 0.2, 0.1]))
        out = map_decode(tm, res, pv)
        assert out.estimate.tolist() == [True, False, False]

    def test_against_reference(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            tm, p = random_instance(rng)
            truth = rng.random(tm.n) < 0.4
            res = apply_tests(tm, truth)
            pv = PriorVector(pool=np.arange(tm.n), p=p)
            out = map_decode(tm, res, pv)
            np.testing.assert_array_equal(out.estimate, map_naive(tm, res, p))

    def test_lexicographic_ties(self):
        # Identical priors of 1/2 make every consistent vector equally
        # likely; the earliest vector with index 0 most significant wins.
        tm = TestMatrix(pool=np.arange(2), tests=[np.array([0, 1])])
        res = TestResults(y=np.array([True]))
        pv = PriorVector(pool=np.arange(2), p=np.array([0.5, 0.5]))
        out = map_decode(tm, res, pv)
        assert out.estimate.tolist() == [False, True]

    def test_inconsistent_raises(self):
        tm = TestMatrix(pool=np.arange(2), tests=[np.array([0]), np.array([0])])
        res = TestResults(y=np.array([True, False]))
        pv = PriorVector(pool=np.arange(2), p=np.array([0.2, 0.2]))
        with pytest.raises(ValueError):
            map_decode(tm, res, pv)

    def test_cap_enforced(self):
        n = ENUMERATION_CAP + 1
        tm = TestMatrix(pool=np.arange(n), tests=[np.arange(n)])
        res = TestResults(y=np.array([True]))
        pv = PriorVector(pool=np.arange(n), p=np.full(n, 0.1))
        with pytest.raises(ValueError):
            map_decode(tm, res, pv)


class TestExactErrorProbability:
    def test_complete_design_is_exact(self):
        pool = np.arange(5)
        tm = complete_design(pool)
        pv = PriorVector(pool=pool, p=np.full(5, 0.3))
        err = exact_error_probability(tm, pv, map_decoder_for(pv))
        assert err == pytest.approx(0.0, abs=1e-12)

    def test_against_reference(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            tm, p = random_instance(rng, n_max=5, T_max=5)
            pv = PriorVector(pool=np.arange(tm.n), p=p)
            err = exact_error_probability(tm, pv, comp_decode)
            expected = error_probability_naive(tm, p, comp_naive)
            assert err == pytest.approx(expected, abs=1e-12)

    def test_map_never_worse_than_others(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            tm, p = random_instance(rng, n_max=5, T_max=5)
            pv = PriorVector(pool=np.arange(tm.n), p=p)
            map_err = exact_error_probability(tm, pv, map_decoder_for(pv))
            for fn in (comp_decode, dd_decode, make_random_decoder(tm.T, tm.n, rng)):
                other = exact_error_probability(tm, pv, fn)
                assert map_err <= other + 1e-12


class TestRandomDecoder:
    def test_deterministic_lookup(self):
        rng = np.random.default_rng(8)
        fn = make_random_decoder(3, 4, rng)
        tm = TestMatrix(pool=np.arange(4), tests=[np.array([0]), np.array([1]), np.array([2])])
        res = TestResults(y=np.array([True, False, True]))
        a = fn(tm, res).estimate
        b = fn(tm, res).estimate
        np.testing.assert_array_equal(a, b)
        assert a.shape == (4,)
        assert a.dtype == bool
