"""Prior computation and estimator bookkeeping tests."""

import numpy as np
import pytest

from epigt.model import ModelParams
from epigt.priors import (
    EstimatorState,
    PriorVector,
    boundedness_report,
    compute_priors,
    update_from_decode,
)

from reference import priors_naive


def params40(**kw):
    base = dict(N=40, C=8, p_init=0.2, q1=0.1, q2=0.01, r=0.1)
    base.update(kw)
    return ModelParams(**base)


class TestComputePriors:
    def test_against_reference(self):
        params = params40()
        rng = np.random.default_rng(0)
        for _ in range(20):
            I_counts = rng.integers(0, 5, size=params.n_communities)
            pool = np.sort(rng.choice(params.N, size=25, replace=False))
            pv = compute_priors(I_counts, pool, params)
            expected = priors_naive(I_counts, pool, params.q1, params.q2, params.C)
            np.testing.assert_allclose(pv.p, expected, rtol=1e-12, atol=0)

    def test_frozen_example(self):
        params = ModelParams(N=10, C=5, p_init=0.1, q1=0.1, q2=0.01, r=0.1)
        pv = compute_priors(np.array([2, 1]), np.arange(10), params)
        own2 = 1.0 - (0.9**2) * (0.99**1)
        own1 = 1.0 - (0.9**1) * (0.99**2)
        np.testing.assert_allclose(pv.p[:5], own2, rtol=1e-12)
        np.testing.assert_allclose(pv.p[5:], own1, rtol=1e-12)

    def test_zero_counts_zero_priors(self):
        params = params40()
        pv = compute_priors(np.zeros(5, dtype=int), np.arange(params.N), params)
        assert np.all(pv.p == 0.0)
        assert pv.p_mean == 0.0
        assert pv.k_bar == 0.0

    def test_stats(self):
        params = params40()
        pv = compute_priors(np.array([3, 0, 1, 0, 2]), np.arange(params.N), params)
        assert pv.p_min == pv.p.min()
        assert pv.p_max == pv.p.max()
        assert pv.p_mean == pytest.approx(pv.p.mean())
        assert pv.k_bar == pytest.approx(pv.p.sum())
        assert pv.size == params.N

    def test_empty_pool(self):
        params = params40()
        pv = compute_priors(np.zeros(5, dtype=int), np.array([], dtype=np.int64), params)
        assert pv.size == 0
        assert pv.p_min == 0.0
        assert pv.p_max == 0.0
        assert pv.p_mean == 0.0


class TestEstimatorState:
    def test_fresh(self):
        params = params40()
        est = EstimatorState.fresh(params)
        assert not est.believed_infected.any()
        assert est.believed_new_infections.sum() == 0

    def test_pool_excludes_isolated_and_believed(self):
        params = params40()
        est = EstimatorState.fresh(params)
        isolated = np.zeros(params.N, dtype=bool)
        isolated[:3] = True
        decoded = np.zeros(params.N, dtype=bool)
        decoded[5] = True
        est, positives = update_from_decode(est, decoded, np.arange(params.N))
        mask = est.pool_mask(isolated)
        assert not mask[:3].any()
        assert not mask[5]
        assert mask.sum() == params.N - 4
        assert positives.tolist() == [5]

    def test_update_recomputes_counts(self):
        params = params40()
        est = EstimatorState.fresh(params)
        decoded = np.zeros(params.N, dtype=bool)
        decoded[[0, 1, 9]] = True
        est, _ = update_from_decode(est, decoded, np.arange(params.N))
        assert est.believed_new_infections[0] == 2
        assert est.believed_new_infections[1] == 1
        assert est.believed_new_infections[2:].sum() == 0
        assert est.believed_infected[[0, 1, 9]].all()


class TestBoundednessReport:
    def test_defined_ratio(self):
        params = params40(eta=12.0)
        pv = compute_priors(np.array([3, 0, 1, 0, 2]), np.arange(params.N), params)
        report = boundedness_report(pv, params)
        assert report.ratio == pytest.approx(pv.p_max / pv.p_min)
        assert report.all_below_half
        assert report.ratio_within_eta is True

    def test_undefined_ratio(self):
        params = params40()
        pv = compute_priors(np.zeros(5, dtype=int), np.arange(params.N), params)
        report = boundedness_report(pv, params)
        assert report.ratio is None
        assert report.ratio_within_eta is None

    def test_half_violation_detected(self):
        params = params40(q1=0.9)
        pv = compute_priors(np.array([4, 4, 4, 4, 4]), np.arange(params.N), params)
        report = boundedness_report(pv, params)
        assert not report.all_below_half
