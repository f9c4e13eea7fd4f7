"""
How few tests can clear one day of the epidemic
===============================================

Freezes a single day of an epidemic, builds the community priors a tester
would hold that morning, and searches for the smallest number of pooled
tests at which each design still identifies every infected individual.
"""

import numpy as np

from epigt.model import ModelParams, init_population, isolate, step
from epigt.pipeline import DecoderName, Strategy, min_tests_for_day
from epigt.priors import compute_priors

params = ModelParams(N=300, C=15, p_init=0.05, q1=0.05, q2=0.001, r=0.1)

# Run the epidemic for five days under prompt screening: each cohort of
# carriers transmits for one day and is then isolated, the same lag the
# daily testing cycle imposes.  The morning pool therefore owes its
# infections to a single day of spread, and the priors describe exactly
# that: members of a heavily hit community become likelier carriers.
rng = np.random.default_rng(1)
state = init_population(params, rng)
for _ in range(5):
    carriers = np.flatnonzero(state.free_infected_mask)
    state, counts = step(state, params, rng)
    state = isolate(state, carriers)

pool = np.flatnonzero(~state.isolated)
pv = compute_priors(counts, pool, params)
truth = state.free_infected_mask[pool]
print(f"day 5: {truth.sum()} new infections in a pool of {pv.size}")
print(f"priors: min {pv.p_min:.4f}  mean {pv.p_mean:.4f}  max {pv.p_max:.4f}")
print(f"expected infected k_bar = {pv.k_bar:.1f}\n")

# For each pooled design, scan test counts upward until a fresh design of
# that size lets the definite-defectives decoder recover the truth with
# neither false negatives nor false positives.
for strategy in (Strategy.RND_MEAN, Strategy.RND_MAX, Strategy.CCA):
    tests, failed = min_tests_for_day(
        pv, truth, strategy, DecoderName.DD, np.random.default_rng(3)
    )
    note = " (search capped out)" if failed else ""
    print(f"{strategy.value:>9}: {tests} tests{note}")

# Individual testing would spend one test per pool member, so any pooled
# count below the pool size is a saving.  Repeating with another rng seed
# moves the numbers a little because each candidate count draws a fresh
# design.
print(f"{'complete':>9}: {pv.size} tests")
