"""
Test matrices, decoders, and how low the test count can go
==========================================================

Builds the randomized pooled designs on a small instance, decodes the
outcomes three ways, computes the exact error probability of each
decoder, and compares the spent tests against the information bound.
"""

import numpy as np

from epigt.bounds import (
    cca_budget,
    entropy_lower_bound,
    heuristic_budget,
    scaling_lower_bound,
)
from epigt.decoders import (
    comp_decode,
    dd_decode,
    exact_error_probability,
    map_decoder_for,
)
from epigt.designs import (
    apply_tests,
    cca_design,
    constant_column_weight_design,
    serialize_test_matrix,
)
from epigt.priors import PriorVector

# Twelve individuals, two of them ten times likelier to be infected than
# the rest.  The entropy bound counts the bits any nonadaptive scheme
# must extract; the scaling bound tracks how the count grows with n.
p = np.full(12, 0.02)
p[[3, 8]] = 0.2
pv = PriorVector(pool=np.arange(12), p=p)
print(f"entropy lower bound: {entropy_lower_bound(p):.2f} tests")
print(f"scaling lower bound: {scaling_lower_bound(12, 0.02):.2f} tests")
print(f"coupon-collector budget: {cca_budget(12, pv.k_bar)} tests")
print(f"heuristic daily budget: {heuristic_budget(12, pv.p_mean)} tests\n")

# A constant-column-weight matrix puts every individual in the same
# number of tests; the prior-weighted design instead gives likely
# carriers more tests by drawing each membership independently.
rng = np.random.default_rng(5)
ccw = constant_column_weight_design(8, pv.pool, pv.p_mean, rng)
cca = cca_design(8, pv, rng)
print("constant-column-weight matrix, one line per test:")
print(serialize_test_matrix(ccw))
sizes = [len(t) for t in cca.tests]
print(f"prior-weighted matrix: {len(cca.tests)} tests, "
      f"sizes {min(sizes)}..{max(sizes)}\n")

# Infect individual 8 and decode the pooled outcomes.  COMP keeps every
# individual no negative test rules out, DD keeps only those some
# positive test pins down, and MAP enumerates all infection patterns.
truth = np.zeros(12, dtype=bool)
truth[8] = True
results = apply_tests(ccw, truth)
mapd = map_decoder_for(pv)
for name, decoder in [("comp", comp_decode), ("dd", dd_decode), ("map", mapd)]:
    est = decoder(ccw, results).estimate
    hits = np.flatnonzero(est).tolist()
    err = exact_error_probability(ccw, pv, decoder)
    print(f"{name:>4}: estimate {hits}, exact error probability {err:.4f}")
