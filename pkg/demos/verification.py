"""
The self-check battery
======================

Replays the library's internal guarantees on freshly drawn random
instances: decoder guarantees, optimality of the exhaustive decoder,
monotonicity of the exact error in the priors, the bracketing of the
error between uniformized instances, the analytic monotonicity grids,
and the boundedness of the daily priors.
"""

from epigt.checks import run_all

# The fast profile trims the instance counts so the battery finishes in
# seconds; the full profile is what the test suite runs.  Each report
# line states the property, the trial count, and the violations found.
for rep in run_all(fast=True):
    print(rep.line())
