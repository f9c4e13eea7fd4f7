"""Decoders for noiseless pooled tests and an exact error-probability oracle.

COMP clears every member of a negative test and declares the rest infected
(no false negatives).  DD keeps only the cleared-complement members that
appear alone in some positive test (no false positives).  The brute-force
posterior decoder enumerates every status vector consistent with the
results and returns the most probable one, breaking ties lexicographically
(index 0 most significant, 0 before 1, smallest vector wins).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .designs import TestMatrix, TestResults

ENUMERATION_CAP = 20

TIE_THRESHOLD = 1e-12


@dataclass
class DecodeOutcome:
    """Estimate plus per-member confidence.

    ``resolved[i]`` is True when the estimate for member i is forced by the
    results (cleared by a negative test, or certified alone in a positive
    test); the rest are assumptions.
    """

    estimate: np.ndarray
    resolved: np.ndarray

    def __post_init__(self) -> None:
        self.estimate = np.asarray(self.estimate, dtype=bool)
        self.resolved = np.asarray(self.resolved, dtype=bool)


def _flat(tm: TestMatrix) -> tuple[np.ndarray, np.ndarray]:
    return tm.flat()


def comp_decode(tm: TestMatrix, results: TestResults) -> DecodeOutcome:
    """Members of negative tests are non-infected; everyone else is infected."""
    y = results.y
    if y.shape != (tm.T,):
        raise ValueError("results must have one entry per test")
    members, test_ids = _flat(tm)
    cleared = np.zeros(tm.n, dtype=bool)
    if members.size:
        cleared[members[~y[test_ids]]] = True
    estimate = ~cleared
    return DecodeOutcome(estimate=estimate, resolved=cleared.copy())


def dd_decode(tm: TestMatrix, results: TestResults) -> DecodeOutcome:
    """Definite-defectives rule: certify sole remaining members of positive tests.

    Declared infected members are guaranteed truly infected under noiseless
    tests; unresolved members are assumed non-infected.
    """
    y = results.y
    if y.shape != (tm.T,):
        raise ValueError("results must have one entry per test")
    members, test_ids = _flat(tm)
    cleared = np.zeros(tm.n, dtype=bool)
    if members.size:
        cleared[members[~y[test_ids]]] = True
    candidate = ~cleared
    estimate = np.zeros(tm.n, dtype=bool)
    if members.size:
        cand_entries = candidate[members]
        cand_per_test = np.bincount(test_ids, weights=cand_entries, minlength=tm.T)
        sole = y & (cand_per_test == 1)
        definite_entries = sole[test_ids] & cand_entries
        estimate[members[definite_entries]] = True
    resolved = cleared | estimate
    return DecodeOutcome(estimate=estimate, resolved=resolved)


def _test_masks(tm: TestMatrix) -> np.ndarray:
    """Per-test member bitmasks; bit (n-1-i) encodes member i."""
    n = tm.n
    masks = np.zeros(tm.T, dtype=np.int64)
    for t, ms in enumerate(tm.tests):
        mask = 0
        for m in ms:
            mask |= 1 << (n - 1 - int(m))
        masks[t] = mask
    return masks


def pattern_to_vector(pattern: int, n: int) -> np.ndarray:
    """Status vector for an enumeration pattern (bit n-1-i holds u_i)."""
    return np.array([(pattern >> (n - 1 - i)) & 1 for i in range(n)], dtype=bool)


def vector_to_pattern(u: np.ndarray) -> int:
    u = np.asarray(u)
    n = u.size
    pattern = 0
    for i in range(n):
        if u[i]:
            pattern |= 1 << (n - 1 - i)
    return pattern


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise ValueError(
            f"pool of {n} exceeds the enumeration cap of {cap}; "
            "exhaustive decoding is infeasible"
        )


def map_decode(
    tm: TestMatrix,
    results: TestResults,
    pv,
    cap: int = ENUMERATION_CAP,
) -> DecodeOutcome:
    """Most probable status vector consistent with the results.

    ``pv`` is a PriorVector aligned with the pool.  Probabilities are
    compared in the log domain with a tie threshold; exact ties keep the
    lexicographically earliest vector.  Nothing is certified, so
    ``resolved`` is all False.
    """
    n = tm.n
    _check_cap(n, cap)
    y = results.y
    if y.shape != (tm.T,):
        raise ValueError("results must have one entry per test")
    p = np.asarray(pv.p, dtype=np.float64)
    if p.shape != (n,):
        raise ValueError("prior vector must match the pool")
    pattern = _map_pattern(tm, y, p)
    return DecodeOutcome(
        estimate=pattern_to_vector(pattern, n),
        resolved=np.zeros(n, dtype=bool),
    )


def _map_pattern(tm: TestMatrix, y: np.ndarray, p: np.ndarray) -> int:
    n = tm.n
    masks = _test_masks(tm)
    with np.errstate(divide="ignore"):
        log_p = np.log(p)
        log_q = np.log1p(-p)

    best_pattern = -1
    best_lp = -math.inf
    shifts = (n - 1 - np.arange(n)).astype(np.int64)
    chunk = 1 << 16
    for start in range(0, 1 << n, chunk):
        stop = min(1 << n, start + chunk)
        patterns = np.arange(start, stop, dtype=np.int64)
        hit = (patterns[:, None] & masks[None, :]) != 0
        consistent = np.all(hit == y[None, :], axis=1)
        if not consistent.any():
            continue
        cons_patterns = patterns[consistent]
        bits = ((cons_patterns[:, None] >> shifts[None, :]) & 1).astype(bool)
        # selecting rather than multiplying keeps -inf terms exact
        lps = np.where(bits, log_p[None, :], log_q[None, :]).sum(axis=1)
        if best_pattern < 0:
            best_pattern = int(cons_patterns[0])
            best_lp = float(lps[0])
        c_best = float(lps.max())
        if c_best > best_lp + TIE_THRESHOLD:
            top = lps >= c_best - TIE_THRESHOLD
            best_pattern = int(cons_patterns[np.flatnonzero(top)[0]])
            best_lp = c_best
    if best_pattern < 0:
        raise ValueError("no status vector is consistent with the results")
    return best_pattern


def map_decoder_for(pv, cap: int = ENUMERATION_CAP) -> Callable[[TestMatrix, TestResults], DecodeOutcome]:
    """Bind a prior vector so the posterior decoder matches the (tm, y) shape."""

    def decoder(tm: TestMatrix, results: TestResults) -> DecodeOutcome:
        return map_decode(tm, results, pv, cap=cap)

    return decoder


def make_random_decoder(
    T: int, n: int, rng: np.random.Generator
) -> Callable[[TestMatrix, TestResults], DecodeOutcome]:
    """A seeded lookup table from result vectors to status vectors.

    Used as an arbitrary-decoder baseline in optimality checks; the table is
    fixed at construction so the decoder is reproducible.
    """
    table = rng.integers(0, 1 << n, size=1 << T, dtype=np.int64)

    def decoder(tm: TestMatrix, results: TestResults) -> DecodeOutcome:
        key = 0
        for t, bit in enumerate(results.y):
            if bit:
                key |= 1 << (T - 1 - t)
        return DecodeOutcome(
            estimate=pattern_to_vector(int(table[key]), n),
            resolved=np.zeros(n, dtype=bool),
        )

    return decoder


def exact_error_probability(
    tm: TestMatrix,
    pv,
    decoder: Callable[[TestMatrix, TestResults], DecodeOutcome],
    cap: int = ENUMERATION_CAP,
) -> float:
    """Exact decoding error mass over all status vectors.

    Sums Pr(u; p) over every u whose decode differs from u.  Decodes are
    memoized per result vector, so the decoder runs at most 2^T times.
    """
    n = tm.n
    _check_cap(n, cap)
    p = np.asarray(pv.p, dtype=np.float64)
    if p.shape != (n,):
        raise ValueError("prior vector must match the pool")
    masks = _test_masks(tm)
    decoded: dict[int, int] = {}
    error = 0.0
    for pattern in range(1 << n):
        u = pattern_to_vector(pattern, n)
        prob = float(np.prod(np.where(u, p, 1.0 - p)))
        if prob == 0.0:
            continue
        y_key = 0
        y_bits = np.zeros(tm.T, dtype=bool)
        for t in range(tm.T):
            if pattern & int(masks[t]):
                y_key |= 1 << (tm.T - 1 - t)
                y_bits[t] = True
        if y_key not in decoded:
            outcome = decoder(tm, TestResults(y=y_bits))
            decoded[y_key] = vector_to_pattern(outcome.estimate)
        if decoded[y_key] != pattern:
            error += prob
    return error
