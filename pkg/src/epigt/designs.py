"""Nonadaptive pooled-test designs and the noiseless OR test channel.

Three generators: one individual test per pool member (``complete_design``),
a prior-weighted random design that places less-likely-infected members in
more tests (``cca_design``), and constant-column-weight random designs keyed
to a reference probability (``constant_column_weight_design``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LN2 = math.log(2.0)

_MAX_REDRAWS = 64


@dataclass
class TestMatrix:
    """A batch of pooled tests over an ordered pool.

    ``pool`` holds the global ids of the pooled individuals; ``tests`` holds,
    per test, the pool-local indices of its members.  Every test is nonempty
    unless the design is degenerate (T == 0).
    """

    pool: np.ndarray
    tests: list[np.ndarray]
    degenerate: bool = False

    def __post_init__(self) -> None:
        self.pool = np.asarray(self.pool, dtype=np.int64)
        self.tests = [np.asarray(t, dtype=np.int64) for t in self.tests]
        n = self.pool.size
        for t in self.tests:
            if t.size == 0:
                raise ValueError("tests must be nonempty")
            if t.size and (t.min() < 0 or t.max() >= n):
                raise ValueError("test members must be pool-local indices")

    @property
    def T(self) -> int:
        return len(self.tests)

    @property
    def n(self) -> int:
        return int(self.pool.size)

    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """(member_indices, test_ids) arrays, one entry per membership."""
        if not self.tests:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty
        members = np.concatenate(self.tests)
        test_ids = np.repeat(np.arange(self.T, dtype=np.int64), [t.size for t in self.tests])
        return members, test_ids

    def dense(self) -> np.ndarray:
        """(T, n) boolean membership matrix."""
        m = np.zeros((self.T, self.n), dtype=bool)
        for row, t in enumerate(self.tests):
            m[row, t] = True
        return m


@dataclass
class TestResults:
    """Boolean OR outcomes of one test batch."""

    y: np.ndarray

    def __post_init__(self) -> None:
        self.y = np.asarray(self.y, dtype=bool)


def complete_design(pool: np.ndarray) -> TestMatrix:
    """One singleton test per pool member."""
    pool = np.asarray(pool, dtype=np.int64)
    tests = [np.array([i], dtype=np.int64) for i in range(pool.size)]
    return TestMatrix(pool=pool, tests=tests)


def column_weight(T: int, pool_size: int, p_ref: float) -> int:
    """Tests per member for the constant-column-weight designs.

    L = max(1, floor(T / (max(pool_size * p_ref, 2) * ln 2))), capped at T.
    The expected defective count is floored at 2, matching the 1/2 cap the
    prior-weighted design puts on its inclusion probabilities; without the
    floor, an expectation under 1/ln 2 would place every member in every
    test, a matrix no decoder can invert while anyone is infected.  A
    reference probability of 0 means no infections are expected and the
    weight saturates at T.
    """
    if T < 1:
        raise ValueError(f"need at least one test, got T={T}")
    if pool_size < 1:
        raise ValueError("pool must be nonempty")
    if p_ref < 0.0:
        raise ValueError(f"p_ref must be nonnegative, got {p_ref}")
    if p_ref == 0.0:
        return T
    raw = math.floor(T / (max(pool_size * p_ref, 2.0) * LN2))
    return min(max(1, raw), T)


def constant_column_weight_design(
    T: int, pool: np.ndarray, p_ref: float, rng: np.random.Generator
) -> TestMatrix:
    """Each member joins exactly L tests chosen uniformly without replacement.

    L follows :func:`column_weight`.  Tests that come out empty are re-drawn:
    the matrix is regenerated a bounded number of times, after which any
    still-empty test deterministically receives one membership slot moved
    from the fullest test (column weights stay exactly L).  When the total
    membership count n*L cannot cover T tests this is infeasible and raises.
    """
    pool = np.asarray(pool, dtype=np.int64)
    n = pool.size
    L = column_weight(T, n, p_ref)
    if n * L < T:
        raise ValueError(
            f"cannot fill {T} nonempty tests with {n} members of column weight {L}"
        )
    idx = _exact_weight_memberships(n, T, L, rng)
    for _ in range(_MAX_REDRAWS):
        occupancy = np.bincount(idx.ravel(), minlength=T)
        if occupancy.min() > 0:
            break
        idx = _exact_weight_memberships(n, T, L, rng)
    else:
        idx = _fill_empty_tests(idx, T)
    return _matrix_from_memberships(pool, idx_rows=list(idx), T=T)


def _exact_weight_memberships(n: int, T: int, L: int, rng: np.random.Generator) -> np.ndarray:
    """(n, L) array: per row a uniform L-subset of range(T)."""
    if L == T:
        return np.tile(np.arange(T, dtype=np.int64), (n, 1))
    idx = np.empty((n, L), dtype=np.int64)
    # Chunk rows to bound the (rows, T) key matrix.
    chunk = max(1, int(4_000_000 // max(T, 1)))
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        keys = rng.random((stop - start, T))
        idx[start:stop] = np.argpartition(keys, L - 1, axis=1)[:, :L]
    return idx


def _fill_empty_tests(idx: np.ndarray, T: int) -> np.ndarray:
    """Move one slot from the fullest test into each empty test."""
    idx = idx.copy()
    occupancy = np.bincount(idx.ravel(), minlength=T)
    while occupancy.min() == 0:
        empty = int(occupancy.argmin())
        donor = int(occupancy.argmax())
        rows, cols = np.nonzero(idx == donor)
        moved = False
        for row, col in zip(rows, cols):
            if empty not in idx[row]:
                idx[row, col] = empty
                occupancy[donor] -= 1
                occupancy[empty] += 1
                moved = True
                break
        if not moved:
            raise ValueError("cannot make every test nonempty")
    return idx


def cca_inclusion_probabilities(p: np.ndarray) -> np.ndarray:
    """Per-test inclusion probability for each member under the weighted rule.

    nu_i = min(1/2, 1/k_bar) * ln(1/p_i)/ln(1/p_max), capped at 1/2, so a
    member with a smaller prior lands in stochastically more tests; identical
    priors reduce to i.i.d. inclusion with probability min(1/2, 1/k_bar).
    """
    p = np.asarray(p, dtype=np.float64)
    k_bar = p.sum()
    if k_bar <= 0.0:
        raise ValueError("expected number of infected must be positive")
    base = min(0.5, 1.0 / k_bar)
    p_max = p.max()
    if p_max >= 1.0:
        weights = np.ones_like(p)
    else:
        tiny = np.finfo(np.float64).tiny
        weights = np.log(np.maximum(p, tiny)) / np.log(p_max)
    return np.minimum(0.5, base * weights)


def cca_design(T: int, pv, rng: np.random.Generator) -> TestMatrix:
    """Random design with independent per-test inclusions weighted by priors.

    ``pv`` is a PriorVector.  With k_bar = 0 the design is degenerate: an
    empty, flagged matrix is returned.  Empty tests are re-drawn (each test's
    row is an independent draw, so only the empty rows regenerate).
    """
    if T < 1:
        raise ValueError(f"need at least one test, got T={T}")
    pool = np.asarray(pv.pool, dtype=np.int64)
    if pv.k_bar <= 0.0:
        return TestMatrix(pool=pool, tests=[], degenerate=True)
    nu = cca_inclusion_probabilities(pv.p)
    n = pool.size
    rows: list[np.ndarray | None] = [None] * T
    pending = np.arange(T)
    for _ in range(_MAX_REDRAWS * 16):
        if pending.size == 0:
            break
        draws = rng.random((pending.size, n)) < nu[None, :]
        still_empty = []
        for k, row_id in enumerate(pending):
            members = np.flatnonzero(draws[k])
            if members.size:
                rows[row_id] = members
            else:
                still_empty.append(row_id)
        pending = np.asarray(still_empty, dtype=np.int64)
    if pending.size:
        raise ValueError("could not draw nonempty tests; inclusion probabilities too small")
    return _matrix_from_memberships(pool, idx_rows=None, T=T, tests=rows)


def _matrix_from_memberships(
    pool: np.ndarray,
    idx_rows: list[np.ndarray] | None,
    T: int,
    tests: list[np.ndarray] | None = None,
) -> TestMatrix:
    """Assemble a TestMatrix from per-member test ids or per-test member lists."""
    if tests is None:
        members, test_ids = [], []
        for member, row in enumerate(idx_rows):
            members.append(np.full(row.size, member, dtype=np.int64))
            test_ids.append(np.asarray(row, dtype=np.int64))
        members = np.concatenate(members) if members else np.zeros(0, dtype=np.int64)
        test_ids = np.concatenate(test_ids) if test_ids else np.zeros(0, dtype=np.int64)
        order = np.argsort(test_ids, kind="stable")
        members = members[order]
        test_ids = test_ids[order]
        boundaries = np.searchsorted(test_ids, np.arange(T + 1))
        tests = [members[boundaries[t] : boundaries[t + 1]] for t in range(T)]
    return TestMatrix(pool=pool, tests=[np.sort(t) for t in tests])


def apply_tests(tm: TestMatrix, truth: np.ndarray) -> TestResults:
    """Noiseless OR channel: a test is positive iff it holds an infected member."""
    truth = np.asarray(truth, dtype=bool)
    if truth.shape != (tm.n,):
        raise ValueError("truth must have one entry per pool member")
    members, test_ids = tm.flat()
    hits = np.bincount(test_ids[truth[members]], minlength=tm.T)
    return TestResults(y=hits > 0)


def serialize_test_matrix(tm: TestMatrix) -> str:
    """Sparse text form: a pool header line, then one line per test.

    Line 1: ``pool <id> <id> ...``; each following line lists the global ids
    of one test's members.
    """
    lines = ["pool " + " ".join(str(int(i)) for i in tm.pool)]
    for t in tm.tests:
        lines.append(" ".join(str(int(tm.pool[m])) for m in t))
    return "\n".join(lines) + "\n"


def parse_test_matrix(text: str) -> TestMatrix:
    """Inverse of :func:`serialize_test_matrix`."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("pool"):
        raise ValueError("test matrix text must start with a 'pool' header line")
    pool = np.asarray([int(x) for x in lines[0].split()[1:]], dtype=np.int64)
    position = {int(g): i for i, g in enumerate(pool)}
    tests = []
    for line in lines[1:]:
        tests.append(np.asarray([position[int(x)] for x in line.split()], dtype=np.int64))
    return TestMatrix(pool=pool, tests=tests)
