"""Lazy evaluation of definite-defectives success for random designs.

The search over test counts evaluates one fresh random design per
candidate count, and only needs the success bit, never the matrix.  Both
kernels therefore sample memberships lazily with a counter-based PRNG:
infected rows are drawn in full to mark the positive tests, every other
member is probed test by test and abandoned at the first negative test it
belongs to.  Decoding succeeds exactly when every infected member appears
in some test whose candidate count is one, where candidates are the
members all of whose tests are positive.

Empty tests are never materialized here; callers must check the empty-test
bounds below and fall back to the explicit-matrix route when a redraw
would be likely.  Within the bound the lazy and explicit routes agree in
distribution up to the guard probability.
"""

from __future__ import annotations

import math

import numba
import numpy as np

EMPTY_TEST_GUARD = 1e-9

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@numba.njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True, inline="always")
def _next(state):
    state = state + _GOLDEN
    return state, _mix(state)


@numba.njit(cache=True, inline="always")
def _next_below(state, m):
    state, z = _next(state)
    return state, np.int64(z % np.uint64(m))


@numba.njit(cache=True, inline="always")
def _next_unit(state):
    # in (0, 1]: the log of it is always finite
    state, z = _next(state)
    return state, (np.float64(z >> np.uint64(11)) + 1.0) * (1.0 / 9007199254740992.0)


@numba.njit(cache=True, inline="always")
def _member_state(seed, i):
    return _mix(np.uint64(seed) ^ (np.uint64(i + 1) * _GOLDEN))


@numba.njit(cache=True)
def _dd_success_ccw(n, T, L, infected, seed):
    """DD success bit for a fresh constant-column-weight design.

    Member i's tests are the first L entries of a partial Fisher-Yates
    shuffle seeded by (seed, i); the shuffle is undone after each member so
    one scratch array serves the whole pool.
    """
    scratch = np.arange(T, dtype=np.int64)
    swaps = np.empty(L, dtype=np.int64)
    pos = np.zeros(T, dtype=np.bool_)
    cand_count = np.zeros(T, dtype=np.int64)
    k = infected.size
    inf_rows = np.empty((k, L), dtype=np.int64)

    is_infected = np.zeros(n, dtype=np.bool_)
    for a in range(k):
        is_infected[infected[a]] = True

    for a in range(k):
        state = _member_state(seed, infected[a])
        for j in range(L):
            state, off = _next_below(state, T - j)
            r = j + off
            swaps[j] = r
            tmp = scratch[j]
            scratch[j] = scratch[r]
            scratch[r] = tmp
            t = scratch[j]
            inf_rows[a, j] = t
            pos[t] = True
            cand_count[t] += 1
        for j in range(L - 1, -1, -1):
            r = swaps[j]
            tmp = scratch[j]
            scratch[j] = scratch[r]
            scratch[r] = tmp

    for i in range(n):
        if is_infected[i]:
            continue
        state = _member_state(seed, i)
        drawn = 0
        all_pos = True
        for j in range(L):
            state, off = _next_below(state, T - j)
            r = j + off
            swaps[j] = r
            tmp = scratch[j]
            scratch[j] = scratch[r]
            scratch[r] = tmp
            drawn = j + 1
            if not pos[scratch[j]]:
                all_pos = False
                break
        if all_pos:
            for j in range(L):
                cand_count[scratch[j]] += 1
        for j in range(drawn - 1, -1, -1):
            r = swaps[j]
            tmp = scratch[j]
            scratch[j] = scratch[r]
            scratch[r] = tmp

    for a in range(k):
        found = False
        for j in range(L):
            if cand_count[inf_rows[a, j]] == 1:
                found = True
                break
        if not found:
            return False
    return True


@numba.njit(cache=True, inline="always")
def _walk_row(state, nu_i, T, buf):
    """Sample the positions of an iid Bernoulli(nu_i) row by geometric skips."""
    count = 0
    t = 0
    log_q = math.log1p(-nu_i)
    while t < T:
        state, u = _next_unit(state)
        t += np.int64(math.log(u) / log_q)
        if t >= T:
            break
        buf[count] = t
        count += 1
        t += 1
    return state, count


@numba.njit(cache=True)
def _dd_success_cca(n, T, nu, infected, seed):
    """DD success bit for a fresh design with per-member inclusion rates nu."""
    pos = np.zeros(T, dtype=np.bool_)
    cand_count = np.zeros(T, dtype=np.int64)
    k = infected.size
    buf = np.empty(T, dtype=np.int64)
    inf_rows = np.empty((k, T), dtype=np.int64)
    inf_lens = np.empty(k, dtype=np.int64)

    is_infected = np.zeros(n, dtype=np.bool_)
    for a in range(k):
        is_infected[infected[a]] = True

    for a in range(k):
        i = infected[a]
        if nu[i] <= 0.0:
            cnt = 0
        elif nu[i] >= 1.0:
            cnt = T
            for t in range(T):
                buf[t] = t
        else:
            state = _member_state(seed, i)
            state, cnt = _walk_row(state, nu[i], T, buf)
        inf_lens[a] = cnt
        for j in range(cnt):
            t = buf[j]
            inf_rows[a, j] = t
            pos[t] = True
            cand_count[t] += 1

    for i in range(n):
        if is_infected[i]:
            continue
        if nu[i] <= 0.0:
            continue
        if nu[i] >= 1.0:
            all_pos = True
            for t in range(T):
                if not pos[t]:
                    all_pos = False
                    break
            if all_pos:
                for t in range(T):
                    cand_count[t] += 1
            continue
        state = _member_state(seed, i)
        cnt = 0
        t = 0
        log_q = math.log1p(-nu[i])
        all_pos = True
        while t < T:
            state, u = _next_unit(state)
            t += np.int64(math.log(u) / log_q)
            if t >= T:
                break
            if not pos[t]:
                all_pos = False
                break
            buf[cnt] = t
            cnt += 1
            t += 1
        if all_pos:
            for j in range(cnt):
                cand_count[buf[j]] += 1

    for a in range(k):
        if inf_lens[a] == 0:
            return False
        found = False
        for j in range(inf_lens[a]):
            if cand_count[inf_rows[a, j]] == 1:
                found = True
                break
        if not found:
            return False
    return True


def ccw_empty_test_bound(n: int, T: int, L: int) -> float:
    """Upper bound on the chance that some test of a fresh design is empty."""
    if L >= T:
        return 0.0
    return float(T * math.exp(n * math.log1p(-L / T)))


def cca_empty_test_bound(T: int, nu: np.ndarray) -> float:
    """Upper bound on the chance that some Bernoulli-design test is empty."""
    nu = np.asarray(nu, dtype=np.float64)
    if np.any(nu >= 1.0):
        return 0.0
    with np.errstate(divide="ignore"):
        log_empty = float(np.log1p(-nu).sum())
    return float(T * math.exp(log_empty))


def dd_success_ccw(n: int, T: int, L: int, infected: np.ndarray, seed: int) -> bool:
    """Lazy DD success draw for a constant-column-weight design."""
    infected = np.asarray(infected, dtype=np.int64)
    if infected.size == 0:
        return True
    return bool(_dd_success_ccw(n, T, L, infected, np.uint64(seed)))


def dd_success_cca(n: int, T: int, nu: np.ndarray, infected: np.ndarray, seed: int) -> bool:
    """Lazy DD success draw for a Bernoulli design with rates nu."""
    infected = np.asarray(infected, dtype=np.int64)
    if infected.size == 0:
        return True
    nu = np.ascontiguousarray(nu, dtype=np.float64)
    return bool(_dd_success_cca(n, T, nu, infected, np.uint64(seed)))
