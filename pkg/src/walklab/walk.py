"""Exact n-step kernels by vector propagation and a seeded Monte Carlo walker.

Kernel powers are never formed; a point mass is pushed through ``P`` one
step at a time, so memory stays linear in the graph.  The Monte Carlo side
uses numpy's Philox generator (a counter-based 64-bit generator) keyed by
``(seed, worker)`` so walkers split across workers share no state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .graph import WeightedGraph, as_mask


def _transpose(g: WeightedGraph):
    cache = g.__dict__
    if "_PT" not in cache:
        cache["_PT"] = g.P.T.tocsr()
    return cache["_PT"]


def propagate(g: WeightedGraph, x: int, steps: int, kill=None) -> Iterator[np.ndarray]:
    """Yield the distribution of ``X_t`` for ``t = 0..steps``.

    With ``kill`` (a vertex set) the walk is absorbed the moment it leaves
    the set, so the yielded vectors are sub-probability vectors supported
    on ``kill`` and their mass is ``P(T > t)``.
    """
    PT = _transpose(g)
    v = np.zeros(g.n)
    v[x] = 1.0
    keep = None
    if kill is not None:
        keep = as_mask(g, kill)
        v[~keep] = 0.0
    yield v
    for _ in range(steps):
        v = PT @ v
        if keep is not None:
            v[~keep] = 0.0
        yield v


def transition_probabilities(g: WeightedGraph, n: int, x: int) -> np.ndarray:
    """Row ``P_n(x, .)``."""
    for v in propagate(g, x, n):
        pass
    return v


def heat_kernel(g: WeightedGraph, n: int, x: int, y: int | None = None):
    """``p_n(x, y) = P_n(x, y) / mu(y)``; the whole row when ``y`` is None."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    row = transition_probabilities(g, n, x) / g.mu
    return row if y is None else float(row[y])


def smoothed_heat_kernel(g: WeightedGraph, n: int, x: int, y: int | None = None):
    """``p~_n = p_n + p_{n+1}``, which removes bipartite parity zeros."""
    it = propagate(g, x, n + 1)
    for t, v in enumerate(it):
        if t == n:
            a = v
    row = (a + v) / g.mu
    return row if y is None else float(row[y])


def heat_kernel_series(g: WeightedGraph, x: int, n_max: int, targets=None) -> np.ndarray:
    """``p_n(x, y)`` for ``n = 0..n_max`` as an array of shape
    ``(n_max + 1, len(targets))`` (all vertices when ``targets`` is None)."""
    cols = np.arange(g.n) if targets is None else np.asarray(targets, dtype=np.int64)
    out = np.empty((n_max + 1, len(cols)))
    inv_mu = 1.0 / g.mu[cols]
    for t, v in enumerate(propagate(g, x, n_max)):
        out[t] = v[cols] * inv_mu
    return out


# -- Monte Carlo -------------------------------------------------------------

@dataclass(frozen=True)
class RngState:
    """Seed plus Philox block counter.

    ``generator(worker)`` derives an independent stream per worker index;
    the same ``(seed, counter, worker)`` always reproduces the same stream.
    """

    seed: int
    counter: int = 0

    def generator(self, worker: int = 0) -> np.random.Generator:
        key = np.array([self.seed & 0xFFFFFFFFFFFFFFFF, worker], dtype=np.uint64)
        bitgen = np.random.Philox(key=key, counter=self.counter)
        return np.random.Generator(bitgen)


class _Stepper:
    def __init__(self, g: WeightedGraph):
        W = g.W
        self.indptr = W.indptr
        self.indices = W.indices
        self.cum = np.concatenate([[0.0], np.cumsum(W.data)])

    def step(self, cur: np.ndarray, u: np.ndarray) -> np.ndarray:
        lo = self.indptr[cur]
        hi = self.indptr[cur + 1]
        target = self.cum[lo] + u * (self.cum[hi] - self.cum[lo])
        k = np.searchsorted(self.cum, target, side="right") - 1
        k = np.clip(k, lo, hi - 1)
        return self.indices[k]


def simulate_walk(g: WeightedGraph, x: int, horizon: int, rng: RngState, worker: int = 0) -> np.ndarray:
    """One trajectory ``X_0..X_horizon``."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    gen = rng.generator(worker)
    stepper = _Stepper(g)
    traj = np.empty(horizon + 1, dtype=np.int64)
    traj[0] = x
    u = gen.random(horizon)
    cur = np.array([x])
    for t in range(horizon):
        cur = stepper.step(cur, u[t:t + 1])
        traj[t + 1] = cur[0]
    return traj


def first_passage_times(g: WeightedGraph, x: int, horizon: int, rng: RngState, *,
                        exit_from=None, hit=None, walkers: int = 1,
                        worker: int = 0) -> np.ndarray:
    """Simulate ``walkers`` independent walks from ``x`` and return the
    first time each one leaves ``exit_from`` (or enters ``hit``).

    Walks still running at ``horizon`` report -1.  Exactly one of
    ``exit_from`` / ``hit`` must be given.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if (exit_from is None) == (hit is None):
        raise ValueError("give exactly one of exit_from or hit")
    stop = ~as_mask(g, exit_from) if hit is None else as_mask(g, hit)
    gen = rng.generator(worker)
    stepper = _Stepper(g)
    times = np.full(walkers, -1, dtype=np.int64)
    if stop[x]:
        times[:] = 0
        return times
    alive = np.arange(walkers)
    cur = np.full(walkers, x, dtype=np.int64)
    for t in range(1, horizon + 1):
        if len(alive) == 0:
            break
        cur = stepper.step(cur, gen.random(len(alive)))
        done = stop[cur]
        times[alive[done]] = t
        alive = alive[~done]
        cur = cur[~done]
    return times


def empirical_cdf(times: np.ndarray, n_max: int) -> np.ndarray:
    """``F[n] = #{T < n} / N`` for ``n = 0..n_max`` (-1 means not stopped)."""
    times = np.asarray(times)
    stopped = times[times >= 0]
    counts = np.bincount(stopped, minlength=n_max + 1)[: n_max + 1]
    F = np.concatenate([[0], np.cumsum(counts)[:-1]]) / len(times)
    return F
