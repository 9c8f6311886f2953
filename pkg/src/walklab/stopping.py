"""Exit- and hitting-time laws, mean exit times and the inverse scale.

Exit time convention: ``T_A = inf{t >= 0 : X_t not in A}``, so ``T_A = 0``
when the walk starts outside ``A`` and ``E(x, 1) = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import InteriorMargin, VertexSet, WeightedGraph, as_mask
from .linalg import harmonic_extension
from .walk import propagate

MAX_SURVIVAL_STEPS = 50_000_000


@dataclass(frozen=True)
class ExitTimeCDF:
    """``values[n] = P_{x0}(T < n)`` for ``n = 0..n_max``.

    ``tail`` is the mass not yet absorbed at the end of the table,
    ``P(T >= n_max)``; it is reported, never folded into the table.
    """

    source: int
    region: VertexSet
    values: np.ndarray
    tail: float

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def survival(self) -> np.ndarray:
        """``P(T > n)`` for ``n = 0..n_max-1``."""
        return 1.0 - self.values[1:]


def survival_curve(g: WeightedGraph, x0: int, region, steps: int) -> np.ndarray:
    """``S[t] = P_{x0}(T_region > t)`` for ``t = 0..steps``."""
    mask = as_mask(g, region)
    out = np.empty(steps + 1)
    for t, v in enumerate(propagate(g, x0, steps, kill=mask)):
        out[t] = v.sum()
    return out


def exit_time_cdf(g: WeightedGraph, x0: int, region, n_max: int | None = None) -> ExitTimeCDF:
    """Exact law of the exit time from ``region`` by killed propagation.

    ``n_max`` defaults to ``ceil(8 E_{x0}(region))``.
    """
    vs = VertexSet.of(g, region)
    if x0 not in vs:
        raise ValueError(f"start vertex {x0} is not in the region")
    if n_max is None:
        n_max = max(1, math.ceil(8 * float(mean_exit_times(g, vs)[x0])))
    S = survival_curve(g, x0, vs, max(n_max - 1, 0))
    F = np.empty(n_max + 1)
    F[0] = 0.0
    F[1:] = 1.0 - S[:n_max]
    # accumulated rounding can push the complement a hair outside [0, 1]
    np.clip(F, 0.0, 1.0, out=F)
    np.maximum.accumulate(F, out=F)
    return ExitTimeCDF(x0, vs, F, float(1.0 - F[-1]))


def hitting_time_cdf(g: WeightedGraph, x0: int, target, n_max: int) -> ExitTimeCDF:
    """``P_{x0}(tau_target < n)``, the hitting time being the exit time
    from the complement of ``target``."""
    tmask = as_mask(g, target)
    comp = VertexSet(~tmask)
    if tmask[x0]:
        F = np.ones(n_max + 1)
        F[0] = 0.0
        return ExitTimeCDF(x0, comp, F, 0.0)
    return exit_time_cdf(g, x0, comp, n_max)


def survival_sum(g: WeightedGraph, x0: int, region, tol: float = 1e-16) -> float:
    """``sum_{n >= 0} P(T > n)``, run until the surviving mass drops below
    ``tol``."""
    mask = as_mask(g, region)
    if not mask[x0]:
        return 0.0
    if mask.all():
        return math.inf
    total = 0.0
    for t, v in enumerate(propagate(g, x0, MAX_SURVIVAL_STEPS, kill=mask)):
        s = v.sum()
        total += s
        if s < tol:
            break
    return total


def mean_exit_times(g: WeightedGraph, region) -> np.ndarray:
    """``E_y(T_region)`` for every vertex (zero outside the region).

    Raises ``ValueError`` when the region is the whole graph, in which case
    the walk never leaves it.
    """
    mask = as_mask(g, region)
    if mask.all():
        raise ValueError("region covers the whole graph; the exit time is infinite")
    return harmonic_extension(g, mask, np.zeros(g.n), source=np.ones(g.n))


def mean_exit(g: WeightedGraph, z: int, r: float) -> float:
    """``E(z, r)`` for a real radius, memoised on the graph.

    The open ball ``B(z, r)`` depends only on ``ceil(r)``, which is the
    memo key.  A ball covering the whole (finite) graph gives ``inf``.
    """
    key = (int(z), math.ceil(r))
    cache = g.__dict__.setdefault("_mean_exit_cache", {})
    hit = cache.get(key)
    if hit is not None:
        return hit
    if key[1] <= 0:
        val = 0.0
    elif key[1] == 1:
        val = 1.0
    else:
        mask = g.distances(z) < key[1]
        val = math.inf if mask.all() else float(mean_exit_times(g, mask)[z])
    cache[key] = val
    return val


def hitting_before_exit_field(g: WeightedGraph, target, domain) -> np.ndarray:
    """``u(w) = P_w(tau_target < T_domain)`` at every vertex."""
    tmask = as_mask(g, target)
    dmask = as_mask(g, domain)
    if not tmask.any():
        raise ValueError("target set is empty")
    if np.any(tmask & ~dmask):
        raise ValueError("target must be contained in the domain")
    return harmonic_extension(g, dmask & ~tmask, tmask.astype(float))


def hitting_before_exit(g: WeightedGraph, w: int, target, domain) -> float:
    return float(hitting_before_exit_field(g, target, domain)[w])


@dataclass
class ScaleProfile:
    """``E(x, R)`` and ``Ebar(x, R)`` for ``R = 1..R_max``.

    Arrays are indexed by radius: ``E[R]`` (``E[0]`` is 0).  ``exact[R]``
    says whether ``B(x, R)`` keeps clear of the truncation boundary.
    """

    center: int
    E: np.ndarray
    Ebar: np.ndarray
    exact: np.ndarray
    per_start: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def R_max(self) -> int:
        return len(self.E) - 1

    @property
    def radii(self) -> np.ndarray:
        return np.arange(1, self.R_max + 1)


def mean_exit_profile(g: WeightedGraph, x: int, R_max: int, *,
                      margin: InteriorMargin = InteriorMargin(1.0),
                      keep_per_start: bool = False) -> ScaleProfile:
    E = np.zeros(R_max + 1)
    Ebar = np.zeros(R_max + 1)
    exact = np.zeros(R_max + 1, dtype=bool)
    per = {}
    dist = g.distances(x)
    for R in range(1, R_max + 1):
        mask = dist < R
        vals = mean_exit_times(g, mask)
        E[R] = vals[x]
        Ebar[R] = vals[mask].max()
        exact[R] = margin.valid(g, x, R)
        if keep_per_start:
            per[R] = vals
    return ScaleProfile(x, E, Ebar, exact, per)


def inverse_scale(profile: ScaleProfile, n: float) -> int:
    """``e(x, n) = min{r >= 1 : E(x, r) >= n}``."""
    if n > profile.E[-1]:
        raise ValueError(f"n={n} exceeds E(x, {profile.R_max}) = {profile.E[-1]:.6g}; extend the profile")
    return int(np.searchsorted(profile.E[1:], n, side="left")) + 1
