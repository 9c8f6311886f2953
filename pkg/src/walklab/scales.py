"""Combinatorial scale functions k, l, nu, exponent fits and the
time-comparison constants.

Fractional radii such as ``R / k`` go straight into the open-ball
convention; ``E(z, r)`` only depends on ``ceil(r)`` and is memoised per
``(z, ceil(r))`` on the graph (see :func:`walklab.stopping.mean_exit`).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .graph import WeightedGraph, ball, shortest_path_union, sphere
from .stopping import ScaleProfile, mean_exit, mean_exit_times


@dataclass(frozen=True)
class ScaleParams:
    q: float = 0.25
    Q: float = 1.0
    C: float = 9.0

    def __post_init__(self):
        if not (self.q > 0 and self.Q > 0 and self.C > 0):
            raise ValueError("q, Q and C must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_PARAMS = ScaleParams()


def _memo(g: WeightedGraph) -> dict:
    return g.__dict__.setdefault("_scale_memo", {})


def _ball_min_profile(g: WeightedGraph, x: int, R: float) -> np.ndarray:
    """``m[k] = min_{z in B(x,R)} E(z, R/k)`` for ``k = 1..max(1, floor(R))``."""
    key = ("kmin", x, R)
    memo = _memo(g)
    if key not in memo:
        members = ball(g, x, R).ids
        K = max(1, math.floor(R))
        m = np.empty(K + 1)
        m[0] = math.nan
        for k in range(1, K + 1):
            m[k] = min(mean_exit(g, z, R / k) for z in members)
        memo[key] = m
    return memo[key]


def k_scale(g: WeightedGraph, x: int, n: float, R: float, params: ScaleParams = DEFAULT_PARAMS) -> int:
    """Largest integer ``k`` with ``n / k <= q min_{z in B(x,R)} E(z, R/k)``.

    Only ``k <= R`` is searched: beyond that ``R/k < 1``, every ball is a
    single vertex and the inequality holds for all large ``k``, so the
    maximum would not exist.  Returns 1 when no ``k`` qualifies.
    """
    if not R > 0 or not n > 0:
        raise ValueError("need n > 0 and R > 0")
    m = _ball_min_profile(g, x, R)
    best = 1
    for k in range(1, len(m)):
        if n / k <= params.q * m[k]:
            best = k
    return best


def _path_max_profile(g: WeightedGraph, x: int, y: int, C: float, R: float) -> np.ndarray:
    """``M[l] = max_{z in pi(x,y)} E(z, C R / l)`` for ``l = 1..floor(C R) + 1``."""
    key = ("lmax", x, y, C, R)
    memo = _memo(g)
    if key not in memo:
        members = shortest_path_union(g, x, y).ids
        L = math.floor(C * R) + 1
        M = np.empty(L + 1)
        M[0] = math.nan
        for l in range(1, L + 1):
            M[l] = max(mean_exit(g, z, C * R / l) for z in members)
        memo[key] = M
    return memo[key]


def l_scale(g: WeightedGraph, x: int, y: int, n: float, R: float | None = None,
            params: ScaleParams = DEFAULT_PARAMS, C: float | None = None) -> int:
    """Smallest integer ``l`` with ``n / l >= Q max_{z in pi(x,y)} E(z, C R/l)``.

    ``R`` defaults to ``d(x, y)``.  The search stops at
    ``l = floor(C R) + 1``; past that point every ball is a single vertex
    and the left side only shrinks.  With no solution the value is ``R``.
    The minimal solution is returned even when it exceeds ``R``.
    """
    if x == y:
        return 1
    if R is None:
        R = int(g.distances(x)[y])
    if not R > 0 or not n > 0:
        raise ValueError("need n > 0 and R > 0")
    C = params.C if C is None else C
    M = _path_max_profile(g, x, y, C, R)
    for l in range(1, len(M)):
        if n / l >= params.Q * M[l]:
            return l
    return int(math.ceil(R))


def nu_scale(g: WeightedGraph, x: int, n: float, R: float, params: ScaleParams = DEFAULT_PARAMS) -> int:
    """``min_{y in S(x, 2R)} l(x, y, n, R)`` with the inflation ``params.C``."""
    ys = sphere(g, x, 2 * R).ids
    if len(ys) == 0:
        raise ValueError(f"S({x}, {2 * R}) is empty; the graph is too small for R={R}")
    return min(l_scale(g, x, int(y), n, R, params) for y in ys)


# -- exponent fits -----------------------------------------------------------

@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    intercept: float
    max_rel_residual: float
    r_range: tuple[int, int]
    constant: float

    def as_dict(self) -> dict:
        return asdict(self)


def _dyadic(R_min: int, R_max: int) -> np.ndarray:
    radii = 2 ** np.arange(int(math.log2(R_max)) + 1)
    return radii[radii >= R_min]


def fit_exponents(profile: ScaleProfile, R_max: int | None = None,
                  R_min: int | None = None) -> tuple[ExponentFit, ExponentFit]:
    """Fit ``beta`` (upper) and ``beta'`` (lower) growth exponents of ``E``.

    ``beta`` is the least-squares slope of ``log E`` against ``log R`` on
    the dyadic radii ``R_min, 2 R_min, ...`` up to ``R_max``; ``R_min``
    defaults to ``min(4, R_max // 4)`` because the first two scales are
    dominated by lattice effects.  ``beta'`` is the smallest slope
    between consecutive dyadic radii, so ``beta' <= beta``.  The attached
    constants witness ``c (2R/r)^beta' <= E(2R)/E(r) <= C (2R/r)^beta``
    over all ``r < R`` with ``2R <= R_max``.
    """
    R_max = profile.R_max if R_max is None else min(R_max, profile.R_max)
    if R_max < 8:
        raise ValueError("profile too short: need R_max >= 8")
    E = profile.E
    if R_min is None:
        R_min = min(4, R_max // 4)
    radii = _dyadic(R_min, R_max)
    if len(radii) < 3:
        raise ValueError("need at least three dyadic radii in the fit range")
    lx, ly = np.log(radii), np.log(E[radii])
    beta, icpt = np.polyfit(lx, ly, 1)
    resid = np.exp(ly - (beta * lx + icpt)) - 1.0
    slopes = np.diff(ly) / np.diff(lx)
    beta_lo = float(min(slopes.min(), beta))

    r = np.arange(1, R_max // 2 + 1)
    rr, RR = np.meshgrid(r, r, indexing="ij")
    ok = rr < RR
    ratio = E[2 * RR[ok]] / E[rr[ok]]
    scale = 2.0 * RR[ok] / rr[ok]
    C_up = float((ratio / scale ** beta).max())
    c_lo = float((ratio / scale ** beta_lo).min())

    lo_icpt = float((ly - beta_lo * lx).min())
    lo_resid = np.exp(ly - (beta_lo * lx + lo_icpt)) - 1.0
    rng = (int(radii[0]), int(radii[-1]))
    upper = ExponentFit(float(beta), float(icpt), float(np.abs(resid).max()), rng, C_up)
    lower = ExponentFit(beta_lo, lo_icpt, float(np.abs(lo_resid).max()), rng, c_lo)
    return upper, lower


# -- comparison constants ----------------------------------------------------

@dataclass(frozen=True)
class ComparisonConstants:
    C_T: float
    A_T: int
    Ebar_constant: float
    rows: list

    def as_dict(self) -> dict:
        return {"C_T": self.C_T, "A_T": self.A_T, "Ebar_constant": self.Ebar_constant}


def comparison_constants(g: WeightedGraph, samples, *, max_a: int = 64) -> ComparisonConstants:
    """Empirical ``C_T``, ``A_T`` and ``max Ebar/E`` over ``samples``.

    ``samples`` holds ``(x, R)`` pairs (every ``y`` in ``B(x, R)`` is then
    used) or ``(x, y, R)`` triples.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("empty sample")
    C_T = 0.0
    ebar = 0.0
    rows = []
    pairs = []
    for s in samples:
        if len(s) == 2:
            x, R = s
            ys = ball(g, x, R).ids.tolist()
        else:
            x, y, R = s
            ys = [y]
        mask = g.distances(x) < R
        times = mean_exit_times(g, mask)
        Exr = float(times[x])
        ebar = max(ebar, float(times[mask].max()) / Exr)
        for y in ys:
            ratio = mean_exit(g, y, 2 * R) / Exr
            C_T = max(C_T, ratio)
            rows.append({"x": int(x), "y": int(y), "R": R, "E_xR": Exr, "E_y2R": mean_exit(g, y, 2 * R)})
        pairs.append((x, R, Exr))
    A_T = None
    for a in range(1, max_a + 1):
        if all(mean_exit(g, x, a * R) >= 2 * Exr for x, R, Exr in pairs):
            A_T = a
            break
    if A_T is None:
        raise ValueError(f"no a <= {max_a} doubles the mean exit time")
    return ComparisonConstants(C_T, A_T, ebar, rows)
