"""Discrete potential theory on a weighted graph.

The Dirichlet form is summed over unordered edges,
``energy(f) = sum_{u<v} mu_uv (f(u) - f(v))**2``, so a single unit edge has
capacity 1 and ``rho = 1 / cap`` is the physical effective resistance.
Green functions are normalised by the pole's measure,
``g^B(w, z) = G_B(w, z) / mu(z)``, which makes them symmetric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import VertexSet, WeightedGraph, as_mask, ball, boundary, closure, sphere
from .linalg import RestrictedLaplacian, SingularSystemError, harmonic_extension
from .stopping import hitting_before_exit_field


class DomainError(ValueError):
    """A ball reaches the truncation boundary of a generated graph."""


@dataclass(frozen=True)
class PotentialField:
    values: np.ndarray
    clamped: VertexSet
    domain: VertexSet
    residual: float

    def __getitem__(self, x):
        return self.values[x]


def harmonic_residual(g: WeightedGraph, f: np.ndarray, where) -> float:
    mask = as_mask(g, where)
    if not mask.any():
        return 0.0
    return float(np.abs(g.P @ f - f)[mask].max())


def solve_dirichlet(g: WeightedGraph, clamped, values, domain) -> PotentialField:
    """Harmonic extension of ``values`` from ``clamped`` into ``domain``.

    ``values`` is either a full-length array or one value per clamped
    vertex (in increasing id order).  Every neighbour of a free vertex must
    be clamped or free itself.
    """
    cmask = as_mask(g, clamped)
    dmask = as_mask(g, domain)
    free = dmask & ~cmask
    vals = np.asarray(values, dtype=float)
    if vals.shape != (g.n,):
        if vals.ndim == 0:
            vals = np.full(int(cmask.sum()), float(vals))
        full = np.zeros(g.n)
        full[cmask] = vals
        vals = full
    if np.any(closure(g, free).mask & ~(free | cmask)):
        raise ValueError("a domain vertex has a neighbour that is neither clamped nor in the domain")
    try:
        f = harmonic_extension(g, free, vals)
    except SingularSystemError as exc:
        raise ValueError(f"clamped set unreachable from part of the domain: {exc}") from None
    f[~(free | cmask)] = np.nan
    finite = np.where(np.isnan(f), 0.0, f)
    res = 0.0
    if free.any():
        res = float(np.abs(g.P[free] @ finite - finite[free]).max())
    return PotentialField(f, VertexSet(cmask), VertexSet(dmask), res)


def dirichlet_energy(g: WeightedGraph, f: np.ndarray) -> float:
    d = f[g.u] - f[g.v]
    return float(np.dot(g.w, d * d))


@dataclass(frozen=True)
class Capacity:
    cap: float
    rho: float
    flow: float
    potential: np.ndarray


def capacity_resistance(g: WeightedGraph, A, B) -> Capacity:
    """Capacity and resistance between disjoint nonempty sets ``A`` and ``B``.

    ``cap`` is the Dirichlet energy of the equilibrium potential (1 on A,
    0 on B); ``flow`` is the same quantity computed as the net current out
    of ``A``.
    """
    amask, bmask = as_mask(g, A), as_mask(g, B)
    if not amask.any() or not bmask.any():
        raise ValueError("both sets must be nonempty")
    if np.any(amask & bmask):
        raise ValueError("sets must be disjoint")
    f = harmonic_extension(g, ~(amask | bmask), amask.astype(float))
    cap = dirichlet_energy(g, f)
    flow = float((g.mu[amask] * f[amask] - (g.W @ f)[amask]).sum())
    return Capacity(cap, 1.0 / cap, flow, f)


def resistance(g: WeightedGraph, x: int, r: float, R: float) -> float:
    """``rho(x, r, R) = rho(B(x, r), complement of B(x, R))``."""
    if not R > r > 0:
        raise ValueError("need R > r > 0")
    inner = ball(g, x, r).mask
    outer = ~ball(g, x, R).mask
    if not outer.any():
        raise ValueError(f"B({x}, {R}) covers the whole graph")
    return capacity_resistance(g, inner, outer).rho


@dataclass(frozen=True)
class GreenColumn:
    region: VertexSet
    pole: int
    values: np.ndarray

    def __getitem__(self, w):
        return self.values[w]


def green_function(g: WeightedGraph, region, z: int) -> GreenColumn:
    """``g^B(., z)``: expected visits to ``z`` before leaving ``B``, over
    ``mu(z)``."""
    mask = as_mask(g, region)
    if not mask[z]:
        raise ValueError(f"pole {z} is not in the region")
    if mask.all():
        raise ValueError("region covers the whole graph; the Green function is infinite")
    lap = RestrictedLaplacian(g, mask)
    rhs = (lap.idx == z).astype(float)
    return GreenColumn(VertexSet(mask), z, lap.lift(lap.solve(rhs)))


def green_matrix(g: WeightedGraph, region) -> np.ndarray:
    """Full ``n x n`` matrix ``g^B(w, z)``, zero outside ``B``."""
    mask = as_mask(g, region)
    lap = RestrictedLaplacian(g, mask)
    k = len(lap.idx)
    inner = lap.solve(np.eye(k))
    out = np.zeros((g.n, g.n))
    out[np.ix_(lap.idx, lap.idx)] = inner
    return out


def capacity_measure(g: WeightedGraph, x: int, r: float, R: float) -> tuple[np.ndarray, np.ndarray]:
    """Equilibrium potential ``u(w) = P_w(tau_{x,r} < T_{x,R})`` and its
    charge ``pi(z) = mu(z) (u(z) - Pu(z))``, which satisfies
    ``u = sum_z g^B(., z) pi(z)`` for ``B = B(x, R)``."""
    u = hitting_before_exit_field(g, ball(g, x, r), ball(g, x, R))
    charge = g.mu * (u - g.P @ u)
    outside = ~ball(g, x, R).mask
    charge[outside] = 0.0
    return u, charge


def _require_interior(g: WeightedGraph, mask: np.ndarray, what: str, force: bool):
    if not force and np.any(g.boundary_mask & mask):
        raise DomainError(f"{what} touches the truncation boundary")


def harmonic_measure(g: WeightedGraph, region) -> tuple[np.ndarray, np.ndarray]:
    """Harmonic measure of ``region`` seen from each vertex.

    Returns ``(poles, omega)`` where ``poles`` lists the outer boundary
    vertices and ``omega[y, j] = P_y(X_T = poles[j])``.
    """
    mask = as_mask(g, region)
    poles = boundary(g, mask).ids
    if len(poles) == 0:
        raise ValueError("region has an empty boundary")
    lap = RestrictedLaplacian(g, mask)
    rhs = g.W[lap.idx][:, poles].toarray()
    sol = lap.solve(rhs)
    omega = np.zeros((g.n, len(poles)))
    omega[lap.idx] = sol
    omega[poles, np.arange(len(poles))] = 1.0
    return poles, omega


def harnack_constant(g: WeightedGraph, x: int, R: float, *, force: bool = False) -> float:
    """Best constant in ``max_{B(x,R)} u <= C min_{B(x,R)} u`` over
    nonnegative ``u`` harmonic on ``B(x, 2R)``.

    Such ``u`` are nonnegative combinations of the boundary harmonic
    measures, and a ratio of two such combinations is at most the largest
    single-pole ratio, so scanning the poles is exact.
    """
    big = ball(g, x, 2 * R).mask
    _require_interior(g, big, f"B({x}, {2 * R})", force)
    inner = ball(g, x, R).ids
    if len(inner) == 1:
        return 1.0
    _, omega = harmonic_measure(g, big)
    sub = omega[inner]
    lo = sub.min(axis=0)
    hi = sub.max(axis=0)
    if np.any(lo <= 0):
        return math.inf
    return float((hi / lo).max())


def vsr_constant(g: WeightedGraph, x: int, r: float, *, force: bool = False) -> float:
    """``min_{w in dB(x,r)} P_w(tau_x < T_{x,2r})``."""
    dom = ball(g, x, 2 * r).mask
    _require_interior(g, dom, f"B({x}, {2 * r})", force)
    ring = boundary(g, ball(g, x, r)).ids
    if len(ring) == 0:
        raise ValueError(f"boundary of B({x}, {r}) is empty")
    u = hitting_before_exit_field(g, [x], dom)
    return float(u[ring].min())


def green_resistance_comparison(g: WeightedGraph, x: int, r: int, L: float, K: float) -> dict:
    """The three quantities of the Green-function/resistance comparison:
    ``min`` and ``max`` of ``g^B(., x)`` over ``S(x, L r)`` with
    ``B = B(x, K r)``, and ``rho(x, L r, K r)``."""
    if not K > L >= 1:
        raise ValueError("need K > L >= 1")
    B = ball(g, x, K * r)
    S = sphere(g, x, L * r).ids
    if len(S) == 0:
        raise ValueError(f"S({x}, {L * r}) is empty")
    col = green_function(g, B, x).values
    return {
        "min_green": float(col[S].min()),
        "max_green": float(col[S].max()),
        "rho": resistance(g, x, L * r, K * r),
    }
