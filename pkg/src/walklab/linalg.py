"""Symmetric positive-definite solves restricted to a vertex subset.

Every killed-walk problem here reduces to the weighted Laplacian
``L = diag(mu) - W`` restricted to the free vertices, which is SPD whenever
each free component touches a clamped or absorbing vertex.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import WeightedGraph

DIRECT_LIMIT = 5000
CG_RTOL = 1e-12


class SingularSystemError(ArithmeticError):
    pass


class RestrictedLaplacian:
    """``(diag(mu) - W)`` on the vertices of ``free`` (boolean mask).

    Small systems are factorised once with SuperLU and reused for many
    right-hand sides; large ones fall back to conjugate gradients.
    """

    def __init__(self, g: WeightedGraph, free: np.ndarray):
        self.g = g
        self.free = np.asarray(free, dtype=bool)
        self.idx = np.flatnonzero(self.free)
        if len(self.idx) == 0:
            raise SingularSystemError("empty system")
        Wff = g.W[self.idx][:, self.idx]
        self.A = sp.csc_matrix(sp.diags(g.mu[self.idx]) - Wff)
        self._check_grounded()
        self._lu = spla.splu(self.A) if len(self.idx) <= DIRECT_LIMIT else None

    def _check_grounded(self):
        # every component of the free set must leak mass to the rest
        leak = np.asarray(self.A.sum(axis=1)).ravel()
        ncomp, labels = sp.csgraph.connected_components(self.A, directed=False)
        grounded = np.zeros(ncomp, dtype=bool)
        grounded[labels[leak > 1e-300]] = True
        if not grounded.all():
            raise SingularSystemError("free component with no exit or clamped neighbour")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``A x = rhs`` where ``rhs`` is indexed like the free set."""
        rhs = np.asarray(rhs, dtype=float)
        if self._lu is not None:
            return self._lu.solve(rhs)
        if rhs.ndim == 2:
            return np.column_stack([self.solve(c) for c in rhs.T])
        x, info = spla.cg(self.A, rhs, rtol=CG_RTOL, atol=0.0, maxiter=20 * len(rhs))
        if info != 0:
            raise SingularSystemError(f"conjugate gradient did not converge (info={info})")
        return x

    def lift(self, values: np.ndarray, fill: float = 0.0) -> np.ndarray:
        out = np.full(self.g.n, fill, dtype=float)
        out[self.idx] = values
        return out


def harmonic_extension(g: WeightedGraph, free: np.ndarray, values: np.ndarray,
                       source: np.ndarray | None = None) -> np.ndarray:
    """Solve ``f(y) - sum_z P(y, z) f(z) = source(y)`` on ``free``.

    ``values`` supplies ``f`` off the free set (entries on ``free`` are
    ignored).  With ``source`` omitted the result is the harmonic extension
    of the prescribed data.
    """
    free = np.asarray(free, dtype=bool)
    data = np.where(free, 0.0, np.asarray(values, dtype=float))
    if not free.any():
        return data
    lap = RestrictedLaplacian(g, free)
    rhs = g.W[lap.idx] @ data
    if source is not None:
        rhs = rhs + g.mu[lap.idx] * np.asarray(source, dtype=float)[lap.idx]
    data[lap.idx] = lap.solve(rhs)
    return data
