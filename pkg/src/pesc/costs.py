"""Convex cost functionals with subgradient selectors.

Each cost exposes exactly two obligations — ``eval`` and ``subgradient`` —
which is all the epigraph projection needs.  All three built-in costs are
nonnegative and positively homogeneous, so their level set at zero meets
the epigraph only at minimizers.

Subgradients at kinks use the sign(0) = 0 selector: any value in [-1, 1]
would be valid there, but 0 makes constant images stationary for the
total-variation cost.
"""

import numpy as np


class CostFunction:
    """Interface: a convex functional with one chosen subgradient per point."""

    kind: str

    def eval(self, w: np.ndarray) -> float:
        raise NotImplementedError

    def subgradient(self, w: np.ndarray) -> np.ndarray:
        """Return one valid subgradient g: f(u) >= f(w) + <g, u - w> for all u."""
        raise NotImplementedError


class TotalVariation(CostFunction):
    """Anisotropic total variation: sum of |forward differences|.

    Differences run along both axes of a 2-D image (along the single axis
    of a 1-D signal); the last row/column has no forward neighbour and is
    skipped, so a one-pixel image has zero cost.
    """

    kind = "tv"

    def eval(self, w: np.ndarray) -> float:
        w = np.asarray(w, dtype=np.float64)
        if w.ndim == 1:
            return float(np.sum(np.abs(np.diff(w))))
        return float(
            np.sum(np.abs(np.diff(w, axis=0))) + np.sum(np.abs(np.diff(w, axis=1)))
        )

    def subgradient(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        g = np.zeros_like(w)
        if w.ndim == 1:
            s = np.sign(np.diff(w))
            g[1:] += s
            g[:-1] -= s
            return g
        s0 = np.sign(np.diff(w, axis=0))
        g[1:, :] += s0
        g[:-1, :] -= s0
        s1 = np.sign(np.diff(w, axis=1))
        g[:, 1:] += s1
        g[:, :-1] -= s1
        return g


class L1Norm(CostFunction):
    """Sum of absolute intensities, subgradient = elementwise sign."""

    kind = "l1"

    def eval(self, w: np.ndarray) -> float:
        return float(np.sum(np.abs(w)))

    def subgradient(self, w: np.ndarray) -> np.ndarray:
        return np.sign(np.asarray(w, dtype=np.float64))


class L2Norm(CostFunction):
    """Euclidean norm, subgradient w/||w|| (zero vector at the origin)."""

    kind = "l2"

    def eval(self, w: np.ndarray) -> float:
        return float(np.linalg.norm(np.asarray(w, dtype=np.float64).ravel()))

    def subgradient(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        n = self.eval(w)
        if n == 0.0:
            return np.zeros_like(w)
        return w / n


_COSTS = {"tv": TotalVariation, "l1": L1Norm, "l2": L2Norm}


def make_cost(kind: str) -> CostFunction:
    """Build a cost by name: 'tv', 'l1' or 'l2'."""
    try:
        return _COSTS[kind.lower()]()
    except KeyError:
        raise ValueError(f"unknown cost kind {kind!r}, expected one of {sorted(_COSTS)}")
