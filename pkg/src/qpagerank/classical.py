"""Classical PageRank by power iteration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .google import GoogleMatrix
from .graph import DirectedGraph

__all__ = ["PageRankVector", "classical_pagerank", "residual_node_set"]


@dataclass(frozen=True)
class PageRankVector:
    values: np.ndarray
    algorithm: str
    alpha: float
    iterations: int = 0

    def __len__(self):
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def classical_pagerank(
    G: GoogleMatrix,
    tol: float = 1e-12,
    max_iter: int = 10_000,
    start: np.ndarray | None = None,
) -> PageRankVector:
    """Iterate ``I <- G I`` from the uniform vector until the L1 step is below ``tol``.

    ``start`` overrides the initial distribution; it is renormalized to sum 1.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    n = G.n
    if start is None:
        x = np.full(n, 1.0 / n)
    else:
        x = np.asarray(start, dtype=float)
        x = x / x.sum()
    step = np.inf
    for k in range(1, max_iter + 1):
        y = G.g @ x
        # keep the iterate on the simplex; roundoff otherwise drifts the sum
        y /= y.sum()
        step = np.abs(y - x).sum()
        x = y
        if step < tol:
            return PageRankVector(x, "classical", G.alpha, k)
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps (last L1 step {step:.3e})",
        residual=step,
    )


def residual_node_set(g: DirectedGraph) -> set[int]:
    """Nodes with no incoming edge (a self-loop counts as incoming)."""
    return {v for v in range(g.n) if not g.in_adj[v]}
