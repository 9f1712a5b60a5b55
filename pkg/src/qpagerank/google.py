"""Connectivity matrix, dangling-node patch and the damped Google matrix.

Convention: matrices are column-stochastic, column ``j`` holds the outgoing
transition probabilities of node ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntegrityError
from .graph import DirectedGraph

DEFAULT_ALPHA = 0.85

__all__ = [
    "DEFAULT_ALPHA",
    "GoogleMatrix",
    "connectivity_matrix",
    "patch_dangling",
    "google_matrix",
    "google_from_graph",
    "format_matrix_csv",
]


@dataclass(frozen=True)
class GoogleMatrix:
    n: int
    alpha: float
    g: np.ndarray

    def __post_init__(self):
        self.g.setflags(write=False)

    @property
    def sqrt(self) -> np.ndarray:
        """Entrywise square root, the amplitudes of the walk's edge states."""
        return np.sqrt(self.g)


def connectivity_matrix(g: DirectedGraph) -> np.ndarray:
    h = np.zeros((g.n, g.n))
    for j, targets in enumerate(g.out_adj):
        if targets:
            h[list(targets), j] = 1.0 / len(targets)
    return h


def patch_dangling(h: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Replace all-zero columns of ``h`` by the uniform column ``1/n``."""
    h = np.asarray(h, dtype=float)
    n = h.shape[0]
    sums = h.sum(axis=0)
    dangling = np.abs(sums) <= atol
    bad = ~dangling & (np.abs(sums - 1.0) > atol)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise IntegrityError(f"column {j} sums to {sums[j]!r}, expected 0 or 1")
    e = h.copy()
    e[:, dangling] = 1.0 / n
    return e


def google_matrix(e: np.ndarray, alpha: float = DEFAULT_ALPHA) -> GoogleMatrix:
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    e = np.asarray(e, dtype=float)
    n = e.shape[0]
    g = alpha * e + (1.0 - alpha) / n
    return GoogleMatrix(n, float(alpha), g)


def google_from_graph(graph: DirectedGraph, alpha: float = DEFAULT_ALPHA) -> GoogleMatrix:
    return google_matrix(patch_dangling(connectivity_matrix(graph)), alpha)


def format_matrix_csv(m: np.ndarray) -> str:
    """One row per line, comma separated, 17 significant digits."""
    return "".join(",".join(f"{x:.17g}" for x in row) + "\n" for row in np.atleast_2d(m))
