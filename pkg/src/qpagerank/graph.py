"""Directed graphs, seeded random generators and edge-list persistence.

Random generators draw from :func:`numpy.random.default_rng`, i.e. the PCG64
bit generator seeded through ``SeedSequence(seed)``.  PCG64 is portable and
platform independent, so a ``(params, seed)`` pair pins a graph everywhere.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DomainError, ParseError

__all__ = [
    "DirectedGraph",
    "ScaleFreeParams",
    "ErdosRenyiParams",
    "load_edge_list",
    "save_edge_list",
    "format_edge_list",
    "generate_scale_free",
    "generate_erdos_renyi",
    "in_degree",
    "out_degree",
]


@dataclass(frozen=True)
class DirectedGraph:
    """Node count plus a deduplicated set of directed edges ``(u, v)``.

    Self-loops are allowed and kept.  ``out_adj[u]`` lists the targets of
    ``u`` and ``in_adj[v]`` the sources pointing at ``v``, both sorted.
    """

    n: int
    edges: frozenset
    out_adj: tuple = field(init=False, repr=False, compare=False)
    in_adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise DomainError(f"node count must be >= 1, got {self.n}")
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        outs = [[] for _ in range(n)]
        ins = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) outside node range [0, {n})")
            outs[u].append(v)
            ins[v].append(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "out_adj", tuple(tuple(sorted(a)) for a in outs))
        object.__setattr__(self, "in_adj", tuple(tuple(sorted(a)) for a in ins))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "DirectedGraph":
        return cls(n, frozenset(edges))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self) -> np.ndarray:
        """0/1 matrix with ``a[u, v] = 1`` for every edge ``u -> v``."""
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = 1.0
        return a

    def out_degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.out_adj], dtype=int)

    def in_degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.in_adj], dtype=int)

    def __len__(self):
        return self.n


def _check_node(g: DirectedGraph, v: int) -> None:
    if not 0 <= v < g.n:
        raise DomainError(f"node {v} outside [0, {g.n})")


def in_degree(g: DirectedGraph, v: int) -> int:
    _check_node(g, v)
    return len(g.in_adj[v])


def out_degree(g: DirectedGraph, v: int) -> int:
    _check_node(g, v)
    return len(g.out_adj[v])


# -- persistence -------------------------------------------------------------


def parse_edge_list(text: str) -> DirectedGraph:
    n_header = None
    edges = set()
    max_id = -1
    seen_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            if seen_data or n_header is not None:
                raise ParseError("header 'n=<int>' must precede all edges", lineno)
            try:
                n_header = int(line[2:].strip())
            except ValueError:
                raise ParseError(f"bad header {line!r}", lineno) from None
            if n_header < 1:
                raise DomainError(f"line {lineno}: node count must be >= 1")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'u v', got {raw.strip()!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {raw.strip()!r}", lineno) from None
        if u < 0 or v < 0:
            raise DomainError(f"line {lineno}: negative node id in {raw.strip()!r}")
        seen_data = True
        edges.add((u, v))
        max_id = max(max_id, u, v)
    if n_header is None:
        if max_id < 0:
            raise ParseError("edge list is empty and has no 'n=' header")
        n = max_id + 1
    else:
        if max_id >= n_header:
            raise DomainError(f"node id {max_id} exceeds header n={n_header}")
        n = n_header
    return DirectedGraph(n, frozenset(edges))


def load_edge_list(path: str | os.PathLike) -> DirectedGraph:
    """Read an edge-list file (optional ``n=<int>`` header, ``u v`` lines, ``#`` comments)."""
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def format_edge_list(g: DirectedGraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"n={g.n}")
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def save_edge_list(g: DirectedGraph, path: str | os.PathLike, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edge_list(g, comment))


# -- generators --------------------------------------------------------------


@dataclass(frozen=True)
class ScaleFreeParams:
    """Event probabilities and attachment offsets of the directed growth model.

    Defaults are the ones NetworkX ships for ``scale_free_graph``.
    """

    p_alpha: float = 0.41
    p_beta: float = 0.54
    p_gamma: float = 0.05
    delta_in: float = 0.2
    delta_out: float = 0.0
    seed: int = 0

    def __post_init__(self):
        probs = (self.p_alpha, self.p_beta, self.p_gamma)
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise DomainError(f"event probabilities must lie in [0, 1], got {probs}")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise DomainError(f"event probabilities must sum to 1, got {sum(probs)!r}")
        if self.delta_in < 0 or self.delta_out < 0:
            raise DomainError("attachment offsets must be nonnegative")


@dataclass(frozen=True)
class ErdosRenyiParams:
    p_edge: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_edge <= 1.0:
            raise DomainError(f"p_edge must lie in [0, 1], got {self.p_edge}")


def _choose(rng, weighted: list, nodes: list, delta: float) -> int:
    # P(node) ∝ multiplicity in `weighted` + delta
    if delta > 0:
        bias = len(nodes) * delta
        if rng.random() < bias / (bias + len(weighted)):
            return nodes[int(rng.integers(len(nodes)))]
    return weighted[int(rng.integers(len(weighted)))]


def generate_scale_free(n_target: int, params: ScaleFreeParams | None = None) -> DirectedGraph:
    """Grow a directed scale-free multigraph, then collapse duplicate edges.

    Growth starts from the directed cycle on ``min(3, n_target)`` nodes and
    repeats the three events until ``n_target`` nodes exist:

    * ``p_alpha``: new node ``v`` and edge ``v -> w``, ``w ∝ in_deg + delta_in``
    * ``p_beta``: edge ``v -> w`` between existing nodes, ``v ∝ out_deg + delta_out``
    * ``p_gamma``: new node ``w`` and edge ``v -> w``, ``v ∝ out_deg + delta_out``

    As in the NetworkX model, a freshly added node is already eligible as the
    other endpoint of its own event, so self-loops can arise from any event.
    Loops are kept; duplicate edges are removed at the end.
    """
    if params is None:
        params = ScaleFreeParams()
    if n_target < 2:
        raise DomainError(f"n_target must be >= 2, got {n_target}")
    rng = np.random.default_rng(params.seed)

    k = min(3, n_target)
    multi_edges = [(i, (i + 1) % k) for i in range(k)]
    sources = [u for u, _ in multi_edges]  # node repeated out_deg times
    targets = [v for _, v in multi_edges]  # node repeated in_deg times
    nodes = list(range(k))
    a, ab = params.p_alpha, params.p_alpha + params.p_beta

    while len(nodes) < n_target:
        r = rng.random()
        if r < a:
            v = len(nodes)
            nodes.append(v)
            w = _choose(rng, targets, nodes, params.delta_in)
        elif r < ab:
            v = _choose(rng, sources, nodes, params.delta_out)
            w = _choose(rng, targets, nodes, params.delta_in)
        else:
            v = _choose(rng, sources, nodes, params.delta_out)
            w = len(nodes)
            nodes.append(w)
        multi_edges.append((v, w))
        sources.append(v)
        targets.append(w)

    return DirectedGraph(n_target, frozenset(multi_edges))


def generate_erdos_renyi(n: int, params: ErdosRenyiParams | None = None) -> DirectedGraph:
    """Directed G(n, p): each ordered pair ``u != v`` is an edge with probability ``p_edge``."""
    if params is None:
        params = ErdosRenyiParams()
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(params.seed)
    mask = rng.random((n, n)) < params.p_edge
    np.fill_diagonal(mask, False)
    us, vs = np.nonzero(mask)
    return DirectedGraph(n, frozenset(zip(us.tolist(), vs.tolist())))
