"""Fidelity, rankings, power-law fits, damping-stability sweeps and ensembles."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .classical import PageRankVector, classical_pagerank
from .errors import DomainError, QPageRankError
from .google import DEFAULT_ALPHA, google_from_graph
from .graph import (
    DirectedGraph,
    ErdosRenyiParams,
    ScaleFreeParams,
    generate_erdos_renyi,
    generate_scale_free,
)
from .qrank import DEFAULT_T_NETWORK, APRScheme, SchemeKind, run_quantum_pagerank

__all__ = [
    "Algorithm",
    "PowerLawFit",
    "StabilityReport",
    "GeneratorConfig",
    "EnsembleReport",
    "fidelity",
    "rank_nodes",
    "degenerate_tail",
    "powerlaw_fit",
    "default_algorithms",
    "default_alpha_grid",
    "pagerank_over_grid",
    "alpha_sweep",
    "fidelity_heatmap",
    "stability_report",
    "derive_seed",
    "ensemble_run",
    "sorted_pagerank_pipeline",
    "stability_pipeline",
    "std_dev_pipeline",
    "format_csv",
    "dominant_period",
]

ALPHA_REF = DEFAULT_ALPHA
CLASSICAL_TAIL_TOL = 1e-6
# Opposite/Alternate only lift the residual degeneracy partially: the plateau
# spreads by a few percent and its lowest members dip below it, so a tight
# tolerance never finds it.
QUANTUM_TAIL_TOL = 0.1


def _values(I) -> np.ndarray:
    if isinstance(I, PageRankVector):
        return np.asarray(I.values, dtype=float)
    return np.asarray(I, dtype=float)


def fidelity(I1, I2) -> float:
    """Overlap ``sum_i sqrt(I1_i I2_i)`` of two distributions."""
    a, b = _values(I1), _values(I2)
    if a.shape != b.shape:
        raise DomainError(f"length mismatch: {a.shape} vs {b.shape}")
    for v in (a, b):
        if abs(v.sum() - 1.0) > 1e-9:
            raise DomainError(f"distribution sums to {v.sum()!r}, expected 1")
    return float(np.sqrt(np.clip(a, 0, None) * np.clip(b, 0, None)).sum())


def rank_nodes(I) -> np.ndarray:
    """Node ids by descending importance; equal importances keep ascending id order."""
    v = _values(I)
    return np.lexsort((np.arange(len(v)), -v))


def degenerate_tail(sorted_I, rel_tol: float = CLASSICAL_TAIL_TOL) -> int | None:
    """Start index of the trailing plateau of a descending sequence.

    The plateau is the longest suffix whose values all lie within
    ``rel_tol * min`` of the minimum.  Returns ``None`` if it has length <= 1.
    """
    v = np.asarray(sorted_I, dtype=float)
    if len(v) == 0:
        return None
    lo = v[-1]
    within = (v - lo) <= rel_tol * abs(lo)
    # length of the run of True at the end
    k = len(v)
    while k > 0 and within[k - 1]:
        k -= 1
    if len(v) - k <= 1:
        return None
    return k


@dataclass(frozen=True)
class PowerLawFit:
    beta: float
    intercept: float
    r_squared: float
    cut_index: int | None
    n_points: int
    rel_tol: float | None = None

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "cut_index": self.cut_index,
            "n_points": self.n_points,
            "rel_tol": self.rel_tol,
        }


def powerlaw_fit(I, use_tail_cut: bool = True, rel_tol: float = CLASSICAL_TAIL_TOL) -> PowerLawFit:
    """Least-squares fit of ``log I = c - beta log i`` over the sorted distribution.

    ``i`` is the 1-based rank and logs are natural.  With ``use_tail_cut`` the
    degenerate plateau found by :func:`degenerate_tail` is left out.
    """
    v = np.sort(_values(I))[::-1]
    if np.any(v <= 0):
        raise DomainError("power-law fit needs strictly positive importances")
    cut = degenerate_tail(v, rel_tol) if use_tail_cut else None
    stop = len(v) if cut is None else cut
    if stop < 2:
        raise DomainError("degenerate distribution: fewer than two points before the tail cut")
    x = np.log(np.arange(1, stop + 1))
    y = np.log(v[:stop])
    fit = stats.linregress(x, y)
    r2 = float(fit.rvalue**2) if np.isfinite(fit.rvalue) else 1.0
    return PowerLawFit(
        beta=float(-fit.slope),
        intercept=float(fit.intercept),
        r_squared=min(max(r2, 0.0), 1.0),
        cut_index=cut,
        n_points=stop,
        rel_tol=rel_tol if use_tail_cut else None,
    )


# -- algorithms --------------------------------------------------------------


@dataclass(frozen=True)
class Algorithm:
    """Classical PageRank (``scheme is None``) or a quantum APR scheme run for ``T`` steps."""

    name: str
    scheme: APRScheme | None = None
    T: int = DEFAULT_T_NETWORK
    tail_tol: float | None = None  # None disables the tail cut in power-law fits

    @property
    def is_classical(self) -> bool:
        return self.scheme is None

    def run(self, graph: DirectedGraph, alpha: float = DEFAULT_ALPHA):
        """Return ``(values, std_dev or None, converged)``."""
        G = google_from_graph(graph, alpha)
        if self.scheme is None:
            pr = classical_pagerank(G)
            return pr.values, None, True
        res = run_quantum_pagerank(G, self.scheme, self.T)
        return res.averaged.values, res.std_dev, res.converged


def default_algorithms(theta: float = math.pi / 2, T: int = DEFAULT_T_NETWORK) -> list[Algorithm]:
    """Classical plus the four quantum variants used throughout the experiments."""
    return [
        Algorithm("classical", None, T, CLASSICAL_TAIL_TOL),
        Algorithm("standard", APRScheme.standard(), T, None),
        Algorithm("equal", APRScheme(SchemeKind.EQUAL, theta), T, None),
        Algorithm("opposite", APRScheme(SchemeKind.OPPOSITE, theta), T, QUANTUM_TAIL_TOL),
        Algorithm("alternate", APRScheme(SchemeKind.ALTERNATE, theta), T, QUANTUM_TAIL_TOL),
    ]


def default_alpha_grid(start: float = 0.10, stop: float = 0.99, step: float = 0.01) -> np.ndarray:
    k = int(round((stop - start) / step))
    return np.round(start + step * np.arange(k + 1), 10)


# -- stability ---------------------------------------------------------------


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise DomainError("alpha grid must be a non-empty 1-D sequence")
    if np.any(grid <= 0) or np.any(grid >= 1):
        raise DomainError("alpha grid must lie inside (0, 1)")
    return grid


def pagerank_over_grid(graph: DirectedGraph, algorithm: Algorithm, grid) -> tuple[np.ndarray, np.ndarray]:
    """PageRank at each damping value: ``(len(grid), n)`` values and per-alpha convergence flags."""
    grid = np.asarray(grid, dtype=float)
    out = np.empty((len(grid), graph.n))
    flags = np.empty(len(grid), dtype=bool)
    for k, a in enumerate(grid):
        out[k], _, flags[k] = algorithm.run(graph, float(a))
    return out, flags


def _overlap_matrix(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(P, 0, None)) @ np.sqrt(np.clip(Q, 0, None)).T


@dataclass
class StabilityReport:
    alphas: np.ndarray
    alpha_ref: float
    fidelities: dict = field(default_factory=dict)
    heatmaps: dict = field(default_factory=dict)
    converged: dict = field(default_factory=dict)

    def minima(self) -> dict:
        return {k: float(np.min(v)) for k, v in self.fidelities.items()}


def alpha_sweep(
    graph: DirectedGraph,
    algorithm: Algorithm,
    grid=None,
    alpha_ref: float = ALPHA_REF,
) -> StabilityReport:
    """Fidelity of the PageRank at each alpha against the one at ``alpha_ref``."""
    return stability_report(graph, [algorithm], grid, alpha_ref, heatmap=False)


def fidelity_heatmap(graph: DirectedGraph, algorithm: Algorithm, grid=None) -> np.ndarray:
    """Symmetric matrix of pairwise fidelities over the damping grid."""
    grid = _check_grid(default_alpha_grid() if grid is None else grid)
    P, _ = pagerank_over_grid(graph, algorithm, grid)
    M = _overlap_matrix(P, P)
    M = 0.5 * (M + M.T)
    np.fill_diagonal(M, 1.0)
    return M


def stability_report(
    graph: DirectedGraph,
    algorithms: Sequence[Algorithm],
    grid=None,
    alpha_ref: float = ALPHA_REF,
    heatmap: bool = False,
) -> StabilityReport:
    """Sweep curves (and optionally heatmaps) for several algorithms on one graph.

    Each distribution is computed once per grid point and shared by the curve
    and the heatmap.
    """
    grid = _check_grid(default_alpha_grid() if grid is None else grid)
    report = StabilityReport(alphas=grid, alpha_ref=alpha_ref)
    ref_idx = np.flatnonzero(np.isclose(grid, alpha_ref, rtol=0, atol=1e-12))
    for alg in algorithms:
        P, flags = pagerank_over_grid(graph, alg, grid)
        if len(ref_idx):
            ref = P[ref_idx[0]]
        else:
            ref, _, _ = alg.run(graph, alpha_ref)
        curve = np.clip(_overlap_matrix(P, ref[None, :])[:, 0], 0.0, 1.0)
        if len(ref_idx):
            curve[ref_idx] = 1.0
        report.fidelities[alg.name] = curve
        report.converged[alg.name] = flags
        if heatmap:
            M = _overlap_matrix(P, P)
            M = np.clip(0.5 * (M + M.T), 0.0, 1.0)
            np.fill_diagonal(M, 1.0)
            report.heatmaps[alg.name] = M
    return report


# -- ensembles ---------------------------------------------------------------


def derive_seed(master_seed: int, index: int) -> int:
    """Per-graph seed: first 64 bits of ``SeedSequence([master_seed, index])``.

    Fixed rule so that ensembles are reproducible across versions.
    """
    state = np.random.SeedSequence([int(master_seed), int(index)]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


@dataclass(frozen=True)
class GeneratorConfig:
    model: str  # "scale-free" or "erdos-renyi"
    n: int
    p_edge: float = 0.1
    scale_free: ScaleFreeParams = field(default_factory=ScaleFreeParams)

    def __post_init__(self):
        if self.model not in ("scale-free", "erdos-renyi"):
            raise DomainError(f"unknown graph model {self.model!r}")

    def generate(self, seed: int) -> DirectedGraph:
        if self.model == "scale-free":
            sf = self.scale_free
            params = ScaleFreeParams(sf.p_alpha, sf.p_beta, sf.p_gamma, sf.delta_in, sf.delta_out, seed)
            return generate_scale_free(self.n, params)
        return generate_erdos_renyi(self.n, ErdosRenyiParams(self.p_edge, seed))


@dataclass
class EnsembleReport:
    config: GeneratorConfig
    master_seed: int
    seeds: list
    mean: dict
    members: list = field(default_factory=list, repr=False)

    @property
    def count(self) -> int:
        return len(self.seeds)


class EnsembleMemberError(QPageRankError):
    def __init__(self, seed, index, cause):
        self.seed, self.index = seed, index
        super().__init__(f"ensemble member {index} (seed {seed}) failed: {cause}")


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("QWR_THREADS", "1")))
    except ValueError:
        return 1


def ensemble_run(
    config: GeneratorConfig,
    count: int,
    pipeline: Callable[[DirectedGraph], dict],
    master_seed: int = 0,
    threads: int | None = None,
    keep_members: bool = False,
) -> EnsembleReport:
    """Run ``pipeline`` on ``count`` seeded graphs and average every array it returns.

    Members are aggregated in graph-index order, so the result does not
    depend on ``threads``.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    seeds = [derive_seed(master_seed, i) for i in range(count)]

    def one(i):
        try:
            return pipeline(config.generate(seeds[i]))
        except QPageRankError as exc:
            raise EnsembleMemberError(seeds[i], i, exc) from exc

    threads = threads or _default_threads()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(one, range(count)))
    else:
        results = [one(i) for i in range(count)]

    mean = {}
    for key in results[0]:
        acc = np.zeros_like(np.asarray(results[0][key], dtype=float))
        for r in results:
            acc = acc + np.asarray(r[key], dtype=float)
        mean[key] = acc / count
    return EnsembleReport(config, master_seed, seeds, mean, results if keep_members else [])


def sorted_pagerank_pipeline(algorithms: Sequence[Algorithm], alpha: float = DEFAULT_ALPHA):
    """Per graph: descending-sorted PageRank and mean std-dev for each algorithm."""

    def pipeline(graph):
        out = {}
        for alg in algorithms:
            vals, std, _ = alg.run(graph, alpha)
            out[f"sorted:{alg.name}"] = np.sort(vals)[::-1]
            if std is not None:
                out[f"std:{alg.name}"] = std
        return out

    return pipeline


def std_dev_pipeline(algorithms: Sequence[Algorithm], alpha: float = DEFAULT_ALPHA):
    """Per graph: node-averaged standard deviation of each quantum algorithm."""

    def pipeline(graph):
        out = {}
        for alg in algorithms:
            if alg.is_classical:
                continue
            _, std, _ = alg.run(graph, alpha)
            out[f"mean_std:{alg.name}"] = np.float64(std.mean())
        return out

    return pipeline


def stability_pipeline(algorithms: Sequence[Algorithm], grid=None, heatmap: bool = False, alpha_ref: float = ALPHA_REF):
    def pipeline(graph):
        rep = stability_report(graph, algorithms, grid, alpha_ref, heatmap)
        out = {}
        for name, curve in rep.fidelities.items():
            out[f"curve:{name}"] = curve
            out[f"min:{name}"] = np.float64(curve.min())
            out[f"converged:{name}"] = rep.converged[name].astype(float)
        for name, M in rep.heatmaps.items():
            out[f"heatmap:{name}"] = M
        return out

    return pipeline


def format_csv(header: Sequence[str], columns: Sequence[np.ndarray]) -> str:
    """CSV text with a header row and 17-significant-digit values."""
    cols = [np.atleast_1d(np.asarray(c)) for c in columns]
    rows = [",".join(header)]
    for r in range(len(cols[0])):
        rows.append(",".join(_fmt(c[r]) for c in cols))
    return "\n".join(rows) + "\n"


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def dominant_period(series) -> float:
    """Period (in steps) of the strongest non-constant Fourier component of a series.

    Autocorrelation peaks are unreliable here: the sampled walk often carries a
    small period-2 staircase on top of the slow oscillation.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < 4:
        raise DomainError("need a 1-D series of at least 4 samples")
    power = np.abs(np.fft.rfft(x - x.mean())) ** 2
    k = int(np.argmax(power[1:])) + 1
    return len(x) / k
