"""Quantum PageRank: APR schemes, instantaneous and time-averaged importances."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .classical import PageRankVector
from .errors import DomainError, NumericError
from .google import GoogleMatrix
from .szegedy import PhasePair, decompose, dynamical_factors, lift

__all__ = [
    "SchemeKind",
    "APRScheme",
    "QuantumPageRankResult",
    "scheme_phase_map",
    "initial_state",
    "instantaneous_pagerank",
    "instantaneous_series",
    "run_quantum_pagerank",
    "DEFAULT_T_SMALL",
    "DEFAULT_T_NETWORK",
    "default_steps",
]

DEFAULT_T_SMALL = 4000
DEFAULT_T_NETWORK = 1000
DEFAULT_CONVERGENCE_TOL = 1e-4


def default_steps(n: int) -> int:
    return DEFAULT_T_SMALL if n <= 16 else DEFAULT_T_NETWORK


class SchemeKind(str, enum.Enum):
    STANDARD = "standard"
    EQUAL = "equal"
    OPPOSITE = "opposite"
    ALTERNATE = "alternate"


@dataclass(frozen=True)
class APRScheme:
    """A one-parameter family of phase pairs; ``theta`` is ignored for STANDARD."""

    kind: SchemeKind
    theta: float = math.pi / 2

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if not math.isfinite(self.theta):
            raise DomainError("theta must be finite")

    @property
    def label(self) -> str:
        if self.kind is SchemeKind.STANDARD:
            return "standard"
        return f"{self.kind.value}({self.theta:.6g})"

    @classmethod
    def standard(cls) -> "APRScheme":
        return cls(SchemeKind.STANDARD, math.pi)


def scheme_phase_map(scheme: APRScheme) -> PhasePair:
    th = scheme.theta
    if scheme.kind is SchemeKind.STANDARD:
        return PhasePair(math.pi, math.pi)
    if scheme.kind is SchemeKind.EQUAL:
        return PhasePair.wrapped(th, th)
    if scheme.kind is SchemeKind.OPPOSITE:
        return PhasePair.wrapped(th, -th)
    return PhasePair.wrapped(math.pi, th)


def initial_state(G: GoogleMatrix) -> np.ndarray:
    """``(1/sqrt(n)) sum_i |psi_i>`` as a flat complex edge state."""
    n = G.n
    return lift(np.full(n, 1.0 / math.sqrt(n)), G).astype(complex)


def instantaneous_pagerank(psi: np.ndarray) -> np.ndarray:
    """Marginal of register 2: ``I(i) = sum_j |psi(j, i)|^2``."""
    psi = np.asarray(psi)
    n = math.isqrt(psi.size)
    if n * n != psi.size:
        raise DomainError(f"state length {psi.size} is not a perfect square")
    return (np.abs(psi.reshape(n, n)) ** 2).sum(axis=0)


def instantaneous_series(G: GoogleMatrix, phases: PhasePair, T: int, dec=None) -> np.ndarray:
    """Rows ``I(., t)`` for ``t = 0..T`` computed from the spectral factors.

    For a state ``A u + S A w`` the register-2 marginal is
    ``G |u|^2 + |w|^2 + 2 Re(conj(w) * (D u))`` (columns of G sum to one),
    so no n^2-sized state is built.
    """
    if dec is None:
        dec = decompose(G, phases, initial_state(G), expect_dynamical=True)
    D = G.sqrt * G.sqrt.T
    ts = np.arange(T + 1)
    rows = []
    # chunk over t to bound memory at O(chunk * n)
    chunk = max(1, 2_000_000 // max(dec.dimension, 1))
    for start in range(0, T + 1, chunk):
        U, Wf = dynamical_factors(dec, ts[start : start + chunk])
        probs = (np.abs(U) ** 2) @ G.g.T + np.abs(Wf) ** 2 + 2.0 * np.real(np.conj(Wf) * (U @ D.T))
        rows.append(probs)
    return np.vstack(rows)


@dataclass(frozen=True)
class QuantumPageRankResult:
    averaged: PageRankVector
    instantaneous: np.ndarray
    std_dev: np.ndarray
    T: int
    scheme: APRScheme
    alpha: float
    converged: bool
    drift: float
    extra: dict = field(default_factory=dict)


def _trailing_drift(inst: np.ndarray) -> float:
    # L-inf distance of the running average to its final value over the last 10% of steps
    T = inst.shape[0] - 1
    window = max(1, T // 10)
    running = np.cumsum(inst, axis=0) / np.arange(1, T + 2)[:, None]
    tail = running[T - window :]
    return float(np.abs(tail - running[-1]).max())


def run_quantum_pagerank(
    G: GoogleMatrix,
    scheme: APRScheme | None = None,
    T: int | None = None,
    convergence_tol: float = DEFAULT_CONVERGENCE_TOL,
    phases: PhasePair | None = None,
) -> QuantumPageRankResult:
    """Time-averaged quantum PageRank over ``t = 0..T`` applications of ``W``.

    The average is the arithmetic mean over the ``T + 1`` samples, and
    ``std_dev`` the population standard deviation of each node's series.
    ``phases`` overrides the scheme's phase pair for arbitrary ``(theta1, theta2)``.
    """
    if scheme is None:
        scheme = APRScheme.standard()
    if T is None:
        T = default_steps(G.n)
    if T < 1:
        raise DomainError(f"T must be >= 1, got {T}")
    ph = phases if phases is not None else scheme_phase_map(scheme)
    inst = instantaneous_series(G, ph, T)
    sums = inst.sum(axis=1)
    if np.abs(sums - 1.0).max() > 1e-9:
        raise NumericError(f"instantaneous PageRank lost normalization (max error {np.abs(sums - 1).max():.3e})")
    avg = inst.mean(axis=0)
    std = inst.std(axis=0)
    drift = _trailing_drift(inst)
    return QuantumPageRankResult(
        averaged=PageRankVector(avg, f"quantum:{scheme.label}", G.alpha, T),
        instantaneous=inst,
        std_dev=std,
        T=T,
        scheme=scheme,
        alpha=G.alpha,
        converged=drift < convergence_tol,
        drift=drift,
        extra={"theta1": ph.theta1, "theta2": ph.theta2},
    )
