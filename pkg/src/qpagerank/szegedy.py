"""Szegedy walk with arbitrary phase rotations on the edge space C^n ⊗ C^n.

Edge states are flat complex arrays of length ``n*n``; amplitude ``(i, j)``
(register 1 at ``i``, register 2 at ``j``) lives at flat index ``i*n + j``.

Given a column-stochastic ``G`` with entrywise square root ``s``, the walk uses

* ``|psi_i> = |i> ⊗ sum_k s[k, i] |k>`` and the isometry ``A = sum_i |psi_i><i|``,
* ``Pi = A A^dagger`` and the register swap ``S``,
* ``U(theta) = S((1 - e^{i theta}) Pi - 1)`` and ``W(theta1, theta2) = U(theta2) U(theta1)``.

``D = A^dagger S A`` has entries ``sqrt(G_ij G_ji)``.  For every eigenpair
``(lam, |lam>)`` of ``D`` the pair ``x = A|lam>``, ``y = S x`` spans a
subspace left invariant by every ``U(theta)``:

    U(theta) x = -e^{i theta} y
    U(theta) y = (1 - e^{i theta}) lam y - x

so ``W`` is diagonalized block by block with 2x2 algebra, and on the
orthogonal complement ``W`` acts as the identity.  Eigenvectors are kept in
factored form: a block index plus coordinates ``(c_x, c_y)`` on ``(x, y)``.
Materializing one costs O(n^2); nothing of size n^4 is ever formed except in
:func:`dense_walk_oracle`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, NumericError
from .google import GoogleMatrix

__all__ = [
    "PhasePair",
    "SpectralDecomposition",
    "build_D",
    "eig_sym",
    "lift",
    "lift_many",
    "swap",
    "apply_A_dagger",
    "apply_U",
    "apply_W",
    "single_phase_eigenvalues",
    "block_eigensolve",
    "decompose",
    "evolve",
    "dynamical_factors",
    "dense_walk_oracle",
    "dense_operators",
    "MAX_DENSE_NODES",
]

MAX_DENSE_NODES = 32

# numerical tolerances (λ near ±1 amplifies roundoff, hence looser than eps)
COLLAPSE_TOL = 1e-9
DEGENERATE_TOL = 1e-12
RESIDUAL_TOL = 1e-9
ORTHO_TOL = 1e-10
NORM_TOL = 1e-9


def _wrap(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = math.remainder(theta, 2.0 * math.pi)
    if w <= -math.pi:
        w += 2.0 * math.pi
    return w


@dataclass(frozen=True)
class PhasePair:
    theta1: float
    theta2: float

    def __post_init__(self):
        for t in (self.theta1, self.theta2):
            if not math.isfinite(t):
                raise DomainError(f"phase must be finite, got {t}")
            if not (-math.pi - 1e-12 < t <= math.pi + 1e-12):
                raise DomainError(f"phase {t} outside (-pi, pi]; use PhasePair.wrapped")

    @classmethod
    def wrapped(cls, theta1: float, theta2: float) -> "PhasePair":
        return cls(_wrap(theta1), _wrap(theta2))

    def conjugate(self) -> "PhasePair":
        return PhasePair.wrapped(-self.theta1, -self.theta2)

    @property
    def e1(self) -> complex:
        return cmath.exp(1j * self.theta1)

    @property
    def e2(self) -> complex:
        return cmath.exp(1j * self.theta2)


STANDARD = PhasePair(math.pi, math.pi)


# -- edge-space primitives ---------------------------------------------------


def _sqrt_g(G) -> np.ndarray:
    g = G.g if isinstance(G, GoogleMatrix) else np.asarray(G, dtype=float)
    return np.sqrt(g)


def build_D(G) -> np.ndarray:
    """Symmetric ``D_ij = sqrt(G_ij G_ji)`` (no summation)."""
    g = G.g if isinstance(G, GoogleMatrix) else np.asarray(G, dtype=float)
    d = np.sqrt(g * g.T)
    return 0.5 * (d + d.T)  # exact symmetry; the product is already symmetric up to rounding


def eig_sym(D: np.ndarray, atol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns) of symmetric ``D``."""
    try:
        lam, vec = np.linalg.eigh(D)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"symmetric eigensolver failed: {exc}") from exc
    order = np.argsort(lam, kind="stable")[::-1]
    lam, vec = lam[order], vec[:, order]
    gram = vec.T @ vec
    if np.abs(gram - np.eye(len(lam))).max() > atol:
        raise NumericError("eigenvectors of D are not orthonormal")
    return lam, vec


def lift(lambda_vec: np.ndarray, G) -> np.ndarray:
    """``A|lam>``: amplitude ``(i, k)`` equals ``lam_i * sqrt(G_ki)``."""
    s = _sqrt_g(G)
    v = np.asarray(lambda_vec)
    return (v[:, None] * s.T).ravel()


def lift_many(u: np.ndarray, w: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Edge state ``A u + S A w`` given the square-root matrix ``s``."""
    return (u[:, None] * s.T + w[None, :] * s).ravel()


def swap(psi: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(psi).reshape(n, n).T.ravel()


def apply_A_dagger(psi: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``(A^dagger psi)_i = sum_k sqrt(G_ki) psi(i, k)``."""
    n = s.shape[0]
    return (psi.reshape(n, n) * s.T).sum(axis=1)


def apply_U(psi: np.ndarray, G, theta: float) -> np.ndarray:
    """``U(theta) psi`` in O(n^2) using ``Pi = A A^dagger``."""
    s = _sqrt_g(G)
    n = s.shape[0]
    proj = lift(apply_A_dagger(psi, s), s * s)
    out = (1.0 - cmath.exp(1j * theta)) * proj - psi
    return swap(out, n)


def apply_W(psi: np.ndarray, G, phases: PhasePair) -> np.ndarray:
    return apply_U(apply_U(psi, G, phases.theta1), G, phases.theta2)


# -- block algebra -----------------------------------------------------------


def single_phase_eigenvalues(lam: float, theta: float) -> tuple[complex, complex]:
    """Both roots of ``mu^2 - (1 - e^{i theta}) lam mu - e^{i theta} = 0``."""
    if abs(lam) > 1 + 1e-12:
        raise DomainError(f"|lambda| must be <= 1, got {lam}")
    e = cmath.exp(1j * theta)
    c = (1.0 - e) * lam
    root = cmath.sqrt(c * c + 4.0 * e)
    return (c + root) / 2.0, (c - root) / 2.0


def _block_matrix(lam: float, theta: float) -> np.ndarray:
    # U(theta) on coordinates (c_x, c_y) of c_x x + c_y y
    e = cmath.exp(1j * theta)
    return np.array([[0.0, -1.0], [-e, (1.0 - e) * lam]], dtype=complex)


def _block_W(lam: float, phases: PhasePair) -> np.ndarray:
    return _block_matrix(lam, phases.theta2) @ _block_matrix(lam, phases.theta1)


def block_eigensolve(lam: float, phases: PhasePair) -> list[tuple[complex, complex]]:
    """Eigenpairs ``(nu, a)`` of ``W`` with eigenvector ``x - a y`` on one block.

    Substituting ``nu = e1 + C1 a lam`` into ``nu a = a e2 + nu C2 lam``
    (``e_k = e^{i theta_k}``, ``C_k = 1 - e_k``) gives

        C1 lam a^2 + (e1 - e2 - C1 C2 lam^2) a - e1 C2 lam = 0.

    Returns two pairs in the generic case, one for a double root or when the
    quadratic degenerates to a linear equation (the missing eigenvector then
    has no ``x`` component and is not representable by the ansatz), and none
    when every coefficient vanishes.
    """
    if abs(lam) > 1 + 1e-12:
        raise DomainError(f"|lambda| must be <= 1, got {lam}")
    e1, e2 = phases.e1, phases.e2
    c1, c2 = 1.0 - e1, 1.0 - e2
    qa = c1 * lam
    qb = e1 - e2 - c1 * c2 * lam * lam
    qc = -e1 * c2 * lam
    scale = max(abs(qa), abs(qb), abs(qc))
    if scale < DEGENERATE_TOL:
        return []
    # all three coefficients can be O(lam) for e1 == e2, so compare relative to their scale
    qa, qb, qc = qa / scale, qb / scale, qc / scale
    if abs(qa) < DEGENERATE_TOL:
        roots = [-qc / qb]
    else:
        disc = qb * qb - 4.0 * qa * qc
        if abs(disc) < DEGENERATE_TOL:
            roots = [-qb / (2.0 * qa)]
        else:
            sq = cmath.sqrt(disc)
            # pick the sign that avoids cancellation, then use Vieta for the other root
            q = -0.5 * (qb + sq) if abs(qb + sq) >= abs(qb - sq) else -0.5 * (qb - sq)
            r1 = q / qa
            r2 = qc / q if q != 0 else -qb / qa - r1
            roots = [r1, r2]
    return [(e1 + c1 * a * lam, a) for a in roots]


def _gram_inner(u: np.ndarray, v: np.ndarray, lam: float) -> complex:
    # <u|v> for block coordinates, since <x|x> = <y|y> = 1 and <x|y> = lam
    return (
        np.conj(u[0]) * v[0]
        + np.conj(u[1]) * v[1]
        + lam * (np.conj(u[0]) * v[1] + np.conj(u[1]) * v[0])
    )


def _normalize(c: np.ndarray, lam: float) -> np.ndarray:
    nrm2 = _gram_inner(c, c, lam).real
    if nrm2 <= 0:
        raise NumericError(f"zero-norm block vector at lambda={lam}")
    return c / math.sqrt(nrm2)


def _complement(c: np.ndarray, lam: float) -> np.ndarray:
    """Unit vector in the 2D block orthogonal to unit vector ``c``."""
    # try both coordinate axes, keep the better-conditioned Gram-Schmidt result
    best = None
    for e in (np.array([1.0, 0.0], complex), np.array([0.0, 1.0], complex)):
        r = e - _gram_inner(c, e, lam) * c
        nrm2 = _gram_inner(r, r, lam).real
        if best is None or nrm2 > best[1]:
            best = (r, nrm2)
    r = best[0] / math.sqrt(best[1])
    # one re-orthogonalization pass
    r = r - _gram_inner(c, r, lam) * c
    return _normalize(r, lam)


def _block_eigenvectors(lam: float, phases: PhasePair, collapsed: bool):
    """Orthonormal eigen-coordinates and eigenvalues of ``W`` on one block."""
    Wb = _block_W(lam, phases)
    if collapsed:
        # y = sign * x: the block is one dimensional
        c = np.array([1.0, 0.0], dtype=complex)
        w = Wb @ c
        sign = 1.0 if lam > 0 else -1.0
        nu = w[0] + sign * w[1]
        return [(nu, c)]
    pairs = block_eigensolve(lam, phases)
    if pairs:
        # smallest |a| gives the best-conditioned x - a y
        nu1, a1 = min(pairs, key=lambda p: abs(p[1]))
        c1 = _normalize(np.array([1.0, -a1], dtype=complex), lam)
    else:
        # W is a multiple of the identity on this block
        nu1 = complex(Wb[0, 0])
        c1 = np.array([1.0, 0.0], dtype=complex)
    # W is unitary on the block, so the complement of an eigenvector is one too
    c2 = _complement(c1, lam)
    nu2 = _gram_inner(c2, Wb @ c2, lam)
    return [(complex(nu1), c1), (complex(nu2), c2)]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-data of ``W(theta1, theta2)`` on the dynamical subspace plus a projected state.

    Attributes
    ----------
    lambdas, lambda_vectors:
        eigenvalues (descending) and orthonormal eigenvectors (columns) of ``D``.
    block:
        for each stored eigenpair, the column of ``lambda_vectors`` it lives on.
    nus:
        eigenvalues of ``W`` (unit modulus).
    coords:
        ``(m, 2)`` coordinates of each unit eigenvector on ``(x, y)`` of its block.
    coeffs:
        ``<nu|psi0>`` for each eigenpair.
    ortho_component:
        part of ``psi0`` orthogonal to the dynamical subspace (fixed by ``W``).
    """

    n: int
    phases: PhasePair
    sqrt_g: np.ndarray
    lambdas: np.ndarray
    lambda_vectors: np.ndarray
    block: np.ndarray
    nus: np.ndarray
    coords: np.ndarray
    coeffs: np.ndarray
    ortho_component: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.nus)

    def eigenvector(self, k: int) -> np.ndarray:
        lv = self.lambda_vectors[:, self.block[k]]
        cx, cy = self.coords[k]
        return lift_many(cx * lv, cy * lv, self.sqrt_g)

    def eigenvectors(self) -> np.ndarray:
        """All stored eigenvectors as rows, shape ``(m, n*n)``; O(n^3) memory."""
        return np.array([self.eigenvector(k) for k in range(self.dimension)])


def decompose(
    G: GoogleMatrix,
    phases: PhasePair,
    psi0: np.ndarray,
    verify: bool = True,
    expect_dynamical: bool = False,
) -> SpectralDecomposition:
    """Diagonalize ``W(phases)`` on the dynamical subspace and project ``psi0`` onto it.

    With ``verify`` every eigenpair is checked against the O(n^2) operator
    application ``apply_W``.  ``expect_dynamical`` additionally requires the
    orthogonal remainder of ``psi0`` to vanish.
    """
    n = G.n
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (n * n,):
        raise DomainError(f"psi0 must have length {n * n}")
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > NORM_TOL:
        raise DomainError(f"psi0 must have unit norm, got {nrm}")

    s = G.sqrt
    D = build_D(G)
    lam, V = eig_sym(D)
    lam = np.clip(lam, -1.0, 1.0)

    blocks, nus, coords = [], [], []
    for b, l in enumerate(lam):
        collapsed = abs(abs(l) - 1.0) < COLLAPSE_TOL
        for nu, c in _block_eigenvectors(float(l), phases, collapsed):
            blocks.append(b)
            nus.append(nu)
            coords.append(c)
    blocks = np.array(blocks, dtype=int)
    nus = np.array(nus, dtype=complex)
    coords = np.array(coords, dtype=complex)

    if np.abs(np.abs(nus) - 1.0).max() > ORTHO_TOL:
        k = int(np.argmax(np.abs(np.abs(nus) - 1.0)))
        raise NumericError(f"|nu| = {abs(nus[k])!r} != 1 at lambda={lam[blocks[k]]!r}")
    nus = nus / np.abs(nus)

    # <x_lam|psi> = <lam|A^dag psi>, <y_lam|psi> = <lam|A^dag S psi>
    px = V.T @ apply_A_dagger(psi0, s)
    py = V.T @ apply_A_dagger(swap(psi0, n), s)
    coeffs = np.conj(coords[:, 0]) * px[blocks] + np.conj(coords[:, 1]) * py[blocks]

    dec = SpectralDecomposition(
        n=n,
        phases=phases,
        sqrt_g=s,
        lambdas=lam,
        lambda_vectors=V,
        block=blocks,
        nus=nus,
        coords=coords,
        coeffs=coeffs,
        ortho_component=np.zeros(n * n, dtype=complex),
    )
    u, w = _factors_at(dec, np.ones_like(nus))
    ortho = psi0 - lift_many(u, w, s)
    object.__setattr__(dec, "ortho_component", ortho)

    if verify:
        _verify_eigenpairs(dec, D, G)
        parseval = np.sum(np.abs(coeffs) ** 2) + np.linalg.norm(ortho) ** 2
        if abs(parseval - 1.0) > 1e-9:
            raise NumericError(f"projection is not complete (Parseval sum {parseval!r})")
    if expect_dynamical and np.linalg.norm(ortho) > ORTHO_TOL:
        raise NumericError(
            f"initial state leaves the dynamical subspace (remainder {np.linalg.norm(ortho):.3e})"
        )
    return dec


def _apply_U_factored(u: np.ndarray, w: np.ndarray, D: np.ndarray, theta: float):
    # U(theta)(A u + S A w) = A(-w) + S A((1 - e^{i theta})(u + D w) - u), from A^dag A = 1, A^dag S A = D
    return -w, (1.0 - cmath.exp(1j * theta)) * (u + D @ w) - u


def _verify_eigenpairs(dec: SpectralDecomposition, D: np.ndarray, G) -> None:
    """Residual ``||W v - nu v||`` of every eigenpair, plus one edge-space spot check.

    All eigenvectors are pushed through ``W`` together in factored form; the
    residual norm uses ``||A a + S A b||^2 = |a|^2 + |b|^2 + 2 Re(a^dag D b)``
    on the block's 2-D span.
    A random combination is then checked with the plain ``apply_W`` so that the
    factored algebra itself is validated on every call.
    """
    V = dec.lambda_vectors[:, dec.block]
    u, w = V * dec.coords[:, 0], V * dec.coords[:, 1]
    u1, w1 = _apply_U_factored(u, w, D, dec.phases.theta1)
    u2, w2 = _apply_U_factored(u1, w1, D, dec.phases.theta2)
    ru, rw = u2 - dec.nus * u, w2 - dec.nus * w
    # both residual factors lie along the block's lambda-vector; split off that
    # component and use a cancellation-free form of the Gram norm
    ra, rb = (V * ru).sum(0), (V * rw).sum(0)
    lam = dec.lambdas[dec.block]
    # collapsed blocks are one-dimensional (S x = +-x)
    lam = np.where(np.abs(np.abs(lam) - 1.0) < COLLAPSE_TOL, np.sign(lam), lam)
    sq = (1 - np.abs(lam)) * (np.abs(ra) ** 2 + np.abs(rb) ** 2) + np.abs(lam) * np.abs(ra + np.sign(lam) * rb) ** 2
    stray = np.linalg.norm(ru - V * ra, axis=0) + np.linalg.norm(rw - V * rb, axis=0)
    res = np.sqrt(sq) + stray
    if res.max() > RESIDUAL_TOL:
        k = int(np.argmax(res))
        raise NumericError(f"eigenpair residual {res[k]:.3e} at lambda={dec.lambdas[dec.block[k]]!r}")

    rng = np.random.default_rng(0)
    c = rng.standard_normal(dec.dimension) + 1j * rng.standard_normal(dec.dimension)
    c /= np.linalg.norm(c)
    v = lift_many(u @ c, w @ c, dec.sqrt_g)
    wv = lift_many(u @ (dec.nus * c), w @ (dec.nus * c), dec.sqrt_g)
    res = np.linalg.norm(apply_W(v, G, dec.phases) - wv)
    if res > RESIDUAL_TOL * math.sqrt(dec.dimension):
        raise NumericError(f"edge-space residual {res:.3e} of a random eigen-combination")


def _factors_at(dec: SpectralDecomposition, weights: np.ndarray):
    """Node-space factors ``(u, w)`` with ``sum_k weights_k coeffs_k |nu_k> = A u + S A w``."""
    amp = weights * dec.coeffs
    nb = dec.lambda_vectors.shape[1]
    p = np.zeros(nb, dtype=complex)
    q = np.zeros(nb, dtype=complex)
    np.add.at(p, dec.block, amp * dec.coords[:, 0])
    np.add.at(q, dec.block, amp * dec.coords[:, 1])
    V = dec.lambda_vectors
    return V @ p, V @ q


def _phase_powers(nus: np.ndarray, ts: np.ndarray) -> np.ndarray:
    # exp(i t arg nu) keeps |nu^t| = 1 exactly for large t
    return np.exp(1j * np.outer(ts, np.angle(nus)))


def dynamical_factors(dec: SpectralDecomposition, ts) -> tuple[np.ndarray, np.ndarray]:
    """Factors of the dynamical part of ``W^t psi0`` for every ``t`` in ``ts``.

    Returns ``(U, Wf)`` of shape ``(len(ts), n)`` such that the state at
    ``ts[r]`` is ``A U[r] + S A Wf[r] + ortho_component``.
    """
    ts = np.asarray(ts, dtype=float)
    V = dec.lambda_vectors
    nb = V.shape[1]
    # (m, nb) scatter matrices: eigenpair k contributes to block[k]
    scatter = np.zeros((dec.dimension, nb))
    scatter[np.arange(dec.dimension), dec.block] = 1.0
    ax = (dec.coeffs * dec.coords[:, 0])[:, None] * scatter
    ay = (dec.coeffs * dec.coords[:, 1])[:, None] * scatter
    Ux = ax @ V.T
    Uy = ay @ V.T
    ph = _phase_powers(dec.nus, ts)
    return ph @ Ux, ph @ Uy


def evolve(dec: SpectralDecomposition, t: int) -> np.ndarray:
    """``W^t psi0`` from the stored spectral data."""
    if t < 0:
        raise DomainError("t must be >= 0")
    u, w = _factors_at(dec, _phase_powers(dec.nus, np.array([t]))[0])
    return lift_many(u, w, dec.sqrt_g) + dec.ortho_component


# -- dense reference ---------------------------------------------------------


def dense_operators(G, theta: float | None = None):
    """Explicit ``(Pi, S)`` and, if ``theta`` is given, ``U(theta)`` as n^2 x n^2 matrices."""
    s = _sqrt_g(G)
    n = s.shape[0]
    if n > MAX_DENSE_NODES:
        raise CapacityError(f"dense walk limited to n <= {MAX_DENSE_NODES}, got {n}")
    N = n * n
    A = np.zeros((N, n))
    for i in range(n):
        A[i * n : (i + 1) * n, i] = s[:, i]
    Pi = A @ A.T
    S = np.zeros((N, N))
    for i in range(n):
        for j in range(n):
            S[j * n + i, i * n + j] = 1.0
    if theta is None:
        return Pi, S
    U = S @ ((1.0 - cmath.exp(1j * theta)) * Pi - np.eye(N))
    return Pi, S, U


def dense_walk_oracle(G, phases: PhasePair, psi0: np.ndarray, t: int) -> np.ndarray:
    """Reference ``W(theta1, theta2)^t psi0`` with explicit dense matrices (n <= 32)."""
    if t < 0:
        raise DomainError("t must be >= 0")
    _, _, U1 = dense_operators(G, phases.theta1)
    _, _, U2 = dense_operators(G, phases.theta2)
    W = U2 @ U1
    psi = np.asarray(psi0, dtype=complex)
    for _ in range(t):
        psi = W @ psi
    return psi
