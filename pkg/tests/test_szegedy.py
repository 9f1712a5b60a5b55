import cmath
import math

import numpy as np
import pytest

from qpagerank.errors import CapacityError, DomainError
from qpagerank.google import google_from_graph, google_matrix
from qpagerank.graph import DirectedGraph
from qpagerank.qrank import initial_state
from qpagerank.szegedy import (
    PhasePair,
    apply_U,
    apply_W,
    block_eigensolve,
    build_D,
    decompose,
    dense_operators,
    dense_walk_oracle,
    eig_sym,
    evolve,
    lift,
    single_phase_eigenvalues,
    swap,
)

from conftest import PI, random_digraph

SCHEMES = [
    PhasePair(PI, PI),
    PhasePair(PI / 2, PI / 2),
    PhasePair(PI / 2, -PI / 2),
    PhasePair(PI, PI / 2),
    PhasePair(PI, PI / 10),
    PhasePair(PI / 10, -PI / 10),
]


def G2():
    return google_from_graph(DirectedGraph(2, frozenset({(0, 1)})), 0.85)


def small_graphs():
    out = []
    for seed in range(6):
        n = 3 + seed % 5
        out.append(google_from_graph(random_digraph(n, 0.35, seed, loops=True), 0.85))
    # α = 1 leaves zeros in G, which exercises λ = 0 and collapsed blocks
    out.append(google_from_graph(DirectedGraph(4, frozenset({(0, 1), (1, 0), (2, 3)})), 1.0))
    out.append(google_from_graph(DirectedGraph(3, frozenset({(0, 1), (1, 2)})), 0.0))
    return out


class TestD:
    def test_uniform(self):
        G = google_matrix(np.full((4, 4), 0.25), 0.0)
        np.testing.assert_allclose(build_D(G), np.full((4, 4), 0.25))

    def test_two_node(self):
        D = build_D(G2())
        np.testing.assert_allclose(D, [[0.075, math.sqrt(0.4625)], [math.sqrt(0.4625), 0.5]], atol=1e-15)

    def test_symmetric(self):
        for G in small_graphs():
            D = build_D(G)
            assert np.array_equal(D, D.T)

    def test_equals_adjoint_sandwich(self):
        # D = A^dagger S A, checked with explicit dense operators
        for G in small_graphs()[:4]:
            n = G.n
            A = np.column_stack([lift(np.eye(n)[i], G) for i in range(n)])
            _, S = dense_operators(G)
            np.testing.assert_allclose(A.T @ S @ A, build_D(G), atol=1e-14)


class TestEigSym:
    def test_rank_one(self):
        lam, V = eig_sym(np.full((5, 5), 0.2))
        np.testing.assert_allclose(lam, [1, 0, 0, 0, 0], atol=1e-14)
        v0 = V[:, 0] * np.sign(V[0, 0])
        np.testing.assert_allclose(v0, np.full(5, 1 / math.sqrt(5)), atol=1e-14)

    def test_identity(self):
        lam, _ = eig_sym(np.eye(4))
        np.testing.assert_allclose(lam, 1.0)

    def test_reconstruction(self):
        rng = np.random.default_rng(0)
        M = rng.normal(size=(5, 5))
        D = M + M.T
        lam, V = eig_sym(D)
        assert np.all(np.diff(lam) <= 0)
        assert np.abs(V @ np.diag(lam) @ V.T - D).max() < 1e-10
        assert np.abs(V.T @ V - np.eye(5)).max() < 1e-10


class TestLift:
    def test_basis_vector_is_psi_i(self):
        G = G2()
        s = np.sqrt(G.g)
        psi = lift(np.array([1.0, 0.0]), G).reshape(2, 2)
        # register 1 pinned to node 0, register 2 carries sqrt of column 0
        np.testing.assert_allclose(psi[0], s[:, 0])
        np.testing.assert_allclose(psi[1], 0)

    def test_isometry(self):
        rng = np.random.default_rng(1)
        for G in small_graphs():
            v = rng.normal(size=G.n)
            v /= np.linalg.norm(v)
            assert abs(np.linalg.norm(lift(v, G)) - 1) < 1e-12

    def test_swap_overlap_two_ways(self):
        rng = np.random.default_rng(2)
        for G in small_graphs():
            a, b = rng.normal(size=G.n), rng.normal(size=G.n)
            lhs = np.vdot(lift(a, G), swap(lift(b, G), G.n))
            assert abs(lhs - a @ build_D(G) @ b) < 1e-12


class TestSinglePhase:
    @pytest.mark.parametrize("lam", [-0.9, -0.3, 0.0, 0.4, 0.99])
    def test_theta_pi(self, lam):
        mp, mm = single_phase_eigenvalues(lam, PI)
        root = 1j * math.sqrt(1 - lam * lam)
        assert {complex(round(z.real, 12), round(z.imag, 12)) for z in (mp, mm)} == {
            complex(round((lam + root).real, 12), round((lam + root).imag, 12)),
            complex(round((lam - root).real, 12), round((lam - root).imag, 12)),
        }

    @pytest.mark.parametrize("lam", [-1.0, -0.5, 0.0, 0.7, 1.0])
    def test_theta_zero(self, lam):
        mp, mm = single_phase_eigenvalues(lam, 0.0)
        assert sorted([mp.real, mm.real]) == pytest.approx([-1, 1])
        assert abs(mp.imag) < 1e-15 and abs(mm.imag) < 1e-15

    def test_double_root(self):
        mp, mm = single_phase_eigenvalues(1.0, PI)
        assert abs(mp - 1) < 1e-12 and abs(mm - 1) < 1e-12

    def test_unit_modulus_and_equation(self):
        for lam in np.linspace(-1, 1, 21):
            for th in np.linspace(-PI, PI, 13):
                e = cmath.exp(1j * th)
                for mu in single_phase_eigenvalues(lam, th):
                    assert abs(abs(mu) - 1) < 1e-10
                    assert abs(-(mu**2) + e + (1 - e) * mu * lam) < 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            single_phase_eigenvalues(1.5, 0.3)


def system_residual(nu, a, lam, ph):
    e1, e2 = ph.e1, ph.e2
    c1, c2 = 1 - e1, 1 - e2
    r1 = nu - (e1 + c1 * a * lam)
    r2 = nu * a - (a * e2 + (e1 + c1 * a * lam) * c2 * lam)
    return max(abs(r1), abs(r2))


class TestBlockEigensolve:
    @pytest.mark.parametrize("lam", [-0.8, -0.2, 0.3, 0.65, 0.95])
    def test_standard_recovers_mu_squared(self, lam):
        got = sorted((nu for nu, _ in block_eigensolve(lam, PhasePair(PI, PI))), key=lambda z: z.imag)
        root = 1j * math.sqrt(1 - lam * lam)
        want = sorted([(lam + root) ** 2, (lam - root) ** 2], key=lambda z: z.imag)
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_equal_phases_are_squares(self):
        for th in (PI / 2, PI / 10, 2.0):
            for lam in (-0.7, 0.1, 0.55):
                nus = [nu for nu, _ in block_eigensolve(lam, PhasePair(th, th))]
                mus = single_phase_eigenvalues(lam, th)
                for nu in nus:
                    assert min(abs(nu - m * m) for m in mus) < 1e-12

    def test_lambda_zero_standard(self):
        pairs = block_eigensolve(0.0, PhasePair(PI, PI))
        # all quadratic coefficients vanish: W = -1 on the whole block
        assert all(abs(nu + 1) < 1e-12 for nu, _ in pairs)
        G = google_from_graph(DirectedGraph(3, frozenset({(0, 1), (1, 2)})), 1.0)
        dec = decompose(G, PhasePair(PI, PI), initial_state(G))
        zero_blocks = np.flatnonzero(np.abs(dec.lambdas[dec.block]) < 1e-12)
        assert len(zero_blocks) > 0
        np.testing.assert_allclose(dec.nus[zero_blocks], -1, atol=1e-12)

    def test_opposite_back_substitution(self):
        ph = PhasePair(PI / 2, -PI / 2)
        pairs = block_eigensolve(0.3, ph)
        assert len(pairs) == 2
        for nu, a in pairs:
            assert system_residual(nu, a, 0.3, ph) < 1e-12
            assert abs(abs(nu) - 1) < 1e-12

    def test_roots_are_dense_eigenvalues(self):
        # cross-check against a dense eigendecomposition of W
        G = google_from_graph(random_digraph(4, 0.5, 11), 0.85)
        lam, _ = eig_sym(build_D(G))
        for ph in SCHEMES:
            _, _, U1 = dense_operators(G, ph.theta1)
            _, _, U2 = dense_operators(G, ph.theta2)
            spectrum = np.linalg.eigvals(U2 @ U1)
            for l in lam:
                for nu, a in block_eigensolve(float(l), ph):
                    assert system_residual(nu, a, l, ph) < 1e-10
                    assert np.min(np.abs(spectrum - nu)) < 1e-8

    def test_linear_case(self):
        # θ1 = 0 kills the a^2 coefficient
        pairs = block_eigensolve(0.4, PhasePair(0.0, 1.0))
        assert len(pairs) == 1
        nu, a = pairs[0]
        assert system_residual(nu, a, 0.4, PhasePair(0.0, 1.0)) < 1e-12


class TestDecompose:
    def test_pagerank_state_is_dynamical(self):
        for G in small_graphs():
            for ph in SCHEMES:
                dec = decompose(G, ph, initial_state(G), expect_dynamical=True)
                assert np.linalg.norm(dec.ortho_component) < 1e-10
                assert dec.dimension <= 2 * G.n
                assert np.abs(np.abs(dec.nus) - 1).max() < 1e-10

    def test_eigen_residuals_and_orthonormality(self):
        for G in small_graphs():
            for ph in SCHEMES:
                dec = decompose(G, ph, initial_state(G))
                V = dec.eigenvectors()
                assert np.abs(V.conj() @ V.T - np.eye(dec.dimension)).max() < 1e-10
                for k in range(dec.dimension):
                    r = apply_W(V[k], G, ph) - dec.nus[k] * V[k]
                    assert np.linalg.norm(r) < 1e-9

    def test_edge_state_outside_subspace(self):
        # α = 1 so that G_ij = G_ji = 0 for the pair (0, 2)
        G = google_from_graph(DirectedGraph(3, frozenset({(0, 1), (1, 2), (2, 1)})), 1.0)
        assert G.g[2, 0] == 0 and G.g[0, 2] == 0
        psi = np.zeros(9, complex)
        psi[0 * 3 + 2] = 1.0
        dec = decompose(G, PhasePair(PI / 2, -PI / 2), psi)
        # explicit projection oracle: orthonormal basis of span{A e_i, S A e_i}
        A = np.column_stack([lift(np.eye(3)[i], G) for i in range(3)])
        _, S = dense_operators(G)
        Q, R = np.linalg.qr(np.hstack([A, S @ A]))
        Q = Q[:, np.abs(np.diag(R)) > 1e-10]
        ortho = psi - Q @ (Q.conj().T @ psi)
        assert np.linalg.norm(ortho) > 0.5
        np.testing.assert_allclose(dec.ortho_component, ortho, atol=1e-12)
        # and the remainder is a fixed point of W
        np.testing.assert_allclose(evolve(dec, 7), evolve(dec, 0), atol=1e-12)

    def test_parseval(self):
        rng = np.random.default_rng(4)
        for G in small_graphs():
            psi = rng.normal(size=G.n**2) + 1j * rng.normal(size=G.n**2)
            psi /= np.linalg.norm(psi)
            for ph in SCHEMES[:3]:
                dec = decompose(G, ph, psi)
                total = np.sum(np.abs(dec.coeffs) ** 2) + np.linalg.norm(dec.ortho_component) ** 2
                assert abs(total - 1) < 1e-10

    def test_requires_unit_norm(self):
        G = G2()
        with pytest.raises(DomainError):
            decompose(G, PhasePair(PI, PI), 2 * initial_state(G))


class TestEvolve:
    def test_t_zero(self):
        for G in small_graphs():
            psi0 = initial_state(G)
            dec = decompose(G, PhasePair(PI, PI / 2), psi0)
            assert np.abs(evolve(dec, 0) - psi0).max() < 1e-12

    def test_norm_preserved(self):
        G = small_graphs()[3]
        dec = decompose(G, PhasePair(PI / 2, -PI / 2), initial_state(G))
        for t in range(1, 101):
            assert abs(np.linalg.norm(evolve(dec, t)) - 1) < 1e-9

    def test_matches_dense_oracle(self):
        for G in small_graphs():
            psi0 = initial_state(G)
            for ph in SCHEMES:
                dec = decompose(G, ph, psi0)
                _, _, U1 = dense_operators(G, ph.theta1)
                _, _, U2 = dense_operators(G, ph.theta2)
                W = U2 @ U1
                psi = psi0.copy()
                for t in range(51):
                    assert np.abs(evolve(dec, t) - psi).max() < 1e-10
                    psi = W @ psi

    def test_general_state_matches_oracle(self):
        rng = np.random.default_rng(9)
        G = google_from_graph(random_digraph(5, 0.3, 2), 0.9)
        psi = rng.normal(size=25) + 1j * rng.normal(size=25)
        psi /= np.linalg.norm(psi)
        ph = PhasePair(PI, PI / 10)
        dec = decompose(G, ph, psi)
        for t in (0, 1, 5, 23):
            assert np.abs(evolve(dec, t) - dense_walk_oracle(G, ph, psi, t)).max() < 1e-10

    def test_conjugation_symmetry(self):
        for G in small_graphs():
            psi0 = initial_state(G)
            for ph in SCHEMES:
                a = decompose(G, ph, psi0)
                b = decompose(G, ph.conjugate(), psi0)
                for t in (1, 2, 17, 50):
                    assert np.abs(evolve(b, t) - np.conj(evolve(a, t))).max() < 1e-10

    def test_negative_t(self):
        G = G2()
        with pytest.raises(DomainError):
            evolve(decompose(G, PhasePair(PI, PI), initial_state(G)), -1)


class TestDenseOracle:
    def test_standard_is_szegedy_reflection(self):
        for G in small_graphs()[:4]:
            Pi, S, U = dense_operators(G, PI)
            N = G.n**2
            assert np.abs(U - S @ (2 * Pi - np.eye(N))).max() < 1e-14

    def test_unitary(self):
        for G in small_graphs()[:4]:
            for th in (PI, PI / 2, 0.3, -2.0):
                _, _, U = dense_operators(G, th)
                assert np.abs(U @ U.conj().T - np.eye(G.n**2)).max() < 1e-12

    def test_composition(self):
        G = small_graphs()[2]
        ph = PhasePair(PI / 2, -PI / 2)
        psi0 = initial_state(G)
        twice = dense_walk_oracle(G, ph, dense_walk_oracle(G, ph, psi0, 1), 1)
        np.testing.assert_allclose(twice, dense_walk_oracle(G, ph, psi0, 2), atol=1e-14)

    def test_structured_U_matches_dense(self):
        rng = np.random.default_rng(3)
        for G in small_graphs()[:4]:
            psi = rng.normal(size=G.n**2) + 1j * rng.normal(size=G.n**2)
            for th in (PI, PI / 3, -1.1):
                _, _, U = dense_operators(G, th)
                np.testing.assert_allclose(apply_U(psi, G, th), U @ psi, atol=1e-13)

    def test_invariant_subspace_identities(self):
        for G in small_graphs():
            lam, V = eig_sym(build_D(G))
            for th in (PI, PI / 2, 0.7):
                for k in range(G.n):
                    x = lift(V[:, k], G).astype(complex)
                    y = swap(x, G.n)
                    e = cmath.exp(1j * th)
                    assert np.abs(apply_U(x, G, th) + e * y).max() < 1e-10
                    assert np.abs(apply_U(y, G, th) - ((1 - e) * lam[k] * y - x)).max() < 1e-10

    def test_capacity(self):
        G = google_matrix(np.full((33, 33), 1 / 33), 0.0)
        with pytest.raises(CapacityError):
            dense_walk_oracle(G, PhasePair(PI, PI), np.zeros(33 * 33), 1)


def test_phase_pair_validation():
    with pytest.raises(DomainError):
        PhasePair(4.0, 0.0)
    assert PhasePair.wrapped(-PI, 3 * PI) == PhasePair(PI, PI)
    assert PhasePair(PI / 2, PI).conjugate() == PhasePair(-PI / 2, PI)


def test_verification_rejects_corrupted_eigenpairs():
    import dataclasses

    from qpagerank.errors import NumericError
    from qpagerank.szegedy import _verify_eigenpairs, build_D

    G = small_graphs()[2]
    dec = decompose(G, PhasePair(PI / 2, PI / 3), initial_state(G))
    D = build_D(G)
    _verify_eigenpairs(dec, D, G)
    nus = dec.nus.copy()
    nus[3] *= cmath.exp(1e-6j)
    with pytest.raises(NumericError):
        _verify_eigenpairs(dataclasses.replace(dec, nus=nus), D, G)
    coords = dec.coords.copy()
    coords[5] = coords[5][::-1]
    with pytest.raises(NumericError):
        _verify_eigenpairs(dataclasses.replace(dec, coords=coords), D, G)


@pytest.mark.parametrize("lam", [1e-7, 1e-5, -3e-7])
def test_small_lambda_equal_phases_has_two_roots(lam):
    # e1 == e2 makes every coefficient O(lam); the roots lam +- i sqrt(1 - lam^2) stay distinct
    from qpagerank.szegedy import _block_W

    for ph in (PhasePair(PI, PI), PhasePair(PI / 2, PI / 2)):
        pairs = block_eigensolve(lam, ph)
        assert len(pairs) == 2
        dense = np.linalg.eigvals(_block_W(lam, ph))
        nus = [p[0] for p in pairs]
        assert abs(pairs[0][1] - pairs[1][1]) > 1.0
        for nu in nus:
            assert np.min(np.abs(dense - nu)) < 1e-9
