import numpy as np
import pytest

from polylin.duality import (
    anchor_grid,
    bases_completion,
    block_permutation,
    dual_identity_block,
    equivalence_witness,
    left_dual_qr,
    right_dual_qr,
    verify_dual,
)
from polylin.eigen import match_eigenvalues, solve_pencil
from polylin.errors import AnchorError, IdentityBlockError, PreconditionError, RankDeficiencyError
from polylin.linearize import companion_second_form, fiedler_pencil, l2_residual, w_linearization
from polylin.polycore import MatrixPolynomial, Pencil, col_stack

from _util import rand_poly, sample_points


def rand_pencil(rng, N, cplx=True):
    def one():
        M = rng.standard_normal((N, N))
        return M + 1j * rng.standard_normal((N, N)) if cplx else M

    return Pencil(one(), one())


def same_spectrum(L, M, tol):
    _, dist = match_eigenvalues(solve_pencil(L).points, solve_pencil(M).points)
    return dist.max() <= tol


def example_fiedler():
    """The d = 3 Fiedler example pencil (mu-matrix first) with block size 1."""
    a0, a1, a2, a3 = 2.0, 3.0, 5.0, 7.0
    X = np.array([[0, a0, 0], [1, a1, 0], [0, 0, 1]])
    Y = np.array([[1, 0, 0], [0, -a2, -a3], [0, 1, 0]])
    return Pencil(Y, X)


class TestBasesCompletion:
    def test_identity(self):
        rng = np.random.default_rng(0)
        A = rand_poly(rng, 2, 3)
        W = w_linearization(A).W
        bc = bases_completion(W, col_stack(A))
        assert bc.identity_residual() <= 1e-12
        assert bc.V.shape == (2, 8) and bc.B.shape == (8, 6)

    def test_non_orthonormal_w(self):
        rng = np.random.default_rng(1)
        A = col_stack(rand_poly(rng, 2, 2))
        W0 = w_linearization(rand_poly(np.random.default_rng(1), 2, 2)).W
        T = rng.standard_normal((4, 4)) + 4 * np.eye(4)
        bc = bases_completion(T @ W0, A)
        assert bc.identity_residual() <= 1e-11

    def test_rank_deficient(self):
        A = np.zeros((4, 1))
        with pytest.raises(RankDeficiencyError):
            bases_completion(np.eye(4)[:3], A)

    def test_not_annihilating(self):
        rng = np.random.default_rng(2)
        with pytest.raises(PreconditionError):
            bases_completion(rng.standard_normal((3, 4)), rng.standard_normal((4, 1)))


class TestVerifyDual:
    def test_w_companion_left_dual(self):
        A = rand_poly(np.random.default_rng(3), 3, 3)
        W, C = w_linearization(A).pencil, companion_second_form(A)
        cert = verify_dual(W, C)
        assert cert.verdict == "left_dual"
        assert cert.commute_residual <= 1e-12 * W.fro_norm() * C.fro_norm()

    def test_j_form_same_matrix(self):
        rng = np.random.default_rng(4)
        cert = verify_dual(rand_pencil(rng, 4), rand_pencil(rng, 4))
        assert cert.commute_residual_j == pytest.approx(cert.commute_residual, rel=1e-15)
        assert cert.verdict == "neither"


class TestLeftDualQR:
    def test_diagonal(self):
        D = np.diag([1.0, 2.0, -3.0])
        L = Pencil(np.eye(3), D)
        M = left_dual_qr(L)
        np.testing.assert_allclose(M.P1, M.P0 @ D, atol=1e-14)
        assert same_spectrum(L, M, 1e-12)

    def test_companion(self):
        L = companion_second_form(rand_poly(np.random.default_rng(5), 3, 2))
        M = left_dual_qr(L)
        cert = verify_dual(M, L)
        assert cert.is_left
        R = M.row_stack()
        np.testing.assert_allclose(R @ R.conj().T, np.eye(6), atol=1e-13)
        assert same_spectrum(L, M, 1e-9)

    def test_involution_up_to_equivalence(self):
        L = rand_pencil(np.random.default_rng(6), 5)
        assert same_spectrum(L, left_dual_qr(left_dual_qr(L)), 1e-9)

    def test_constant_kernel(self):
        rng = np.random.default_rng(7)
        P = np.diag([1.0, 1.0, 0.0])
        with pytest.raises(RankDeficiencyError):
            left_dual_qr(Pencil(rng.standard_normal((3, 3)) @ P, rng.standard_normal((3, 3)) @ P))


class TestRightDualQR:
    def test_contains_l2_pencils(self):
        A = rand_poly(np.random.default_rng(8), 2, 3)
        M = right_dual_qr(w_linearization(A).pencil)
        assert verify_dual(M, w_linearization(A).pencil).is_right
        assert l2_residual(M, A)[0] <= 1e-10

    def test_identical_coefficients(self):
        M = right_dual_qr(Pencil(np.eye(3), np.eye(3)))
        np.testing.assert_allclose(M.P0, M.P1, atol=1e-14)

    def test_spectrum(self):
        L = rand_pencil(np.random.default_rng(9), 6)
        M = right_dual_qr(L)
        assert verify_dual(M, L).is_right
        assert same_spectrum(L, M, 1e-9)

    def test_constant_left_kernel(self):
        rng = np.random.default_rng(10)
        P = np.diag([1.0, 1.0, 0.0])
        with pytest.raises(RankDeficiencyError):
            right_dual_qr(Pencil(P @ rng.standard_normal((3, 3)), P @ rng.standard_normal((3, 3))))


class TestIdentityBlock:
    def test_fiedler_example(self):
        M = dual_identity_block(example_fiedler(), block_permutation([1, 3, 6, 4, 5, 2], 1))
        expected = np.array([[0, 0, -2, 1, 0, 0], [-1, 0, -3, 0, 1, 0], [0, 1, 5, 0, 0, 7]])
        np.testing.assert_array_equal(np.hstack([M.P1, -M.P0]), expected)
        assert verify_dual(M, example_fiedler()).is_left

    def test_identity_permutation(self):
        X = np.random.default_rng(11).standard_normal((3, 3))
        M = dual_identity_block(Pencil(np.eye(3), X), np.arange(6))
        np.testing.assert_array_equal(M.P1, -X)
        np.testing.assert_array_equal(M.P0, -np.eye(3))

    def test_invert_y_matches_normalized(self):
        L = rand_pencil(np.random.default_rng(12), 4)
        M1 = dual_identity_block(L, np.arange(8), mode="invert_Y")
        Ln = Pencil(np.eye(4), np.linalg.solve(L.P0, L.P1))
        M2 = dual_identity_block(Ln, np.arange(8), mode="exact_identity")
        assert verify_dual(M1, L).is_left
        assert same_spectrum(M1, M2, 1e-9)

    def test_not_identity(self):
        L = rand_pencil(np.random.default_rng(13), 3)
        with pytest.raises(IdentityBlockError, match="deviation"):
            dual_identity_block(L, np.arange(6))

    def test_singular_y(self):
        L = Pencil(np.diag([1.0, 0.0]), np.eye(2))
        with pytest.raises(IdentityBlockError, match="condition"):
            dual_identity_block(L, np.arange(4), mode="invert_Y")

    def test_bad_permutation(self):
        with pytest.raises(PreconditionError):
            dual_identity_block(Pencil(np.eye(2), np.eye(2)), [0, 0, 1, 2])

    def test_block_permutation(self):
        np.testing.assert_array_equal(block_permutation([2, 1], 2), [2, 3, 0, 1])


class TestDualityProperties:
    def test_uniqueness_up_to_left_factor(self):
        L = rand_pencil(np.random.default_rng(14), 4)
        Ma = left_dual_qr(L)
        Mb = dual_identity_block(L, np.arange(8), mode="invert_Y")
        Ra, Rb = Ma.row_stack(), Mb.row_stack()
        S = np.linalg.lstsq(Ra.T, Rb.T, rcond=None)[0].T
        assert np.linalg.norm(S @ Ra - Rb) <= 1e-10 * np.linalg.norm(Rb)
        assert np.linalg.svd(S, compute_uv=False)[-1] > 1e-8

    def test_nonsingularity_transfer(self):
        L = companion_second_form(rand_poly(np.random.default_rng(15), 2, 3))
        M = left_dual_qr(L)
        for lam, mu in sample_points(20):
            if np.linalg.svd(L.evaluate(lam, mu), compute_uv=False)[-1] > 1e-8:
                assert np.linalg.svd(M.evaluate(lam, mu), compute_uv=False)[-1] > 1e-12


class TestEquivalenceWitness:
    def test_self_pair(self):
        rng = np.random.default_rng(16)
        D = np.diag(rng.standard_normal(3))
        L = Pencil(np.eye(3), D)
        E, F, anchor = equivalence_witness(L, L)
        np.testing.assert_allclose(E, np.linalg.inv(L.evaluate(anchor.lam, anchor.mu)), atol=1e-12)
        for lam, mu in sample_points(5):
            np.testing.assert_allclose(E @ L.evaluate(lam, mu) @ F, L.evaluate(lam, mu), atol=1e-12)

    def test_w_companion_maps_eigenvectors(self):
        A = rand_poly(np.random.default_rng(17), 2, 2)
        C, W = companion_second_form(A), w_linearization(A).pencil
        wit = equivalence_witness(W, C)
        for t in solve_pencil(C):
            xw = wit.F @ t.x
            assert np.linalg.norm(W.evaluate(*t.point) @ xw) <= 1e-10 * np.linalg.norm(xw)

    def test_fiedler_pair(self):
        L = example_fiedler()
        M = dual_identity_block(L, block_permutation([1, 3, 6, 4, 5, 2], 1))
        wit = equivalence_witness(M, L)
        for lam, mu in sample_points(10):
            assert wit.residual(M, L, lam, mu) <= 1e-11 * M.fro_norm() * L.fro_norm()

    def test_right_dual_orientation(self):
        L = rand_pencil(np.random.default_rng(18), 4)
        M = right_dual_qr(L)
        E, F, _ = equivalence_witness(M, L)
        for lam, mu in sample_points(5):
            np.testing.assert_allclose(E @ M.evaluate(lam, mu) @ F, L.evaluate(lam, mu), atol=1e-10)

    def test_not_dual(self):
        rng = np.random.default_rng(19)
        with pytest.raises(PreconditionError):
            equivalence_witness(rand_pencil(rng, 3), rand_pencil(rng, 3))

    def test_singular_pencil_has_no_anchor(self):
        L = Pencil(np.diag([1.0, 0.0]), np.diag([1.0, 0.0]))
        forced = verify_dual(Pencil(np.eye(2), np.eye(2)), Pencil(np.eye(2), np.eye(2)))
        with pytest.raises(AnchorError):
            equivalence_witness(L, L, forced)

    def test_grid(self):
        pts = anchor_grid()
        assert len(pts) == 21
        assert len({(p.lam, p.mu) for p in pts}) == 21
