import numpy as np

from mpi_lab.coalgebra import (
    check_canonical_idempotent,
    check_coassociativity,
    check_delta_range_and_density,
    coassociativity_residual,
    comul,
    duality_consistency,
    identity_leg,
    leg_algebra,
    _coassoc_residual_single,
    _coassoc_residuals_all,
)
from mpi_lab.tensor import (
    Operator,
    identity,
    space,
)


def unit(n, i, j):
    m = np.zeros((n, n))
    m[i - 1, j - 1] = 1.0
    return m


class TestLegAlgebra:
    def test_example_A(self, w_example):
        alg = leg_algebra(w_example, "A")
        assert alg.space.dim == 2
        assert not alg.unital
        ok, _ = alg.space.contains(Operator(space(2), unit(2, 2, 1)))
        assert ok
        ok, _ = alg.space.contains(Operator(space(2), unit(2, 2, 2)))
        assert ok
        # A is an algebra but not star-closed for this fixture
        assert alg.product_residual < 1e-12
        assert not alg.star_closed

    def test_example_Ahat(self, w_example):
        alg = leg_algebra(w_example, "Ahat")
        assert alg.unital
        eq, res = alg.space.equals(
            # span{e11, e22}
            __import__("mpi_lab.tensor", fromlist=["span"]).span(
                [
                    Operator(space(2), unit(2, 1, 1)),
                    Operator(space(2), unit(2, 2, 2)),
                ]
            )
        )
        assert eq and res < 1e-13

    def test_identity_w(self):
        alg = leg_algebra(identity(space(2, 2)), "A")
        assert alg.space.dim == 1 and alg.unital

    def test_astar_is_adjoint_span(self, w_example):
        a = leg_algebra(w_example, "A")
        astar = leg_algebra(w_example, "Astar")
        adj_span = __import__("mpi_lab.tensor", fromlist=["span"]).span(
            [b.adj for b in a.space.basis]
        )
        eq, _ = astar.space.equals(adj_span)
        assert eq


class TestComul:
    def test_primal_unit_gives_E(self, w_example):
        e = comul(w_example, identity_leg(w_example), "primal")
        expected = np.kron(unit(2, 1, 1), unit(2, 1, 1)) + np.kron(
            unit(2, 2, 2), unit(2, 2, 2)
        )
        np.testing.assert_allclose(e.matrix, expected)

    def test_primal_identity_operator(self):
        w = identity(space(2, 2))
        x = Operator(space(2), np.array([[1.0, 2.0], [0.5, -1.0]]))
        got = comul(w, x, "primal")
        np.testing.assert_allclose(got.matrix, np.kron(np.eye(2), x.matrix))

    def test_dual_unit_gives_flipped_G(self, w_example):
        e = comul(w_example, identity_leg(w_example), "dual")
        expected = np.kron(np.eye(2), unit(2, 2, 2))  # Sigma G Sigma = 1 (x) e22
        np.testing.assert_allclose(e.matrix, expected)

    def test_duality_consistency(self, corpus_fixtures):
        for w in corpus_fixtures.values():
            assert duality_consistency(w) < 1e-12


class TestCoassociativity:
    def test_example_matrix_units(self, w_example):
        sample = [
            Operator(space(2), unit(2, i, j)) for i in (1, 2) for j in (1, 2)
        ]
        assert coassociativity_residual(w_example, sample) < 1e-14

    def test_example_oracle_direct_eight_by_eight(self, w_example):
        # oracle: plain kron products, no leg machinery
        wm = w_example.matrix
        w12 = np.kron(wm, np.eye(2))
        w23 = np.kron(np.eye(2), wm)
        for i in (1, 2):
            for j in (1, 2):
                x = unit(2, i, j)
                dx = wm.conj().T @ np.kron(np.eye(2), x) @ wm
                lhs = w12.conj().T @ np.kron(np.eye(2), dx) @ w12
                rhs = w23.conj().T @ w13_embed(dx) @ w23
                assert np.linalg.norm(lhs - rhs) < 1e-14

    def test_identity_w(self):
        w = identity(space(2, 2))
        x = Operator(space(2), np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert coassociativity_residual(w, [x]) < 1e-15

    def test_z3_small_residual(self, w_z3):
        sample = [
            Operator(space(3), np.eye(3)[[i]].T @ np.eye(3)[[j]])
            for i in range(3)
            for j in range(3)
        ]
        assert coassociativity_residual(w_z3, sample) < 1e-12

    def test_gram_path_matches_loop(self, w_example, w_z3, w_pair2):
        for w in (w_example, w_z3, w_pair2):
            n = w.space.legs[0].dim
            sample = []
            for k in range(n):
                for l in range(n):
                    m = np.zeros((n, n))
                    m[k, l] = 1.0
                    sample.append(Operator(space(n), m))
            fast = _coassoc_residuals_all(w)
            slow = np.array(
                [_coassoc_residual_single(w, x) for x in sample]
            ).reshape(n, n)
            np.testing.assert_allclose(fast, slow, atol=1e-12)

    def test_gram_path_detects_violation(self):
        # a generic two-leg unitary is not multiplicative and fails
        # coassociativity; both evaluation paths must agree on the failure
        rng = np.random.default_rng(99)
        z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        q, _ = np.linalg.qr(z)
        u = Operator(space(2, 2), q)
        fast = float(np.max(_coassoc_residuals_all(u)))
        sample = [Operator(space(2), unit(2, i, j)) for i in (1, 2) for j in (1, 2)]
        slow = coassociativity_residual(u, sample)
        assert fast > 1e-3
        assert abs(fast - slow) < 1e-10

    def test_both_sides(self, w_pair2):
        assert check_coassociativity(w_pair2) < 1e-12


def w13_embed(two_leg_matrix):
    """Embed a 4x4 two-leg matrix on legs (1,3) of a 2,2,2 space."""
    t = two_leg_matrix.reshape(2, 2, 2, 2)
    out = np.einsum("imjp,kl->ikmjlp", t, np.eye(2))
    return out.reshape(8, 8)


class TestCanonicalIdempotent:
    def test_example_all_zero(self, w_example):
        rep = check_canonical_idempotent(w_example)
        assert rep.max_residual() < 1e-13, rep.residuals

    def test_identity_w(self):
        rep = check_canonical_idempotent(identity(space(2, 2)))
        assert rep.max_residual() < 1e-14

    def test_pair_groupoid(self, w_pair2):
        rep = check_canonical_idempotent(w_pair2)
        assert rep.max_residual() < 1e-11, rep.residuals

    def test_e_legs_oracle(self, w_z2):
        # direct evaluation of (E (x) 1)(1 (x) E) vs W12*W23*W23W12
        e = (w_z2.adj @ w_z2).matrix
        lhs = np.kron(e, np.eye(2)) @ np.kron(np.eye(2), e)
        wm = w_z2.matrix
        w12 = np.kron(wm, np.eye(2))
        w23 = np.kron(np.eye(2), wm)
        rhs = w12.conj().T @ w23.conj().T @ w23 @ w12
        assert np.linalg.norm(lhs - rhs) < 1e-13


class TestRangeAndDensity:
    def test_example(self, w_example):
        # Oracle (by hand): Delta(e21) = e21 (x) e21, Delta(e22) = e22 (x) e22.
        # The two right-multiplied density families collapse because
        # Delta(e21) kills A (x) A from the right: span{e22}, dim 1.  The
        # fixture is not full, so the density statement does not apply; the
        # frozen dims below are the oracle values, not dim A across the board.
        rep = check_delta_range_and_density(w_example)
        non_density = {
            k: v for k, v in rep.residuals.items() if not k.startswith("density_")
        }
        assert max(non_density.values()) < 1e-12, non_density
        assert rep.dims["A"] == 2
        assert rep.dims["range_span"] == 4 and rep.dims["E_A2_span"] == 4
        assert rep.dims["density_left_a1_db"] == 2
        assert rep.dims["density_right_da_1b"] == 1
        assert rep.dims["density_left_db_a1"] == 1
        assert rep.dims["density_right_1b_da"] == 2

    def test_example_density_oracle(self, w_example):
        # independent span computation for the collapsing family:
        # (Delta a)(1 (x) b) over a, b in {e21, e22} leaves only e22-slices
        e21, e22 = unit(2, 2, 1), unit(2, 2, 2)
        wm = w_example.matrix
        members = []
        for a in (e21, e22):
            da = wm.conj().T @ np.kron(np.eye(2), a) @ wm
            for b in (e21, e22):
                prod = da @ np.kron(np.eye(2), b)
                t = prod.reshape(2, 2, 2, 2)
                for p in range(2):
                    for q in range(2):
                        members.append(t[:, q, :, p].ravel())  # right slices
        rank = np.linalg.matrix_rank(np.array(members), tol=1e-10)
        assert rank == 1

    def test_identity_w(self):
        rep = check_delta_range_and_density(identity(space(2, 2)))
        assert rep.max_residual() < 1e-13
        assert rep.dims["A"] == 1
        assert rep.dims["density_left_a1_db"] == 1

    def test_z2_density_dims(self, w_z2):
        rep = check_delta_range_and_density(w_z2)
        assert rep.max_residual() < 1e-12
        assert rep.dims["A"] == 2
        assert all(
            rep.dims[k] == 2
            for k in rep.dims
            if k.startswith("density_")
        )

    def test_pair_groupoid(self, w_pair2):
        rep = check_delta_range_and_density(w_pair2)
        assert rep.max_residual() < 1e-11, rep.residuals
