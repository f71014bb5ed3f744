import numpy as np
import pytest

from mpi_lab import corpus
from mpi_lab.axioms import (
    DERIVED_IDENTITIES,
    MPI_AXIOMS,
    assess_fullness,
    check_derived_identities,
    check_mpi_axioms,
    is_partial_isometry,
    mpi_identity_sides,
    projection_residuals,
    what,
)
from mpi_lab.tensor import Operator, embed, flip, identity, space


def perm_matrix(perm, n):
    """Matrix of the basis permutation i -> perm[i]."""
    m = np.zeros((n, n))
    for i, j in enumerate(perm):
        m[j, i] = 1.0
    return m


class TestPartialIsometry:
    def test_example(self, w_example):
        ok, res = is_partial_isometry(w_example)
        assert ok and res == 0.0

    def test_non_example(self):
        w = Operator(space(2, 2), np.diag([0.5, 1.0, 0.0, 0.0]))
        ok, res = is_partial_isometry(w)
        assert not ok and res > 1e-2

    def test_permutation_matrix(self):
        w = Operator(space(2, 2), np.eye(4)[[2, 0, 3, 1]])
        ok, res = is_partial_isometry(w)
        assert ok and res < 1e-15

    def test_corrupted_entry(self, w_example):
        m = np.array(w_example.matrix)
        m[2, 0] = 0.9
        ok, res = is_partial_isometry(Operator(w_example.space, m))
        assert not ok and res > 1e-2


class TestMpiAxioms:
    def test_example_passes_exactly(self, w_example):
        v = check_mpi_axioms(w_example)
        assert v.passed
        for name in MPI_AXIOMS:
            assert v.mpi_residuals[name] == 0.0

    def test_identity_operator(self):
        v = check_mpi_axioms(identity(space(2, 2)))
        assert v.passed

    def test_flip_fails_mpi1(self):
        s = flip(2)
        v = check_mpi_axioms(s)
        assert not v.passed
        assert v.mpi_residuals["mpi1"] > 0.1
        # oracle: left side is the leg transposition (13), right side the
        # 3-cycle (12)(13), as permutations of the 8 basis vectors
        lhs, rhs = mpi_identity_sides(s, "mpi1")

        def leg_perm(sigma):
            # sigma permutes leg positions; basis (i1,i2,i3) -> reordered
            out = np.zeros((8, 8))
            for i in range(2):
                for j in range(2):
                    for k in range(2):
                        src = (i, j, k)
                        dst = tuple(src[sigma[p]] for p in range(3))
                        out[dst[0] * 4 + dst[1] * 2 + dst[2], i * 4 + j * 2 + k] = 1.0
            return out

        np.testing.assert_allclose(lhs.matrix, leg_perm([2, 1, 0]))  # (13)
        # (12)(13) composed right-to-left: (i,j,k) -> (k,j,i) -> (j,k,i)
        np.testing.assert_allclose(rhs.matrix, leg_perm([1, 2, 0]))

    def test_example_against_hand_expansion(self, w_example):
        # mpi1 for the example: both sides equal
        # e21 (x) e22 (x) e11 + e22 (x) e22 (x) e22, computed by hand
        def unit(i, j):
            m = np.zeros((2, 2))
            m[i - 1, j - 1] = 1.0
            return m

        expected = np.kron(unit(2, 1), np.kron(unit(2, 2), unit(1, 1))) + np.kron(
            unit(2, 2), np.kron(unit(2, 2), unit(2, 2))
        )
        lhs, rhs = mpi_identity_sides(w_example, "mpi1")
        np.testing.assert_allclose(lhs.matrix, expected)
        np.testing.assert_allclose(rhs.matrix, expected)


class TestDerivedIdentities:
    def test_example_all_zero(self, w_example):
        derived = check_derived_identities(w_example)
        # oracle below recomputes each side with plain embedded products
        amb = space(2, 2, 2)
        w12 = embed(w_example, [1, 2], amb).matrix
        w13 = embed(w_example, [1, 3], amb).matrix
        w23 = embed(w_example, [2, 3], amb).matrix
        h = lambda m: m.conj().T
        oracle = {
            "mpi5": (w12 @ w13 @ w23, w23 @ w12),
            "mpi6": (h(w12) @ w12 @ w13, w13 @ w23 @ h(w23)),
            "mpi7": (w12 @ h(w23), h(w23) @ w12 @ w13),
            "mpi8": (h(w12) @ w23, w13 @ w23 @ h(w12)),
            "mpi9": (h(w13) @ w13 @ w23, w23 @ h(w12) @ w12),
            "mpi10": (w12 @ w13 @ h(w13), w23 @ h(w23) @ w12),
        }
        for name in DERIVED_IDENTITIES:
            lhs, rhs = oracle[name]
            assert np.linalg.norm(lhs - rhs) == 0.0
            assert derived[name] == 0.0

    def test_identity_operator(self):
        derived = check_derived_identities(identity(space(3, 3)))
        assert all(v == 0.0 for v in derived.values())

    def test_z2_pentagon_by_basis_action(self, w_z2):
        # oracle: evaluate mpi5 on every basis vector from the group law
        n = 2
        lhs, rhs = mpi_identity_sides(w_z2, "mpi5")
        for g in range(n):
            for h in range(n):
                for k in range(n):
                    vec = np.zeros(n**3)
                    vec[g * n * n + h * n + k] = 1.0
                    # W23 W12: (g,h,k) -> (g, gh, k) -> (g, gh, (gh)k)
                    out = np.zeros(n**3)
                    out[g * n * n + ((g + h) % n) * n + ((g + h + k) % n)] = 1.0
                    np.testing.assert_allclose(rhs.matrix @ vec, out)
                    np.testing.assert_allclose(lhs.matrix @ vec, out)
        assert check_derived_identities(w_z2)["mpi5"] == 0.0


class TestProjectionInvariants:
    @pytest.mark.parametrize(
        "name",
        ["example", "group_z2", "group_z3", "pair_groupoid_2", "two_z2"],
    )
    def test_projections(self, corpus_fixtures, name):
        res = projection_residuals(corpus_fixtures[name])
        assert all(v < 1e-10 for v in res.values()), res

    def test_what_closure(self, corpus_fixtures):
        # if W passes, so does W-hat = Sigma W* Sigma
        for w in corpus_fixtures.values():
            assert check_mpi_axioms(what(w)).passed

    def test_double_dual_exact(self, corpus_fixtures):
        for w in corpus_fixtures.values():
            np.testing.assert_array_equal(what(what(w)).matrix, w.matrix)


class TestFullness:
    def test_example(self, w_example):
        f = assess_fullness(w_example)
        # A = span{e21, e22}: range is span{e2} only, but kernel is trivial
        assert not f.literal_right
        assert not f.nondeg_A_range
        assert f.nondeg_A_kernel
        assert f.nondeg_Ahat_range

    def test_identity_operator(self):
        f = assess_fullness(identity(space(2, 2)))
        assert not f.literal_right and not f.literal_left
        assert f.right_slice_rank == 1  # slices are multiples of I

    def test_scalar_case(self):
        f = assess_fullness(identity(space(1, 1)))
        assert f.literal_right and f.literal_left
        assert f.nondeg_A_range and f.nondeg_A_kernel
        assert f.nondeg_Ahat_range and f.nondeg_Ahat_kernel

    def test_annihilator_duality(self, corpus_fixtures):
        # literal_right iff left slices span all of B(H), independently
        from mpi_lab.tensor import all_left_slices

        for w in corpus_fixtures.values():
            n = w.space.legs[0].dim
            f = assess_fullness(w)
            stack = all_left_slices(w).reshape(n * n, n * n)
            rank = np.linalg.matrix_rank(stack, tol=1e-10)
            assert f.literal_right == (rank == n * n)

    def test_groups_nondegenerate(self, w_z2, w_z3):
        for w in (w_z2, w_z3):
            f = assess_fullness(w)
            assert f.nondeg_A_range and f.nondeg_A_kernel
            assert f.nondeg_Ahat_range and f.nondeg_Ahat_kernel


class TestConjugationInvariance:
    def test_verdicts_stable(self, small_corpus):
        rng = np.random.default_rng(123)
        for w in small_corpus.values():
            n = w.space.legs[0].dim
            u = corpus.random_unitary(n, rng)
            wc = corpus.conjugate_fixture(w, u)
            v0, v1 = check_mpi_axioms(w), check_mpi_axioms(wc)
            assert v0.passed == v1.passed
            assert v0.is_partial_isometry == v1.is_partial_isometry
            f0, f1 = assess_fullness(w), assess_fullness(wc)
            assert f0 == f1
