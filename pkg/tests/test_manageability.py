import numpy as np
import pytest

from mpi_lab.manageability import (
    build_wtilde,
    check_hash_identities,
    check_manageability,
    dual_manageability,
    inclusion_consequences,
    suggest_q,
)
from mpi_lab.tensor import (
    HBAR,
    Operator,
    identity,
    space,
)


def unit(n, i, j):
    m = np.zeros((n, n))
    m[i - 1, j - 1] = 1.0
    return m


@pytest.fixture(scope="module")
def q2():
    return identity(space(2))


class TestBuildWtilde:
    def test_example_reshuffle(self, w_example, q2):
        # hand reshuffle of the two entries: Wt = e12- (x) e11 + e22- (x) e22
        wt = build_wtilde(w_example, q2)
        expected = np.kron(unit(2, 1, 2), unit(2, 1, 1)) + np.kron(
            unit(2, 2, 2), unit(2, 2, 2)
        )
        np.testing.assert_allclose(wt.matrix, expected, atol=1e-14)
        assert wt.space.legs[0].flavor == HBAR
        assert wt.space.legs[1].flavor == "H"

    def test_identity(self):
        w = identity(space(2, 2))
        wt = build_wtilde(w, identity(space(2)))
        np.testing.assert_allclose(wt.matrix, np.eye(4), atol=1e-15)

    def test_z2_translation_form(self, w_z2, q2):
        # Wt = sum_g e_gg- (x) L_g: same 0/1 coefficients as W under the
        # bar identification (diagonal first-leg entries are symmetric)
        wt = build_wtilde(w_z2, q2)
        expected = np.zeros((4, 4))
        for g in range(2):
            for h in range(2):
                expected[g * 2 + (g + h) % 2, g * 2 + h] = 1.0
        np.testing.assert_allclose(wt.matrix, expected, atol=1e-14)

    def test_pairing_grid_fixed_random_q(self, w_pair2):
        # condition (2) holds on the full basis grid for ANY positive
        # diagonal Q commuting with W's pattern? No: the construction makes
        # the grid identity hold by definition whenever Q is positive; check
        # with a non-identity Q
        q = Operator(space(4), np.diag([1.0, 2.0, 0.5, 1.5]))
        wt = build_wtilde(w_pair2, q)
        n = 4
        eye = np.eye(n)
        qm = q.matrix
        qinv = np.linalg.inv(qm)
        worst = 0.0
        for xi in range(n):
            for eta in range(n):
                for v in range(n):
                    for u in range(n):
                        lhs = np.vdot(
                            np.kron(eye[eta], eye[u]),
                            w_pair2.matrix @ np.kron(eye[xi], eye[v]),
                        )
                        rhs = np.vdot(
                            np.kron(eye[xi], qm @ eye[u]),
                            wt.matrix @ np.kron(eye[eta], qinv @ eye[v]),
                        )
                        worst = max(worst, abs(lhs - rhs))
        assert worst < 1e-11

    def test_rejects_bad_q(self, w_example):
        with pytest.raises(ValueError):
            build_wtilde(w_example, Operator(space(2), np.diag([1.0, -1.0])))
        with pytest.raises(ValueError):
            build_wtilde(w_example, Operator(space(2), unit(2, 1, 2)))


class TestCertificate:
    def test_z2(self, w_z2, q2):
        cert = check_manageability(w_z2, q2)
        assert cert.passed
        assert all(r < 1e-12 for r in cert.residuals().values())

    def test_identity_trivial(self):
        cert = check_manageability(identity(space(2, 2)), identity(space(2)))
        assert cert.passed

    def test_example_certifies_with_identity(self, w_example, q2):
        # the 2x2 matrix-unit fixture turns out to be manageable with Q = 1
        # (recorded outcome of the certificate run; not claimed anywhere)
        cert = check_manageability(w_example, q2)
        assert cert.passed
        assert all(r < 1e-12 for r in cert.residuals().values())

    def test_group_groupoid_corpus(self, corpus_fixtures):
        for name, w in corpus_fixtures.items():
            if name == "pair_groupoid_3":
                continue  # covered in acceptance (slower grid)
            q = identity(space(w.space.legs[0].dim))
            cert = check_manageability(w, q)
            assert cert.passed, (name, cert.residuals())
            cons = inclusion_consequences(w, q)
            assert max(cons.values()) < 1e-12

    def test_flip_fails(self):
        from mpi_lab.tensor import flip

        cert = check_manageability(flip(2), identity(space(2)))
        assert not cert.passed


class TestHashIdentities:
    @pytest.mark.parametrize("name", ["group_z2", "group_z3", "two_z2"])
    def test_corpus(self, corpus_fixtures, name):
        w = corpus_fixtures[name]
        q = identity(space(w.space.legs[0].dim))
        wt = build_wtilde(w, q)
        res = check_hash_identities(w, q, wt)
        assert max(res.values()) < 1e-11, (name, res)

    def test_identity_all_zero(self):
        w = identity(space(2, 2))
        q = identity(space(2))
        res = check_hash_identities(w, q, build_wtilde(w, q))
        assert max(res.values()) < 1e-14

    def test_slice_identity_oracle_z2(self, w_z2, q2):
        # independent check of the slice/transpose identity by direct pairing:
        # (id (x) w_{v,u})(W)^T entry (a,b) = <W(e_b (x) v), e_a-bar-pair...>
        wt = build_wtilde(w_z2, q2)
        rng = np.random.default_rng(3)
        v = rng.standard_normal(2)
        u = rng.standard_normal(2)
        from mpi_lab.tensor import slice_op, transpose_op, vector_functional

        lhs = slice_op(wt, "right", vector_functional(v, u))  # Q = 1
        rhs = transpose_op(slice_op(w_z2, "right", vector_functional(v, u)))
        np.testing.assert_allclose(lhs.matrix, rhs.matrix, atol=1e-12)


class TestDualManageability:
    @pytest.mark.parametrize("name", ["group_z2", "group_z3", "pair_groupoid_2"])
    def test_formula_matches_construction(self, corpus_fixtures, name):
        w = corpus_fixtures[name]
        q = identity(space(w.space.legs[0].dim))
        wt = build_wtilde(w, q)
        cert, formula_res = dual_manageability(w, q, wt)
        assert cert.passed
        assert formula_res < 1e-12

    def test_identity(self):
        w = identity(space(2, 2))
        q = identity(space(2))
        cert, res = dual_manageability(w, q, build_wtilde(w, q))
        assert cert.passed and res == 0.0


class TestTypedLegSafety:
    def test_wtilde_composition_requires_matching_flavors(self, w_z2, q2):
        # Wt lives on Hbar (x) H; embedding it on plain H legs, or the
        # double transpose of W on an H leg, must fail loudly
        from mpi_lab.tensor import LegMismatchError, TensorSpace, embed, transpose_op
        from mpi_lab.tensor import LegSpec, HBAR

        wt = build_wtilde(w_z2, q2)
        h = LegSpec(2, "H")
        hb = LegSpec(2, HBAR)
        with pytest.raises(LegMismatchError):
            embed(wt, [1, 3], TensorSpace((h, h, h)))
        wtop = transpose_op(w_z2)
        with pytest.raises(LegMismatchError):
            embed(wtop, [1, 2], TensorSpace((h, h, hb)))
        # and the correctly-typed ambient accepts both
        amb = TensorSpace((hb, hb, h))
        embed(wt, [1, 3], amb)
        embed(wtop, [1, 2], amb)


class TestSuggestQ:
    def test_z2_contains_identity(self, w_z2):
        cands = suggest_q(w_z2)
        assert any(
            np.allclose(c.matrix, np.eye(2)) for c in cands
        )
        verdicts = [check_manageability(w_z2, c).passed for c in cands]
        assert any(verdicts)

    def test_identity_w(self):
        cands = suggest_q(identity(space(2, 2)))
        assert np.allclose(cands[0].matrix, np.eye(2))

    def test_example_candidates_recorded(self, w_example):
        cands = suggest_q(w_example)
        assert np.allclose(cands[0].matrix, np.eye(2))
        outcomes = {
            i: check_manageability(w_example, c).passed for i, c in enumerate(cands)
        }
        # identity certifies for this fixture
        assert outcomes[0]

    def test_candidates_satisfy_cond1(self, w_pair2):
        for c in suggest_q(w_pair2):
            qq = np.kron(c.matrix, c.matrix)
            assert (
                np.linalg.norm(w_pair2.matrix @ qq - qq @ w_pair2.matrix) < 1e-9
            )
