"""Manageability: the positive operator Q and the companion Wtilde.

Wtilde on Hbar (x) H is pinned down entrywise by the characterizing
pairing <W(xi (x) v), eta (x) u> = <Wt(eta-bar (x) Q^{-1}v), xi-bar (x) Qu>:
it is the partial transpose on the first leg of (1 (x) Q^{-1}) W (1 (x) Q).
The certificate evaluates the commutation condition, both composability
identities on the typed three-leg spaces, the characterizing grid, and
the Q^{it} covariances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .axioms import what
from .tensor import (
    PD_TOL,
    RESIDUAL_TOL,
    HBAR,
    LegSpec,
    Operator,
    TensorSpace,
    chain,
    identity,
    op_residual,
    pos_power,
    rel_residual,
    slice_op,
    swap_legs,
    transpose_op,
)


@dataclass(frozen=True)
class ManageabilityCertificate:
    q: Operator
    wtilde: Operator
    residual_cond1: float
    residual_cond2_grid: float
    residual_cond3a: float
    residual_cond3b: float
    residual_alt_char: float
    residual_qit_covariance: float
    residual_qit_covariance_wtilde: float
    passed: bool

    def residuals(self) -> dict[str, float]:
        return {
            "cond1_commutation": self.residual_cond1,
            "cond2_grid": self.residual_cond2_grid,
            "cond3a": self.residual_cond3a,
            "cond3b": self.residual_cond3b,
            "alt_characterization": self.residual_alt_char,
            "qit_covariance_W": self.residual_qit_covariance,
            "qit_covariance_Wtilde": self.residual_qit_covariance_wtilde,
        }


def _check_q(w: Operator, q: Operator, pd_tol: float = PD_TOL) -> None:
    if q.space.nlegs != 1 or q.space.legs[0] != w.space.legs[0]:
        raise ValueError("Q must be a single-leg positive operator on W's leg")
    m = q.matrix
    if np.linalg.norm(m - m.conj().T) > 1e-10 * max(1.0, np.linalg.norm(m)):
        raise ValueError("Q must be Hermitian")
    if np.linalg.eigvalsh(m).min() <= pd_tol:
        raise ValueError("Q must be positive definite")


def build_wtilde(w: Operator, q: Operator) -> Operator:
    """Partial transpose on leg 1 of (1 (x) Q^{-1}) W (1 (x) Q), living
    on Hbar (x) H: the unique bounded solution of the characterizing
    equation in finite dimension."""
    _check_q(w, q)
    n = w.space.legs[0].dim
    qm = q.matrix
    qinv = np.linalg.inv(qm)
    x = np.kron(np.eye(n), qinv) @ w.matrix @ np.kron(np.eye(n), qm)
    t = x.reshape(n, n, n, n)
    # Wt_{(a,d),(b,c)} = X_{(b,d),(a,c)}
    wt = np.einsum("bdac->adbc", t).reshape(n * n, n * n)
    leg = w.space.legs[0]
    sp = TensorSpace((LegSpec(leg.dim, HBAR), leg))
    return Operator(sp, wt)


def _grid_residual(w: Operator, q: Operator, wt: Operator, alt: bool) -> float:
    """Max gap of the characterizing pairing over the full basis grid.

    alt=False: <W(xi (x) v), eta (x) u> = <Wt(eta- (x) Q^{-1}v), xi- (x) Qu>
    alt=True:  <W(xi (x) v), eta (x) u> = <Wt(Q^{-T}eta- (x) v), Q^T xi- (x) u>
    for xi, eta, v, u running over the standard basis (where the
    conjugation map fixes the coordinates).  All n^4 pairings are
    evaluated at once; the left side is just W's entry grid.
    """
    n = w.space.legs[0].dim
    qm = q.matrix
    qinv = np.linalg.inv(qm)
    lhs = w.matrix.reshape(n, n, n, n)  # [eta, u, xi, v]
    t = wt.matrix.reshape(n, n, n, n)
    if not alt:
        rhs = np.einsum("xdec,du,cv->euxv", t, qm.conj(), qinv)
    else:
        rhs = np.einsum("aubv,ax,be->euxv", t, qm.T.conj(), qinv.T)
    return float(np.max(np.abs(lhs - rhs)))


def check_manageability(
    w: Operator, q: Operator, tol: float = RESIDUAL_TOL
) -> ManageabilityCertificate:
    """Build Wtilde and evaluate the full manageability apparatus."""
    _check_q(w, q)
    wt = build_wtilde(w, q)
    n = w.space.legs[0].dim
    qq = np.kron(q.matrix, q.matrix)
    cond1 = rel_residual(w.matrix @ qq, qq @ w.matrix)
    cond2 = _grid_residual(w, q, wt, alt=False)
    alt_char = _grid_residual(w, q, wt, alt=True)

    leg_h = w.space.legs[0]
    leg_hb = LegSpec(n, HBAR)
    wtop = transpose_op(w)  # on Hbar (x) Hbar
    # cond 3a on Hbar (x) Hbar (x) H
    amb_a = TensorSpace((leg_hb, leg_hb, leg_h))
    lhs = chain(amb_a, (wt, [1, 3]), (wt, [2, 3]), (wt.adj, [2, 3]))
    rhs = chain(amb_a, (wtop, [1, 2]), (wtop.adj, [1, 2]), (wt, [1, 3]))
    cond3a = op_residual(lhs, rhs)
    # cond 3b on Hbar (x) H (x) H
    amb_b = TensorSpace((leg_hb, leg_h, leg_h))
    lhs = chain(amb_b, (w, [2, 3]), (w.adj, [2, 3]), (wt, [1, 3]))
    rhs = chain(amb_b, (wt, [1, 3]), (wt, [1, 2]), (wt.adj, [1, 2]))
    cond3b = op_residual(lhs, rhs)

    qit_w = 0.0
    qit_wt = 0.0
    for t in (1.0, -1.0, 0.3, -0.3):
        qt = pos_power(q, 1j * t).matrix
        qmt = pos_power(q, -1j * t).matrix
        qq_t = np.kron(qt, qt)
        qq_mt = np.kron(qmt, qmt)
        qit_w = max(qit_w, rel_residual(qq_t @ w.matrix @ qq_mt, w.matrix))
        # ([Q^T]^{-it} (x) Q^{it}) Wt ([Q^T]^{it} (x) Q^{-it}) = Wt
        qt_t = pos_power(Operator(q.space, q.matrix.T), 1j * t).matrix
        qt_mt = pos_power(Operator(q.space, q.matrix.T), -1j * t).matrix
        lhs_wt = np.kron(qt_mt, qt) @ wt.matrix @ np.kron(qt_t, qmt)
        qit_wt = max(qit_wt, rel_residual(lhs_wt, wt.matrix))

    passed = all(
        r < tol
        for r in (cond1, cond2, cond3a, cond3b, alt_char, qit_w, qit_wt)
    )
    return ManageabilityCertificate(
        q=q,
        wtilde=wt,
        residual_cond1=cond1,
        residual_cond2_grid=cond2,
        residual_cond3a=cond3a,
        residual_cond3b=cond3b,
        residual_alt_char=alt_char,
        residual_qit_covariance=qit_w,
        residual_qit_covariance_wtilde=qit_wt,
        passed=passed,
    )


def check_hash_identities(
    w: Operator, q: Operator, wt: Operator
) -> dict[str, float]:
    """The three composability identities on Hbar (x) Hbar (x) H and the
    slice/transpose identity over the basis grid."""
    n = w.space.legs[0].dim
    leg_h = w.space.legs[0]
    leg_hb = LegSpec(n, HBAR)
    wtop = transpose_op(w)
    amb = TensorSpace((leg_hb, leg_hb, leg_h))
    res: dict[str, float] = {}
    lhs = chain(amb, (wtop, [1, 2]), (wt, [2, 3]), (wtop.adj, [1, 2]))
    rhs = chain(amb, (wt, [1, 3]), (wt, [2, 3]))
    res["hash1"] = op_residual(lhs, rhs)
    lhs = chain(amb, (wtop.adj, [1, 2]), (wtop, [1, 2]), (wt, [2, 3]))
    rhs = chain(amb, (wt, [2, 3]), (wtop.adj, [1, 2]), (wtop, [1, 2]))
    res["hash2"] = op_residual(lhs, rhs)
    lhs = chain(amb, (wt, [2, 3]), (wtop.adj, [1, 2]), (wt.adj, [2, 3]))
    rhs = chain(amb, (wtop.adj, [1, 2]), (wt, [1, 3]))
    res["hash3"] = op_residual(lhs, rhs)

    # (id (x) w_{Q^{-1}v, Qu})(Wt) = [(id (x) w_{v,u})(W)]^T over the grid
    qm = q.matrix
    qinv = np.linalg.inv(qm)
    eye = np.eye(n)
    worst = 0.0
    for vv in range(n):
        for uu in range(n):
            from .tensor import vector_functional

            f_w = vector_functional(eye[vv], eye[uu])
            f_wt = vector_functional(qinv @ eye[vv], qm @ eye[uu])
            lhs_m = slice_op(wt, "right", f_wt)
            rhs_m = transpose_op(slice_op(w, "right", f_w))
            worst = max(worst, np.linalg.norm(lhs_m.matrix - rhs_m.matrix))
    res["slice_transpose_identity"] = worst
    return res


def dual_manageability(
    w: Operator, q: Operator, wt: Operator
) -> tuple[ManageabilityCertificate, float]:
    """Certificate for W-hat with the same Q, plus the residual between
    the formula candidate (Sigma Wt* Sigma)^{T (x) T} and the direct
    construction."""
    wh = what(w)
    cert = check_manageability(wh, q)
    candidate = transpose_op(swap_legs(wt.adj))
    direct = build_wtilde(wh, q)
    formula_residual = float(np.linalg.norm(candidate.matrix - direct.matrix))
    return cert, formula_residual


def inclusion_consequences(w: Operator, q: Operator) -> dict[str, float]:
    """(Q (x) Q)E = E(Q (x) Q)E and the same for G, consequences of the
    commutation condition."""
    e = (w.adj @ w).matrix
    g = (w @ w.adj).matrix
    qq = np.kron(q.matrix, q.matrix)
    return {
        "QQE_consequence": rel_residual(qq @ e, e @ qq @ e),
        "QQG_consequence": rel_residual(qq @ g, g @ qq @ g),
    }


def suggest_q(w: Operator, max_candidates: int = 8) -> list[Operator]:
    """Heuristic Q candidates: the identity, plus positive diagonal
    matrices whose log-diagonals solve the commutation constraint.

    Each nonzero entry W_{(i,k),(j,l)} forces
    log q_i + log q_k - log q_j - log q_l = 0; the null space of the
    constraint matrix parametrizes all valid diagonal candidates.
    The caller certifies each candidate via check_manageability.
    """
    n = w.space.legs[0].dim
    leg_sp = TensorSpace((w.space.legs[0],))
    cands = [identity(leg_sp)]
    t = w.matrix.reshape(n, n, n, n)
    rows = []
    for i in range(n):
        for k in range(n):
            for j in range(n):
                for l in range(n):
                    if abs(t[i, k, j, l]) > 1e-12:
                        row = np.zeros(n)
                        row[i] += 1.0
                        row[k] += 1.0
                        row[j] -= 1.0
                        row[l] -= 1.0
                        if np.any(row):
                            rows.append(row)
    if rows:
        a = np.array(rows)
        _, s, vh = np.linalg.svd(a, full_matrices=True)
        rank = int(np.sum(s > 1e-10 * s[0])) if s.size and s[0] > 0 else 0
        null = vh[rank:]
    else:
        null = np.eye(n)
    for row in null:
        if np.linalg.norm(row - row.mean()) < 1e-12:
            continue  # constant shifts rescale Q, already covered by I
        for scale in (1.0, 0.5):
            d = np.exp(scale * row)
            cands.append(Operator(leg_sp, np.diag(d)))
            if len(cands) >= max_candidates:
                return cands
    return cands
