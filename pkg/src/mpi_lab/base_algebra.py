"""Base algebras N, L (and duals), the distinguished weight, and the
maps built from the canonical idempotent.

N and L are spanned by the slices of E = W*W; a distinguished weight is
a positive density D in N with (nu (x) id)(E) = 1.  From it come the
slice map gamma_N, the anti-isomorphism Rtilde = gamma_N o sigma_{-i/2},
the weight mu = nu o Rtilde^{-1} on L, and gamma_L.  kappa is recovered
independently as the minimum-norm solution of E(b (x) 1) = E(1 (x) x),
which gives a second route to gamma_N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import (
    PD_TOL,
    RANK_TOL,
    RESIDUAL_TOL,
    Operator,
    OperatorSubspace,
    TensorSpace,
    all_left_slices,
    all_right_slices,
    kron,
    lsq_solve,
    op_residual,
    pos_power,
    rel_residual,
    span_matrices,
    tensor_subspace,
)
from .axioms import what


@dataclass(frozen=True)
class BaseSpans:
    N: OperatorSubspace
    L: OperatorSubspace
    Nhat: OperatorSubspace
    Lhat: OperatorSubspace
    commutation_residual: float
    hat_commutation_residual: float
    L_equals_Lhat: bool
    L_Lhat_residual: float
    E_in_N_tensor_L: bool
    E_membership_residual: float
    Ehat_membership_residual: float
    star_residuals: dict[str, float]
    product_residuals: dict[str, float]


@dataclass(frozen=True)
class WeightData:
    """A positive functional x -> trace(D x) on a base algebra."""

    algebra: OperatorSubspace
    density: Operator
    min_eigenvalue: float
    solution_space_dim: int
    normalization_residual: float
    support: np.ndarray  # orthonormal columns spanning the algebra's range
    found: bool

    def value(self, x: Operator) -> complex:
        return complex(np.trace(x.matrix @ self.density.matrix))


@dataclass(frozen=True)
class BaseAntiIso:
    """A linear map between base spans, stored on HS coordinates."""

    domain: OperatorSubspace
    codomain: OperatorSubspace
    matrix: np.ndarray  # (codomain.dim, domain.dim)
    inverse: np.ndarray
    membership_residual: float
    invertibility: float  # smallest singular value of the coordinate matrix

    def apply(self, x: Operator) -> Operator:
        c = self.domain.coefficients(x)
        d = self.codomain.space.total_dim
        out = (self.matrix @ c) @ self.codomain.basis_matrix
        return Operator(self.codomain.space, out.reshape(d, d))

    def apply_inverse(self, y: Operator) -> Operator:
        c = self.codomain.coefficients(y)
        d = self.domain.space.total_dim
        out = (self.inverse @ c) @ self.domain.basis_matrix
        return Operator(self.domain.space, out.reshape(d, d))


def _slice_span(sp: TensorSpace, stack: np.ndarray) -> OperatorSubspace:
    return span_matrices(sp, stack.reshape(stack.shape[0], -1))


def base_spans(w: Operator) -> BaseSpans:
    """N, L from slices of E; N-hat, L-hat from slices of G (flipped)."""
    leg_sp = TensorSpace((w.space.legs[0],))
    e = w.adj @ w
    g = w @ w.adj
    n_sub = _slice_span(leg_sp, all_right_slices(e))
    l_sub = _slice_span(leg_sp, all_left_slices(e))
    # N-hat = right slices of E-hat = left slices of G, and vice versa
    nhat_sub = _slice_span(leg_sp, all_left_slices(g))
    lhat_sub = _slice_span(leg_sp, all_right_slices(g))

    def max_comm(a_sub, b_sub):
        return max(
            (
                rel_residual((x @ y).matrix, (y @ x).matrix)
                for x in a_sub.basis
                for y in b_sub.basis
            ),
            default=0.0,
        )

    comm = max_comm(n_sub, l_sub)
    hat_comm = max_comm(nhat_sub, lhat_sub)
    _, l_res = l_sub.equals(lhat_sub)
    _, e_res = tensor_subspace(n_sub, l_sub).contains(e)
    _, ehat_res = tensor_subspace(nhat_sub, lhat_sub).contains(
        what(w).adj @ what(w)
    )
    star = {}
    prod = {}
    for name, sub in (("N", n_sub), ("L", l_sub), ("Nhat", nhat_sub), ("Lhat", lhat_sub)):
        star[name] = sub.contains_all(b.adj for b in sub.basis)
        prod[name] = max(
            (sub.contains(x @ y)[1] for x in sub.basis for y in sub.basis),
            default=0.0,
        )
    return BaseSpans(
        N=n_sub,
        L=l_sub,
        Nhat=nhat_sub,
        Lhat=lhat_sub,
        commutation_residual=comm,
        hat_commutation_residual=hat_comm,
        L_equals_Lhat=l_res < RESIDUAL_TOL,
        L_Lhat_residual=l_res,
        E_in_N_tensor_L=e_res < RESIDUAL_TOL,
        E_membership_residual=e_res,
        Ehat_membership_residual=ehat_res,
        star_residuals=star,
        product_residuals=prod,
    )


# ---------------------------------------------------------------------------
# kappa: E(b (x) 1) = E(1 (x) kappa(b))
# ---------------------------------------------------------------------------


class KappaSolver:
    """Reusable minimum-norm solver for E(b (x) 1) = E(1 (x) x).

    The map x -> E(1 (x) x) and its SVD are computed once; each solve
    is then two small products.  Nullity 0 means solutions are unique;
    a residual above tolerance flags b as outside the solvable domain.
    """

    def __init__(self, w: Operator, rank_tol: float = RANK_TOL):
        self.leg = TensorSpace((w.space.legs[0],))
        self.n = w.space.legs[0].dim
        self.e = (w.adj @ w).matrix
        n = self.n
        cols = np.empty((n**4, n * n), dtype=complex)
        k = 0
        eye1 = np.eye(n)
        for mm in range(n):
            for ll in range(n):
                u = np.zeros((n, n))
                u[mm, ll] = 1.0
                cols[:, k] = (self.e @ np.kron(eye1, u)).ravel()
                k += 1
        self.map = cols
        u_f, s, vh = np.linalg.svd(cols, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            rank = 0
        else:
            rank = int(np.sum(s > rank_tol * s[0]))
        self._u = u_f[:, :rank]
        self._sinv = 1.0 / s[:rank] if rank else np.empty(0)
        self._vh = vh[:rank]
        self.nullity = n * n - rank

    def solve(self, b: Operator) -> tuple[Operator, float, int]:
        if b.space.nlegs != 1 or b.space.legs[0].dim != self.n:
            raise ValueError("b must be a single-leg operator matching W's legs")
        n = self.n
        rhs = (self.e @ np.kron(b.matrix, np.eye(n))).ravel()
        x = self._vh.conj().T @ ((self._u.conj().T @ rhs) * self._sinv)
        residual = float(np.linalg.norm(self.map @ x - rhs))
        return Operator(self.leg, x.reshape(n, n)), residual, self.nullity


def kappa_solve(
    w: Operator, b: Operator, rank_tol: float = RANK_TOL
) -> tuple[Operator, float, int]:
    """Minimum-norm solution x of E(b (x) 1) = E(1 (x) x)."""
    return KappaSolver(w, rank_tol).solve(b)


@dataclass(frozen=True)
class KappaMap:
    domain_basis: list[Operator]
    values: list[Operator]
    residuals: list[float]
    nullity: int
    antimultiplicativity: float


def kappa_map(
    w: Operator, n_sub: OperatorSubspace, solver: KappaSolver | None = None
) -> KappaMap:
    """kappa on a basis of N, plus the anti-multiplicativity residual
    over basis pairs (products solved independently)."""
    solver = solver or KappaSolver(w)
    basis = n_sub.basis
    values, residuals = [], []
    for b in basis:
        v, r, _ = solver.solve(b)
        values.append(v)
        residuals.append(r)
    anti = 0.0
    for i, b1 in enumerate(basis):
        for j, b2 in enumerate(basis):
            v12, r12, _ = solver.solve(b1 @ b2)
            if r12 < RESIDUAL_TOL and residuals[i] < RESIDUAL_TOL and residuals[j] < RESIDUAL_TOL:
                anti = max(anti, op_residual(v12, values[j] @ values[i]))
    return KappaMap(basis, values, residuals, solver.nullity, anti)


# ---------------------------------------------------------------------------
# Distinguished weight
# ---------------------------------------------------------------------------


def _hermitian_basis(sub: OperatorSubspace) -> list[np.ndarray]:
    """Real-orthonormal basis of the Hermitian part of a *-closed span."""
    cands = []
    for row in sub.basis_matrix:
        d = sub.space.total_dim
        b = row.reshape(d, d)
        cands.append((b + b.conj().T) / 2.0)
        cands.append((b - b.conj().T) / 2.0j)
    stack = np.array([np.concatenate([c.real.ravel(), c.imag.ravel()]) for c in cands])
    u, s, vh = np.linalg.svd(stack, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    d = sub.space.total_dim
    out = []
    for row in vh[:rank]:
        m = row[: d * d].reshape(d, d) + 1j * row[d * d :].reshape(d, d)
        out.append((m + m.conj().T) / 2.0)  # exact Hermitization
    return out


def support_projection(sub: OperatorSubspace) -> np.ndarray:
    """Orthonormal columns spanning sum of ranges of the basis elements.

    For a finite-dimensional *-closed algebra this spans the range of
    its unit.
    """
    d = sub.space.total_dim
    if sub.dim == 0:
        return np.zeros((d, 0), dtype=complex)
    stacked = np.hstack([row.reshape(d, d) for row in sub.basis_matrix])
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    return u[:, :rank]


def _left_slice_with_density(e: np.ndarray, n1: int, n2: int, dens: np.ndarray) -> np.ndarray:
    t = e.reshape(n1, n2, n1, n2)
    return np.einsum("ikjl,ji->kl", t, dens)


def _right_slice_with_density(e: np.ndarray, n1: int, n2: int, dens: np.ndarray) -> np.ndarray:
    t = e.reshape(n1, n2, n1, n2)
    return np.einsum("ikjl,lk->ij", t, dens)


def find_distinguished_weight(
    w: Operator,
    base: str = "N",
    pd_tol: float = PD_TOL,
    rank_tol: float = RANK_TOL,
) -> WeightData:
    """Solve (nu (x) id)(E) = 1 for a positive density D in the base span.

    base="N" works with E = W*W; base="Nhat" runs the same construction
    for the dual side (E-hat = Sigma G Sigma).  The minimal-norm
    solution of the real linear system is taken; if it is not positive
    definite on the support and the solution space has positive
    dimension, an alternating-projection repair onto the positive cone
    is attempted before reporting failure.
    """
    if base == "N":
        e_op = w.adj @ w
    elif base == "Nhat":
        wh = what(w)
        e_op = wh.adj @ wh
    else:
        raise ValueError("base must be 'N' or 'Nhat'")
    leg_sp = TensorSpace((w.space.legs[0],))
    sub = _slice_span(leg_sp, all_right_slices(e_op))
    n = leg_sp.legs[0].dim
    herm = _hermitian_basis(sub)
    if not herm:
        raise ValueError("base span is empty")
    # real system: sum_j t_j leftslice_{h_j}(E) = I
    cols = []
    for h in herm:
        sl = _left_slice_with_density(e_op.matrix, n, n, h)
        cols.append(np.concatenate([sl.real.ravel(), sl.imag.ravel()]))
    a = np.array(cols).T
    eye = np.eye(n)
    rhs = np.concatenate([eye.ravel(), np.zeros(n * n)])
    t, residual, nullity = lsq_solve(a, rhs, rank_tol)
    t = t.real
    d_mat = sum(tj * hj for tj, hj in zip(t, herm))
    supp = support_projection(sub)

    def min_eig(mat):
        if supp.shape[1] == 0:
            return 0.0
        return float(np.linalg.eigvalsh(supp.conj().T @ mat @ supp).min())

    me = min_eig(d_mat)
    if me <= pd_tol and nullity > 0:
        # the repair moves only along the solution space, so the
        # normalization residual is unchanged
        d_mat = _positivity_repair(a, rhs, t, herm, supp, rank_tol)
        me = min_eig(d_mat)
    found = residual < 1e-7 and me > pd_tol
    return WeightData(
        algebra=sub,
        density=Operator(leg_sp, d_mat),
        min_eigenvalue=me,
        solution_space_dim=nullity,
        normalization_residual=residual,
        support=supp,
        found=found,
    )


def _positivity_repair(a, rhs, t0, herm, supp, rank_tol, iters: int = 300):
    """Alternate between the affine solution set of the normalization
    system and the positive cone on the support."""
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    null_basis = vh[rank:]  # rows span the solution-space directions
    t = t0.copy()
    floor = 1e-6
    for _ in range(iters):
        d_mat = sum(tj * hj for tj, hj in zip(t, herm))
        if supp.shape[1]:
            core = supp.conj().T @ d_mat @ supp
            vals, vecs = np.linalg.eigh(core)
            if vals.min() > floor:
                break
            repaired = vecs @ np.diag(np.maximum(vals, floor)) @ vecs.conj().T
            d_rep = d_mat + supp @ (repaired - core) @ supp.conj().T
        else:
            d_rep = d_mat
        # project the repaired density back to the affine solution set
        t_rep = np.array(
            [np.real(np.vdot(h.ravel(), d_rep.ravel())) for h in herm]
        )
        t = t0 + null_basis.T @ (null_basis @ (t_rep - t0))
    return sum(tj * hj for tj, hj in zip(t, herm))


def modular_conjugate(weight: WeightData, z: complex, x: Operator) -> Operator:
    """sigma_z(x) = D^{iz} x D^{-iz}, with D padded by the identity off
    the algebra's support (positive definiteness is only required on
    the support)."""
    d = weight.density.matrix
    supp = weight.support
    full = np.eye(d.shape[0], dtype=complex)
    pad = d + (full - supp @ supp.conj().T) if supp.shape[1] < d.shape[0] else d
    p = Operator(weight.density.space, pad)
    left = pos_power(p, 1j * z)
    right = pos_power(p, -1j * z)
    return left @ x @ right


# ---------------------------------------------------------------------------
# gamma_N, Rtilde, mu, gamma_L
# ---------------------------------------------------------------------------


def gamma_n_apply(w: Operator, nu: WeightData, b: Operator) -> Operator:
    """gamma_N(b) = (nu (x) id)(E (b (x) 1))."""
    e = (w.adj @ w).matrix
    n = w.space.legs[0].dim
    prod = e @ np.kron(b.matrix, np.eye(n))
    out = _left_slice_with_density(prod, n, n, nu.density.matrix)
    return Operator(b.space, out)


@dataclass(frozen=True)
class BaseStructure:
    spans: BaseSpans
    nu: WeightData
    mu: WeightData
    rtilde: BaseAntiIso
    gamma_n_values: list[Operator]
    gamma_l_values: list[Operator]
    kappa: KappaMap
    kappa_solver: KappaSolver


def gamma_and_rtilde(
    w: Operator, nu: WeightData, l_sub: OperatorSubspace
) -> tuple[list[Operator], BaseAntiIso, WeightData, list[Operator]]:
    """Assemble gamma_N on the N basis, Rtilde = gamma_N o sigma_{-i/2},
    the weight mu = nu o Rtilde^{-1} on L, and gamma_L."""
    n_sub = nu.algebra
    leg_sp = n_sub.space
    gamma_vals = [gamma_n_apply(w, nu, b) for b in n_sub.basis]
    rt_vals = [
        gamma_n_apply(w, nu, modular_conjugate(nu, -0.5j, b)) for b in n_sub.basis
    ]
    membership = l_sub.contains_all(rt_vals)
    mat = np.array([l_sub.coefficients(v) for v in rt_vals]).T  # (dimL, dimN)
    sv = np.linalg.svd(mat, compute_uv=False)
    invertibility = float(sv.min()) if sv.size else 0.0
    if mat.shape[0] != mat.shape[1] or invertibility <= RANK_TOL * (sv.max() if sv.size else 1.0):
        raise ValueError("Rtilde is not invertible between the base spans")
    inv = np.linalg.inv(mat)
    rtilde = BaseAntiIso(n_sub, l_sub, mat, inv, membership, invertibility)

    # mu = nu o Rtilde^{-1}: density inside L solving trace(l_j D) = mu(l_j)
    herm = _hermitian_basis(l_sub)
    targets = np.array(
        [complex(np.trace((rtilde.apply_inverse(lj)).matrix @ nu.density.matrix)) for lj in l_sub.basis]
    )
    cols = []
    for h in herm:
        vals = np.array([np.trace(lj.matrix @ h) for lj in l_sub.basis])
        cols.append(np.concatenate([vals.real, vals.imag]))
    a = np.array(cols).T
    rhs = np.concatenate([targets.real, targets.imag])
    t, residual, nullity = lsq_solve(a, rhs)
    d_mu = sum(tj * hj for tj, hj in zip(t.real, herm))
    supp = support_projection(l_sub)
    me = (
        float(np.linalg.eigvalsh(supp.conj().T @ d_mu @ supp).min())
        if supp.shape[1]
        else 0.0
    )
    mu = WeightData(
        algebra=l_sub,
        density=Operator(leg_sp, d_mu),
        min_eigenvalue=me,
        solution_space_dim=nullity,
        normalization_residual=residual,
        support=supp,
        found=residual < 1e-7 and me > PD_TOL,
    )
    gamma_l_vals = [
        rtilde.apply_inverse(modular_conjugate(mu, -0.5j, c)) for c in l_sub.basis
    ]
    return gamma_vals, rtilde, mu, gamma_l_vals


def build_base_structure(w: Operator) -> BaseStructure:
    spans = base_spans(w)
    nu = find_distinguished_weight(w, "N")
    gamma_vals, rtilde, mu, gamma_l_vals = gamma_and_rtilde(w, nu, spans.L)
    solver = KappaSolver(w)
    kappa = kappa_map(w, spans.N, solver)
    return BaseStructure(
        spans, nu, mu, rtilde, gamma_vals, gamma_l_vals, kappa, solver
    )


# ---------------------------------------------------------------------------
# Separability-triple checks
# ---------------------------------------------------------------------------


def check_separability_triple(
    w: Operator,
    structure: BaseStructure,
    q: Operator | None = None,
    wtilde: Operator | None = None,
    t_samples=(1.0, -1.0, 0.3, -0.3),
) -> dict[str, float]:
    """Residuals for the weight/anti-isomorphism identities; the
    kappa-vs-Q checks run only when a manageability pair is supplied."""
    spans, nu, mu, rtilde = structure.spans, structure.nu, structure.mu, structure.rtilde
    e = (w.adj @ w).matrix
    n = w.space.legs[0].dim
    eye = np.eye(n)
    res: dict[str, float] = {}

    res["nu_normalization"] = rel_residual(
        _left_slice_with_density(e, n, n, nu.density.matrix), eye
    )
    res["mu_normalization"] = rel_residual(
        _right_slice_with_density(e, n, n, mu.density.matrix), eye
    )
    # (1 (x) c) E = (gamma_L(c) (x) 1) E over the L basis
    res["gamma_L_characterization"] = max(
        rel_residual(
            np.kron(eye, c.matrix) @ e, np.kron(gc.matrix, eye) @ e
        )
        for c, gc in zip(mu.algebra.basis, structure.gamma_l_values)
    )
    # (id (x) mu)((1 (x) c)E) = gamma_L(c)
    res["gamma_L_slice_formula"] = max(
        rel_residual(
            _right_slice_with_density(np.kron(eye, c.matrix) @ e, n, n, mu.density.matrix),
            gc.matrix,
        )
        for c, gc in zip(mu.algebra.basis, structure.gamma_l_values)
    )
    # gamma_N anti-multiplicative over basis pairs
    anti = 0.0
    for b1 in nu.algebra.basis:
        for b2 in nu.algebra.basis:
            lhs = gamma_n_apply(w, nu, b1 @ b2)
            rhs = gamma_n_apply(w, nu, b2) @ gamma_n_apply(w, nu, b1)
            anti = max(anti, op_residual(lhs, rhs))
    res["gamma_N_antimultiplicative"] = anti
    # polar identity gamma_N = Rtilde o sigma^nu_{i/2}
    res["gamma_N_polar"] = max(
        op_residual(
            gamma_n_apply(w, nu, b),
            rtilde.apply(modular_conjugate(nu, 0.5j, b)),
        )
        for b in nu.algebra.basis
    )
    # mu = nu o Rtilde^{-1}: trace(D_mu Rtilde(b)) = trace(D_nu b)
    res["mu_consistency"] = max(
        abs(
            complex(np.trace(mu.density.matrix @ rtilde.apply(b).matrix))
            - complex(np.trace(nu.density.matrix @ b.matrix))
        )
        / max(1.0, abs(complex(np.trace(nu.density.matrix @ b.matrix))))
        for b in nu.algebra.basis
    )
    # sigma^mu_t = Rtilde o sigma^nu_{-t} o Rtilde^{-1} at sampled t
    sig = 0.0
    for t in t_samples:
        for c in mu.algebra.basis:
            lhs = modular_conjugate(mu, t, c)
            rhs = rtilde.apply(modular_conjugate(nu, -t, rtilde.apply_inverse(c)))
            sig = max(sig, op_residual(lhs, rhs))
    res["sigma_mu_conjugation"] = sig
    # Rtilde is a *-anti-isomorphism
    res["rtilde_star"] = max(
        op_residual(rtilde.apply(b.adj), rtilde.apply(b).adj) for b in nu.algebra.basis
    )
    res["rtilde_antimultiplicative"] = max(
        op_residual(rtilde.apply(b1 @ b2), rtilde.apply(b2) @ rtilde.apply(b1))
        for b1 in nu.algebra.basis
        for b2 in nu.algebra.basis
    )

    if q is not None and wtilde is not None:
        res.update(_kappa_q_checks(w, structure, q, wtilde))
    return res


def _kappa_q_checks(
    w: Operator, structure: BaseStructure, q: Operator, wtilde: Operator
) -> dict[str, float]:
    """R_kappa = Q^{-1} kappa(.) Q is a *-anti-homomorphism with
    kappa = T o R_kappa = R_kappa o T, and kappa has the slice formula
    through Wtilde Wtilde*."""
    res: dict[str, float] = {}
    kap = structure.kappa
    solver = structure.kappa_solver
    qm = q.matrix
    qinv = np.linalg.inv(qm)
    leg = structure.nu.algebra.space

    def rk(val: Operator) -> Operator:
        return Operator(leg, qinv @ val.matrix @ qm)

    pairs = list(zip(kap.domain_basis, kap.values))
    # R_kappa(b*) = R_kappa(b)*, with kappa(b*) solved afresh
    star = 0.0
    for b, v in pairs:
        v_adj, r_adj, _ = solver.solve(b.adj)
        if r_adj < RESIDUAL_TOL:
            star = max(star, op_residual(rk(v_adj), rk(v).adj))
    res["rkappa_star"] = star
    anti = 0.0
    for b1, v1 in pairs:
        for b2, v2 in pairs:
            v12, r12, _ = solver.solve(b1 @ b2)
            if r12 < RESIDUAL_TOL:
                anti = max(anti, op_residual(rk(v12), rk(v2) @ rk(v1)))
    res["rkappa_antimultiplicative"] = anti
    # kappa = T o R_kappa and = R_kappa o T, T = Q(.)Q^{-1}
    tr_res = 0.0
    rt_res = 0.0
    for b, v in pairs:
        t_rk = Operator(leg, qm @ rk(v).matrix @ qinv)
        tr_res = max(tr_res, op_residual(v, t_rk))
        tb = Operator(leg, qm @ b.matrix @ qinv)
        v_tb, r_tb, _ = solver.solve(tb)
        if r_tb < RESIDUAL_TOL:
            rt_res = max(rt_res, op_residual(v, Operator(leg, qinv @ v_tb.matrix @ qm)))
    res["kappa_eq_T_Rkappa"] = tr_res
    res["kappa_eq_Rkappa_T"] = rt_res
    # slice formula: kappa(b_omega) = Q (omega^T (x) id)(Wt Wt*) Q^{-1}
    from .tensor import basis_functionals, slice_op

    e_op = w.adj @ w
    ww = wtilde @ wtilde.adj
    slice_form = 0.0
    for f in basis_functionals(w.space.legs[0]):
        b = slice_op(e_op, "right", f)
        val, r, _ = solver.solve(b)
        if r >= RESIDUAL_TOL:
            continue
        y = slice_op(ww, "left", f.transpose)
        expected = Operator(leg, qm @ y.matrix @ qinv)
        slice_form = max(slice_form, op_residual(val, expected))
    res["kappa_wtilde_formula"] = slice_form
    return res


# ---------------------------------------------------------------------------
# C*-bases B and C
# ---------------------------------------------------------------------------


def c_star_bases(
    w: Operator,
    a_space: OperatorSubspace,
    ahat_space: OperatorSubspace,
    rtilde: BaseAntiIso | None = None,
) -> tuple[OperatorSubspace, OperatorSubspace, dict[str, float]]:
    """B and C (slice spans of E) with the multiplier memberships of the
    base elements against A and A-hat, E as a multiplier of B (x) C, and
    the restricted anti-isomorphism's range."""
    leg_sp = TensorSpace((w.space.legs[0],))
    e_op = w.adj @ w
    g_op = w @ w.adj
    b_sub = _slice_span(leg_sp, all_right_slices(e_op))
    c_sub = _slice_span(leg_sp, all_left_slices(e_op))
    bhat_sub = _slice_span(leg_sp, all_left_slices(g_op))
    chat_sub = _slice_span(leg_sp, all_right_slices(g_op))
    res: dict[str, float] = {}
    res["b_x_in_A"] = max(
        a_space.contains(b @ x)[1] for b in b_sub.basis for x in a_space.basis
    )
    res["y_bhat_in_Ahat"] = max(
        ahat_space.contains(y @ bh)[1] for bh in bhat_sub.basis for y in ahat_space.basis
    )
    res["x_c_in_A"] = max(
        a_space.contains(x @ c)[1] for c in c_sub.basis for x in a_space.basis
    )
    res["c_y_in_Ahat"] = max(
        ahat_space.contains(c @ y)[1] for c in c_sub.basis for y in ahat_space.basis
    )
    res["x_chat_in_A"] = max(
        a_space.contains(x @ ch)[1] for ch in chat_sub.basis for x in a_space.basis
    )
    res["chat_y_in_Ahat"] = max(
        ahat_space.contains(ch @ y)[1] for ch in chat_sub.basis for y in ahat_space.basis
    )
    bc = tensor_subspace(b_sub, c_sub)
    res["E_mult_BC_left"] = max(
        bc.contains(e_op @ kron(x, y))[1] for x in b_sub.basis for y in c_sub.basis
    )
    res["E_mult_BC_right"] = max(
        bc.contains(kron(x, y) @ e_op)[1] for x in b_sub.basis for y in c_sub.basis
    )
    if rtilde is not None:
        res["R_onto_C"] = max(
            c_sub.contains(rtilde.apply(b))[1] for b in b_sub.basis
        )
        images = span_matrices(
            leg_sp, np.array([rtilde.apply(b).matrix.ravel() for b in b_sub.basis])
        )
        _, r = images.equals(c_sub)
        res["R_range_covers_C"] = r
    return b_sub, c_sub, res
