"""Typed tensor-space linear algebra.

Operators live on an ordered list of legs, each a copy of C^d flavored
either ``H`` or ``Hbar`` (the conjugate space).  The conjugate space is
stored concretely as C^d with entrywise-conjugated coordinates, so the
transpose of an operator is the plain matrix transpose with the flavor
tag flipped.  Basis vectors of a multi-leg space are flattened C-order:
e_i (x) e_k maps to index i*n2 + k, first leg most significant, 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

H = "H"
HBAR = "Hbar"

#: default relative-residual tolerance (Frobenius, denominator max(1, ||lhs||))
RESIDUAL_TOL = 1e-9
#: singular values below rank_tol * sigma_max are treated as zero
RANK_TOL = 1e-10
#: eigenvalues below this are not accepted as positive
PD_TOL = 1e-12


class LegMismatchError(ValueError):
    """Raised when leg dimensions or flavors do not line up."""


@dataclass(frozen=True)
class LegSpec:
    """One tensor leg: a copy of C^dim, flavored H or Hbar."""

    dim: int
    flavor: str = H

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"leg dimension must be >= 1, got {self.dim}")
        if self.flavor not in (H, HBAR):
            raise ValueError(f"flavor must be '{H}' or '{HBAR}', got {self.flavor!r}")

    @property
    def conjugate(self) -> "LegSpec":
        return LegSpec(self.dim, HBAR if self.flavor == H else H)


@dataclass(frozen=True)
class TensorSpace:
    """Ordered tensor product of legs."""

    legs: tuple[LegSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(self.legs))

    @property
    def total_dim(self) -> int:
        d = 1
        for leg in self.legs:
            d *= leg.dim
        return d

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(leg.dim for leg in self.legs)

    @property
    def nlegs(self) -> int:
        return len(self.legs)

    def conjugate(self) -> "TensorSpace":
        return TensorSpace(tuple(leg.conjugate for leg in self.legs))


def space(*dims: int, flavors: Sequence[str] | None = None) -> TensorSpace:
    """Build a TensorSpace from dimensions, all legs flavor H by default."""
    if flavors is None:
        flavors = [H] * len(dims)
    if len(flavors) != len(dims):
        raise ValueError("flavors and dims must have equal length")
    return TensorSpace(tuple(LegSpec(d, f) for d, f in zip(dims, flavors)))


@dataclass(frozen=True, eq=False)
class Operator:
    """A square complex matrix on a typed tensor space."""

    space: TensorSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.space.total_dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match space dim {d}")
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    # -- arithmetic -------------------------------------------------------
    def _check_same_space(self, other: "Operator"):
        if self.space != other.space:
            raise LegMismatchError("operators live on different tensor spaces")

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    @property
    def adj(self) -> "Operator":
        """Adjoint (conjugate transpose); flavors unchanged."""
        return Operator(self.space, self.matrix.conj().T)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def tensor(self) -> np.ndarray:
        """View of the matrix as a tensor: row legs then column legs."""
        dims = self.space.dims
        return self.matrix.reshape(dims + dims)


def identity(sp: TensorSpace) -> Operator:
    return Operator(sp, np.eye(sp.total_dim, dtype=complex))


def rel_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Relative Frobenius gap ||lhs - rhs|| / max(1, ||lhs||)."""
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(lhs)))


def op_residual(lhs: Operator, rhs: Operator) -> float:
    if lhs.space != rhs.space:
        raise LegMismatchError("residual of operators on different spaces")
    return rel_residual(lhs.matrix, rhs.matrix)


# ---------------------------------------------------------------------------
# Functionals
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Functional:
    """Linear functional on one leg, w(T) = trace(T . density)."""

    leg: LegSpec
    density: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.density, dtype=complex)
        if f.shape != (self.leg.dim, self.leg.dim):
            raise ValueError("density shape does not match leg dimension")
        f = np.ascontiguousarray(f)
        f.setflags(write=False)
        object.__setattr__(self, "density", f)

    def __call__(self, t: np.ndarray | Operator) -> complex:
        m = t.matrix if isinstance(t, Operator) else np.asarray(t)
        return complex(np.trace(m @ self.density))

    @property
    def transpose(self) -> "Functional":
        """w^T on the conjugate leg: w^T(m^T) = w(m); density F^t."""
        return Functional(self.leg.conjugate, self.density.T)

    @property
    def conjugate(self) -> "Functional":
        """w-bar(T) = conj(w(T*)); density F*."""
        return Functional(self.leg, self.density.conj().T)


def vector_functional(a: np.ndarray, b: np.ndarray, flavor: str = H) -> Functional:
    """The functional w_{a,b}(T) = <Ta, b>; density a b^*."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise ValueError("vectors must share a dimension")
    return Functional(LegSpec(len(a), flavor), np.outer(a, b.conj()))


def basis_functionals(leg: LegSpec) -> list[Functional]:
    """All n^2 functionals w_{e_a, e_b}, ordered (a, b) C-order."""
    n = leg.dim
    eye = np.eye(n)
    return [
        Functional(leg, np.outer(eye[a], eye[b]))
        for a in range(n)
        for b in range(n)
    ]


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def kron(x: Operator, y: Operator) -> Operator:
    """Kronecker product; result legs are x's legs followed by y's."""
    sp = TensorSpace(x.space.legs + y.space.legs)
    return Operator(sp, np.kron(x.matrix, y.matrix))


def flip(n: int, flavor: str = H) -> Operator:
    """The flip Sigma on leg (x) leg sending e_i (x) e_k to e_k (x) e_i."""
    if n < 1:
        raise ValueError("n must be >= 1")
    leg = LegSpec(n, flavor)
    sp = TensorSpace((leg, leg))
    m = np.zeros((n * n, n * n))
    for i in range(n):
        for k in range(n):
            m[k * n + i, i * n + k] = 1.0
    return Operator(sp, m)


def swap_legs(x: Operator) -> Operator:
    """Conjugate a two-leg operator by the flip: Sigma X Sigma, legs swapped.

    Valid for any flavor combination (Sigma here is the typed flip
    H1 (x) H2 -> H2 (x) H1), so the result lives on the swapped space.
    """
    if x.space.nlegs != 2:
        raise LegMismatchError("swap_legs needs a two-leg operator")
    t = x.tensor()
    # [Sigma X Sigma]_{(k,i),(l,j)} = X_{(i,k),(j,l)}
    swapped = t.transpose(1, 0, 3, 2)
    sp = TensorSpace((x.space.legs[1], x.space.legs[0]))
    d = sp.total_dim
    return Operator(sp, swapped.reshape(d, d))


def transpose_op(m: Operator) -> Operator:
    """Transpose in the fixed basis; every leg flavor flips H <-> Hbar.

    On a single leg this is the conjugate-space transpose m^T with
    m^T(xi-bar) = (m* xi)-bar; on several legs it is the leg-wise
    transpose (an anti-homomorphism, involutive).
    """
    return Operator(m.space.conjugate(), m.matrix.T)


def embed(x: Operator, legs: Sequence[int], ambient: TensorSpace) -> Operator:
    """Embed x into ambient acting on the listed legs, identity elsewhere.

    Legs are numbered from 1 in ambient order (standard leg notation:
    ``embed(w, [1, 3], ...)`` is W_13).  Flavors and dimensions of x's
    legs must match the ambient legs at the listed positions.
    """
    legs = list(legs)
    _check_embedding(x, legs, ambient)
    L = ambient.nlegs
    dims = ambient.dims
    rest = [p for p in range(1, L + 1) if p not in legs]
    order = legs + rest
    rest_dim = 1
    for p in rest:
        rest_dim *= dims[p - 1]
    big = np.kron(x.matrix, np.eye(rest_dim, dtype=complex))
    # big acts with leg ordering `order`; permute axes back to ambient order
    ordered_dims = tuple(dims[p - 1] for p in order)
    t = big.reshape(ordered_dims + ordered_dims)
    pos = {p: k for k, p in enumerate(order)}
    out_axes = [pos[p] for p in range(1, L + 1)]
    in_axes = [L + a for a in out_axes]
    d = ambient.total_dim
    return Operator(ambient, t.transpose(out_axes + in_axes).reshape(d, d))


def _check_embedding(x: Operator, legs: Sequence[int], ambient: TensorSpace):
    if len(set(legs)) != len(legs):
        raise LegMismatchError("target legs must be distinct")
    if len(legs) != x.space.nlegs:
        raise LegMismatchError("number of target legs must match operator legs")
    for xleg, p in zip(x.space.legs, legs):
        if not 1 <= p <= ambient.nlegs:
            raise LegMismatchError(f"target leg {p} outside ambient space")
        if ambient.legs[p - 1] != xleg:
            raise LegMismatchError(
                f"leg {p}: ambient {ambient.legs[p - 1]} != operator {xleg}"
            )


def embedded_mul(
    x: Operator, legs: Sequence[int], m: Operator, side: str = "left"
) -> Operator:
    """embed(x, legs) @ m (side='left') or m @ embed(x, legs) (side='right').

    Contracts directly on the tensor indices, avoiding the full
    D x D x D matrix product; equals the embedded matrix product exactly.
    """
    legs = list(legs)
    _check_embedding(x, legs, m.space)
    dims = m.space.dims
    L = m.space.nlegs
    d = m.space.total_dim
    k = len(legs)
    xdims = x.space.dims
    xt = x.matrix.reshape(xdims + xdims)
    if side == "left":
        mt = m.matrix.reshape(dims + (d,))
        # contract x column axes with m row axes at `legs`
        res = np.tensordot(xt, mt, axes=(list(range(k, 2 * k)), [p - 1 for p in legs]))
        # res axes: x-out legs (order `legs`), remaining m row legs, col
        rest = [p for p in range(1, L + 1) if p not in legs]
        axis_of = {p: i for i, p in enumerate(legs)}
        axis_of.update({p: k + i for i, p in enumerate(rest)})
        res = res.transpose([axis_of[p] for p in range(1, L + 1)] + [L])
        return Operator(m.space, np.ascontiguousarray(res.reshape(d, d)))
    elif side == "right":
        mt = m.matrix.reshape((d,) + dims)
        # contract m column axes at `legs` with x row axes
        res = np.tensordot(mt, xt, axes=([p for p in legs], list(range(k))))
        # res axes: row flat, remaining m col legs, x-in legs (order `legs`)
        rest = [p for p in range(1, L + 1) if p not in legs]
        axis_of = {p: 1 + len(rest) + i for i, p in enumerate(legs)}
        axis_of.update({p: 1 + i for i, p in enumerate(rest)})
        res = res.transpose([0] + [axis_of[p] for p in range(1, L + 1)])
        return Operator(m.space, np.ascontiguousarray(res.reshape(d, d)))
    raise ValueError("side must be 'left' or 'right'")


def chain(ambient: TensorSpace, *factors: tuple[Operator, Sequence[int]]) -> Operator:
    """Product of embedded operators, right-to-left: chain(sp, (A,[1,2]), (B,[2,3]))
    is embed(A,[1,2]) @ embed(B,[2,3])."""
    if not factors:
        return identity(ambient)
    op, legs = factors[-1]
    acc = embed(op, legs, ambient)
    for op, legs in reversed(factors[:-1]):
        acc = embedded_mul(op, list(legs), acc, side="left")
    return acc


def slice_op(x: Operator, side: str, w: Functional) -> Operator:
    """Slice a two-leg operator against a functional on one leg.

    right: (id (x) w)(X), the partial trace over leg 2 of X (1 (x) F);
    left: (w (x) id)(X), the partial trace over leg 1 of X (F (x) 1).
    """
    if x.space.nlegs != 2:
        raise LegMismatchError("slice_op needs a two-leg operator")
    t = x.tensor()
    if side == "right":
        if w.leg != x.space.legs[1]:
            raise LegMismatchError("functional leg does not match leg 2")
        out = np.einsum("ikjl,lk->ij", t, w.density)
        return Operator(TensorSpace((x.space.legs[0],)), out)
    elif side == "left":
        if w.leg != x.space.legs[0]:
            raise LegMismatchError("functional leg does not match leg 1")
        out = np.einsum("ikjl,ji->kl", t, w.density)
        return Operator(TensorSpace((x.space.legs[1],)), out)
    raise ValueError("side must be 'left' or 'right'")


def kron_stack(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """All Kronecker products of two stacks: (K,n,n) x (L,m,m) ->
    (K*L, n*m, n*m), ordered K-major."""
    k, n, _ = xs.shape
    l, m, _ = ys.shape
    out = np.einsum("aik,bjl->abijkl", xs, ys)
    return out.reshape(k * l, n * m, n * m)


def stack_right_slices(stack: np.ndarray, n1: int, n2: int) -> np.ndarray:
    """Right block-slices of a stack of two-leg operators:
    (K, n1*n2, n1*n2) -> (K, n2*n2, n1, n1), slice order (a, b) C-order."""
    k = stack.shape[0]
    t = stack.reshape(k, n1, n2, n1, n2)
    return np.einsum("sibja->sabij", t).reshape(k, n2 * n2, n1, n1)


def stack_left_slices(stack: np.ndarray, n1: int, n2: int) -> np.ndarray:
    """Left block-slices of a stack of two-leg operators:
    (K, n1*n2, n1*n2) -> (K, n1*n1, n2, n2)."""
    k = stack.shape[0]
    t = stack.reshape(k, n1, n2, n1, n2)
    return np.einsum("sbkal->sabkl", t).reshape(k, n1 * n1, n2, n2)


def all_right_slices(x: Operator) -> np.ndarray:
    """Stack of (id (x) w_{e_a,e_b})(X) over all (a, b), shape (n2^2, n1, n1).

    Row order matches basis_functionals: index a*n2 + b.
    """
    t = x.tensor()
    n1 = x.space.legs[0].dim
    s = np.einsum("ibja->abij", t)
    return s.reshape(-1, n1, n1)


def all_left_slices(x: Operator) -> np.ndarray:
    """Stack of (w_{e_a,e_b} (x) id)(X) over all (a, b), shape (n1^2, n2, n2)."""
    t = x.tensor()
    n2 = x.space.legs[1].dim
    s = np.einsum("bkal->abkl", t)
    return s.reshape(-1, n2, n2)


def pos_power(p: Operator, z: complex, pd_tol: float = PD_TOL) -> Operator:
    """p^z for Hermitian positive-definite p, via eigendecomposition."""
    m = p.matrix
    herm_gap = np.linalg.norm(m - m.conj().T)
    if herm_gap > 1e-10 * max(1.0, np.linalg.norm(m)):
        raise ValueError("pos_power requires a Hermitian operator")
    vals, vecs = np.linalg.eigh(m)
    if vals.min() <= pd_tol:
        raise ValueError(f"operator not positive definite (min eig {vals.min():.3e})")
    powered = vecs @ np.diag(np.exp(z * np.log(vals))) @ vecs.conj().T
    return Operator(p.space, powered)


# ---------------------------------------------------------------------------
# Operator subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OperatorSubspace:
    """Hilbert-Schmidt-orthonormal basis of a linear space of operators."""

    space: TensorSpace
    basis_matrix: np.ndarray  # (dim, D*D), rows are vec'd basis elements
    singular_values: np.ndarray = field(default_factory=lambda: np.array([]))

    def __post_init__(self):
        object.__setattr__(self, "_basis_conj_t", self.basis_matrix.conj().T)

    @property
    def dim(self) -> int:
        return self.basis_matrix.shape[0]

    @property
    def basis(self) -> list[Operator]:
        d = self.space.total_dim
        return [Operator(self.space, row.reshape(d, d)) for row in self.basis_matrix]

    def coefficients(self, x: Operator) -> np.ndarray:
        """HS inner products <x, b_i>."""
        if x.space != self.space:
            raise LegMismatchError("operator lives on a different space")
        return x.matrix.ravel() @ self._basis_conj_t

    def project(self, x: Operator) -> Operator:
        c = self.coefficients(x)
        d = self.space.total_dim
        return Operator(self.space, (c @ self.basis_matrix).reshape(d, d))

    def contains(self, x: Operator) -> tuple[bool, float]:
        """Membership test: residual of the orthogonal projection."""
        if x.space != self.space:
            raise LegMismatchError("operator lives on a different space")
        v = x.matrix.ravel()
        c = v @ self._basis_conj_t
        res = float(np.linalg.norm(v - c @ self.basis_matrix))
        res /= max(1.0, float(np.linalg.norm(v)))
        return res < RESIDUAL_TOL, res

    def contains_all(self, ops: Iterable[Operator]) -> float:
        """Max membership residual over a family."""
        return max((self.contains(x)[1] for x in ops), default=0.0)

    def residuals_of_stack(self, stack: np.ndarray) -> np.ndarray:
        """Membership residuals for a stack of operators, one GEMM.

        ``stack`` has shape (K, D, D) or (K, D*D); rows are tested
        against the span exactly like ``contains``.
        """
        flat = stack.reshape(stack.shape[0], -1)
        coeff = flat @ self._basis_conj_t
        gaps = np.linalg.norm(flat - coeff @ self.basis_matrix, axis=1)
        scales = np.maximum(1.0, np.linalg.norm(flat, axis=1))
        return gaps / scales

    def equals(self, other: "OperatorSubspace") -> tuple[bool, float]:
        """Two-sided span inclusion, max residual over both directions."""
        r = max(
            self.contains_all(other.basis),
            other.contains_all(self.basis),
        )
        return r < RESIDUAL_TOL, r


def span(family: Sequence[Operator], rank_tol: float = RANK_TOL) -> OperatorSubspace:
    """Orthonormalize a family of operators in the HS inner product.

    SVD of the vectorized stack with rank cutoff sigma > rank_tol * sigma_max.
    """
    family = list(family)
    if not family:
        raise ValueError("span of an empty family")
    sp = family[0].space
    for f in family[1:]:
        if f.space != sp:
            raise LegMismatchError("family members live on different spaces")
    return span_matrices(sp, np.array([f.matrix.ravel() for f in family]), rank_tol)


def span_matrices(
    sp: TensorSpace, stack: np.ndarray, rank_tol: float = RANK_TOL
) -> OperatorSubspace:
    """span() on an already-vectorized stack, one row per operator."""
    stack = stack.reshape(stack.shape[0], -1)
    u, s, vh = np.linalg.svd(stack, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > rank_tol * s[0]))
    return OperatorSubspace(sp, np.ascontiguousarray(vh[:rank]), s[:rank])


def tensor_subspace(a: OperatorSubspace, b: OperatorSubspace) -> OperatorSubspace:
    """Span of {x (x) y} for x, y ranging over the bases of a and b.

    Kronecker products of HS-orthonormal bases are HS-orthonormal, so no
    re-orthonormalization is needed.
    """
    sp = TensorSpace(a.space.legs + b.space.legs)
    da, db = a.space.total_dim, b.space.total_dim
    rows = []
    for x in a.basis_matrix:
        xm = x.reshape(da, da)
        for y in b.basis_matrix:
            rows.append(np.kron(xm, y.reshape(db, db)).ravel())
    return OperatorSubspace(sp, np.array(rows), np.ones(len(rows)))


def lsq_solve(
    map_matrix: np.ndarray, rhs: np.ndarray, rank_tol: float = RANK_TOL
) -> tuple[np.ndarray, float, int]:
    """Minimum-norm least-squares solve via SVD.

    Returns (solution, residual ||Ax - b||_2, nullity) where nullity is
    the dimension of the kernel of the map at the rank cutoff.
    """
    a = np.asarray(map_matrix, dtype=complex)
    b = np.asarray(rhs, dtype=complex).ravel()
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > rank_tol * s[0]))
    ur, sr, vr = u[:, :rank], s[:rank], vh[:rank]
    x = vr.conj().T @ ((ur.conj().T @ b) / sr) if rank else np.zeros(a.shape[1], complex)
    residual = float(np.linalg.norm(a @ x - b))
    nullity = a.shape[1] - rank
    return x, residual, nullity
