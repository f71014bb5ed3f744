"""Multiplicativity axioms and derived identities for a candidate W.

A partial isometry W on H (x) H is multiplicative when the four leg
identities mpi1-mpi4 hold on H (x) H (x) H; mpi5-mpi10 then follow.
mpi5 is the pentagon equation; mpi3/mpi4 are trivial for unitaries but
carry the base-algebra commutation in the general case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import (
    RANK_TOL,
    RESIDUAL_TOL,
    LegMismatchError,
    Operator,
    TensorSpace,
    all_left_slices,
    all_right_slices,
    chain,
    op_residual,
    rel_residual,
    swap_legs,
)

MPI_AXIOMS = ("mpi1", "mpi2", "mpi3", "mpi4")
DERIVED_IDENTITIES = ("mpi5", "mpi6", "mpi7", "mpi8", "mpi9", "mpi10")


@dataclass(frozen=True)
class MpiVerdict:
    is_partial_isometry: bool
    pi_residual: float
    mpi_residuals: dict[str, float]
    derived_residuals: dict[str, float]
    E: Operator
    G: Operator
    passed: bool


@dataclass(frozen=True)
class FullnessVerdict:
    """Both readings of fullness: the literal slice-injectivity and the
    nondegeneracy of the slice algebras (dense range / trivial kernel)."""

    literal_right: bool
    literal_left: bool
    nondeg_A_range: bool
    nondeg_A_kernel: bool
    nondeg_Ahat_range: bool
    nondeg_Ahat_kernel: bool
    right_slice_rank: int
    left_slice_rank: int


def _two_h_legs(w: Operator) -> int:
    legs = w.space.legs
    if len(legs) != 2 or legs[0] != legs[1] or legs[0].flavor != "H":
        raise LegMismatchError("expected an operator on H (x) H with equal legs")
    return legs[0].dim


def what(w: Operator) -> Operator:
    """The dual candidate W-hat = Sigma W* Sigma."""
    return swap_legs(w.adj)


def is_partial_isometry(w: Operator, tol: float = RESIDUAL_TOL) -> tuple[bool, float]:
    """Residual of W W* W = W."""
    m = w.matrix
    res = rel_residual(m @ m.conj().T @ m, m)
    return res < tol, res


def three_leg_space(w: Operator) -> TensorSpace:
    leg = w.space.legs[0]
    return TensorSpace((leg, leg, leg))


def mpi_identity_sides(w: Operator, name: str) -> tuple[Operator, Operator]:
    """Left and right side of one of the ten leg identities."""
    amb = three_leg_space(w)
    ws = w.adj

    def c(*factors):
        return chain(amb, *factors)

    if name == "mpi1":
        return c((w, [2, 3]), (w, [1, 2]), (ws, [2, 3])), c((w, [1, 2]), (w, [1, 3]))
    if name == "mpi2":
        return c((ws, [1, 2]), (w, [2, 3]), (w, [1, 2])), c((w, [1, 3]), (w, [2, 3]))
    if name == "mpi3":
        return (
            c((ws, [2, 3]), (w, [2, 3]), (w, [1, 2])),
            c((w, [1, 2]), (ws, [2, 3]), (w, [2, 3])),
        )
    if name == "mpi4":
        return (
            c((w, [1, 2]), (ws, [1, 2]), (w, [2, 3])),
            c((w, [2, 3]), (w, [1, 2]), (ws, [1, 2])),
        )
    if name == "mpi5":
        return c((w, [1, 2]), (w, [1, 3]), (w, [2, 3])), c((w, [2, 3]), (w, [1, 2]))
    if name == "mpi6":
        return (
            c((ws, [1, 2]), (w, [1, 2]), (w, [1, 3])),
            c((w, [1, 3]), (w, [2, 3]), (ws, [2, 3])),
        )
    if name == "mpi7":
        return c((w, [1, 2]), (ws, [2, 3])), c((ws, [2, 3]), (w, [1, 2]), (w, [1, 3]))
    if name == "mpi8":
        return c((ws, [1, 2]), (w, [2, 3])), c((w, [1, 3]), (w, [2, 3]), (ws, [1, 2]))
    if name == "mpi9":
        return (
            c((ws, [1, 3]), (w, [1, 3]), (w, [2, 3])),
            c((w, [2, 3]), (ws, [1, 2]), (w, [1, 2])),
        )
    if name == "mpi10":
        return (
            c((w, [1, 2]), (w, [1, 3]), (ws, [1, 3])),
            c((w, [2, 3]), (ws, [2, 3]), (w, [1, 2])),
        )
    raise KeyError(f"unknown identity {name!r}")


def identity_residual(w: Operator, name: str) -> float:
    lhs, rhs = mpi_identity_sides(w, name)
    return op_residual(lhs, rhs)


def check_derived_identities(w: Operator) -> dict[str, float]:
    """Residuals of mpi5-mpi10 (not enforced, just measured)."""
    return {name: identity_residual(w, name) for name in DERIVED_IDENTITIES}


def check_mpi_axioms(w: Operator, tol: float = RESIDUAL_TOL) -> MpiVerdict:
    """Full multiplicativity verdict: partial isometry plus mpi1-mpi4,
    with the derived residuals mpi5-mpi10 reported alongside."""
    _two_h_legs(w)
    ok_pi, res_pi = is_partial_isometry(w, tol)
    axioms = {name: identity_residual(w, name) for name in MPI_AXIOMS}
    derived = check_derived_identities(w)
    e = w.adj @ w
    g = w @ w.adj
    passed = ok_pi and all(r < tol for r in axioms.values())
    return MpiVerdict(ok_pi, res_pi, axioms, derived, e, g, passed)


def projection_residuals(w: Operator) -> dict[str, float]:
    """E, G idempotent/self-adjoint and the initial/final space relations."""
    e = (w.adj @ w).matrix
    g = (w @ w.adj).matrix
    m = w.matrix
    return {
        "E_idempotent": rel_residual(e @ e, e),
        "E_selfadjoint": rel_residual(e.conj().T, e),
        "G_idempotent": rel_residual(g @ g, g),
        "G_selfadjoint": rel_residual(g.conj().T, g),
        "WE_eq_W": rel_residual(m @ e, m),
        "GW_eq_W": rel_residual(g @ m, m),
    }


def _matrix_rank(stack: np.ndarray, rank_tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(stack.reshape(stack.shape[0], -1), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def assess_fullness(w: Operator, rank_tol: float = RANK_TOL) -> FullnessVerdict:
    """Evaluate both fullness readings.

    The literal flags ask whether w -> (id (x) w)(W) (resp. the left
    slice map) is injective; by annihilator duality that is the same as
    the opposite-side slices spanning all of B(H).  The nondegeneracy
    flags ask whether the slice spaces act with dense range and trivial
    common kernel.
    """
    n = _two_h_legs(w)
    rights = all_right_slices(w)  # span A
    lefts = all_left_slices(w)  # span A-hat
    right_rank = _matrix_rank(rights, rank_tol)
    left_rank = _matrix_rank(lefts, rank_tol)
    # injectivity of the right slice map = rank n^2 of its image
    literal_right = right_rank == n * n
    literal_left = left_rank == n * n

    def range_full(stack):
        return _matrix_rank(np.hstack(list(stack)), rank_tol) == n

    def kernel_trivial(stack):
        return _matrix_rank(np.vstack(list(stack)), rank_tol) == n

    return FullnessVerdict(
        literal_right=literal_right,
        literal_left=literal_left,
        nondeg_A_range=range_full(rights),
        nondeg_A_kernel=kernel_trivial(rights),
        nondeg_Ahat_range=range_full(lefts),
        nondeg_Ahat_kernel=kernel_trivial(lefts),
        right_slice_rank=right_rank,
        left_slice_rank=left_rank,
    )
