"""The qutrit Choi-type witness and a one-sided extension it makes useful.

The witness on two qutrits,

    W = sum_i |i, i-1><i, i-1|  +  2 sum_i |i, i><i, i|  -  sum_{i,j} |i, i><j, j|

(indices mod 3), is indecomposable; its single negative eigenvalue -1 sits on
the maximally entangled vector.  Capping it on one side with a PSD operator P
on a qubit gives W (x) P on A|BB', and a two-parameter family of states on
those systems shows the cap buying detection the bare witness cannot provide:
the extension value goes negative while the B'-reduced state is invisible to
W alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import (
    Array,
    HermitianOperator,
    NumericalError,
    SystemLayout,
    is_psd,
    partial_trace,
    partial_transpose,
    projector,
)
from .witness import Witness, expectation

__all__ = [
    "choi_witness",
    "shift_operator",
    "AbParams",
    "rho_abb_matrix",
    "rho_abb",
    "detection_values",
    "closed_form_values",
    "CLOSED_FORM_SCALE",
    "ExhibitReport",
    "nontrivial_extension_exhibit",
]

AB_PSD_TOL = 1e-10

# The closed forms below carry a reference prefactor that counts one diagonal
# block of the family; exact-trace normalization makes the state's trace three
# times that, so operational values come out scaled by this constant.
CLOSED_FORM_SCALE = 1.0 / 3.0


def choi_witness() -> Witness:
    """The 9x9 witness above, as an operator on dims (3, 3) with cut 1."""
    d = 3
    mat = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        k = i * d + (i - 1) % d
        mat[k, k] += 1.0
        mat[i * d + i, i * d + i] += 2.0
    for i in range(d):
        for j in range(d):
            mat[i * d + i, j * d + j] -= 1.0
    return Witness(
        HermitianOperator(mat, SystemLayout((d, d), 1)), provenance="choi"
    )


def shift_operator(d: int) -> Array:
    """Cyclic shift |k> -> |k+1 mod d| as a d x d permutation matrix.

    The wraparound (top index maps to 0) keeps the matrix unitary, which the
    conjugations in rho_abb_matrix rely on.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    mat = np.zeros((d, d), dtype=complex)
    for k in range(d):
        mat[(k + 1) % d, k] = 1.0
    return mat


def _hermitian_2x2(mat: Array | HermitianOperator | list, name: str) -> Array:
    if isinstance(mat, HermitianOperator):
        mat = mat.mat
    arr = np.array(mat, dtype=complex)  # copy: callers may freeze the result
    if arr.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2, got {arr.shape}")
    if np.abs(arr - arr.conj().T).max() > 1e-12:
        raise ValueError(f"{name} must be Hermitian")
    return arr


@dataclass(frozen=True)
class AbParams:
    """Qubit blocks steering the two branches of the A|BB' family.

    Both blocks must be PSD and at least one must carry trace.  The default
    pair (all-ones a, identity b) is the sharpest demonstration: equal traces
    hide the state from the reduced witness, while the larger off-diagonal of
    a lets the capped extension see it.  (A remark, not enforced: with PSD a,
    vanishing diagonal forces a = 0 entirely, collapsing the first branch.)
    """

    a: Array = field(default_factory=lambda: np.ones((2, 2), dtype=complex))
    b: Array = field(default_factory=lambda: np.eye(2, dtype=complex))

    def __post_init__(self):
        a = _hermitian_2x2(self.a, "a")
        b = _hermitian_2x2(self.b, "b")
        if not is_psd(a, AB_PSD_TOL):
            raise ValueError("a is not positive semidefinite")
        if not is_psd(b, AB_PSD_TOL):
            raise ValueError("b is not positive semidefinite")
        if (a + b).trace().real <= 0:
            raise ValueError("Tr(a) + Tr(b) must be positive")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def rho_abb_matrix(a: Array, b: Array) -> Array:
    """Unnormalized family member on dims (3, 3, 2), from raw Hermitian blocks.

    Assembled blockwise over the A index: the off-diagonal (i, j) block is
    |i><j| (x) a on BB', and the diagonal blocks are the shift conjugates
    (S^i (x) I) X (S^i (x) I)^dag of X = |0><0| (x) a + |2><2| (x) b.  Takes
    raw matrices rather than AbParams so that the PSD characterization
    (result PSD iff a and b both are) stays checkable on signed inputs.
    """
    a = _hermitian_2x2(a, "a")
    b = _hermitian_2x2(b, "b")
    d = 3
    s = shift_operator(d)
    eye3 = np.eye(d, dtype=complex)
    x = np.kron(projector(eye3[0]), a) + np.kron(projector(eye3[2]), b)
    out = np.zeros((d * d * 2, d * d * 2), dtype=complex)
    block = d * 2
    for i in range(d):
        for j in range(d):
            if i == j:
                left = np.kron(np.linalg.matrix_power(s, i), np.eye(2))
                piece = left @ x @ left.conj().T
            else:
                piece = np.kron(np.outer(eye3[i], eye3[j]), a)
            out[i * block : (i + 1) * block, j * block : (j + 1) * block] = piece
    return out


def rho_abb(params: AbParams) -> HermitianOperator:
    """Unit-trace family member; the raw matrix has trace 3 Tr(a + b)."""
    raw = rho_abb_matrix(params.a, params.b)
    tr = raw.trace().real
    return HermitianOperator(raw / tr, SystemLayout((3, 3, 2), 1))


def _cap_2x2(cap: Array | HermitianOperator) -> Array:
    mat = cap.mat if isinstance(cap, HermitianOperator) else np.asarray(cap, dtype=complex)
    mat = _hermitian_2x2(mat, "cap")
    if not is_psd(mat, AB_PSD_TOL):
        raise ValueError("cap is not positive semidefinite")
    return mat


def detection_values(
    params: AbParams, cap_right: Array | HermitianOperator
) -> tuple[float, float]:
    """(ext_value, reduced_value) on the unit-trace family member.

    ext_value is <W (x) cap> on the full A|BB' state; reduced_value is <W> on
    the B'-traced A|B marginal.  A negative first entry with a vanishing
    second is the point: the cap alone buys the detection.
    """
    cap_mat = _cap_2x2(cap_right)
    w = choi_witness().op
    state = rho_abb(params)
    ext_op = HermitianOperator(np.kron(w.mat, cap_mat), state.layout)
    ext_value = expectation(ext_op, state)
    reduced = partial_trace(state, keep=(0, 1))
    reduced_value = expectation(w, reduced)
    return ext_value, reduced_value


def closed_form_values(
    params: AbParams, cap_right: Array | HermitianOperator
) -> tuple[float, float]:
    """Closed forms for the same two numbers, up to CLOSED_FORM_SCALE:

        (3 / Tr(a + b)) * Tr(cap (b - a))   and   (3 / Tr(a + b)) * Tr(b - a).

    Multiplying either by CLOSED_FORM_SCALE reproduces detection_values.
    """
    cap_mat = _cap_2x2(cap_right)
    tr_ab = (params.a + params.b).trace().real
    diff = params.b - params.a
    ext = 3.0 / tr_ab * (cap_mat @ diff).trace()
    red = 3.0 / tr_ab * diff.trace()
    if abs(ext.imag) > 1e-10 or abs(red.imag) > 1e-10:
        raise NumericalError("closed forms came out non-real")
    return float(ext.real), float(red.real)


@dataclass(frozen=True)
class ExhibitReport:
    params: AbParams
    cap_right: Array
    ext_value: float
    reduced_value: float
    closed_ext: float
    closed_reduced: float
    scale: float
    state_psd: bool
    gamma_bprime_psd: bool


def nontrivial_extension_exhibit(
    params: AbParams | None = None,
    cap_right: Array | HermitianOperator | None = None,
) -> ExhibitReport:
    """Concrete demonstration that a cap can add detection power.

    Defaults to the all-ones a, identity b, all-ones cap, where the extension
    value lands at -1/2 while the reduced value is exactly 0.  Parameter
    choices whose extension value fails to go negative are rejected with the
    sign condition spelled out: for the all-ones cap the off-diagonal of a
    must exceed that of b.
    """
    params = AbParams() if params is None else params
    cap_mat = (
        np.ones((2, 2), dtype=complex) if cap_right is None else _cap_2x2(cap_right)
    )
    ext_value, reduced_value = detection_values(params, cap_mat)
    closed_ext, closed_reduced = closed_form_values(params, cap_mat)
    if ext_value >= -1e-6 * CLOSED_FORM_SCALE:
        raise ValueError(
            f"extension value {ext_value:.6g} is not negative: the exhibit needs "
            "Tr(cap (b - a)) < 0, i.e. the cap-weighted off-diagonals of a must "
            "dominate those of b"
        )
    state = rho_abb(params)
    return ExhibitReport(
        params=params,
        cap_right=cap_mat,
        ext_value=ext_value,
        reduced_value=reduced_value,
        closed_ext=closed_ext,
        closed_reduced=closed_reduced,
        scale=CLOSED_FORM_SCALE,
        state_psd=is_psd(state),
        gamma_bprime_psd=is_psd(partial_transpose(state, subsystems=(2,))),
    )
