"""Measurement-device-independent evaluation of witness expectations.

A verifier feeds tomographically complete input states to the two parties,
who each jointly measure their share of rho with their input.  Weighting the
(0,0)-outcome probabilities by the coefficients beta that expand the witness
over the input-state products reproduces Tr(W rho) / (d_A d_B) when the
measurements are the ideal maximally entangled projectors -- and can never go
negative on separable rho, whatever the measurements actually are.

Transpose bookkeeping: beta is solved against the un-transposed products
sum beta[s, t] sigma_s (x) sigma_t = W, and the probability rule transposes
the prepared inputs instead.  Under ideal projectors the identity
<Psi+| M (x) N |Psi+> = Tr(M^T N) / d cancels those transposes per side,
which is what makes the ideal value come out as Tr(W rho) / (d_A d_B).

The audit makes the robustness claim checkable two ways per trial: route (i)
sums the operational probabilities; route (ii) rewrites the same number as a
mixture over ensemble members of cap-extended transposed witnesses traced
against the measurement pair -- nonnegative term by term because each term is
an extension evaluated on a product-positive operator.  The middle factor is
the transposed witness precisely because the inputs enter transposed.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .operators import (
    Array,
    HermitianOperator,
    LayoutError,
    NumericalError,
    SeparableEnsemble,
    SystemLayout,
    maximally_entangled_vector,
    permute_systems,
    projector,
)
from .extension import ExtensionSpec, extend_witness
from .sampling import (
    random_povm_first_element,
    random_separable,
    random_unitary,
    rng_from,
)
from .witness import Witness, expectation

__all__ = [
    "DECOMPOSITION_RESIDUAL_TOL",
    "BETA_IMAG_TOL",
    "PROBABILITY_RANGE_TOL",
    "POVM_BOUND_TOL",
    "ROUTE_AGREEMENT_TOL",
    "AUDIT_VALUE_TOL",
    "POVM_MODES",
    "StateBasis",
    "tomographic_basis",
    "decompose_witness",
    "reconstruction_residual",
    "ideal_projector",
    "MdiewScenario",
    "joint_probability",
    "mdiew_value",
    "AuditFailure",
    "AuditReport",
    "separable_nonnegativity_audit",
]

DECOMPOSITION_RESIDUAL_TOL = 1e-9
BETA_IMAG_TOL = 1e-10
PROBABILITY_RANGE_TOL = 1e-10
POVM_BOUND_TOL = 1e-10
ROUTE_AGREEMENT_TOL = 1e-9
AUDIT_VALUE_TOL = 1e-9

POVM_MODES = ("ideal", "arbitrary", "misaligned")


@dataclass(frozen=True)
class StateBasis:
    """Tomographically complete set of d^2 unit-trace PSD states on C^d."""

    states: tuple[Array, ...]

    def __post_init__(self):
        states = tuple(np.array(s, dtype=complex) for s in self.states)
        if not states:
            raise ValueError("state basis is empty")
        d = states[0].shape[0]
        for k, s in enumerate(states):
            if s.shape != (d, d):
                raise ValueError(f"member {k} has shape {s.shape}, expected {(d, d)}")
            if np.abs(s - s.conj().T).max() > 1e-12:
                raise ValueError(f"member {k} is not Hermitian")
            if abs(np.trace(s).real - 1.0) > 1e-12:
                raise ValueError(f"member {k} has trace {np.trace(s).real!r}, expected 1")
            if np.linalg.eigvalsh(s).min() < -1e-9:
                raise ValueError(f"member {k} is not positive semidefinite")
        if len(states) != d * d:
            raise ValueError(
                f"need exactly {d * d} states for dimension {d}, got {len(states)}"
            )
        vecs = np.array([s.ravel() for s in states])
        ranks = [
            np.linalg.matrix_rank(vecs[: k + 1], tol=1e-8) for k in range(len(states))
        ]
        dependent = [k for k in range(1, len(states)) if ranks[k] == ranks[k - 1]]
        if dependent:
            raise ValueError(
                "state basis is not tomographically complete; dependent members: "
                f"{dependent}"
            )
        for s in states:
            s.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, k: int) -> Array:
        return self.states[k]


def tomographic_basis(d: int) -> StateBasis:
    """Projectors onto |m>, (|m>+|n>)/sqrt2, (|m>+i|n>)/sqrt2 for m < n."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    eye = np.eye(d, dtype=complex)
    states = [projector(eye[m]) for m in range(d)]
    for m in range(d):
        for n in range(m + 1, d):
            states.append(projector((eye[m] + eye[n]) / np.sqrt(2)))
            states.append(projector((eye[m] + 1j * eye[n]) / np.sqrt(2)))
    return StateBasis(tuple(states))


def reconstruction_residual(
    W: Witness | HermitianOperator,
    basis_left: StateBasis,
    basis_right: StateBasis,
    beta: Array,
) -> float:
    """Frobenius norm of (sum beta[s, t] sigma_s (x) sigma_t) - W."""
    op = W.op if isinstance(W, Witness) else W
    recon = np.zeros_like(op.mat)
    for s, sig_s in enumerate(basis_left.states):
        for t, sig_t in enumerate(basis_right.states):
            recon += beta[s, t] * np.kron(sig_s, sig_t)
    return float(np.linalg.norm(recon - op.mat))


def decompose_witness(
    W: Witness | HermitianOperator,
    basis_left: StateBasis,
    basis_right: StateBasis,
) -> Array:
    """Least-squares coefficients beta with sum beta[s,t] s (x) t = W.

    Solved over complex coefficients; Hermiticity of W and of the basis
    members forces the true solution real, which is checked at 1e-10 rather
    than assumed.  A reconstruction residual above 1e-9 raises.
    """
    op = W.op if isinstance(W, Witness) else W
    op.layout.require_bipartite()
    d_a, d_b = op.layout.left_dim, op.layout.right_dim
    if basis_left.dim != d_a or basis_right.dim != d_b:
        raise LayoutError(
            f"basis dims ({basis_left.dim}, {basis_right.dim}) do not match "
            f"witness parties ({d_a}, {d_b})"
        )
    cols = [
        np.kron(s, t).ravel() for s in basis_left.states for t in basis_right.states
    ]
    mat = np.array(cols).T
    coeffs, *_ = np.linalg.lstsq(mat, op.mat.ravel(), rcond=None)
    imag = float(np.abs(coeffs.imag).max())
    if imag > BETA_IMAG_TOL:
        raise NumericalError(
            f"decomposition coefficients have imaginary part {imag:.3e}"
        )
    beta = coeffs.real.reshape(len(basis_left), len(basis_right))
    residual = reconstruction_residual(op, basis_left, basis_right, beta)
    if residual > DECOMPOSITION_RESIDUAL_TOL:
        raise NumericalError(
            f"witness decomposition residual {residual:.3e} exceeds "
            f"{DECOMPOSITION_RESIDUAL_TOL:.0e}"
        )
    beta.setflags(write=False)
    return beta


def ideal_projector(d: int) -> Array:
    """Rank-one projector onto the d-dimensional maximally entangled vector."""
    return projector(maximally_entangled_vector(d))


def _povm_matrix(E: HermitianOperator | Array, dim: int, name: str) -> Array:
    mat = E.mat if isinstance(E, HermitianOperator) else np.asarray(E, dtype=complex)
    if mat.shape != (dim, dim):
        raise LayoutError(f"{name} must be {dim}x{dim}, got {mat.shape}")
    if np.abs(mat - mat.conj().T).max() > 1e-12:
        raise NumericalError(f"{name} is not Hermitian")
    vals = np.linalg.eigvalsh(mat)
    if vals.min() < -POVM_BOUND_TOL or vals.max() > 1.0 + POVM_BOUND_TOL:
        raise NumericalError(
            f"{name} is not a POVM element: eigenvalues in "
            f"[{vals.min():.3e}, {vals.max():.3e}]"
        )
    return mat


@dataclass(frozen=True)
class MdiewScenario:
    """Witness, input bases, solved coefficients, and the measurement pair."""

    witness: Witness
    basis_left: StateBasis
    basis_right: StateBasis
    beta: Array
    povm_left: Array
    povm_right: Array

    def __post_init__(self):
        self.witness.op.layout.require_bipartite()
        d_a, d_b = self.party_dims
        if self.basis_left.dim != d_a or self.basis_right.dim != d_b:
            raise LayoutError(
                f"basis dims ({self.basis_left.dim}, {self.basis_right.dim}) "
                f"do not match witness parties ({d_a}, {d_b})"
            )
        beta = np.array(self.beta, dtype=float)
        if beta.shape != (len(self.basis_left), len(self.basis_right)):
            raise LayoutError(
                f"beta shape {beta.shape} does not match basis sizes "
                f"({len(self.basis_left)}, {len(self.basis_right)})"
            )
        residual = reconstruction_residual(
            self.witness, self.basis_left, self.basis_right, beta
        )
        if residual > DECOMPOSITION_RESIDUAL_TOL:
            raise NumericalError(
                f"beta does not reconstruct the witness: residual {residual:.3e}"
            )
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)
        e_l = _povm_matrix(self.povm_left, d_a * d_a, "left POVM element").copy()
        e_r = _povm_matrix(self.povm_right, d_b * d_b, "right POVM element").copy()
        e_l.setflags(write=False)
        e_r.setflags(write=False)
        object.__setattr__(self, "povm_left", e_l)
        object.__setattr__(self, "povm_right", e_r)

    @classmethod
    def ideal(cls, W: Witness | HermitianOperator) -> "MdiewScenario":
        """Tomographic bases, solved beta, maximally entangled projectors."""
        witness = W if isinstance(W, Witness) else Witness(W)
        witness.op.layout.require_bipartite()
        d_a = witness.op.layout.left_dim
        d_b = witness.op.layout.right_dim
        basis_left = tomographic_basis(d_a)
        basis_right = tomographic_basis(d_b)
        return cls(
            witness=witness,
            basis_left=basis_left,
            basis_right=basis_right,
            beta=decompose_witness(witness, basis_left, basis_right),
            povm_left=ideal_projector(d_a),
            povm_right=ideal_projector(d_b),
        )

    def with_povms(
        self, povm_left: HermitianOperator | Array, povm_right: HermitianOperator | Array
    ) -> "MdiewScenario":
        return replace(self, povm_left=povm_left, povm_right=povm_right)

    @property
    def party_dims(self) -> tuple[int, int]:
        return self.witness.op.layout.left_dim, self.witness.op.layout.right_dim

    def ideal_value(self, rho: HermitianOperator) -> float:
        """Tr(W rho) / (d_A d_B): the ideal-measurement benchmark."""
        d_a, d_b = self.party_dims
        return expectation(self.witness, rho) / (d_a * d_b)


def _canonical_state(
    rho_mat: Array, d_a: int, d_b: int, sigma_s: Array, sigma_t: Array
) -> Array:
    """rho (x) sigma_s^T (x) sigma_t^T, reordered to the A', A, B, B' layout."""
    prepared = HermitianOperator(
        np.kron(np.kron(rho_mat, sigma_s.T), sigma_t.T),
        SystemLayout((d_a, d_b, d_a, d_b), 2),
    )
    return permute_systems(prepared, (2, 0, 1, 3)).mat


def _probability(state_mat: Array, meas_mat: Array) -> float:
    p = np.sum(state_mat * meas_mat.T)
    if abs(p.imag) > PROBABILITY_RANGE_TOL:
        raise NumericalError(f"probability has imaginary part {p.imag:.3e}")
    if not -PROBABILITY_RANGE_TOL <= p.real <= 1.0 + PROBABILITY_RANGE_TOL:
        raise NumericalError(f"probability {p.real!r} outside [0, 1]")
    return float(p.real)


def joint_probability(
    rho: HermitianOperator,
    sigma_s: Array,
    sigma_t: Array,
    povm_left: HermitianOperator | Array,
    povm_right: HermitianOperator | Array,
) -> float:
    """P(0,0 | s, t) for one pair of verifier inputs.

    The left element acts on input (x) left party, the right element on
    right party (x) input, both in canonical system order.
    """
    rho.layout.require_bipartite()
    d_a, d_b = rho.layout.left_dim, rho.layout.right_dim
    sig_s = np.asarray(sigma_s, dtype=complex)
    sig_t = np.asarray(sigma_t, dtype=complex)
    if sig_s.shape != (d_a, d_a) or sig_t.shape != (d_b, d_b):
        raise LayoutError(
            f"input shapes {sig_s.shape}, {sig_t.shape} do not match parties "
            f"({d_a}, {d_b})"
        )
    e_l = _povm_matrix(povm_left, d_a * d_a, "left POVM element")
    e_r = _povm_matrix(povm_right, d_b * d_b, "right POVM element")
    state = _canonical_state(rho.mat, d_a, d_b, sig_s, sig_t)
    return _probability(state, np.kron(e_l, e_r))


def mdiew_value(
    scenario: MdiewScenario,
    rho: HermitianOperator,
    povm_left: HermitianOperator | Array | None = None,
    povm_right: HermitianOperator | Array | None = None,
) -> float:
    """sum beta[s, t] P(0,0 | s, t); the scenario's measurement by default."""
    d_a, d_b = scenario.party_dims
    if rho.layout.left_dim != d_a or rho.layout.right_dim != d_b:
        raise LayoutError(
            f"state parties ({rho.layout.left_dim}, {rho.layout.right_dim}) "
            f"do not match scenario ({d_a}, {d_b})"
        )
    e_l = (
        scenario.povm_left
        if povm_left is None
        else _povm_matrix(povm_left, d_a * d_a, "left POVM element")
    )
    e_r = (
        scenario.povm_right
        if povm_right is None
        else _povm_matrix(povm_right, d_b * d_b, "right POVM element")
    )
    meas = np.kron(e_l, e_r)
    beta = scenario.beta
    value = 0.0
    for s, sig_s in enumerate(scenario.basis_left.states):
        for t, sig_t in enumerate(scenario.basis_right.states):
            state = _canonical_state(rho.mat, d_a, d_b, sig_s, sig_t)
            value += beta[s, t] * _probability(state, meas)
    return float(value)


def _mixture_route_value(
    scenario: MdiewScenario,
    ensemble: SeparableEnsemble,
    e_left: Array,
    e_right: Array,
) -> float:
    """Route (ii): mixture of cap-extended transposed witnesses vs measurement.

    For a product member a (x) b the whole (s, t) sum collapses to the
    extension of W^T by the member's projector caps, reordered to canonical
    system order; tracing that against the measurement pair is nonnegative
    term by term whenever W^T is block-positive, i.e. whenever W is.
    """
    w_t = Witness(
        HermitianOperator(scenario.witness.op.mat.T, scenario.witness.op.layout)
    )
    meas = np.kron(e_left, e_right)
    value = 0.0
    for weight, member in zip(ensemble.weights, ensemble.members):
        a, b = member.factors
        ext = extend_witness(w_t, ExtensionSpec(projector(a), projector(b)))
        term_op = permute_systems(ext.op, (1, 0, 3, 2))
        term = np.sum(term_op.mat * meas.T).real
        value += weight * term
    return float(value)


@dataclass(frozen=True)
class AuditFailure:
    trial: int
    route_direct: float
    route_mixture: float
    reason: str


@dataclass(frozen=True)
class AuditReport:
    trials: int
    povm_mode: str
    embed_dims: tuple[int, int] | None
    min_value: float
    max_route_gap: float
    failures: tuple[AuditFailure, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def _draw_small_povms(
    mode: str, d_a: int, d_b: int, rng: np.random.Generator
) -> tuple[Array, Array]:
    if mode == "ideal":
        return ideal_projector(d_a), ideal_projector(d_b)
    if mode == "arbitrary":
        return (
            random_povm_first_element(d_a * d_a, rng).mat,
            random_povm_first_element(d_b * d_b, rng).mat,
        )
    # misaligned: ideal projectors knocked around by local unitaries
    u_l = np.kron(random_unitary(d_a, rng), random_unitary(d_a, rng))
    u_r = np.kron(random_unitary(d_b, rng), random_unitary(d_b, rng))
    return (
        u_l @ ideal_projector(d_a) @ u_l.conj().T,
        u_r @ ideal_projector(d_b) @ u_r.conj().T,
    )


def separable_nonnegativity_audit(
    scenario: MdiewScenario,
    trials: int = 1000,
    seed: int = 0,
    povm_mode: str = "arbitrary",
    embed_dims: tuple[int, int] | None = None,
    max_members: int = 4,
) -> AuditReport:
    """Randomized check that separable inputs never yield a negative value.

    Each trial draws a separable ensemble (1 to max_members pure product
    members) and a measurement pair per povm_mode, then evaluates the value
    along both routes.  With embed_dims the measurement elements live in
    enlarged spaces reached through random isometries; the direct route runs
    up there while the mixture route sees only the isometry-compressed
    elements, so agreement also exercises the embedding.  Failures are
    recorded, never raised.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if povm_mode not in POVM_MODES:
        raise ValueError(f"povm_mode must be one of {POVM_MODES}, got {povm_mode!r}")
    d_a, d_b = scenario.party_dims
    if embed_dims is not None:
        big_l, big_r = int(embed_dims[0]), int(embed_dims[1])
        if big_l < d_a * d_a or big_r < d_b * d_b:
            raise ValueError(
                f"embed dims {embed_dims} smaller than measurement spaces "
                f"({d_a * d_a}, {d_b * d_b})"
            )
    layout = SystemLayout((d_a, d_b), 1)
    beta = scenario.beta

    failures: list[AuditFailure] = []
    min_value = np.inf
    max_gap = 0.0
    for t in range(trials):
        rng = rng_from(seed, t)
        k = int(rng.integers(1, max_members + 1))
        ensemble = random_separable(layout, k, rng)
        rho_mat = ensemble.density(cut=1).mat

        if embed_dims is None:
            e_l, e_r = _draw_small_povms(povm_mode, d_a, d_b, rng)
            meas = np.kron(e_l, e_r)
            direct = 0.0
            for s, sig_s in enumerate(scenario.basis_left.states):
                for u, sig_t in enumerate(scenario.basis_right.states):
                    state = _canonical_state(rho_mat, d_a, d_b, sig_s, sig_t)
                    direct += beta[s, u] * _probability(state, meas)
        else:
            e_l_big = random_povm_first_element(big_l, rng).mat
            e_r_big = random_povm_first_element(big_r, rng).mat
            v_l = random_unitary(big_l, rng)[:, : d_a * d_a]
            v_r = random_unitary(big_r, rng)[:, : d_b * d_b]
            embed = np.kron(v_l, v_r)
            meas_big = np.kron(e_l_big, e_r_big)
            direct = 0.0
            for s, sig_s in enumerate(scenario.basis_left.states):
                for u, sig_t in enumerate(scenario.basis_right.states):
                    small = _canonical_state(rho_mat, d_a, d_b, sig_s, sig_t)
                    state_big = embed @ small @ embed.conj().T
                    direct += beta[s, u] * _probability(state_big, meas_big)
            e_l = v_l.conj().T @ e_l_big @ v_l
            e_r = v_r.conj().T @ e_r_big @ v_r
        mixture = _mixture_route_value(scenario, ensemble, e_l, e_r)

        gap = abs(direct - mixture)
        min_value = min(min_value, direct, mixture)
        max_gap = max(max_gap, gap)
        reasons = []
        if direct < -AUDIT_VALUE_TOL:
            reasons.append(f"direct route negative: {direct:.3e}")
        if mixture < -AUDIT_VALUE_TOL:
            reasons.append(f"mixture route negative: {mixture:.3e}")
        if gap > ROUTE_AGREEMENT_TOL:
            reasons.append(f"route gap {gap:.3e}")
        if reasons:
            failures.append(
                AuditFailure(t, float(direct), float(mixture), "; ".join(reasons))
            )
    return AuditReport(
        trials=trials,
        povm_mode=povm_mode,
        embed_dims=None if embed_dims is None else (big_l, big_r),
        min_value=float(min_value),
        max_route_gap=float(max_gap),
        failures=tuple(failures),
    )
