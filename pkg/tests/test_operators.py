import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entwit import (
    HermitianOperator,
    LayoutError,
    NumericalError,
    ProductVector,
    SeparableEnsemble,
    SystemLayout,
    basis_vector,
    eigh,
    is_psd,
    kron,
    maximally_entangled_vector,
    partial_trace,
    partial_transpose,
    permute_systems,
    projector,
    single_system,
)
from oracle_utils import partial_trace_loops, partial_transpose_loops


def _random_hermitian(dims, seed):
    n = int(np.prod(dims))
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return HermitianOperator((g + g.conj().T) / 2, SystemLayout(tuple(dims), 1))


def test_layout_properties():
    lay = SystemLayout((2, 3, 4), 2)
    assert lay.left_dims == (2, 3)
    assert lay.right_dims == (4,)
    assert lay.left_dim == 6
    assert lay.right_dim == 4
    assert lay.total_dim == 24
    assert lay.n_subsystems == 3
    assert single_system(5) == SystemLayout((5,), 1)


def test_layout_rejects_bad_input():
    with pytest.raises(LayoutError):
        SystemLayout((), 0)
    with pytest.raises(LayoutError):
        SystemLayout((2, 0), 1)
    with pytest.raises(LayoutError):
        SystemLayout((2, 2), 3)
    with pytest.raises(LayoutError):
        SystemLayout((4,), 1).require_bipartite()


def test_hermitian_operator_validation():
    lay = SystemLayout((2, 2), 1)
    with pytest.raises(LayoutError):
        HermitianOperator(np.eye(3), lay)
    skew = np.array([[0.0, 1.0], [-1.0, 0.0]])
    with pytest.raises(NumericalError):
        HermitianOperator(skew, single_system(2))
    op = HermitianOperator(np.diag([1.0, 2.0, 3.0, 4.0]), lay)
    assert op.trace == pytest.approx(10.0)
    with pytest.raises(ValueError):
        op.mat[0, 0] = 99.0


def test_product_vector_requires_unit_factors():
    good = ProductVector((np.array([1.0, 0.0]), np.array([0.0, 1.0])))
    np.testing.assert_allclose(good.full(), [0.0, 1.0, 0.0, 0.0])
    assert good.dims == (2, 2)
    with pytest.raises(NumericalError):
        ProductVector((np.array([1.0, 1.0]), np.array([1.0, 0.0])))


def test_separable_ensemble_density():
    rng = np.random.default_rng(3)
    members = []
    for _ in range(3):
        f = rng.normal(size=2) + 1j * rng.normal(size=2)
        g = rng.normal(size=2) + 1j * rng.normal(size=2)
        members.append(ProductVector((f / np.linalg.norm(f), g / np.linalg.norm(g))))
    ens = SeparableEnsemble((0.5, 0.3, 0.2), tuple(members))
    rho = ens.density(cut=1)
    manual = sum(
        w * np.outer(m.full(), m.full().conj())
        for w, m in zip((0.5, 0.3, 0.2), members)
    )
    np.testing.assert_allclose(rho.mat, manual, atol=1e-14)
    assert rho.trace == pytest.approx(1.0)
    assert is_psd(rho)
    # mixtures of products stay positive under one-sided transposition
    assert is_psd(partial_transpose(rho), tol=1e-12)


def test_kron_places_cut_between_operands():
    a = _random_hermitian((2,), 1)
    b = _random_hermitian((3,), 2)
    prod = kron(a, b)
    assert prod.layout == SystemLayout((2, 3), 1)
    np.testing.assert_array_equal(prod.mat, np.kron(a.mat, b.mat))


@pytest.mark.parametrize(
    "dims,subsystems",
    [((2, 2), None), ((2, 3, 2), (1,)), ((2, 2, 2, 2), (0, 3)), ((3, 3), (0,))],
)
def test_partial_transpose_matches_loop_oracle(dims, subsystems):
    op = _random_hermitian(dims, seed=sum(dims))
    out = partial_transpose(op, subsystems=subsystems)
    flagged = subsystems if subsystems is not None else tuple(
        range(op.layout.cut, len(dims))
    )
    expect = partial_transpose_loops(op.mat, dims, flagged)
    np.testing.assert_array_equal(out.mat, expect)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), d1=st.integers(2, 3), d2=st.integers(2, 3))
def test_partial_transpose_involution_and_trace(seed, d1, d2):
    op = _random_hermitian((d1, d2), seed)
    once = partial_transpose(op)
    twice = partial_transpose(once)
    np.testing.assert_array_equal(twice.mat, op.mat)
    assert once.trace == pytest.approx(op.trace, abs=1e-12)


def test_transposed_entangled_projector_spectrum():
    # the maximally entangled projector flips to +-1/d under one-sided transpose
    for d in (2, 3):
        p = HermitianOperator(
            projector(maximally_entangled_vector(d)), SystemLayout((d, d), 1)
        )
        vals = eigh(partial_transpose(p))[0]
        assert vals[0] == pytest.approx(1.0 / d, abs=1e-12)
        assert vals[-1] == pytest.approx(-1.0 / d, abs=1e-12)


@pytest.mark.parametrize(
    "dims,keep", [((2, 3), (0,)), ((2, 3), (1,)), ((2, 2, 3), (0, 2)), ((2, 3), (0, 1))]
)
def test_partial_trace_matches_loop_oracle(dims, keep):
    op = _random_hermitian(dims, seed=7 * sum(dims))
    out = partial_trace(op, keep=keep)
    expect = partial_trace_loops(op.mat, dims, keep)
    np.testing.assert_allclose(out.mat, expect, atol=1e-13)
    assert out.trace == pytest.approx(op.trace, abs=1e-12)


def test_partial_trace_of_kron_factorizes():
    a = _random_hermitian((2,), 11)
    b = _random_hermitian((3,), 12)
    joint = kron(a, b)
    left = partial_trace(joint, keep=(0,))
    np.testing.assert_allclose(left.mat, a.mat * b.trace, atol=1e-13)


def test_permute_systems_reorders_kron_factors():
    mats = [_random_hermitian((d,), 20 + d) for d in (2, 3, 4)]
    joint = kron(kron(mats[0], mats[1]), mats[2])
    swapped = permute_systems(joint, (2, 0, 1))
    expect = np.kron(mats[2].mat, np.kron(mats[0].mat, mats[1].mat))
    # complex multiply is not bitwise-commutative under FMA, so not array_equal
    np.testing.assert_allclose(swapped.mat, expect, rtol=1e-13, atol=1e-13)
    assert swapped.layout.dims == (4, 2, 3)
    back = permute_systems(swapped, (1, 2, 0))
    np.testing.assert_array_equal(back.mat, joint.mat)


def test_permute_systems_rejects_non_permutation():
    op = _random_hermitian((2, 2), 5)
    with pytest.raises(LayoutError):
        permute_systems(op, (0, 0))


@pytest.mark.parametrize("side", [2, 3, 6, 9, 16, 36])
def test_eigh_descending_with_tight_residual(side):
    for seed in range(4):
        rng = np.random.default_rng(1000 * side + seed)
        g = rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side))
        op = HermitianOperator((g + g.conj().T) / 2, single_system(side))
        vals, vecs = eigh(op)
        assert np.all(np.diff(vals) <= 1e-14)
        residual = np.linalg.norm(op.mat @ vecs - vecs * vals)
        assert residual <= 1e-10 * np.linalg.norm(op.mat)
        np.testing.assert_allclose(
            vecs.conj().T @ vecs, np.eye(side), atol=1e-12
        )


def test_is_psd_threshold():
    assert is_psd(HermitianOperator(np.eye(2), single_system(2)))
    dipped = HermitianOperator(np.diag([1.0, -5e-10]), single_system(2))
    assert is_psd(dipped, tol=1e-9)
    sunk = HermitianOperator(np.diag([1.0, -1e-8]), single_system(2))
    assert not is_psd(sunk, tol=1e-9)


def test_basis_projector_and_entangled_vector():
    e1 = basis_vector(3, 1)
    np.testing.assert_array_equal(e1, [0.0, 1.0, 0.0])
    p = projector(np.array([1.0, 1j]) / np.sqrt(2))
    np.testing.assert_allclose(p, p.conj().T)
    assert np.trace(p) == pytest.approx(1.0)
    np.testing.assert_allclose(p @ p, p, atol=1e-15)
    for d in (2, 3):
        v = maximally_entangled_vector(d)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(
            v.reshape(d, d), np.eye(d) / np.sqrt(d), atol=1e-15
        )
