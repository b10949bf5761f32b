"""Seeded sampling of states, product vectors, POVM elements, and unitaries.

All randomness flows from a single integer master seed.  Derived streams are
split with ``numpy``'s SeedSequence spawn keys, so a run that distributes
restarts or trials over workers draws exactly the same numbers as a serial
run.
"""
from __future__ import annotations

import numpy as np

from .operators import (
    Array,
    HermitianOperator,
    ProductVector,
    SeparableEnsemble,
    SystemLayout,
    single_system,
)

__all__ = [
    "rng_from",
    "random_density",
    "random_product_vector",
    "random_separable",
    "random_povm_first_element",
    "random_unitary",
    "random_psd",
]

def rng_from(seed, *key: int) -> np.random.Generator:
    """Generator for ``seed``; extra integers select an independent substream."""
    if isinstance(seed, np.random.Generator):
        if key:
            raise ValueError("substream keys require an integer master seed")
        return seed
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def _complex_gaussian(rng: np.random.Generator, shape) -> Array:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_density(d: int, seed) -> HermitianOperator:
    """Unit-trace PSD matrix from a normalized complex Gaussian square."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    rng = rng_from(seed)
    g = _complex_gaussian(rng, (d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return HermitianOperator(rho, single_system(d))


def random_psd(d: int, seed, unit_trace: bool = False) -> HermitianOperator:
    """PSD matrix G G† from a complex Gaussian G, optionally trace-normalized."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    rng = rng_from(seed)
    g = _complex_gaussian(rng, (d, d))
    p = g @ g.conj().T
    if unit_trace:
        p /= np.trace(p).real
    return HermitianOperator(p, single_system(d))


def random_product_vector(layout: SystemLayout, seed) -> ProductVector:
    """One normalized complex Gaussian factor per subsystem."""
    rng = rng_from(seed)
    factors = []
    for d in layout.dims:
        v = _complex_gaussian(rng, d)
        factors.append(v / np.linalg.norm(v))
    return ProductVector(tuple(factors))


def random_separable(layout: SystemLayout, k: int, seed) -> SeparableEnsemble:
    """Dirichlet(1,...,1) mixture of k independent product vectors."""
    if k < 1:
        raise ValueError(f"ensemble size must be >= 1, got {k}")
    rng = rng_from(seed)
    weights = tuple(rng.dirichlet(np.ones(k)).tolist())
    members = tuple(random_product_vector(layout, rng) for _ in range(k))
    return SeparableEnsemble(weights, members)


def random_povm_first_element(d: int, seed) -> HermitianOperator:
    """An effect E with 0 <= E <= I.

    Draw PSD S, T from Gaussian squares and return the Hermitized
    (S+T)^(-1/2) S (S+T)^(-1/2); S+T is positive definite almost surely.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    rng = rng_from(seed)
    g = _complex_gaussian(rng, (d, d))
    s = g @ g.conj().T
    g = _complex_gaussian(rng, (d, d))
    t = g @ g.conj().T
    vals, vecs = np.linalg.eigh(s + t)
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
    e = inv_sqrt @ s @ inv_sqrt
    e = (e + e.conj().T) / 2
    return HermitianOperator(e, single_system(d))


def random_unitary(d: int, seed) -> Array:
    """Haar-distributed unitary via phase-fixed QR of a complex Gaussian."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    rng = rng_from(seed)
    q, r = np.linalg.qr(_complex_gaussian(rng, (d, d)))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases
