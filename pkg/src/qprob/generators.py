"""Seeded random states, observables and subspaces for property checks and scenarios."""
from __future__ import annotations

import numpy as np

from . import linalg
from .logic import Subspace
from .quantum import HermitianObservable, QuantumState


def rng_for(seed, *stream):
    return np.random.default_rng([int(seed), *(int(s) for s in stream)])


def random_pure_state(dim, rng) -> QuantumState:
    return QuantumState.pure(linalg.random_pure_vector(dim, rng))


def random_mixed_state(dim, rng, rank=None) -> QuantumState:
    return QuantumState.mixed(linalg.random_density(dim, rng, rank))


def _spread_eigenvalues(dim, rng, min_gap=1e-3):
    while True:
        w = np.sort(rng.normal(size=dim))
        if dim == 1 or np.min(np.diff(w)) > min_gap:
            return w


def random_nondegenerate_observable(dim, rng, name=None) -> HermitianObservable:
    """Haar eigenbasis with well-separated Gaussian eigenvalues."""
    U = linalg.random_unitary(dim, rng)
    return HermitianObservable.from_basis(U, _spread_eigenvalues(dim, rng), name)


def random_commuting_pair(dim, rng, names=("A", "B")):
    """Two non-degenerate observables sharing one random eigenbasis."""
    U = linalg.random_unitary(dim, rng)
    A = HermitianObservable.from_basis(U, _spread_eigenvalues(dim, rng), names[0])
    B = HermitianObservable.from_basis(U, _spread_eigenvalues(dim, rng), names[1])
    return A, B


def random_subspace(dim, rank, rng) -> Subspace:
    return Subspace(linalg.random_unitary(dim, rng)[:, :rank])


def random_commuting_subspaces(dim, n, rng):
    """``n`` subspaces spanned by random subsets of one shared orthonormal basis."""
    U = linalg.random_unitary(dim, rng)
    out = []
    for _ in range(n):
        cols = np.nonzero(rng.random(dim) < 0.5)[0]
        out.append(Subspace(U[:, cols]))
    return out
