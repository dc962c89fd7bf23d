import numpy as np
import pytest
from hypothesis import given, strategies as st

from qprob import generators, linalg, logic
from qprob.errors import IncompatibleFamily
from qprob.logic import Subspace, boolean_subalgebra, complement, distributivity_check, join, leq, meet

seeds = st.integers(0, 2**32 - 1)


def rand_sub(rng, dim):
    return generators.random_subspace(dim, int(rng.integers(0, dim + 1)), rng)


def test_canonical_counterexample():
    a, b, c = logic.canonical_counterexample()
    res = distributivity_check(a, b, c)
    assert linalg.max_norm(res.lhs.projector - np.diag([1, 0])) <= 1e-8
    assert res.rhs.rank == 0
    assert not res.equal


def test_meet_and_join_of_coordinate_planes():
    e = np.eye(3)
    xy, yz = Subspace.span(e[0], e[1]), Subspace.span(e[1], e[2])
    assert meet(xy, yz).equals(Subspace.span(e[1]))
    assert join(xy, yz).rank == 3
    assert complement(xy).equals(Subspace.span(e[2]))


def test_from_projector():
    assert Subspace.from_projector(np.diag([1, 0, 1])).rank == 2
    with pytest.raises(ValueError):
        Subspace.from_projector(np.diag([0.5, 1]))


@given(seeds, st.integers(2, 6))
def test_lattice_laws(seed, dim):
    rng = np.random.default_rng(seed)
    a, b, c = (rand_sub(rng, dim) for _ in range(3))
    assert meet(a, b).equals(meet(b, a))
    assert join(a, b).equals(join(b, a))
    assert meet(a, meet(b, c)).equals(meet(meet(a, b), c))
    assert join(a, join(b, c)).equals(join(join(a, b), c))
    assert meet(a, a).equals(a) and join(a, a).equals(a)
    assert meet(a, join(a, b)).equals(a)
    assert join(a, meet(a, b)).equals(a)


@given(seeds, st.integers(2, 6))
def test_meet_oracle_via_nullspace(seed, dim):
    # oracle: a ^ b is the common null space of I - P_a and I - P_b
    rng = np.random.default_rng(seed)
    shared = linalg.random_unitary(dim, rng)[:, :1]
    a = Subspace.span(shared[:, 0], *linalg.random_unitary(dim, rng)[:, : int(rng.integers(0, dim))].T)
    b = Subspace.span(shared[:, 0], *linalg.random_unitary(dim, rng)[:, : int(rng.integers(0, dim))].T)
    I = np.eye(dim)
    null_dim = dim - np.linalg.matrix_rank(np.vstack([I - a.projector, I - b.projector]), tol=1e-8)
    m = meet(a, b)
    assert m.rank == null_dim >= 1
    assert leq(m, a) and leq(m, b)


@given(seeds, st.integers(2, 6))
def test_complement_is_orthocomplement(seed, dim):
    a = rand_sub(np.random.default_rng(seed), dim)
    c = complement(a)
    assert meet(a, c).rank == 0
    assert join(a, c).rank == dim


@given(seeds, st.integers(2, 6))
def test_half_distributivity(seed, dim):
    rng = np.random.default_rng(seed)
    a, b, c = (rand_sub(rng, dim) for _ in range(3))
    res = distributivity_check(a, b, c)
    assert leq(res.rhs, res.lhs)


@given(seeds, st.integers(2, 6))
def test_commuting_triples_distribute(seed, dim):
    a, b, c = generators.random_commuting_subspaces(dim, 3, np.random.default_rng(seed))
    assert distributivity_check(a, b, c).equal


def test_single_sigma_z_atoms():
    alg = boolean_subalgebra([linalg.SIGMA_Z])
    assert alg.atom_count == 2
    assert {round(float(a.projector[0, 0].real)) for a in alg.atoms} == {0, 1}


def test_two_qubit_z_atoms_are_computational_basis():
    alg = boolean_subalgebra(logic.qubit_z_family(2))
    assert alg.atom_count == 4 and alg.element_count == 16
    diag = sorted(tuple(np.round(np.diag(a.projector).real).astype(int)) for a in alg.atoms)
    assert diag == sorted(tuple(r) for r in np.eye(4, dtype=int))


@given(seeds, st.integers(2, 6))
def test_atoms_orthogonal_and_complete(seed, dim):
    rng = np.random.default_rng(seed)
    A, B = generators.random_commuting_pair(dim, rng)
    alg = boolean_subalgebra([A, B])
    P = [a.projector for a in alg.atoms]
    assert linalg.max_norm(sum(P) - np.eye(dim)) <= 1e-10
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            assert linalg.max_norm(P[i] @ P[j]) <= 1e-10


def test_incompatible_family_rejected():
    with pytest.raises(IncompatibleFamily):
        boolean_subalgebra([linalg.SIGMA_Z, linalg.SIGMA_X])


def test_atom_growth_small():
    assert [(n, k) for n, k, _ in logic.atom_growth(range(2, 6))] == [(n, 2**n) for n in range(2, 6)]
