"""The lattice of subspaces (projectors): meet, join, distributivity, Boolean blocks."""
from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .errors import DimMismatch, IncompatibleFamily, NumericalIntegrityError
from .quantum import as_observable

log = logging.getLogger(__name__)

RANK_TOL = 1e-8
EQUAL_TOL = 1e-8


def _orthonormal_range(M, tol=RANK_TOL):
    """Orthonormal basis of the column space of ``M``."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0 or M.shape[1] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    return U[:, s > tol]


class Subspace:
    """A closed subspace of ``C^n``, held as an orthonormal basis.

    The projector is built on first access, so large families of low-rank
    subspaces stay cheap.
    """

    def __init__(self, basis, dim_ambient=None):
        basis = np.asarray(basis, dtype=complex)
        if basis.ndim == 1:
            basis = basis.reshape(-1, 1)
        if dim_ambient is not None and basis.shape[0] != dim_ambient:
            raise DimMismatch(f"basis has {basis.shape[0]} rows, ambient dim is {dim_ambient}")
        self.basis = basis

    @classmethod
    def from_projector(cls, P, tol=1e-10):
        P = linalg.as_matrix(P, "projector")
        if linalg.hermitian_deviation(P) > tol or linalg.max_norm(P @ P - P) > tol:
            raise ValueError("not an orthogonal projector")
        w, V = np.linalg.eigh(0.5 * (P + linalg.dagger(P)))
        return cls(V[:, w > 0.5])

    @classmethod
    def span(cls, *vectors):
        return cls(_orthonormal_range(np.column_stack([np.asarray(v, dtype=complex) for v in vectors])))

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((dim, 0), dtype=complex))

    @classmethod
    def full(cls, dim):
        return cls(np.eye(dim, dtype=complex))

    @property
    def dim_ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def projector(self):
        return self.basis @ linalg.dagger(self.basis)

    def _check(self, other):
        if self.dim_ambient != other.dim_ambient:
            raise DimMismatch(f"subspaces of C^{self.dim_ambient} and C^{other.dim_ambient}")

    def __le__(self, other) -> bool:
        return leq(self, other)

    def equals(self, other, tol=EQUAL_TOL) -> bool:
        self._check(other)
        return linalg.max_norm(self.projector - other.projector) <= tol

    def __repr__(self):
        return f"Subspace(rank={self.rank}, dim={self.dim_ambient})"


def leq(a: Subspace, b: Subspace, tol=EQUAL_TOL) -> bool:
    """``a <= b`` iff ``P_b P_a = P_a``."""
    a._check(b)
    if a.rank == 0:
        return True
    return linalg.max_norm(b.projector @ a.basis - a.basis) <= tol


def principal_cosines(a: Subspace, b: Subspace):
    a._check(b)
    if a.rank == 0 or b.rank == 0:
        return np.zeros(0)
    return np.linalg.svd(linalg.dagger(a.basis) @ b.basis, compute_uv=False)


def meet(a: Subspace, b: Subspace, tol=RANK_TOL) -> Subspace:
    """Intersection, from the principal vectors with cosine >= 1 - tol."""
    a._check(b)
    if a.rank == 0 or b.rank == 0:
        return Subspace.zero(a.dim_ambient)
    U, s, _ = np.linalg.svd(linalg.dagger(a.basis) @ b.basis)
    shared = s >= 1.0 - tol
    near = (s < 1.0 - tol) & (s > 1.0 - 1e3 * tol)
    if np.any(near):
        log.debug("meet: principal cosines close to the sharing threshold: %s", s[near])
    k = int(np.count_nonzero(shared))
    return Subspace(_orthonormal_range(a.basis @ U[:, :k]))


def join(a: Subspace, b: Subspace, tol=RANK_TOL) -> Subspace:
    """Closed span of the union."""
    a._check(b)
    return Subspace(_orthonormal_range(np.hstack([a.basis, b.basis]), tol))


def complement(a: Subspace) -> Subspace:
    P = np.eye(a.dim_ambient) - a.projector
    return Subspace(_orthonormal_range(P))


@dataclass(frozen=True, eq=False)
class DistributivityResult:
    lhs: Subspace
    rhs: Subspace
    equal: bool


def distributivity_check(a: Subspace, b: Subspace, c: Subspace) -> DistributivityResult:
    """Compare ``a ^ (b v c)`` with ``(a ^ b) v (a ^ c)``.

    The second is always contained in the first; a violation of that
    containment means the lattice operations are numerically broken.
    """
    a._check(b)
    a._check(c)
    lhs = meet(a, join(b, c))
    rhs = join(meet(a, b), meet(a, c))
    if not leq(rhs, lhs):
        raise NumericalIntegrityError("(a^b) v (a^c) is not contained in a ^ (b v c)")
    return DistributivityResult(lhs, rhs, lhs.equals(rhs))


@dataclass(frozen=True, eq=False)
class BooleanAlgebra:
    """Atoms (joint eigenspaces) of the Boolean algebra generated by a commuting family."""

    atoms: tuple
    labels: tuple

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    @property
    def element_count(self) -> int:
        return 2 ** len(self.atoms)


def _joint_basis(mats, seed=0, tol=1e-8):
    """Unitary diagonalizing every matrix in a commuting family, or ``None``."""
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(0.5, 1.5, size=len(mats))
    C = sum(c * M for c, M in zip(coeffs, mats))
    _, W = np.linalg.eigh(0.5 * (C + linalg.dagger(C)))
    diags = []
    for M in mats:
        # M W = W diag(d) certifies W^H M W is diagonal at the cost of one product
        MW = M @ W
        d = np.einsum("ij,ij->j", W.conj(), MW).real
        if linalg.max_norm(MW - W * d) > tol * max(1.0, linalg.max_norm(M)):
            return None, None
        diags.append(d)
    return W, diags


def boolean_subalgebra(observables, tol=1e-8) -> BooleanAlgebra:
    """Atoms of the Boolean algebra generated by pairwise-commuting observables.

    A generic linear combination of the family is diagonalized; each
    observable is then diagonal in that basis and the atoms are the groups of
    basis vectors sharing a tuple of eigenvalues.
    """
    obs = [as_observable(o) for o in observables]
    if not obs:
        raise ValueError("need at least one observable")
    dim = obs[0].dim
    if any(o.dim != dim for o in obs):
        raise DimMismatch("observables act on different dimensions")
    mats = [o.matrix for o in obs]
    W, diags = None, None
    for attempt in range(3):
        W, diags = _joint_basis(mats, seed=attempt, tol=tol)
        if W is not None:
            break
    if W is None:
        for i, j in itertools.combinations(range(len(obs)), 2):
            n = linalg.max_norm(linalg.commutator(mats[i], mats[j]))
            if n > tol:
                raise IncompatibleFamily((obs[i].name or f"#{i}", obs[j].name or f"#{j}"), n)
        raise NumericalIntegrityError("could not find a joint eigenbasis")

    # snap each diagonal entry onto the observable's declared spectrum
    labels = []
    for o, d in zip(obs, diags):
        ev = o.eigenvalues
        labels.append(ev[np.argmin(np.abs(d[:, None] - ev[None, :]), axis=1)])
    keys = list(zip(*labels))
    groups = {}
    for col, key in enumerate(keys):
        groups.setdefault(tuple(float(x) for x in key), []).append(col)
    order = sorted(groups)
    atoms = tuple(Subspace(W[:, groups[k]]) for k in order)
    return BooleanAlgebra(atoms, tuple(order))


def qubit_z_family(n):
    """``sigma_z`` acting on each factor of ``(C^2)^{(x) n}``."""
    out = []
    for k in range(n):
        factors = [linalg.I2] * n
        factors[k] = linalg.SIGMA_Z
        out.append(linalg.tensor_product(*factors))
    return out


def atom_growth(n_values=range(2, 11)):
    """``(n, atom count, seconds)`` for the n-qubit ``sigma_z`` family."""
    rows = []
    for n in n_values:
        fam = qubit_z_family(n)
        t0 = time.perf_counter()
        algebra = boolean_subalgebra(fam)
        rows.append((n, algebra.atom_count, time.perf_counter() - t0))
        log.info("n=%d atoms=%d time=%.3fs", n, rows[-1][1], rows[-1][2])
    return rows


def canonical_counterexample():
    """``(|0>, |+>, |->)`` lines in ``C^2``: the smallest distributivity failure."""
    a = Subspace.span([1, 0])
    b = Subspace.span(np.array([1, 1]) / np.sqrt(2))
    c = Subspace.span(np.array([1, -1]) / np.sqrt(2))
    return a, b, c
