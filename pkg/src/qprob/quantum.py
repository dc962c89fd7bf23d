"""Quantum probability calculus: Born rule, Lüders update, quantum FTP.

States are either pure vectors or density operators. Observables carry their
spectral decomposition; an outcome is identified with an eigenvalue.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .classical import JointDistribution
from .errors import (
    DegenerateSpectrum,
    DimMismatch,
    IncompatibleFamily,
    InvalidState,
    NumericalIntegrityError,
    OutcomeNotInSpectrum,
    ZeroProbabilityBranch,
)

STATE_TOL = 1e-10
CLAMP_WINDOW = 1e-12
ZERO_BRANCH = 1e-12
COMPAT_TOL = 1e-8


class QuantumState:
    """A normalized pure vector or a density operator."""

    __slots__ = ("kind", "_vector", "_density")

    def __init__(self, kind, data):
        if kind == "pure":
            v = np.asarray(data, dtype=complex).reshape(-1)
            if v.size == 0 or not np.all(np.isfinite(v)):
                raise InvalidState("state vector must be non-empty and finite")
            norm = np.linalg.norm(v)
            if abs(norm - 1.0) > STATE_TOL:
                raise InvalidState(f"state vector has norm {norm!r}, expected 1")
            self._vector = v
            self._density = None
        elif kind == "mixed":
            rho = linalg.as_matrix(data, "density operator")
            if not linalg.is_hermitian(rho, STATE_TOL):
                raise InvalidState("density operator is not Hermitian")
            tr = np.trace(rho).real
            if abs(tr - 1.0) > STATE_TOL:
                raise InvalidState(f"density operator has trace {tr!r}, expected 1")
            lo = np.linalg.eigvalsh(0.5 * (rho + linalg.dagger(rho)))[0]
            if lo < -STATE_TOL:
                raise InvalidState(f"density operator has negative eigenvalue {lo:.3e}")
            self._vector = None
            self._density = rho
        else:
            raise ValueError(f"kind must be 'pure' or 'mixed', not {kind!r}")
        self.kind = kind

    @classmethod
    def pure(cls, vector, normalize=False):
        v = np.asarray(vector, dtype=complex).reshape(-1)
        if normalize:
            n = np.linalg.norm(v)
            if n == 0:
                raise InvalidState("cannot normalize the zero vector")
            v = v / n
        return cls("pure", v)

    @classmethod
    def mixed(cls, rho):
        return cls("mixed", rho)

    @classmethod
    def maximally_mixed(cls, dim):
        return cls("mixed", np.eye(dim, dtype=complex) / dim)

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    @property
    def dim(self) -> int:
        return self._vector.size if self.is_pure else self._density.shape[0]

    @property
    def vector(self):
        if not self.is_pure:
            raise AttributeError("mixed states have no state vector")
        return self._vector

    @property
    def density(self):
        if self.is_pure:
            return np.outer(self._vector, self._vector.conj())
        return self._density

    def __repr__(self):
        return f"QuantumState(kind={self.kind!r}, dim={self.dim})"


def as_state(state) -> QuantumState:
    """Coerce a vector (pure) or square matrix (mixed) into a ``QuantumState``."""
    if isinstance(state, QuantumState):
        return state
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return QuantumState.pure(arr)
    return QuantumState.mixed(arr)


@dataclass(frozen=True, eq=False)
class HermitianObservable:
    matrix: np.ndarray
    spectrum: linalg.SpectralDecomposition = field(repr=False)
    name: str = None

    @classmethod
    def from_matrix(cls, M, name=None, tol=linalg.DEFAULT_TOL):
        M = linalg.as_matrix(M, name or "observable")
        return cls(M, linalg.spectral_decompose(M, tol), name)

    @classmethod
    def from_basis(cls, basis, eigenvalues, name=None):
        """Observable with eigenvector ``basis[:, k]`` for ``eigenvalues[k]``."""
        basis = np.asarray(basis, dtype=complex)
        M = (basis * np.asarray(eigenvalues, dtype=float)) @ linalg.dagger(basis)
        return cls.from_matrix(0.5 * (M + linalg.dagger(M)), name)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def is_nondegenerate(self) -> bool:
        return all(r == 1 for r in self.spectrum.ranks)

    def index(self, outcome) -> int:
        ev = self.spectrum.eigenvalues
        scale = max(1.0, linalg.max_norm(self.matrix))
        k = int(np.argmin(np.abs(ev - float(outcome))))
        if abs(ev[k] - float(outcome)) > linalg.DEFAULT_TOL * scale:
            raise OutcomeNotInSpectrum(f"{outcome!r} is not an eigenvalue of {self.name or 'observable'} "
                                       f"(spectrum {np.round(ev, 12).tolist()})")
        return k

    def projector(self, outcome):
        return self.spectrum.projectors[self.index(outcome)]

    def eigenvector(self, outcome):
        """Unit eigenvector for a non-degenerate outcome."""
        B = self.spectrum.bases[self.index(outcome)]
        if B.shape[1] != 1:
            raise DegenerateSpectrum(f"outcome {outcome!r} has multiplicity {B.shape[1]}")
        return B[:, 0]

    def __repr__(self):
        return f"HermitianObservable(name={self.name!r}, dim={self.dim}, spectrum={np.round(self.eigenvalues, 12).tolist()})"


def as_observable(obs, name=None) -> HermitianObservable:
    if isinstance(obs, HermitianObservable):
        return obs
    return HermitianObservable.from_matrix(obs, name)


def _clamp(p):
    if p < -CLAMP_WINDOW or p > 1.0 + CLAMP_WINDOW:
        raise NumericalIntegrityError(f"probability {p!r} outside [0, 1]")
    return min(1.0, max(0.0, p))


def _check_dims(state, obs):
    if state.dim != obs.dim:
        raise DimMismatch(f"state of dim {state.dim} vs observable of dim {obs.dim}")


def born_probability(state, observable, outcome) -> float:
    state = as_state(state)
    observable = as_observable(observable)
    _check_dims(state, observable)
    E = observable.projector(outcome)
    if state.is_pure:
        p = float(np.linalg.norm(E @ state.vector) ** 2)
    else:
        p = float(np.real(np.trace(state.density @ E)))
    return _clamp(p)


def born_distribution(state, observable) -> np.ndarray:
    """Born probabilities for every eigenvalue of ``observable``, in spectrum order."""
    observable = as_observable(observable)
    return np.array([born_probability(state, observable, x) for x in observable.eigenvalues])


def luders_update(state, observable, outcome=None) -> QuantumState:
    """Projective post-measurement state.

    With an ``outcome`` this is the selective update (pure stays pure);
    with ``outcome=None`` the non-selective mixture ``sum_x E rho E`` is
    returned as a density operator.
    """
    state = as_state(state)
    observable = as_observable(observable)
    _check_dims(state, observable)
    if outcome is None:
        rho = state.density
        out = sum(E @ rho @ E for E in observable.spectrum.projectors)
        out = 0.5 * (out + linalg.dagger(out))
        return QuantumState.mixed(out / np.trace(out).real)

    q = born_probability(state, observable, outcome)
    if q <= ZERO_BRANCH:
        raise ZeroProbabilityBranch(f"outcome {outcome!r} has probability {q:.3e}")
    E = observable.projector(outcome)
    if state.is_pure:
        v = E @ state.vector
        return QuantumState.pure(v / np.linalg.norm(v))
    rho = E @ state.density @ E
    rho = 0.5 * (rho + linalg.dagger(rho))
    return QuantumState.mixed(rho / np.trace(rho).real)


def conditional_probability(state, first, x, second, y) -> float:
    """``q(second = y | first = x)``: project on ``first = x``, then apply Born's rule."""
    return born_probability(luders_update(state, first, x), second, y)


@dataclass(frozen=True)
class CrossTerm:
    j: int
    k: int
    magnitude: float
    phase: float


@dataclass(frozen=True, eq=False)
class InterferenceDecomposition:
    """Split of ``q(B = target)`` into the classical-FTP sum and the interference term.

    ``cross_terms`` holds one entry per pair ``k < j`` of ``A``-branches with
    ``magnitude = |c_k||c_j|`` and ``phase = arg(c_k conj(c_j))``.
    """

    target_outcome: float
    classical_part: float
    interference_term: float
    total: float
    cross_terms: tuple
    branch_probabilities: np.ndarray = field(repr=False)
    conditionals: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "target_outcome": self.target_outcome,
            "classical_part": self.classical_part,
            "interference_term": self.interference_term,
            "total": self.total,
            "cross_terms": [
                {"j": t.j, "k": t.k, "magnitude": t.magnitude, "phase": t.phase}
                for t in self.cross_terms
            ],
        }


def quantum_ftp(state, A, B, target) -> InterferenceDecomposition:
    """Quantum formula of total probability for a pure state and non-degenerate ``A``, ``B``.

    With amplitudes ``c_j = <b|a_j><a_j|psi>`` the Born probability is
    ``|sum_j c_j|^2 = sum_j |c_j|^2 + 2 sum_{k<j} |c_k||c_j| cos(theta_kj)``;
    the first sum is exactly ``sum_j q(A=a_j) q(B=b|A=a_j)``.
    """
    state = as_state(state)
    A = as_observable(A)
    B = as_observable(B)
    if not state.is_pure:
        raise InvalidState("quantum_ftp needs a pure state")
    _check_dims(state, A)
    _check_dims(state, B)
    for obs, label in ((A, "A"), (B, "B")):
        if not obs.is_nondegenerate:
            raise DegenerateSpectrum(f"{obs.name or label} has a degenerate spectrum {obs.spectrum.ranks}")

    psi = state.vector
    beta = B.eigenvector(target)
    alphas = np.column_stack(A.spectrum.bases)  # dim x n, one eigenvector per column
    branch = alphas.conj().T @ psi              # <a_j|psi>
    overlap = beta.conj() @ alphas              # <b|a_j>
    c = overlap * branch

    q_a = np.abs(branch) ** 2
    q_b_given_a = np.abs(overlap) ** 2
    classical = float(np.sum(q_a * q_b_given_a))

    terms = []
    interference = 0.0
    for j in range(len(c)):
        for k in range(j):
            mag = float(abs(c[k]) * abs(c[j]))
            theta = float(np.angle(c[k] * np.conj(c[j]))) if mag > 0 else 0.0
            terms.append(CrossTerm(j, k, mag, theta))
            interference += 2.0 * mag * np.cos(theta)

    total = _clamp(classical + interference)
    born = born_probability(state, B, target)
    if abs(total - born) > 1e-10:
        raise NumericalIntegrityError(f"FTP decomposition {total!r} disagrees with Born rule {born!r}")
    return InterferenceDecomposition(
        float(B.eigenvalues[B.index(target)]), classical, float(interference), total,
        tuple(terms), q_a, q_b_given_a,
    )


def probability_gain(state, A, B, target) -> float:
    """Quantum minus classical-FTP probability of ``B = target``; positive is constructive."""
    return quantum_ftp(state, A, B, target).interference_term


def commutator_norm(A, B) -> float:
    A = as_observable(A)
    B = as_observable(B)
    if A.dim != B.dim:
        raise DimMismatch(f"observables of dim {A.dim} and {B.dim}")
    return linalg.max_norm(linalg.commutator(A.matrix, B.matrix))


def are_compatible(A, B, tol=COMPAT_TOL) -> bool:
    return commutator_norm(A, B) <= tol


def _check_family(observables, tol):
    for i, j in itertools.combinations(range(len(observables)), 2):
        n = commutator_norm(observables[i], observables[j])
        if n > tol:
            names = (observables[i].name or f"#{i}", observables[j].name or f"#{j}")
            raise IncompatibleFamily(names, n)


def jpd_for_compatible(state, observables, tol=COMPAT_TOL) -> JointDistribution:
    """Joint distribution ``p(x1..xn) = Tr[rho E1(x1)...En(xn)]`` of a commuting family.

    Cells whose joint spectral projector vanishes are left out of the support.
    """
    state = as_state(state)
    observables = [as_observable(o) for o in observables]
    if not observables:
        raise ValueError("need at least one observable")
    for o in observables:
        _check_dims(state, o)
    _check_family(observables, tol)
    names = [o.name or f"A{k + 1}" for k, o in enumerate(observables)]
    if len(set(names)) != len(names):
        names = [f"{n}#{k}" for k, n in enumerate(names)]

    rho = state.density
    support, probs = [], []
    for idx in itertools.product(*(range(len(o.eigenvalues)) for o in observables)):
        projs = [o.spectrum.projectors[i] for o, i in zip(observables, idx)]
        P = projs[0]
        for Q in projs[1:]:
            P = P @ Q
        if np.trace(P).real < 0.5:
            continue
        if len(projs) > 1:
            R = projs[-1]
            for Q in reversed(projs[:-1]):
                R = R @ Q
            if linalg.max_norm(P - R) > max(tol, 1e-8):
                raise NumericalIntegrityError("projector product depends on multiplication order")
        support.append(tuple(float(o.eigenvalues[i]) for o, i in zip(observables, idx)))
        probs.append(_clamp(float(np.real(np.trace(rho @ P)))))
    probs = np.asarray(probs)
    if abs(probs.sum() - 1.0) > 1e-10:
        raise NumericalIntegrityError(f"joint cells sum to {probs.sum()!r}")
    return JointDistribution(names, support, probs / probs.sum())


# Handy fixed states on C^2 and C^2 (x) C^2.
KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
