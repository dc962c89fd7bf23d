"""Indirect measurement models and the quantum instruments they induce.

A model is a probe space K with initial state R, a coupling unitary U on
``system (x) probe`` (system is the first tensor factor) and a meter
observable on K. The outcome-``x`` branch is

    I(x) rho = Tr_K[(I (x) E_M(x)) U (rho (x) R) U^dagger].
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimMismatch, NumericalIntegrityError, OutcomeMismatch
from .quantum import (
    HermitianObservable,
    QuantumState,
    as_observable,
    as_state,
    born_probability,
    luders_update,
)

UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class IndirectMeasurementModel:
    probe_state: QuantumState
    coupling: np.ndarray
    meter: HermitianObservable
    system_dim: int = None

    def __post_init__(self):
        R = as_state(self.probe_state)
        meter = as_observable(self.meter, "meter")
        U = linalg.as_matrix(self.coupling, "coupling")
        if meter.dim != R.dim:
            raise DimMismatch(f"meter acts on dim {meter.dim} but probe state has dim {R.dim}")
        if U.shape[0] % R.dim:
            raise DimMismatch(f"coupling of dim {U.shape[0]} is not a multiple of probe dim {R.dim}")
        dS = U.shape[0] // R.dim
        if self.system_dim is not None and int(self.system_dim) != dS:
            raise DimMismatch(f"coupling implies system dim {dS}, not {self.system_dim}")
        if not linalg.is_unitary(U, UNITARY_TOL):
            raise ValueError("coupling is not unitary")
        object.__setattr__(self, "probe_state", R)
        object.__setattr__(self, "meter", meter)
        object.__setattr__(self, "coupling", U)
        object.__setattr__(self, "system_dim", dS)

    @property
    def probe_dim(self) -> int:
        return self.probe_state.dim

    @property
    def outcomes(self):
        return self.meter.eigenvalues

    def to_json(self) -> dict:
        return {
            "system_dim": self.system_dim,
            "probe_dim": self.probe_dim,
            "R": linalg.matrix_to_json(self.probe_state.density),
            "U": linalg.matrix_to_json(self.coupling),
            "M_A": linalg.matrix_to_json(self.meter.matrix),
        }

    @classmethod
    def from_json(cls, obj):
        R = linalg.matrix_from_json(obj["R"])
        if "probe_dim" in obj and int(obj["probe_dim"]) != R.shape[0]:
            raise DimMismatch(f"probe_dim {obj['probe_dim']} but R is {R.shape[0]}-dimensional")
        return cls(
            QuantumState.mixed(R),
            linalg.matrix_from_json(obj["U"]),
            HermitianObservable.from_matrix(linalg.matrix_from_json(obj["M_A"]), "meter"),
            obj.get("system_dim"),
        )


def _joint(model, rho):
    rho = as_state(rho)
    if rho.dim != model.system_dim:
        raise DimMismatch(f"system state of dim {rho.dim} vs model system dim {model.system_dim}")
    U = model.coupling
    return U @ np.kron(rho.density, model.probe_state.density) @ linalg.dagger(U)


def _meter_projector(model, x):
    return np.kron(np.eye(model.system_dim), model.meter.projector(x))


def outcome_probability(model: IndirectMeasurementModel, rho, x) -> float:
    return _branch(model, rho, x)[1]


def _branch(model, rho, x):
    joint = _meter_projector(model, x) @ _joint(model, rho)
    out = linalg.partial_trace(joint, (model.system_dim, model.probe_dim), keep=0)
    out = 0.5 * (out + linalg.dagger(out))
    q = float(np.real(np.trace(joint)))
    if abs(np.trace(out).real - q) > 1e-12:
        raise NumericalIntegrityError("partial trace lost probability mass")
    if q < -1e-12 or q > 1 + 1e-12:
        raise NumericalIntegrityError(f"outcome probability {q!r} outside [0, 1]")
    return out, min(1.0, max(0.0, q))


def instrument_apply(model: IndirectMeasurementModel, rho, x):
    """Unnormalized post-measurement operator ``I(x) rho``; its trace is ``q(x)``."""
    return _branch(model, rho, x)[0]


def nonselective_apply(model: IndirectMeasurementModel, rho):
    """The channel ``sum_x I(x) rho``."""
    return sum(instrument_apply(model, rho, x) for x in model.outcomes)


# bundled models

def cnot_probe_model() -> IndirectMeasurementModel:
    """Qubit probe in |0>, CNOT with the system as control, meter reads 0/1 on the probe."""
    P0 = np.diag([1, 0]).astype(complex)
    P1 = np.diag([0, 1]).astype(complex)
    U = np.kron(P0, linalg.I2) + np.kron(P1, linalg.SIGMA_X)
    meter = HermitianObservable.from_matrix(np.diag([0.0, 1.0]), "meter")
    return IndirectMeasurementModel(QuantumState.pure([1, 0]), U, meter)


def trivial_model(system_dim, probe_state, meter) -> IndirectMeasurementModel:
    """No coupling: ``U = I``."""
    R = as_state(probe_state)
    return IndirectMeasurementModel(R, np.eye(system_dim * R.dim, dtype=complex), meter)


def swap_probe_model(probe_state=None) -> IndirectMeasurementModel:
    """Qubit SWAP coupling with a sigma_z meter; the probe defaults to I/2."""
    R = QuantumState.maximally_mixed(2) if probe_state is None else as_state(probe_state)
    U = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    return IndirectMeasurementModel(R, U, HermitianObservable.from_matrix(linalg.SIGMA_Z, "meter"))


# checking an instrument against the projection postulate

def state_grid(dim, n=20, seed=0):
    """Deterministic test states: the computational basis, then seeded random pure states."""
    rng = np.random.default_rng(seed)
    states = [QuantumState.pure(np.eye(dim)[k]) for k in range(min(dim, n))]
    while len(states) < n:
        states.append(QuantumState.pure(linalg.random_pure_vector(dim, rng)))
    return states


@dataclass(frozen=True)
class OutcomeDeviation:
    meter_outcome: float
    system_outcome: float
    max_probability_deviation: float
    max_trace_distance: float


@dataclass(frozen=True, eq=False)
class RealizationReport:
    rows: tuple
    n_states: int
    tol: float = field(default=1e-8)

    @property
    def passed(self) -> bool:
        return all(r.max_probability_deviation <= self.tol and r.max_trace_distance <= self.tol
                   for r in self.rows)

    @property
    def max_deviation(self) -> float:
        return max(max(r.max_probability_deviation, r.max_trace_distance) for r in self.rows)


def _resolve_map(model, observable, outcome_map):
    meter_vals = list(model.outcomes)
    if outcome_map is None:
        raise OutcomeMismatch("declare the meter -> system outcome bijection (outcome_map)")
    pairs = []
    for m in meter_vals:
        hits = [s for k, s in outcome_map.items() if abs(float(k) - m) <= 1e-8]
        if len(hits) != 1:
            raise OutcomeMismatch(f"meter outcome {m!r} is not mapped exactly once")
        pairs.append((float(m), float(hits[0])))
    sys_vals = [s for _, s in pairs]
    try:
        idx = sorted(observable.index(s) for s in sys_vals)
    except Exception as exc:
        raise OutcomeMismatch(str(exc)) from None
    if idx != list(range(len(observable.eigenvalues))):
        raise OutcomeMismatch("outcome_map is not a bijection onto the observable's spectrum")
    return pairs


def verify_projective_realization(observable, model: IndirectMeasurementModel, outcome_map,
                                  states=None, tol=1e-8) -> RealizationReport:
    """Compare the model's instrument with Lüders' rule for ``observable`` over a grid of states.

    ``outcome_map`` maps meter eigenvalues to eigenvalues of ``observable``.
    Outcomes with zero Born probability are compared through the instrument's
    trace only, since no Lüders state exists there.
    """
    observable = as_observable(observable)
    if observable.dim != model.system_dim:
        raise DimMismatch("observable and model act on different system dimensions")
    pairs = _resolve_map(model, observable, outcome_map)
    states = state_grid(model.system_dim) if states is None else [as_state(s) for s in states]

    rows = []
    for m, s in pairs:
        dp = dt = 0.0
        for st in states:
            branch, q_model = _branch(model, st, m)
            q_born = born_probability(st, observable, s)
            dp = max(dp, abs(q_model - q_born))
            if q_born > 1e-12 and q_model > 1e-12:
                post = luders_update(st, observable, s).density
                dt = max(dt, linalg.trace_distance(branch / q_model, post))
            elif q_born > 1e-12 or q_model > 1e-12:
                dt = max(dt, 1.0)
        rows.append(OutcomeDeviation(m, s, dp, dt))
    return RealizationReport(tuple(rows), len(states), tol)
