"""Markovian master-equation dynamics and its stationary states.

The generator is

    G(rho) = -i [H, rho] + D(rho),
    D(rho) = sum_k g_k (L_k rho L_k^dagger - 1/2 {L_k^dagger L_k, rho}),

with time measured in units where hbar = 1. Writing the commutator term as
``-[H, rho]`` without the ``i`` only makes sense if ``H`` is anti-Hermitian;
with a Hermitian Hamiltonian ``-i[H, rho]`` is the trace-preserving choice.

Density operators are vectorized row-major (``rho.reshape(-1)``), so
``vec(A rho B) = kron(A, B.T) @ vec(rho)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import NoDecay, NonUniqueSteadyState, NoSteadyState, StepTooLarge
from .quantum import QuantumState, as_observable, as_state, born_probability

TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-7
STEADY_RESIDUAL_TOL = 1e-8
DIAGONAL_TOL = 1e-8
CROSSCHECK_TOL = 1e-6


def vec(rho):
    return np.asarray(rho, dtype=complex).reshape(-1)


def unvec(v, dim):
    return np.asarray(v).reshape(dim, dim)


def left_right_super(A, B):
    """Superoperator of ``rho -> A rho B``."""
    return np.kron(A, np.asarray(B).T)


def lindblad_dissipator(jumps, dim):
    D = np.zeros((dim * dim, dim * dim), dtype=complex)
    I = np.eye(dim)
    for L, rate in jumps:
        L = linalg.as_matrix(L, "jump operator")
        LdL = linalg.dagger(L) @ L
        D += rate * (left_right_super(L, linalg.dagger(L))
                     - 0.5 * left_right_super(LdL, I)
                     - 0.5 * left_right_super(I, LdL))
    return D


class LindbladModel:
    """Hamiltonian plus dissipator.

    The dissipator is assembled from ``jumps`` (pairs ``(L_k, rate_k)``);
    alternatively a raw ``dissipator`` superoperator may be given, in which
    case it must annihilate traces.
    """

    def __init__(self, hamiltonian, jumps=(), dissipator=None):
        H = linalg.as_matrix(hamiltonian, "hamiltonian")
        if not linalg.is_hermitian(H, 1e-10):
            raise ValueError("hamiltonian is not Hermitian")
        self.hamiltonian = H
        self.jumps = tuple((linalg.as_matrix(L, "jump operator"), float(g)) for L, g in jumps)
        d = self.dim
        for L, g in self.jumps:
            if L.shape != (d, d):
                raise ValueError(f"jump operator of shape {L.shape} on a {d}-dim system")
            if g < 0:
                raise ValueError(f"negative rate {g}")
        if dissipator is not None:
            D = np.asarray(dissipator, dtype=complex)
            if D.shape != (d * d, d * d):
                raise ValueError(f"dissipator must be {d * d}x{d * d}, got {D.shape}")
            leak = linalg.max_norm(vec(np.eye(d)) @ D)
            if leak > 1e-10:
                raise ValueError(f"dissipator does not annihilate traces (leak {leak:.3e})")
            self.raw_dissipator = D
        else:
            self.raw_dissipator = None

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @cached_property
    def dissipator(self):
        D = lindblad_dissipator(self.jumps, self.dim)
        if self.raw_dissipator is not None:
            D = D + self.raw_dissipator
        return D

    @cached_property
    def generator(self):
        I = np.eye(self.dim)
        H = self.hamiltonian
        return -1j * (left_right_super(H, I) - left_right_super(I, H)) + self.dissipator

    def apply(self, rho):
        rho = np.asarray(rho, dtype=complex)
        return unvec(self.generator @ vec(rho), self.dim)

    @cached_property
    def spectrum(self):
        return np.linalg.eigvals(self.generator)

    @property
    def decay_gap(self) -> float:
        """Slowest non-zero decay rate ``min(-Re lambda)``; 0 if some mode never decays."""
        lam = self.spectrum
        scale = max(1.0, float(np.max(np.abs(lam))))
        nonzero = lam[np.abs(lam) > 1e-9 * scale]
        if nonzero.size == 0:
            return 0.0
        return max(0.0, float(np.min(-nonzero.real)))

    def to_json(self) -> dict:
        out = {
            "hamiltonian": linalg.matrix_to_json(self.hamiltonian),
            "jumps": [{"operator": linalg.matrix_to_json(L), "rate": g} for L, g in self.jumps],
        }
        if self.raw_dissipator is not None:
            D = self.raw_dissipator
            out["dissipator"] = {"dim": D.shape[0], "re": D.real.tolist(), "im": D.imag.tolist()}
        return out

    @classmethod
    def from_json(cls, obj):
        if "preset" in obj:
            presets = {"dephasing": dephasing_model, "amplitude_damping": amplitude_damping_model}
            try:
                factory = presets[obj["preset"]]
            except KeyError:
                raise ValueError(f"unknown model preset {obj['preset']!r}") from None
            return factory(float(obj.get("gamma", 1.0)))
        H = linalg.matrix_from_json(obj["hamiltonian"])
        jumps = [(linalg.matrix_from_json(j["operator"]), float(j["rate"])) for j in obj.get("jumps", [])]
        D = linalg.matrix_from_json(obj["dissipator"]) if "dissipator" in obj else None
        return cls(H, jumps, D)


def dephasing_model(gamma=1.0, hamiltonian=None) -> LindbladModel:
    """``D(rho) = gamma (sz rho sz - rho)``: coherences decay as ``exp(-2 gamma t)``."""
    H = np.zeros((2, 2), dtype=complex) if hamiltonian is None else hamiltonian
    return LindbladModel(H, [(linalg.SIGMA_Z, gamma)])


def amplitude_damping_model(gamma=1.0, hamiltonian=None) -> LindbladModel:
    """Decay ``|1> -> |0>`` through ``sigma_- = |0><1|`` at rate ``gamma``."""
    H = np.zeros((2, 2), dtype=complex) if hamiltonian is None else hamiltonian
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    return LindbladModel(H, [(lower, gamma)])


def unitary_model(hamiltonian) -> LindbladModel:
    return LindbladModel(hamiltonian)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, dim, dim)

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(zip(self.times, self.states))

    @property
    def final(self):
        return self.states[-1]


def _rk4_propagator(G, h):
    # one classical RK4 step of the linear ODE x' = G x is exactly this quartic polynomial
    n = G.shape[0]
    hG = h * G
    T = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 5):
        term = term @ hG / k
        T = T + term
    return T


def _step_grid(t_final, dt):
    if t_final <= 0 or dt <= 0 or dt > t_final * (1 + 1e-12):
        raise ValueError("need t_final > 0 and 0 < dt <= t_final")
    n = int(round(t_final / dt))
    if abs(n * dt - t_final) > 1e-9 * t_final:
        n = math.ceil(t_final / dt)
    return n, t_final / n


def integrate(model: LindbladModel, rho0, t_final, dt, save_every=1) -> Trajectory:
    """Fixed-step RK4 from ``rho0`` to ``t_final``.

    The step is shrunk slightly if needed so that an integer number of steps
    lands exactly on ``t_final``. Every ``save_every``-th state (and the last)
    is stored and checked for unit trace and positivity.
    """
    rho0 = as_state(rho0).density
    if rho0.shape[0] != model.dim:
        raise ValueError(f"rho0 has dim {rho0.shape[0]}, model has dim {model.dim}")
    n, h = _step_grid(t_final, dt)
    T = _rk4_propagator(model.generator, h)
    d = model.dim

    x = vec(rho0)
    times, states = [0.0], [rho0.copy()]
    for k in range(1, n + 1):
        x = T @ x
        if k % save_every == 0 or k == n:
            rho = unvec(x, d)
            _check_point(rho, k * h, h)
            times.append(k * h)
            states.append(rho.copy())
    return Trajectory(np.asarray(times), np.asarray(states))


def _check_point(rho, t, h):
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise StepTooLarge(f"trace drifted to {tr!r} at t={t:.6g}; reduce dt (currently {h:.3g})")
    lo = np.linalg.eigvalsh(0.5 * (rho + linalg.dagger(rho)))[0]
    if lo < -POSITIVITY_TOL:
        raise StepTooLarge(f"eigenvalue {lo:.3e} at t={t:.6g}; reduce dt (currently {h:.3g})")


def propagate(model: LindbladModel, rho0, t, dt):
    """Final RK4 state only, via a matrix power of the one-step propagator."""
    n, h = _step_grid(t, dt)
    T = np.linalg.matrix_power(_rk4_propagator(model.generator, h), n)
    return unvec(T @ vec(as_state(rho0).density), model.dim)


def _kernel(G):
    U, s, Vh = np.linalg.svd(G)
    scale = max(1.0, s[0])
    k = int(np.sum(s <= 1e-10 * scale))
    right = Vh[len(s) - k:].conj().T
    left = U[:, len(s) - k:]
    return right, left


def _hermitian_unit_trace(M):
    M = 0.5 * (M + linalg.dagger(M))
    return M / np.trace(M).real


def asymptotic_state(model: LindbladModel, rho0):
    """``rho0`` projected onto the generator kernel along its range.

    For a decaying semigroup this is ``lim_{t->oo} exp(tG) rho0``; with
    undamped oscillations it is the time average.
    """
    N, M = _kernel(model.generator)
    if N.shape[1] == 0:
        raise NoSteadyState("generator has no zero eigenvalue")
    P0 = N @ np.linalg.solve(linalg.dagger(M) @ N, linalg.dagger(M))
    return _hermitian_unit_trace(unvec(P0 @ vec(as_state(rho0).density), model.dim))


@dataclass(frozen=True, eq=False)
class SteadyStateReport:
    steady_state: QuantumState
    residual: float
    diagonal_in_A_basis: bool
    eigen_populations: np.ndarray
    eigenvalues: np.ndarray
    unique: bool
    kernel_dim: int
    crosscheck_distance: float = None
    convergence_rate: float = None
    fit_quality: float = None
    max_offdiagonal: float = field(default=0.0)

    def to_json(self) -> dict:
        return {
            "steady_state": linalg.matrix_to_json(self.steady_state.density),
            "residual": self.residual,
            "diagonal_in_A_basis": self.diagonal_in_A_basis,
            "max_offdiagonal": self.max_offdiagonal,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "eigen_populations": [float(x) for x in self.eigen_populations],
            "unique": self.unique,
            "kernel_dim": self.kernel_dim,
            "crosscheck_distance": self.crosscheck_distance,
            "convergence_rate": self.convergence_rate,
            "fit_quality": self.fit_quality,
        }


def _long_time_dt(model):
    radius = float(np.max(np.abs(model.spectrum)))
    return min(0.01, 0.5 / radius) if radius > 0 else 0.01


def steady_state(model: LindbladModel, A, rho0, with_rate=True) -> SteadyStateReport:
    """Stationary state of the generator and its readout in the eigenbasis of ``A``.

    A one-dimensional kernel gives the unique steady state. A larger kernel
    triggers a ``NonUniqueSteadyState`` warning and the rho0-dependent
    long-time limit is returned instead.
    """
    A = as_observable(A)
    rho0 = as_state(rho0)
    G = model.generator
    N, _ = _kernel(G)
    k = N.shape[1]
    if k == 0:
        raise NoSteadyState("generator has no zero eigenvalue")
    if k == 1:
        rho_A = _hermitian_unit_trace(unvec(N[:, 0], model.dim))
    else:
        warnings.warn(f"generator kernel has dimension {k}; returning the rho0-dependent limit",
                      NonUniqueSteadyState, stacklevel=2)
        rho_A = asymptotic_state(model, rho0)
    state = QuantumState.mixed(rho_A)
    residual = float(np.linalg.norm(G @ vec(rho_A)))

    gap = model.decay_gap
    crosscheck = None
    if gap > 1e-9:
        late = propagate(model, rho0, 40.0 / gap, _long_time_dt(model))
        crosscheck = linalg.trace_distance(late, rho_A)

    W = np.column_stack(A.spectrum.bases)
    D = linalg.dagger(W) @ rho_A @ W
    off = linalg.max_norm(D - np.diag(np.diag(D)))
    diag = np.diag(D).real
    pops, start = [], 0
    for r in A.spectrum.ranks:
        pops.append(float(np.sum(diag[start:start + r])))
        start += r

    rate = quality = None
    if with_rate:
        try:
            rate, quality = convergence_rate(model, rho0, A)
        except NoDecay:
            pass
    return SteadyStateReport(
        steady_state=state, residual=residual, diagonal_in_A_basis=off <= DIAGONAL_TOL,
        eigen_populations=np.asarray(pops), eigenvalues=A.eigenvalues.copy(), unique=k == 1,
        kernel_dim=k, crosscheck_distance=crosscheck, convergence_rate=rate,
        fit_quality=quality, max_offdiagonal=off,
    )


def populations_match_born(report: SteadyStateReport, A) -> float:
    """Largest gap between diagonal populations and Born probabilities of the steady state."""
    A = as_observable(A)
    born = [born_probability(report.steady_state, A, x) for x in A.eigenvalues]
    return float(np.max(np.abs(np.asarray(born) - report.eigen_populations)))


def default_horizon(model: LindbladModel) -> float:
    gap = model.decay_gap
    return math.log(1e8) / gap if gap > 1e-9 else 20.0


def distance_curve(model, rho0, t_final=None, dt=None):
    """``(times, ||rho(t) - rho_inf||_F)`` along an RK4 trajectory."""
    t_final = default_horizon(model) if t_final is None else t_final
    dt = t_final / 2000 if dt is None else dt
    rho_inf = asymptotic_state(model, rho0)
    traj = integrate(model, rho0, t_final, dt)
    dist = np.array([np.linalg.norm(r - rho_inf) for r in traj.states])
    return traj.times, dist


def convergence_rate(model: LindbladModel, rho0, A=None, t_final=None, dt=None,
                     tail_fraction=0.6, transient_ratio=0.5, floor=1e-11):
    """Exponential rate of approach to the long-time state, fitted on the tail.

    Points before the distance first drops to ``transient_ratio`` times its
    initial value are discarded; the fit uses the last ``tail_fraction`` of
    what remains, minus anything below ``floor`` (relative) where rounding
    dominates. Returns ``(slope, R^2)`` of ``log distance`` against time.
    ``A`` is accepted for symmetry with ``steady_state`` and not used.
    """
    t, d = distance_curve(model, rho0, t_final, dt)
    if d[0] <= 0:
        raise NoDecay("rho0 already is the long-time state")
    d0 = d[0]
    below = np.nonzero(d <= transient_ratio * d0)[0]
    if below.size == 0:
        raise NoDecay("distance to the long-time state never halves")
    t, d = t[below[0]:], d[below[0]:]
    start = int(len(t) * (1.0 - tail_fraction))
    t, d = t[start:], d[start:]
    keep = d > floor * d0
    t, d = t[keep], d[keep]
    if len(t) < 3:
        raise NoDecay("fit window has fewer than 3 usable points")
    if np.any(np.diff(d) >= 0):
        raise NoDecay("distance is not monotonically decreasing over the fit window")
    y = np.log(d)
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 0.0
    return float(slope), r2
