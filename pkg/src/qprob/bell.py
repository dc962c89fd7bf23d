"""CHSH test bench: Bell operator, maximal violation, local incompatibility sweeps.

The CHSH combination used throughout is

    S = <A1 B1> + <A1 B2> + <A2 B1> - <A2 B2>,

i.e. the Bell operator ``A1 (x) (B1 + B2) + A2 (x) (B1 - B2)``. The other
three placements of the minus sign are available through ``minus=``; they
are related by relabelling the settings.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimMismatch
from .quantum import HermitianObservable, QuantumState, as_observable, as_state

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * np.sqrt(2.0)
VIOLATION_TOL = 1e-8
SPECTRUM_TOL = 1e-10

_SIGNS = {
    "A1B1": (-1, 1, 1, 1),
    "A1B2": (1, -1, 1, 1),
    "A2B1": (1, 1, -1, 1),
    "A2B2": (1, 1, 1, -1),
}
MINUS_PLACEMENTS = tuple(_SIGNS)


@dataclass(frozen=True, eq=False)
class CHSHSetting:
    A1: HermitianObservable
    A2: HermitianObservable
    B1: HermitianObservable
    B2: HermitianObservable

    def __post_init__(self):
        for name in ("A1", "A2", "B1", "B2"):
            obs = as_observable(getattr(self, name), name)
            object.__setattr__(self, name, obs)
            ev = obs.eigenvalues
            if ev[0] < -1 - SPECTRUM_TOL or ev[-1] > 1 + SPECTRUM_TOL:
                raise ValueError(f"{name} has spectrum outside [-1, 1]: {ev.tolist()}")
        if self.A1.dim != self.A2.dim or self.B1.dim != self.B2.dim:
            raise DimMismatch("each party's two observables must act on the same space")

    @property
    def dims(self):
        return (self.A1.dim, self.B1.dim)


def bell_operator(setting: CHSHSetting, minus="A2B2"):
    s11, s12, s21, s22 = _SIGNS[minus]
    A1, A2, B1, B2 = (o.matrix for o in (setting.A1, setting.A2, setting.B1, setting.B2))
    return (np.kron(A1, s11 * B1 + s12 * B2) + np.kron(A2, s21 * B1 + s22 * B2))


def chsh_value(state, setting: CHSHSetting, minus="A2B2") -> float:
    state = as_state(state)
    dA, dB = setting.dims
    if state.dim != dA * dB:
        raise DimMismatch(f"state of dim {state.dim} vs setting of dims {dA}x{dB}")
    W = bell_operator(setting, minus)
    if state.is_pure:
        v = state.vector
        val = np.vdot(v, W @ v)
    else:
        val = np.trace(state.density @ W)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"CHSH expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


@dataclass(frozen=True, eq=False)
class CHSHResult:
    """``bell_operator_max`` is the largest |eigenvalue| of the Bell operator.

    ``bell_operator_eigenvalue`` is that eigenvalue with its sign, so
    ``chsh_value(optimal_state) == bell_operator_eigenvalue``. Ties in
    magnitude are resolved towards the positive eigenvalue.
    """

    bell_operator_max: float
    bell_operator_eigenvalue: float
    optimal_state: QuantumState = field(repr=False)
    violated: bool
    locally_incompatible: bool
    commutator_norms: tuple


def commutator_norms(setting: CHSHSetting):
    nA = linalg.max_norm(linalg.commutator(setting.A1.matrix, setting.A2.matrix))
    nB = linalg.max_norm(linalg.commutator(setting.B1.matrix, setting.B2.matrix))
    return nA, nB


def _default_tol(setting):
    return 1e-8 * max(1.0, *(linalg.max_norm(o.matrix) for o in (setting.A1, setting.A2, setting.B1, setting.B2)))


def local_incompatibility(setting: CHSHSetting, tol=None) -> bool:
    """Both local pairs fail to commute: ``[A1, A2] != 0`` and ``[B1, B2] != 0``."""
    tol = _default_tol(setting) if tol is None else tol
    nA, nB = commutator_norms(setting)
    return nA > tol and nB > tol


def max_chsh(setting: CHSHSetting, minus="A2B2", tol=None) -> CHSHResult:
    """Maximal |CHSH| over all states, read off the Bell operator spectrum."""
    w, V = np.linalg.eigh(bell_operator(setting, minus))
    lo, hi = w[0], w[-1]
    k = -1 if hi >= -lo - 1e-12 else 0
    lam = float(w[k])
    bmax = abs(lam)
    tol_c = _default_tol(setting) if tol is None else tol
    norms = commutator_norms(setting)
    return CHSHResult(
        bell_operator_max=bmax,
        bell_operator_eigenvalue=lam,
        optimal_state=QuantumState.pure(V[:, k] / np.linalg.norm(V[:, k])),
        violated=bmax > CLASSICAL_BOUND + VIOLATION_TOL,
        locally_incompatible=norms[0] > tol_c and norms[1] > tol_c,
        commutator_norms=norms,
    )


def tsirelson_setting() -> CHSHSetting:
    """Settings reaching ``2 sqrt(2)`` on the singlet state."""
    r = 1.0 / np.sqrt(2.0)
    return CHSHSetting(
        A1=linalg.SIGMA_Z,
        A2=linalg.SIGMA_X,
        B1=-(linalg.SIGMA_Z + linalg.SIGMA_X) * r,
        B2=(linalg.SIGMA_X - linalg.SIGMA_Z) * r,
    )


def random_bounded_observable(dim, rng, name=None) -> HermitianObservable:
    """Gaussian Hermitian matrix with its spectrum affinely mapped onto [-1, 1]."""
    H = linalg.random_hermitian(dim, rng)
    w, V = np.linalg.eigh(H)
    span = w[-1] - w[0]
    w = 2.0 * (w - w[0]) / span - 1.0 if span > 0 else np.zeros_like(w)
    return HermitianObservable.from_basis(V, np.clip(w, -1.0, 1.0), name)


def random_commuting_partner(obs: HermitianObservable, rng, name=None) -> HermitianObservable:
    """Random observable diagonal in an eigenbasis of ``obs`` (so the pair commutes)."""
    V = np.column_stack(obs.spectrum.bases)
    w = rng.uniform(-1.0, 1.0, size=V.shape[1])
    return HermitianObservable.from_basis(V, w, name)


def random_setting(dims, rng, compatible=None) -> CHSHSetting:
    """Random CHSH setting; ``compatible`` forces commuting local pairs.

    ``compatible`` is one of ``None``, ``"alice"``, ``"bob"``, ``"both"`` or
    ``"either"`` (alice, bob or both, chosen at random).
    """
    dA, dB = dims
    if compatible == "either":
        compatible = ("alice", "bob", "both")[int(rng.integers(3))]
    A1 = random_bounded_observable(dA, rng, "A1")
    if compatible in ("alice", "both"):
        A2 = random_commuting_partner(A1, rng, "A2")
    else:
        A2 = random_bounded_observable(dA, rng, "A2")
    B1 = random_bounded_observable(dB, rng, "B1")
    if compatible in ("bob", "both"):
        B2 = random_commuting_partner(B1, rng, "B2")
    else:
        B2 = random_bounded_observable(dB, rng, "B2")
    return CHSHSetting(A1, A2, B1, B2)


@dataclass(frozen=True)
class SweepRow:
    trial: int
    commutator_norm_A: float
    commutator_norm_B: float
    bell_max: float
    violated: bool
    locally_incompatible: bool


@dataclass
class SweepReport:
    """Contingency table of (locally incompatible, violated) over random settings."""

    rows: list = field(default_factory=list)
    dims: tuple = (2, 2)
    seed: int = 0

    def count(self, incompatible: bool, violated: bool) -> int:
        return sum(1 for r in self.rows if r.locally_incompatible == incompatible and r.violated == violated)

    @property
    def contingency(self):
        """``{(incompatible, violated): count}`` for all four cells."""
        return {(i, v): self.count(i, v) for i in (False, True) for v in (False, True)}

    @property
    def necessity_holds(self) -> bool:
        return self.count(False, True) == 0

    @property
    def sufficiency_rate(self):
        """Fraction of incompatible settings that violate; ``None`` without any."""
        n = sum(1 for r in self.rows if r.locally_incompatible)
        return None if n == 0 else self.count(True, True) / n

    @property
    def counterexample_candidates(self):
        """Incompatible settings with no violating state, kept for inspection."""
        return [r for r in self.rows if r.locally_incompatible and not r.violated]

    def to_csv_rows(self):
        yield ["trial", "commutator_norm_A", "commutator_norm_B", "bell_max", "violated"]
        for r in self.rows:
            yield [str(r.trial), f"{r.commutator_norm_A:.12g}", f"{r.commutator_norm_B:.12g}",
                   f"{r.bell_max:.12g}", str(int(r.violated))]


def _trial(seed, index, dims, compatible):
    rng = np.random.default_rng([seed, index])
    setting = random_setting(dims, rng, compatible)
    res = max_chsh(setting)
    return SweepRow(index, res.commutator_norms[0], res.commutator_norms[1],
                    res.bell_operator_max, res.violated, res.locally_incompatible)


def _threads():
    try:
        return max(1, int(os.environ.get("QPROB_THREADS", "1")))
    except ValueError:
        return 1


def incompatibility_sweep(n_trials, dims=(2, 2), seed=0, compatible=None, threads=None) -> SweepReport:
    """Random settings checked against the local-incompatibility criterion.

    Trial ``i`` draws from its own generator seeded with ``(seed, i)``, so the
    report does not depend on ``threads`` (default: ``$QPROB_THREADS`` or 1).
    """
    dims = tuple(int(d) for d in dims)
    if n_trials < 0:
        raise ValueError("n_trials must be >= 0")
    if min(dims) < 2:
        raise ValueError("each party needs dimension >= 2")
    threads = _threads() if threads is None else max(1, int(threads))
    if threads == 1 or n_trials < 2:
        rows = [_trial(seed, i, dims, compatible) for i in range(n_trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda i: _trial(seed, i, dims, compatible), range(n_trials)))
    return SweepReport(rows, dims, seed)
