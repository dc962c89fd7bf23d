"""Frequency realization of probabilities and the g2(0) click model.

Sampling uses numpy's counter-based Philox generator keyed by
``(seed, stream)``; draw ``i`` of a stream is fixed by its counter, so
records are reproducible bit for bit whatever the scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateRecord, EmptyRecord
from .quantum import as_observable, as_state, born_distribution

STREAM_OUTCOMES = 0
STREAM_CLICKS = 1


def generator(seed, stream=0, offset=0) -> np.random.Generator:
    """Philox generator for ``(seed, stream)``, advanced past ``offset`` 64-bit draws."""
    bitgen = np.random.Philox(np.random.SeedSequence([int(seed), int(stream)]))
    if offset:
        bitgen = bitgen.advance(offset)
    return np.random.Generator(bitgen)


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    outcomes: np.ndarray
    observable: str
    seed: int
    spectrum: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.outcomes)

    def counts(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=len(self.spectrum))

    def prefix(self, n) -> "MeasurementRecord":
        return MeasurementRecord(self.outcomes[:n], self.observable, self.seed,
                                 self.spectrum, self.indices[:n])


def _inverse_cdf(probs, u):
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(probs) - 1)


def sample_outcomes(state, observable, N, seed, stream=STREAM_OUTCOMES) -> MeasurementRecord:
    """``N`` i.i.d. Born-rule outcomes drawn by inverse CDF from a seeded stream."""
    if N < 1:
        raise ValueError("N must be >= 1")
    obs = as_observable(observable)
    probs = born_distribution(as_state(state), obs)
    u = generator(seed, stream).random(int(N))
    idx = _inverse_cdf(probs, u)
    return MeasurementRecord(obs.eigenvalues[idx], obs.name or "observable", int(seed),
                             obs.eigenvalues.copy(), idx)


def _outcome_index(record, outcome):
    k = int(np.argmin(np.abs(record.spectrum - float(outcome))))
    if abs(record.spectrum[k] - float(outcome)) > 1e-8 * max(1.0, abs(float(outcome))):
        return None
    return k


def empirical_frequency(record: MeasurementRecord, event_outcome, exact=False):
    """``k_N(E) / N`` for the event ``outcome == event_outcome``.

    With ``exact=True`` the ratio is returned as a ``Fraction``.
    """
    if record.N == 0:
        raise EmptyRecord("record has no outcomes")
    k = _outcome_index(record, event_outcome)
    hits = 0 if k is None else int(np.count_nonzero(record.indices == k))
    if exact:
        return Fraction(hits, record.N)
    return hits / record.N


@dataclass(frozen=True)
class LLNRow:
    N: int
    frequency: float
    deviation: float
    envelope: float

    @property
    def within(self) -> bool:
        return self.deviation <= self.envelope


@dataclass(frozen=True, eq=False)
class LLNTable:
    probability: float
    rows: tuple
    sigmas: float = 4.0

    @property
    def breaches(self) -> int:
        return sum(1 for r in self.rows if not r.within)

    @property
    def holds(self) -> bool:
        return self.breaches == 0


def lln_convergence(state, observable, outcome, N_grid, seed, sigmas=4.0) -> LLNTable:
    """Deviation ``|nu_N - p|`` on nested prefixes of one sample stream.

    Each row carries the envelope ``sigmas * sqrt(p(1-p)/N)``; at 4 sigma a
    single row breaches with probability about 6e-5.
    """
    grid = [int(n) for n in N_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])) or not grid or grid[0] < 1:
        raise ValueError("N_grid must be a non-empty increasing list of positive integers")
    obs = as_observable(observable)
    st = as_state(state)
    p = float(born_distribution(st, obs)[obs.index(outcome)])
    record = sample_outcomes(st, obs, grid[-1], seed)
    k = obs.index(outcome)
    hits = np.cumsum(record.indices == k)
    rows = []
    for n in grid:
        nu = hits[n - 1] / n
        rows.append(LLNRow(n, float(nu), float(abs(nu - p)), float(sigmas * np.sqrt(p * (1 - p) / n))))
    return LLNTable(p, tuple(rows), sigmas)


# second-order coherence

SOURCE_KINDS = ("single_photon", "coherent", "thermal")


@dataclass(frozen=True, eq=False)
class ClickRecord:
    detector_a_clicks: np.ndarray
    detector_b_clicks: np.ndarray
    source_kind: str = "recorded"

    def __post_init__(self):
        a = np.asarray(self.detector_a_clicks, dtype=np.int64)
        b = np.asarray(self.detector_b_clicks, dtype=np.int64)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("detector records must be 1-d and of equal length")
        if np.any(a < 0) or np.any(b < 0):
            raise ValueError("click counts must be non-negative")
        object.__setattr__(self, "detector_a_clicks", a)
        object.__setattr__(self, "detector_b_clicks", b)

    def __len__(self):
        return len(self.detector_a_clicks)


def g2_zero(clicks: ClickRecord) -> float:
    """Zero-delay coincidence estimator ``<n_a n_b> / (<n_a><n_b>)``."""
    a, b = clicks.detector_a_clicks, clicks.detector_b_clicks
    if len(a) == 0:
        raise DegenerateRecord("no trial windows")
    ma, mb = a.mean(), b.mean()
    if ma == 0 or mb == 0:
        raise DegenerateRecord("a detector never clicked")
    return float(np.mean(a * b) / (ma * mb))


def simulate_clicks(source_kind, n_windows, mean_count=1.0, seed=0) -> ClickRecord:
    """Two detectors behind a 50/50 beam splitter.

    ``single_photon``: one photon per window, routed to a or b with
    probability 1/2. ``coherent``: independent Poisson(mean_count/2) at each
    detector. ``thermal``: a shared exponentially distributed intensity
    drives both Poisson counts.
    """
    if n_windows < 1:
        raise ValueError("n_windows must be >= 1")
    if mean_count <= 0:
        raise ValueError("mean_count must be positive")
    rng = generator(seed, STREAM_CLICKS)
    n = int(n_windows)
    if source_kind == "single_photon":
        a = (rng.random(n) < 0.5).astype(np.int64)
        b = 1 - a
    elif source_kind == "coherent":
        a = rng.poisson(mean_count / 2, n)
        b = rng.poisson(mean_count / 2, n)
    elif source_kind == "thermal":
        intensity = rng.exponential(mean_count, n)
        a = rng.poisson(intensity / 2)
        b = rng.poisson(intensity / 2)
    else:
        raise ValueError(f"source_kind must be one of {SOURCE_KINDS}, not {source_kind!r}")
    return ClickRecord(a, b, source_kind)
