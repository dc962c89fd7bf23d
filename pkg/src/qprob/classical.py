"""Kolmogorov probability on finite sample spaces.

The sigma-algebra is always the full power set, so an event is simply a
predicate on (or a collection of) elementary points.
"""
from __future__ import annotations

import csv
import io
import itertools
from collections.abc import Callable, Collection
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionOnNull, UnknownVariable

WEIGHT_TOL = 1e-12
# random-variable values are snapped onto their declared outcomes within this
OUTCOME_GRID_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteProbabilitySpace:
    points: tuple
    weights: np.ndarray

    def __init__(self, points, weights):
        points = tuple(points)
        weights = np.asarray(weights, dtype=float).copy()
        if weights.ndim != 1 or len(points) != weights.shape[0]:
            raise ValueError(f"{len(points)} points but weights of shape {weights.shape}")
        if len(points) == 0:
            raise ValueError("sample space must be non-empty")
        if len(set(points)) != len(points):
            raise ValueError("sample points must be distinct")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite and non-negative")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {weights.sum()!r}, not 1")
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points):
        points = tuple(points)
        return cls(points, np.full(len(points), 1.0 / len(points)))

    def weight(self, point) -> float:
        return float(self.weights[self.points.index(point)])

    def mask(self, event) -> np.ndarray:
        """Boolean mask over ``points`` for a predicate or a collection of points."""
        if event is None:
            return np.zeros(len(self.points), dtype=bool)
        if callable(event):
            return np.array([bool(event(p)) for p in self.points], dtype=bool)
        if isinstance(event, Collection) and not isinstance(event, (str, bytes)):
            members = set(event)
            return np.array([p in members for p in self.points], dtype=bool)
        raise TypeError("event must be a predicate or a collection of sample points")

    def to_json(self) -> dict:
        return {"points": list(self.points), "weights": self.weights.tolist()}

    @classmethod
    def from_json(cls, obj):
        points = [tuple(p) if isinstance(p, list) else p for p in obj["points"]]
        return cls(points, obj["weights"])


@dataclass(frozen=True, eq=False)
class RandomVariable:
    """A total real-valued function on the sample points.

    ``outcomes`` is the declared range. Values are snapped onto it so that
    joint-distribution cells are keyed by exact outcome values.
    """

    name: str
    values: dict
    outcomes: tuple = field(default=None)

    def __post_init__(self):
        vals = {p: float(v) for p, v in dict(self.values).items()}
        if self.outcomes is None:
            outcomes = tuple(sorted(set(vals.values())))
        else:
            outcomes = tuple(sorted(float(x) for x in self.outcomes))
        grid = np.asarray(outcomes)
        snapped = {}
        for p, v in vals.items():
            k = int(np.argmin(np.abs(grid - v)))
            if abs(grid[k] - v) > OUTCOME_GRID_TOL:
                raise ValueError(f"{self.name}({p!r}) = {v} is not a declared outcome")
            snapped[p] = outcomes[k]
        object.__setattr__(self, "values", snapped)
        object.__setattr__(self, "outcomes", outcomes)

    @classmethod
    def from_function(cls, name, space: FiniteProbabilitySpace, fn: Callable, outcomes=None):
        return cls(name, {p: fn(p) for p in space.points}, outcomes)

    def __call__(self, point):
        return self.values[point]

    def check_total(self, space: FiniteProbabilitySpace):
        missing = [p for p in space.points if p not in self.values]
        if missing:
            raise ValueError(f"{self.name} is undefined on {missing[:3]}")

    def event(self, value) -> Callable:
        """Predicate for ``{lambda : X(lambda) = value}``."""
        value = float(value)
        return lambda p: abs(self.values[p] - value) <= OUTCOME_GRID_TOL


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint distribution of named variables over a finite support."""

    variables: tuple
    support: tuple
    probabilities: np.ndarray

    def __init__(self, variables, support, probabilities):
        variables = tuple(variables)
        support = tuple(tuple(float(x) for x in cell) for cell in support)
        probs = np.asarray(probabilities, dtype=float).copy()
        if len(set(variables)) != len(variables) or not variables:
            raise ValueError("variable names must be distinct and non-empty")
        if any(len(cell) != len(variables) for cell in support):
            raise ValueError("every support tuple needs one entry per variable")
        if len(set(support)) != len(support):
            raise ValueError("support tuples must be distinct")
        if probs.shape != (len(support),):
            raise ValueError("one probability per support tuple")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"probabilities must be non-negative and sum to 1 (sum={probs.sum()!r})")
        probs.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probabilities", probs)

    def as_dict(self) -> dict:
        if len(self.variables) == 1:
            return {cell[0]: float(p) for cell, p in zip(self.support, self.probabilities)}
        return {cell: float(p) for cell, p in zip(self.support, self.probabilities)}

    def probability(self, *cell) -> float:
        key = tuple(float(x) for x in cell)
        try:
            return float(self.probabilities[self.support.index(key)])
        except ValueError:
            return 0.0

    def to_space(self):
        """The jpd as a probability space whose points are the support cells.

        Returns ``(space, variables)`` with one coordinate ``RandomVariable`` per name.
        """
        space = FiniteProbabilitySpace(self.support, self.probabilities)
        rvs = {
            name: RandomVariable(name, {cell: cell[k] for cell in self.support})
            for k, name in enumerate(self.variables)
        }
        return space, rvs

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.variables) + ["probability"])
        for cell, p in zip(self.support, self.probabilities):
            w.writerow([f"{x:.12g}" for x in cell] + [f"{p:.12g}"])
        return buf.getvalue()


def event_probability(space: FiniteProbabilitySpace, event) -> float:
    return float(np.sum(space.weights[space.mask(event)]))


def _conjunction(space, B, A):
    return space.mask(B) & space.mask(A)


def bayes_conditional(space: FiniteProbabilitySpace, B, A) -> float:
    """``p(B | A) = p(B and A) / p(A)``; conditioning on a null event raises."""
    pa = event_probability(space, A)
    if pa <= 0.0:
        raise ConditionOnNull("cannot condition on an event of probability 0")
    return float(np.sum(space.weights[_conjunction(space, B, A)])) / pa


def joint_distribution(space: FiniteProbabilitySpace, variables, include_zero=False) -> JointDistribution:
    variables = list(variables)
    if not variables:
        raise ValueError("joint_distribution needs at least one variable")
    for rv in variables:
        rv.check_total(space)
    cells = {}
    for p, w in zip(space.points, space.weights):
        key = tuple(rv.values[p] for rv in variables)
        cells[key] = cells.get(key, 0.0) + float(w)
    if include_zero:
        for key in itertools.product(*(rv.outcomes for rv in variables)):
            cells.setdefault(key, 0.0)
    else:
        cells = {k: v for k, v in cells.items() if v > 0.0}
    support = sorted(cells)
    return JointDistribution([rv.name for rv in variables], support, [cells[k] for k in support])


def marginal(jpd: JointDistribution, keep) -> JointDistribution:
    if isinstance(keep, str):
        keep = [keep]
    keep = list(keep)
    if not keep:
        raise ValueError("marginal needs at least one variable to keep")
    for name in keep:
        if name not in jpd.variables:
            raise UnknownVariable(name)
    idx = [jpd.variables.index(name) for name in keep]
    cells = {}
    for cell, p in zip(jpd.support, jpd.probabilities):
        key = tuple(cell[i] for i in idx)
        cells[key] = cells.get(key, 0.0) + float(p)
    support = sorted(cells)
    return JointDistribution(keep, support, [cells[k] for k in support])


def classical_ftp(space: FiniteProbabilitySpace, A: RandomVariable, B: RandomVariable, target) -> float:
    """Total probability of ``B = target`` assembled from conditionals on ``A``.

    Outcomes of ``A`` with zero probability are skipped.
    """
    total = 0.0
    b_event = B.event(target)
    for alpha in A.outcomes:
        a_event = A.event(alpha)
        pa = event_probability(space, a_event)
        if pa <= 0.0:
            continue
        total += pa * bayes_conditional(space, b_event, a_event)
    return total
