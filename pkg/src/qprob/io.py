"""Parsing of states, observables and models from JSON-like specs.

A state spec is a preset name (``"zero"``, ``"plus"``, ``"phi_plus"`` ...),
``{"kind": "pure", "re": [...], "im": [...]}`` or
``{"kind": "mixed", "dim": n, "re": [[...]], "im": [[...]]}``.

An observable spec is a preset name (``"sigma_x"`` ...), ``{"tensor": [spec, ...]}``,
``{"diag": [...]}`` or a matrix ``{"dim": n, "re": ..., "im": ...}``; any
dict form may carry a ``"name"``.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import linalg, quantum
from .errors import ConfigInvalid
from .quantum import HermitianObservable, QuantumState

STATE_PRESETS = {
    "zero": quantum.KET_0,
    "one": quantum.KET_1,
    "plus": quantum.KET_PLUS,
    "minus": quantum.KET_MINUS,
    "phi_plus": quantum.PHI_PLUS,
    "singlet": quantum.SINGLET,
    "zero_zero": np.kron(quantum.KET_0, quantum.KET_0),
}

OBSERVABLE_PRESETS = {
    "sigma_x": linalg.SIGMA_X,
    "sigma_y": linalg.SIGMA_Y,
    "sigma_z": linalg.SIGMA_Z,
    "identity": linalg.I2,
}


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def parse_state(spec) -> QuantumState:
    if isinstance(spec, QuantumState):
        return spec
    if isinstance(spec, (str, Path)) and str(spec).endswith(".json"):
        return parse_state(load_json(spec))
    if isinstance(spec, str):
        if spec.startswith("maximally_mixed"):
            dim = int(spec.split(":", 1)[1]) if ":" in spec else 2
            return QuantumState.maximally_mixed(dim)
        try:
            return QuantumState.pure(STATE_PRESETS[spec])
        except KeyError:
            raise ConfigInvalid(f"unknown state preset {spec!r}") from None
    if not isinstance(spec, dict):
        raise ConfigInvalid(f"cannot read a state from {type(spec).__name__}")
    kind = spec.get("kind", "pure" if np.ndim(spec.get("re", [])) == 1 else "mixed")
    try:
        if kind == "pure":
            re = np.asarray(spec["re"], dtype=float)
            im = np.asarray(spec.get("im", np.zeros_like(re)), dtype=float)
            return QuantumState.pure(re + 1j * im, normalize=bool(spec.get("normalize", False)))
        if kind == "mixed":
            return QuantumState.mixed(linalg.matrix_from_json(spec))
    except (KeyError, ValueError) as exc:
        raise ConfigInvalid(f"state: {exc}") from None
    raise ConfigInvalid(f"state kind must be 'pure' or 'mixed', not {kind!r}")


def _observable_matrix(spec):
    if isinstance(spec, str):
        try:
            return OBSERVABLE_PRESETS[spec]
        except KeyError:
            raise ConfigInvalid(f"unknown observable preset {spec!r}") from None
    if isinstance(spec, HermitianObservable):
        return spec.matrix
    if isinstance(spec, dict):
        if "tensor" in spec:
            return linalg.tensor_product(*(_observable_matrix(s) for s in spec["tensor"]))
        if "diag" in spec:
            return np.diag(np.asarray(spec["diag"], dtype=complex))
        if "re" in spec:
            return linalg.matrix_from_json(spec)
        if "scale" in spec and "of" in spec:
            return float(spec["scale"]) * _observable_matrix(spec["of"])
        if "sum" in spec:
            return sum(_observable_matrix(s) for s in spec["sum"])
    raise ConfigInvalid(f"cannot read an observable from {spec!r}")


def parse_observable(spec, name=None) -> HermitianObservable:
    if isinstance(spec, HermitianObservable):
        return spec
    if isinstance(spec, (str, Path)) and str(spec).endswith(".json"):
        return parse_observable(load_json(spec), name)
    if name is None:
        name = spec if isinstance(spec, str) else (spec.get("name") if isinstance(spec, dict) else None)
    try:
        return HermitianObservable.from_matrix(_observable_matrix(spec), name)
    except ConfigInvalid:
        raise
    except ValueError as exc:
        raise ConfigInvalid(f"observable {name or ''}: {exc}") from None


def state_to_json(state) -> dict:
    state = quantum.as_state(state)
    if state.is_pure:
        v = state.vector
        return {"kind": "pure", "re": v.real.tolist(), "im": v.imag.tolist()}
    return {"kind": "mixed", **linalg.matrix_to_json(state.density)}


def fmt(x) -> str:
    """Numbers as printed by the CLI: 12 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"
