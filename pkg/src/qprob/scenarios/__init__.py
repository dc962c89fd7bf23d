"""Bundled, seeded experiments with named assertions.

Each scenario file in this package directory looks like::

    {
      "name": "ftp-plus-state",
      "description": "...",
      "kind": "ftp",
      "config": {...},
      "expected": [
        {"quantity": "interference_term[+1]", "op": "approx", "value": 0.5, "tol": 1e-10,
         "source": "how the expected value was obtained"}
      ]
    }

``op`` is one of ``approx`` (``|measured - value| <= tol``), ``le``, ``ge``
or ``eq``.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .. import bell, frequency, generators, gksl, instruments, linalg, logic, quantum
from ..classical import classical_ftp, marginal
from ..errors import ConfigInvalid, NonUniqueSteadyState
from ..io import parse_observable, parse_state

OPS = ("approx", "le", "ge", "eq")


@dataclass(frozen=True)
class Assertion:
    quantity: str
    value: object
    op: str = "approx"
    tol: float = 0.0
    source: str = ""

    def check(self, measured) -> bool:
        if self.op == "eq":
            return measured == self.value
        m = float(measured)
        if self.op == "approx":
            return abs(m - float(self.value)) <= self.tol
        if self.op == "le":
            return m <= float(self.value) + self.tol
        return m >= float(self.value) - self.tol


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    config: dict
    expected: tuple = ()
    description: str = ""

    @classmethod
    def from_dict(cls, obj):
        problems = []
        for key in ("name", "kind", "config"):
            if key not in obj:
                problems.append(f"missing field '{key}'")
        if problems:
            raise ConfigInvalid(problems)
        expected = []
        for i, a in enumerate(obj.get("expected", [])):
            if "quantity" not in a or "value" not in a:
                problems.append(f"expected[{i}]: needs 'quantity' and 'value'")
                continue
            op = a.get("op", "approx")
            if op not in OPS:
                problems.append(f"expected[{i}].op: {op!r} not in {OPS}")
                continue
            expected.append(Assertion(a["quantity"], a["value"], op, float(a.get("tol", 0.0)),
                                      a.get("source", "")))
        if problems:
            raise ConfigInvalid(problems)
        return cls(obj["name"], obj["kind"], dict(obj["config"]), tuple(expected),
                   obj.get("description", ""))


@dataclass(frozen=True)
class AssertionResult:
    quantity: str
    measured: object
    op: str
    expected: object
    tol: float
    passed: bool


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    results: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "scenario": self.name,
            "passed": self.passed,
            "assertions": [
                {"quantity": r.quantity, "measured": _plain(r.measured), "op": r.op,
                 "expected": _plain(r.expected), "tol": r.tol, "passed": r.passed}
                for r in self.results
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _plain(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    return x


def _need(cfg, *keys):
    missing = [f"config.{k}: required" for k in keys if k not in cfg]
    if missing:
        raise ConfigInvalid(missing)


def _label(x) -> str:
    return f"{float(x):+.12g}"


# runners: config -> {quantity: value}

def _run_ftp(cfg):
    _need(cfg, "state", "A", "B")
    state = parse_state(cfg["state"])
    A = parse_observable(cfg["A"], "A")
    B = parse_observable(cfg["B"], "B")
    out = {}
    for b in B.eigenvalues:
        dec = quantum.quantum_ftp(state, A, B, b)
        key = _label(b)
        out[f"classical_part[{key}]"] = dec.classical_part
        out[f"interference_term[{key}]"] = dec.interference_term
        out[f"total[{key}]"] = dec.total
        out[f"born[{key}]"] = quantum.born_probability(state, B, b)
    return out


def _run_ftp_random(cfg):
    _need(cfg, "count", "seed")
    lo, hi = cfg.get("dims", [2, 6])
    commuting = bool(cfg.get("commuting", False))
    worst_total = worst_split = worst_interf = worst_norm = 0.0
    for i in range(int(cfg["count"])):
        rng = generators.rng_for(cfg["seed"], i)
        dim = int(rng.integers(lo, hi + 1))
        psi = generators.random_pure_state(dim, rng)
        if commuting:
            A, B = generators.random_commuting_pair(dim, rng)
        else:
            A = generators.random_nondegenerate_observable(dim, rng, "A")
            B = generators.random_nondegenerate_observable(dim, rng, "B")
        totals = 0.0
        for b in B.eigenvalues:
            dec = quantum.quantum_ftp(psi, A, B, b)
            worst_total = max(worst_total, abs(dec.total - quantum.born_probability(psi, B, b)))
            worst_split = max(worst_split, abs(dec.classical_part + dec.interference_term - dec.total))
            worst_interf = max(worst_interf, abs(dec.interference_term))
            totals += dec.total
        worst_norm = max(worst_norm, abs(totals - 1.0))
    return {"max_total_vs_born": worst_total, "max_split_error": worst_split,
            "max_abs_interference": worst_interf, "max_normalization_error": worst_norm}


def _setting(spec):
    if spec == "tsirelson":
        return bell.tsirelson_setting()
    if not isinstance(spec, dict):
        raise ConfigInvalid("config.setting: 'tsirelson' or an object with A1, A2, B1, B2")
    _need(spec, "A1", "A2", "B1", "B2")
    return bell.CHSHSetting(*(parse_observable(spec[k], k) for k in ("A1", "A2", "B1", "B2")))


def _run_chsh(cfg):
    _need(cfg, "setting")
    setting = _setting(cfg["setting"])
    res = bell.max_chsh(setting)
    out = {"bell_max": res.bell_operator_max, "violated": bool(res.violated),
           "locally_incompatible": bool(res.locally_incompatible),
           "optimal_state_value": bell.chsh_value(res.optimal_state, setting)}
    if "state" in cfg:
        out["chsh_value"] = bell.chsh_value(parse_state(cfg["state"]), setting)
    return out


def _run_chsh_sweep(cfg):
    _need(cfg, "trials", "seed")
    rep = bell.incompatibility_sweep(int(cfg["trials"]), tuple(cfg.get("dims", (2, 2))),
                                     int(cfg["seed"]), cfg.get("compatible"), threads=1)
    return {
        "trials": len(rep.rows),
        "compatible_and_violated": rep.count(False, True),
        "compatible_count": rep.count(False, False) + rep.count(False, True),
        "max_bell_max": max((r.bell_max for r in rep.rows), default=0.0),
        "tsirelson_excess": max((r.bell_max for r in rep.rows), default=0.0) - bell.TSIRELSON_BOUND,
    }


_MODEL_PRESETS = {"cnot": instruments.cnot_probe_model, "swap": instruments.swap_probe_model}


def _model(spec, system_dim=2):
    if isinstance(spec, str):
        if spec == "trivial":
            return instruments.trivial_model(system_dim, quantum.KET_0, linalg.SIGMA_Z)
        try:
            return _MODEL_PRESETS[spec]()
        except KeyError:
            raise ConfigInvalid(f"config.model: unknown preset {spec!r}") from None
    return instruments.IndirectMeasurementModel.from_json(spec)


def _run_instrument(cfg):
    _need(cfg, "model", "observable", "outcome_map")
    model = _model(cfg["model"])
    obs = parse_observable(cfg["observable"])
    omap = {float(k): float(v) for k, v in cfg["outcome_map"].items()}
    states = instruments.state_grid(model.system_dim, int(cfg.get("grid", 20)), int(cfg.get("seed", 0)))
    rep = instruments.verify_projective_realization(obs, model, omap, states)
    out = {"max_deviation": rep.max_deviation, "passed": rep.passed}
    n_random = int(cfg.get("random_models", 0))
    if n_random:
        out["max_normalization_error"] = random_instrument_normalization(n_random, int(cfg.get("seed", 0)))
    return out


def random_model(rng, max_dim=4):
    dS = int(rng.integers(1, max_dim + 1))
    dK = int(rng.integers(2, max_dim + 1))
    R = generators.random_mixed_state(dK, rng)
    U = linalg.random_unitary(dS * dK, rng)
    meter = parse_observable({"diag": list(rng.integers(0, 3, size=dK).astype(float))}, "meter")
    return instruments.IndirectMeasurementModel(R, U, meter)


def random_instrument_normalization(n, seed):
    """Worst ``|sum_x q(x) - 1|`` over ``n`` random models and states."""
    worst = 0.0
    for i in range(n):
        rng = generators.rng_for(seed, 1000 + i)
        model = random_model(rng)
        rho = generators.random_mixed_state(model.system_dim, rng)
        total = sum(instruments.outcome_probability(model, rho, x) for x in model.outcomes)
        worst = max(worst, abs(total - 1.0))
    return worst


def _run_gksl(cfg):
    _need(cfg, "model", "rho0", "observable")
    model = gksl.LindbladModel.from_json(cfg["model"])
    rho0 = parse_state(cfg["rho0"])
    A = parse_observable(cfg["observable"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonUniqueSteadyState)
        rep = gksl.steady_state(model, A, rho0)
    out = {
        "residual": rep.residual,
        "max_offdiagonal": rep.max_offdiagonal,
        "diagonal_in_A_basis": bool(rep.diagonal_in_A_basis),
        "population_born_gap": gksl.populations_match_born(rep, A),
        "crosscheck_distance": rep.crosscheck_distance if rep.crosscheck_distance is not None else float("nan"),
        "convergence_rate": rep.convergence_rate if rep.convergence_rate is not None else float("nan"),
        "fit_quality": rep.fit_quality if rep.fit_quality is not None else float("nan"),
    }
    for x, lam in zip(rep.eigenvalues, rep.eigen_populations):
        out[f"population[{_label(x)}]"] = float(lam)
    if "order_dts" in cfg:
        out["rk4_min_order_ratio"], out["rk4_max_order_ratio"] = rk4_order_ratios(
            model, rho0, float(cfg.get("order_t", 1.0)), [float(h) for h in cfg["order_dts"]])
    return out


def rk4_order_ratios(model, rho0, t_final, dts):
    """Error ratios ``err(dt) / err(dt/2)`` against the exact propagator."""
    exact = gksl.unvec(linalg.matrix_exp(t_final * model.generator) @ gksl.vec(quantum.as_state(rho0).density),
                       model.dim)
    errs = [np.linalg.norm(gksl.propagate(model, rho0, t_final, h) - exact) for h in dts]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    return min(ratios), max(ratios)


def _run_lln(cfg):
    _need(cfg, "pairs", "N", "seed")
    lo, hi = cfg.get("dims", [2, 4])
    breaches = 0
    worst = 0.0
    for i in range(int(cfg["pairs"])):
        rng = generators.rng_for(cfg["seed"], i)
        dim = int(rng.integers(lo, hi + 1))
        state = generators.random_mixed_state(dim, rng) if rng.random() < 0.5 else generators.random_pure_state(dim, rng)
        obs = generators.random_nondegenerate_observable(dim, rng)
        x = obs.eigenvalues[int(rng.integers(dim))]
        table = frequency.lln_convergence(state, obs, x, [int(cfg["N"])], seed=int(cfg["seed"]) * 1000 + i)
        breaches += table.breaches
        row = table.rows[-1]
        if row.envelope > 0:
            worst = max(worst, row.deviation / row.envelope)
    return {"breaches": breaches, "worst_envelope_fraction": worst}


def _run_g2(cfg):
    _need(cfg, "windows", "seed")
    n, mu, seed = int(cfg["windows"]), float(cfg.get("mean_count", 1.0)), int(cfg["seed"])
    return {f"g2_{kind}": frequency.g2_zero(frequency.simulate_clicks(kind, n, mu, seed))
            for kind in cfg.get("sources", frequency.SOURCE_KINDS)}


def _run_logic(cfg):
    a, b, c = logic.canonical_counterexample()
    res = logic.distributivity_check(a, b, c)
    out = {
        "lhs_minus_a": linalg.max_norm(res.lhs.projector - a.projector),
        "rhs_norm": linalg.max_norm(res.rhs.projector),
        "equal": bool(res.equal),
    }
    n = int(cfg.get("random_triples", 0))
    if n:
        seed = int(cfg.get("seed", 0))
        fails = 0
        for i in range(n):
            rng = generators.rng_for(seed, i)
            dim = int(rng.integers(2, 7))
            if not logic.distributivity_check(*generators.random_commuting_subspaces(dim, 3, rng)).equal:
                fails += 1
        out["commuting_failures"] = fails
    return out


def _run_jpd_bridge(cfg):
    _need(cfg, "count", "seed")
    worst_marg = worst_ftp = 0.0
    for i in range(int(cfg["count"])):
        rng = generators.rng_for(cfg["seed"], i)
        dim = int(rng.integers(2, 7))
        psi = generators.random_pure_state(dim, rng)
        A, B = generators.random_commuting_pair(dim, rng)
        jpd = quantum.jpd_for_compatible(psi, [A, B])
        for obs in (A, B):
            m = marginal(jpd, obs.name).as_dict()
            for x in obs.eigenvalues:
                worst_marg = max(worst_marg, abs(m.get(float(x), 0.0) - quantum.born_probability(psi, obs, x)))
        space, rvs = jpd.to_space()
        for b in B.eigenvalues:
            q = quantum.quantum_ftp(psi, A, B, b).total
            worst_ftp = max(worst_ftp, abs(classical_ftp(space, rvs["A"], rvs["B"], float(b)) - q))
    return {"max_marginal_error": worst_marg, "max_ftp_error": worst_ftp}


RUNNERS = {
    "ftp": _run_ftp,
    "ftp-random": _run_ftp_random,
    "chsh": _run_chsh,
    "chsh-sweep": _run_chsh_sweep,
    "instrument": _run_instrument,
    "gksl": _run_gksl,
    "lln": _run_lln,
    "g2": _run_g2,
    "logic": _run_logic,
    "jpd-bridge": _run_jpd_bridge,
}


def _bundled():
    root = resources.files(__name__)
    out = {}
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            obj = json.loads(entry.read_text(encoding="utf-8"))
            out[obj["name"]] = obj
    return out


def list_scenarios():
    """``[(name, description)]`` for every bundled scenario, sorted by name."""
    return [(name, obj.get("description", "")) for name, obj in sorted(_bundled().items())]


def load_scenario(name) -> Scenario:
    bundled = _bundled()
    if name not in bundled:
        raise ConfigInvalid(f"no bundled scenario named {name!r}")
    return Scenario.from_dict(bundled[name])


def run_scenario(scenario) -> ScenarioReport:
    if isinstance(scenario, str):
        scenario = load_scenario(scenario)
    elif isinstance(scenario, dict):
        scenario = Scenario.from_dict(scenario)
    try:
        runner = RUNNERS[scenario.kind]
    except KeyError:
        raise ConfigInvalid(f"kind: unknown scenario kind {scenario.kind!r}") from None
    if not scenario.expected:
        return ScenarioReport(scenario.name, ())
    measured = runner(scenario.config)
    unknown = [a.quantity for a in scenario.expected if a.quantity not in measured]
    if unknown:
        raise ConfigInvalid([f"expected: {q!r} is not computed by a '{scenario.kind}' scenario" for q in unknown])
    results = tuple(
        AssertionResult(a.quantity, measured[a.quantity], a.op, a.value, a.tol, bool(a.check(measured[a.quantity])))
        for a in scenario.expected
    )
    return ScenarioReport(scenario.name, results)
