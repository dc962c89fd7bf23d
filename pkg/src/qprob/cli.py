"""Command line front end: ``qprob <command> [options]``.

Exit codes: 0 success, 1 a check or scenario assertion failed, 2 bad usage
or unreadable input. Numbers are printed with 12 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings

import numpy as np

from . import bell, frequency, gksl, instruments, linalg, logic, quantum, scenarios
from .errors import NonUniqueSteadyState, QProbError
from .io import fmt, load_json, parse_observable, parse_state

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, header, rows, extra=None):
    """Write a table as CSV or as JSON (``{"rows": [...], **extra}``)."""
    out = sys.stdout
    if args.format == "json":
        obj = {"rows": [dict(zip(header, (_jsonable(v) for v in r))) for r in rows]}
        if extra:
            obj.update({k: _jsonable(v) for k, v in extra.items()})
        out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (int, float, np.number, np.bool_)) else v for v in r])
    if extra:
        for k, v in extra.items():
            sys.stderr.write(f"# {k}: {fmt(v) if isinstance(v, (int, float, np.number)) else v}\n")


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(fmt(v))
    return v


def _require_seed(args):
    if args.seed is None:
        raise UsageError(f"'{args.command}' samples random numbers; pass --seed")
    return args.seed


def _outcome_map(text):
    out = {}
    for part in text.split(","):
        if ":" not in part:
            raise UsageError(f"--map entries look like meter:system, got {part!r}")
        m, s = part.split(":", 1)
        out[float(m)] = float(s)
    return out


def _model_arg(text):
    if text.endswith(".json"):
        return instruments.IndirectMeasurementModel.from_json(load_json(text))
    presets = {"cnot": instruments.cnot_probe_model, "swap": instruments.swap_probe_model}
    if text not in presets:
        raise UsageError(f"--model: 'cnot', 'swap' or a .json file, not {text!r}")
    return presets[text]()


def _lindblad_arg(text, gamma):
    if text.endswith(".json"):
        return gksl.LindbladModel.from_json(load_json(text))
    if text in ("dephasing", "amplitude_damping"):
        return gksl.LindbladModel.from_json({"preset": text, "gamma": gamma})
    raise UsageError(f"--model: 'dephasing', 'amplitude_damping' or a .json file, not {text!r}")


# commands

def cmd_ftp_compare(args):
    state = parse_state(args.state)
    A = parse_observable(args.A, "A")
    B = parse_observable(args.B, "B")
    targets = B.eigenvalues if args.target is None else [args.target]
    rows = []
    for b in targets:
        dec = quantum.quantum_ftp(state, A, B, b)
        rows.append([float(b), dec.classical_part, dec.interference_term, dec.total,
                     quantum.born_probability(state, B, b)])
    _emit(args, ["outcome", "classical_part", "interference_term", "total", "born"], rows)
    return EXIT_OK


def cmd_chsh_sweep(args):
    seed = _require_seed(args)
    rep = bell.incompatibility_sweep(args.trials, (args.dim_a, args.dim_b), seed, args.compatible)
    rows = list(rep.to_csv_rows())
    header, body = rows[0], rows[1:]
    body = [[int(r[0]), float(r[1]), float(r[2]), float(r[3]), bool(int(r[4]))] for r in body]
    c = rep.contingency
    extra = {
        "compatible_not_violated": c[(False, False)],
        "compatible_violated": c[(False, True)],
        "incompatible_not_violated": c[(True, False)],
        "incompatible_violated": c[(True, True)],
        "sufficiency_rate": "n/a" if rep.sufficiency_rate is None else rep.sufficiency_rate,
    }
    _emit(args, header, body, extra)
    return EXIT_OK if rep.necessity_holds else EXIT_FAIL


def cmd_instrument_check(args):
    model = _model_arg(args.model)
    obs = parse_observable(args.observable)
    states = instruments.state_grid(model.system_dim, args.grid, args.seed or 0)
    rep = instruments.verify_projective_realization(obs, model, _outcome_map(args.map), states, args.tol)
    rows = [[r.meter_outcome, r.system_outcome, r.max_probability_deviation, r.max_trace_distance]
            for r in rep.rows]
    _emit(args, ["meter_outcome", "system_outcome", "max_probability_deviation", "max_trace_distance"],
          rows, {"passed": rep.passed, "states": rep.n_states})
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_gksl_run(args):
    model = _lindblad_arg(args.model, args.gamma)
    traj = gksl.integrate(model, parse_state(args.rho0), args.t, args.dt, args.save_every)
    d = model.dim
    header = ["t"] + [f"{p}_{i}{j}" for i in range(d) for j in range(d) for p in ("re", "im")]
    rows = []
    for t, rho in traj:
        row = [float(t)]
        for i in range(d):
            for j in range(d):
                row += [rho[i, j].real, rho[i, j].imag]
        rows.append(row)
    _emit(args, header, rows)
    return EXIT_OK


def cmd_gksl_steady(args):
    model = _lindblad_arg(args.model, args.gamma)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonUniqueSteadyState)
        rep = gksl.steady_state(model, parse_observable(args.observable), parse_state(args.rho0))
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    obj = rep.to_json()
    obj["population_born_gap"] = gksl.populations_match_born(rep, parse_observable(args.observable))
    sys.stdout.write(json.dumps(_round_tree(obj), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if rep.diagonal_in_A_basis else EXIT_FAIL


def _round_tree(x):
    if isinstance(x, dict):
        return {k: _round_tree(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round_tree(v) for v in x]
    return _jsonable(x)


def cmd_lln_sample(args):
    seed = _require_seed(args)
    grid = [int(n) for n in args.N_grid.split(",")]
    table = frequency.lln_convergence(parse_state(args.state), parse_observable(args.observable),
                                      args.outcome, grid, seed, args.sigmas)
    rows = [[r.N, r.frequency, r.deviation, r.envelope, r.within] for r in table.rows]
    _emit(args, ["N", "frequency", "deviation", "envelope", "within"], rows,
          {"probability": table.probability, "breaches": table.breaches})
    return EXIT_OK


def cmd_g2_demo(args):
    seed = _require_seed(args)
    rows = []
    for kind in frequency.SOURCE_KINDS:
        rec = frequency.simulate_clicks(kind, args.windows, args.mean_count, seed)
        rows.append([kind, len(rec), frequency.g2_zero(rec)])
    _emit(args, ["source", "windows", "g2"], rows)
    return EXIT_OK


def cmd_logic_demo(args):
    a, b, c = logic.canonical_counterexample()
    res = logic.distributivity_check(a, b, c)
    rows = [[n, atoms, 2 ** n] for n, atoms, _ in logic.atom_growth(range(2, args.n_max + 1))]
    _emit(args, ["n", "atoms", "expected_atoms"], rows, {
        "lhs_rank": res.lhs.rank,
        "rhs_rank": res.rhs.rank,
        "distributive": res.equal,
        "lhs_equals_a": bool(linalg.max_norm(res.lhs.projector - a.projector) < 1e-10),
    })
    return EXIT_OK if all(r[1] == r[2] for r in rows) and not res.equal else EXIT_FAIL


def cmd_run(args):
    rep = scenarios.run_scenario(args.scenario)
    text = rep.to_json() + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for r in rep.results:
        mark = "ok  " if r.passed else "FAIL"
        sys.stderr.write(f"{mark} {r.quantity}: measured {_show(r.measured)}, {r.op} {_show(r.expected)}"
                         f" (tol {fmt(r.tol)})\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _show(v):
    return str(v).lower() if isinstance(v, (bool, np.bool_)) else fmt(v)


def cmd_list(args):
    for name, desc in scenarios.list_scenarios():
        sys.stdout.write(f"{name}\t{desc}\n")
    return EXIT_OK


def build_parser():
    def shared(default):
        # the same options are accepted before and after the command name; only the
        # top-level parser supplies defaults so a value given first is not overwritten
        parser = argparse.ArgumentParser(add_help=False)
        parser.add_argument("--seed", type=int, default=None if default else argparse.SUPPRESS,
                            help="seed for sampling commands")
        parser.add_argument("--format", choices=("csv", "json"), default="csv" if default else argparse.SUPPRESS)
        parser.add_argument("-v", "--verbose", action="store_true",
                            default=False if default else argparse.SUPPRESS)
        return parser

    common, sub_common = shared(True), shared(False)

    p = argparse.ArgumentParser(prog="qprob", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[sub_common])
        sp.set_defaults(func=fn)
        return sp

    sp = add("ftp-compare", cmd_ftp_compare, "classical vs quantum total-probability formula")
    sp.add_argument("--state", default="plus")
    sp.add_argument("--A", default="sigma_z")
    sp.add_argument("--B", default="sigma_x")
    sp.add_argument("--target", type=float, default=None)

    sp = add("chsh-sweep", cmd_chsh_sweep, "random CHSH settings vs local incompatibility")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--dim-a", type=int, default=2)
    sp.add_argument("--dim-b", type=int, default=2)
    sp.add_argument("--compatible", choices=("alice", "bob", "both", "either"), default=None)

    sp = add("instrument-check", cmd_instrument_check, "does an indirect model realize Lueders' rule?")
    sp.add_argument("--model", default="cnot")
    sp.add_argument("--observable", default="sigma_z")
    sp.add_argument("--map", default="0:1,1:-1", help="meter:system outcome pairs")
    sp.add_argument("--grid", type=int, default=20)
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = add("gksl-run", cmd_gksl_run, "integrate GKSL dynamics with RK4")
    sp.add_argument("--model", default="dephasing")
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--rho0", default="plus")
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--save-every", type=int, default=1)

    sp = add("gksl-steady", cmd_gksl_steady, "steady state and its populations in an observable's basis")
    sp.add_argument("--model", default="dephasing")
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--rho0", default="plus")
    sp.add_argument("--observable", default="sigma_z")

    sp = add("lln-sample", cmd_lln_sample, "relative frequencies against the Born probability")
    sp.add_argument("--state", default="plus")
    sp.add_argument("--observable", default="sigma_z")
    sp.add_argument("--outcome", type=float, default=1.0)
    sp.add_argument("--N-grid", default="10,100,1000,10000,100000")
    sp.add_argument("--sigmas", type=float, default=4.0)

    sp = add("g2-demo", cmd_g2_demo, "zero-delay coincidence ratio for three light sources")
    sp.add_argument("--windows", type=int, default=100000)
    sp.add_argument("--mean-count", type=float, default=1.0)

    sp = add("logic-demo", cmd_logic_demo, "distributivity counterexample and Boolean atom counts")
    sp.add_argument("--n-max", type=int, default=6)

    sp = add("run", cmd_run, "run a bundled scenario")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--out", default=None)

    add("list", cmd_list, "list bundled scenarios")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"qprob: error: {exc}\n")
        return EXIT_USAGE
    except (QProbError, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"qprob: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
