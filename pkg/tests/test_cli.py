import json

import pytest

from qprob.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and "chsh-tsirelson" in out


def test_run_scenario(capsys, tmp_path):
    out_file = tmp_path / "report.json"
    code, _, _ = run(capsys, "run", "--scenario", "chsh-tsirelson", "--out", str(out_file))
    assert code == 0
    report = json.loads(out_file.read_text())
    assert report["passed"] and report["scenario"] == "chsh-tsirelson"


def test_unknown_subcommand(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and "usage" in err


def test_bad_flag_value(capsys):
    code, _, err = run(capsys, "chsh-sweep", "--trials", "many", "--seed", "1")
    assert code == 2 and "--trials" in err


def test_sampling_needs_seed(capsys):
    for cmd in ("chsh-sweep", "lln-sample", "g2-demo"):
        code, _, err = run(capsys, cmd)
        assert code == 2 and "--seed" in err


def test_seed_before_or_after_command(capsys):
    a = run(capsys, "--seed", "3", "chsh-sweep", "--trials", "5")
    b = run(capsys, "chsh-sweep", "--trials", "5", "--seed", "3")
    assert a[0] == b[0] == 0 and a[1] == b[1]


def test_ftp_compare_csv(capsys):
    code, out, _ = run(capsys, "ftp-compare")
    assert code == 0
    assert out.splitlines() == ["outcome,classical_part,interference_term,total,born",
                                "-1,0.5,-0.5,0,0", "1,0.5,0.5,1,1"]


def test_json_output_is_deterministic(capsys):
    first = run(capsys, "--format", "json", "lln-sample", "--seed", "7", "--N-grid", "10,100")
    second = run(capsys, "--format", "json", "lln-sample", "--seed", "7", "--N-grid", "10,100")
    assert first[1] == second[1]
    assert json.loads(first[1])["rows"][1]["N"] == 100


def test_instrument_check_exit_codes(capsys):
    assert run(capsys, "instrument-check")[0] == 0
    assert run(capsys, "instrument-check", "--model", "swap", "--map", "1:1,-1:-1")[0] == 1
    assert run(capsys, "instrument-check", "--map", "0-1")[0] == 2


def test_gksl_commands(capsys):
    code, out, _ = run(capsys, "gksl-run", "--t", "0.02", "--dt", "0.01")
    assert code == 0 and out.splitlines()[0].startswith("t,re_00")
    assert len(out.splitlines()) == 4
    code, out, err = run(capsys, "gksl-steady")
    assert code == 0 and "warning" in err
    assert json.loads(out)["diagonal_in_A_basis"] is True


def test_g2_and_logic(capsys):
    code, out, _ = run(capsys, "g2-demo", "--seed", "1", "--windows", "2000")
    assert code == 0 and out.splitlines()[1].startswith("single_photon,2000,0")
    code, out, _ = run(capsys, "logic-demo", "--n-max", "3")
    assert code == 0 and out.splitlines()[1:] == ["2,4,4", "3,8,8"]


def test_input_files_untouched(capsys, tmp_path):
    path = tmp_path / "state.json"
    path.write_text('{"kind": "pure", "re": [1, 0]}')
    before = path.read_bytes()
    assert run(capsys, "ftp-compare", "--state", str(path))[0] == 0
    assert path.read_bytes() == before


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "ftp-compare", "--state", str(tmp_path / "missing.json"))
    assert code == 2 and "missing.json" in err
