import json
import subprocess
import sys
from pathlib import Path

import pytest

from disputesim.cli import main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_calibrate_nonempty(capsys):
    code, out, _ = run(capsys, "calibrate", "--n", "10", "--coalition", "4", "--cost", "1",
                       "--deposit", "100", "--eta", "0.8")
    doc = json.loads(out)
    assert code == 0
    assert doc["interval"]["alpha_lower"]["exact"] == "1/10"
    assert doc["interval"]["alpha_upper"]["exact"] == "1/2"
    assert doc["interval"]["regime"] == "ScaleFree_DeterrenceBound"
    assert doc["scale_free_min_deposit"]["decimal"] == "20.000000000"
    assert doc["phi_free_bound"]["exact"] == "2/5"


def test_calibrate_split_bounds(capsys):
    code, out, _ = run(capsys, "calibrate", "--n", "10", "--coalition", "4", "--cost-bound-init", "0.25",
                       "--cost-bound-proc", "0.75", "--deposit", "100", "--eta", "0.6")
    doc = json.loads(out)
    assert code == 0 and doc["interval"]["alpha_upper"]["exact"] == "1"
    assert doc["fair_single_winner_min_payout"]["decimal"] == "3.250000000"


def test_calibrate_empty_exits_3(capsys):
    code, out, _ = run(capsys, "calibrate", "--n", "10", "--coalition", "4", "--cost", "1",
                       "--deposit", "5", "--eta", "0.8")
    assert code == 3 and json.loads(out)["interval"]["nonempty"] is False


@pytest.mark.parametrize("argv", [
    ["calibrate", "--coalition", "5", "--n", "10", "--cost", "1", "--deposit", "100", "--eta", "0.8"],
    ["calibrate", "--n", "10", "--coalition", "4", "--cost", "1", "--deposit", "100", "--eta", "1.2"],
    ["calibrate", "--n", "10", "--coalition", "4", "--cost", "x", "--deposit", "100", "--eta", "0.8"],
    ["calibrate", "--n", "10", "--coalition", "4", "--cost", "1", "--cost-bound-init", "1",
     "--deposit", "100", "--eta", "0.8"],
])
def test_calibrate_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_simulate_up_single_rows(capsys):
    code, out, err = run(capsys, "simulate", "--scenario", str(SCENARIOS / "proposer_single.json"),
                         "--format", "csv")
    assert code == 0 and "O1=fails" in err
    honest = [line for line in out.splitlines() if ",honest," in line]
    assert len(honest) == 3
    assert all(line.split(",")[2] == "-0.500000000" for line in honest)


def test_simulate_zero_trials(capsys):
    code, _, err = run(capsys, "simulate", "--scenario", str(SCENARIOS / "fair_single.json"), "--trials", "0")
    assert code == 2 and "trials" in err


def test_simulate_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "simulate", "--scenario", str(tmp_path / "nope.json"))
    assert code == 4


def test_simulate_unwritable_out(capsys, tmp_path):
    code, _, _ = run(capsys, "simulate", "--scenario", str(SCENARIOS / "proposer_single.json"),
                     "--out", str(tmp_path / "missing" / "r.json"))
    assert code == 4


def test_simulate_schema_violation(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text((SCENARIOS / "fair_single.json").read_text().replace('"seed"', '"sede"'))
    code, _, _ = run(capsys, "simulate", "--scenario", str(bad))
    assert code == 2


def test_simulate_byte_identical(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert run(capsys, "simulate", "--scenario", str(SCENARIOS / "fair_single.json"),
                   "--trials", "2000", "--out", str(path))[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_verify_single(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "EtaCorollary")
    doc = json.loads(out)
    assert code == 0 and doc["all_pass"]
    assert [r["theorem_id"] for r in doc["reports"]] == ["EtaCorollary"]


def test_verify_bogus(capsys):
    code, _, _ = run(capsys, "verify", "--theorem", "bogus")
    assert code == 2


def test_sweep_scale_free_and_invalid_row(capsys):
    code, out, _ = run(capsys, "sweep", "--scenario", str(SCENARIOS / "scale_free.json"),
                       "--axis", "A", "--values", "1,4,5,7", "--trials", "1")
    lines = out.splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    assert code == 0
    assert [r["valid"] for r in rows] == ["true", "true", "false", "false"]


def test_sweep_bad_axis(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--scenario", str(SCENARIOS / "fair_single.json"), "--axis", "zeta", "--values", "1"])
    assert exc.value.code == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "disputesim.cli", "calibrate", "--n", "10", "--coalition", "4",
         "--cost", "1", "--deposit", "5", "--eta", "0.8"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 3
