import json
import math
from pathlib import Path

import pytest

from tendongrip.benchmark import full_success_log, trial_to_dict
from tendongrip.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, run
from tendongrip.types import default_hand, dumps_hand

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_energy_map_shape(capsys):
    code, out, _ = _run(capsys, "energy-map", "--n", "12")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "q1,q2,L_total,E"
    assert len(lines) == 1 + 12 * 12
    first = [float(x) for x in lines[1].split(",")]
    assert first[0] == pytest.approx(-math.pi / 6) and first[1] == 0.0


def test_trajectory_endpoints(capsys):
    code, out, _ = _run(capsys, "trajectory", "--steps", "20")
    rows = [[float(x) for x in r.split(",")] for r in out.splitlines()[1:]]
    assert code == EXIT_OK and len(rows) == 20
    assert rows[0][1:3] == pytest.approx([-math.pi / 6, 0.0], abs=1e-9)
    assert rows[-1][1:3] == pytest.approx([math.pi / 3, math.pi / 2], abs=1e-9)


def test_contour_by_retraction(capsys):
    code, out, _ = _run(capsys, "contour", "--retraction", "5", "--resolution", "30", "--finger", "B")
    assert code == EXIT_OK
    lengths = {round(float(r.split(",")[2]), 6) for r in out.splitlines()[1:]}
    assert len(lengths) == 1


def test_mode_group_and_meeting_height(capsys):
    code, out, _ = _run(capsys, "mode-group")
    assert code == EXIT_OK and json.loads(out)["mode"] == "precision"
    code, out, _ = _run(capsys, "meeting-height")
    h = json.loads(out)
    assert h["spherical"] < h["cylindrical"]


def test_bistability_json(capsys):
    code, out, _ = _run(capsys, "bistability", "--steps", "10")
    assert code == EXIT_OK
    assert set(json.loads(out)) >= {"bistable", "basins"}


def test_grasp_golf_ball(capsys):
    code, out, _ = _run(capsys, "grasp", "--scenario", str(SCENARIOS / "golfball.json"), "--step", "0.5")
    assert code == EXIT_OK
    assert json.loads(out)["classification"] == "FingertipPinch"


def test_score_full_log(tmp_path, capsys):
    log = tmp_path / "trials.jsonl"
    log.write_text("\n".join(json.dumps(trial_to_dict(t)) for t in full_success_log()), encoding="utf-8")
    md = tmp_path / "grid.md"
    code, out, _ = _run(capsys, "score", "--trials", str(log), "--markdown", str(md))
    assert code == EXIT_OK
    assert json.loads(out)["ycb"]["combined"] == 404
    assert "combined (best mode per object): 404 / 404" in md.read_text()


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        run(["energy-map", "--n", "1"])
    assert e.value.code == EXIT_USAGE
    assert "UsageError" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        run(["no-such-command"])
    assert e.value.code == EXIT_USAGE


def test_invalid_input_exit_code(tmp_path, capsys):
    code, _, err = _run(capsys, "grasp", "--scenario", str(tmp_path / "missing.json"))
    assert code == EXIT_INVALID
    assert json.loads(err)["error"] == "ConfigParseError"
    bad = tmp_path / "hand.json"
    bad.write_text('{"schema_version": 1, "palm_diameter": -4}', encoding="utf-8")
    code, _, _ = _run(capsys, "meeting-height", "--hand", str(bad))
    assert code == EXIT_INVALID


def test_out_file_written_atomically(tmp_path, capsys):
    target = tmp_path / "map.csv"
    code, out, _ = _run(capsys, "energy-map", "--n", "5", "--out", str(target))
    assert code == EXIT_OK and out == ""
    assert target.read_text().startswith("q1,q2,L_total,E\n")
    assert sorted(p.name for p in tmp_path.iterdir()) == ["map.csv"]


def test_custom_hand_file_and_inputs_untouched(tmp_path, capsys):
    hand_file = tmp_path / "hand.json"
    hand_file.write_text(dumps_hand(default_hand()), encoding="utf-8")
    before = hand_file.read_bytes()
    scen = SCENARIOS / "flat_offset.json"
    scen_before = scen.read_bytes()
    code, out, _ = _run(capsys, "meeting-height", "--hand", str(hand_file))
    assert code == EXIT_OK
    code2, out2, _ = _run(capsys, "meeting-height")
    assert out == out2
    _run(capsys, "grasp", "--scenario", str(scen), "--step", "1.0")
    assert hand_file.read_bytes() == before and scen.read_bytes() == scen_before


@pytest.mark.parametrize("argv", [
    ["energy-map", "--n", "7"],
    ["trajectory", "--steps", "9"],
    ["meeting-height"],
    ["grasp", "--scenario", str(SCENARIOS / "flat_offset.json"), "--step", "1.0"],
])
def test_repeat_runs_are_identical(argv, capsys):
    a = _run(capsys, *argv)
    b = _run(capsys, *argv)
    assert a == b
