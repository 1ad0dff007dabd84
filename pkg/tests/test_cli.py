import json
import subprocess
import sys

import pytest

from aftbound.cli import main
from conftest import DATA, FOUR_RULES


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def four_file(tmp_path):
    path = tmp_path / "four.lp"
    path.write_text(FOUR_RULES)
    return path


def test_bounds_without_search(capsys, four_file):
    code, out, _ = run(capsys, "asp", "bounds", four_file)
    assert code == 0
    assert out == "well-founded bound: [{}, {p, q, r, s}]\n"


def test_bounds_with_search(capsys, four_file):
    code, out, _ = run(capsys, "asp", "bounds", four_file, "--bnb")
    assert code == 0
    assert out.splitlines()[-3:] == ["stable models found: 2", "  {p, r}", "  {q, s}"]


def test_bounds_json(capsys, four_file):
    code, out, _ = run(capsys, "asp", "bounds", four_file, "--bnb", "--json")
    obj = json.loads(out)
    assert code == 0
    assert obj["well_founded"] == {"lower": [], "upper": ["p", "q", "r", "s"], "valid": True}
    assert obj["models"] == [["p", "r"], ["q", "s"]]
    assert sorted(b["lower"] for b in obj["search"]["final"]) == [["p", "r"], ["q", "s"]]
    assert obj["search"]["active"] == []


def test_budget_flags_need_search(capsys, four_file):
    code, _, err = run(capsys, "asp", "bounds", four_file, "--budget", "2")
    assert code == 1 and "--bnb" in err
    code, _, _ = run(capsys, "asp", "bounds", four_file, "--bnb", "--budget", "2")
    assert code == 1
    code, out, _ = run(capsys, "asp", "bounds", four_file, "--bnb", "--budget", "2", "--outer-max", "4")
    assert code == 0 and "stable models found: 2" in out


def test_parse_error_exits_one_with_location(capsys, tmp_path):
    bad = tmp_path / "bad.lp"
    bad.write_text("p.\nq :- .\n")
    code, out, err = run(capsys, "asp", "bounds", bad)
    assert code == 1 and out == "" and "2:" in err


def test_missing_file_and_bad_flags_exit_one(capsys, tmp_path):
    assert run(capsys, "asp", "bounds", tmp_path / "nope.lp")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["asp", "bounds"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["asp", "oracle", "x.lp", "--cap", "0"])
    assert exc.value.code == 1


def test_oracle(capsys, four_file):
    code, out, _ = run(capsys, "asp", "oracle", four_file)
    assert code == 0 and out == "{p, r}\n{q, s}\n"
    code, out, _ = run(capsys, "asp", "oracle", four_file, "--json")
    assert json.loads(out) == {"models": [["p", "r"], ["q", "s"]]}


def test_oracle_cap_exits_two(capsys):
    code, _, err = run(capsys, "asp", "oracle", DATA / "coloring.lp", "--cap", "1024")
    assert code == 2 and "error" in err


def test_preprocess_assumptions(capsys):
    code, out, _ = run(capsys, "asp", "preprocess", DATA / "coloring.lp",
                       "--bounds", DATA / "coloring_bounds.json", "--emit", "assumptions")
    assert code == 0 and out == "red(1)\ngreen(4)\n-blue(2)\n"


def test_preprocess_program_keeps_the_bounded_models(capsys, tmp_path):
    code, out, _ = run(capsys, "asp", "preprocess", DATA / "coloring.lp", "--bounds", DATA / "coloring_bounds.json")
    assert code == 0
    pe = tmp_path / "pe.lp"
    pe.write_text(out)
    code, out, _ = run(capsys, "asp", "oracle", pe, "--json")
    models = json.loads(out)["models"]
    assert code == 0 and len(models) == 3
    for m in models:
        assert {"red(1)", "green(4)"} <= set(m) and "blue(2)" not in m


def test_preprocess_substitute_mode_refuses_this_bound(capsys):
    code, _, err = run(capsys, "asp", "preprocess", DATA / "coloring.lp",
                       "--bounds", DATA / "coloring_bounds.json", "--mode", "substitute")
    assert code == 1 and "safe mode" in err


def test_preprocess_empty_bounds_round_trip(capsys, tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    code, out, _ = run(capsys, "asp", "preprocess", DATA / "oscillating.lp", "--bounds", empty)
    assert code == 0
    assert sorted(out.splitlines()) == sorted((DATA / "oscillating.lp").read_text().splitlines())


def test_preprocess_unknown_atom_exits_one(capsys, tmp_path):
    b = tmp_path / "b.json"
    b.write_text('{"lower": ["purple(9)"]}')
    code, _, err = run(capsys, "asp", "preprocess", DATA / "coloring.lp", "--bounds", b)
    assert code == 1 and "purple(9)" in err
    b.write_text("{not json")
    assert run(capsys, "asp", "preprocess", DATA / "coloring.lp", "--bounds", b)[0] == 1


def test_demo(capsys):
    code, out, _ = run(capsys, "demo")
    lines = out.splitlines()
    assert code == 0
    assert lines[1] == "step 1: [(0/1, 0/1), (1/1, 1/2)]"
    assert lines[2] == "step 2: [(3/4, 3/8), (1/1, 1/2)]"
    assert lines[3] == "F([(0/1, 0/1), (1/5, 1/5)]) = [(1/1, 1/1), (1/5, 1/10)] invalid"
    code, out, _ = run(capsys, "demo", "--json")
    assert json.loads(out.splitlines()[2])["lower"] == ["3/4", "3/8"]
    assert run(capsys, "demo", "--steps", "1")[0] == 1


def test_spec_analyze(capsys):
    code, out, _ = run(capsys, "spec", "analyze", DATA / "branchy.mir")
    assert code == 0
    assert out.splitlines() == ["start: x=top y=top", "pos: x=+ y=top", "other: x=top y=top", "done: x=top y=top"]


def test_spec_stable_both_modes(capsys):
    code, out, _ = run(capsys, "spec", "stable", DATA / "branchy.mir", "--json")
    obj = json.loads(out)
    assert code == 0 and [s["assumptions"] for s in obj["stable"]] == [["done:y:+"]]
    code, out, _ = run(capsys, "spec", "stable", DATA / "branchy.mir", "--mode", "proved", "--json")
    assert [s["assumptions"] for s in json.loads(out)["stable"]] == [[], ["done:y:+"]]


def test_outputs_are_deterministic(capsys):
    cases = [
        ["asp", "bounds", DATA / "coloring.lp", "--bnb", "--json"],
        ["asp", "bounds", DATA / "coloring.lp", "--bnb", "--json", "--workers", "4"],
        ["spec", "stable", DATA / "branchy.mir", "--json"],
        ["demo", "--json"],
    ]
    outs = []
    for argv in cases:
        a = run(capsys, *argv)
        b = run(capsys, *argv)
        assert a == b and a[0] == 0
        outs.append(a[1])
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "aftbound", "asp", "oracle", str(DATA / "oscillating.lp")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "{p, r}\n{q, s}\n"
