import json
from pathlib import Path

import pytest

from algebra import BOOLEAN, MINMAX
from automaton import Automaton
from cli import main, read_spec, satisfied
from trace_io import LabeledTrace, make_snapshot, save_trace

CONFIG_DIR = Path(__file__).parent.parent / "configs"


@pytest.fixture
def g1_file(tmp_path, g1_trace):
    path = tmp_path / "g1.jsonl"
    save_trace(g1_trace, path)
    return str(path)


@pytest.fixture
def single_file(tmp_path, single_location_trace):
    path = tmp_path / "single.jsonl"
    save_trace(single_location_trace, path)
    return str(path)


@pytest.fixture
def three_step_file(tmp_path):
    """G1 line graph over three steps"""
    nodes = [{"id": loc, "kind": "drone", "attrs": {"battery": 5.0}} for loc in "abc"]
    snapshots = [make_snapshot(nodes, [("a", 1.0, "b"), ("b", 1.0, "c")], step=t, undirected=True) for t in range(3)]
    path = tmp_path / "three.jsonl"
    save_trace(LabeledTrace(snapshots, undirected=True), path)
    return str(path)


def lines(capsys):
    return capsys.readouterr().out.splitlines()


class TestMonitorCommand:
    """Verdict output and exit codes"""

    def test_all_egos(self, capsys, g1_file):
        code = main(["monitor", "--spec", "somewhere[hops][0,2] p", "--trace", g1_file, "--ego", "all"])
        assert code == 0
        assert lines(capsys) == ["EGO a VERDICT ⊤", "EGO b VERDICT ⊤", "EGO c VERDICT ⊤"]

    def test_violation_exit_code(self, capsys, g1_file):
        assert main(["monitor", "--spec", "p", "--trace", g1_file, "--ego", "a"]) == 1
        assert lines(capsys) == ["EGO a VERDICT ⊥"]

    def test_robust_jsonl(self, capsys, g1_file):
        code = main(["monitor", "--spec", "battery >= 4", "--trace", g1_file, "--ego", "a",
                     "--semantics", "robust", "--format", "jsonl"])
        assert code == 0
        assert json.loads(lines(capsys)[0]) == {"ego": "a", "verdict": 1.0, "satisfied": True}

    def test_spec_from_file_with_alias(self, capsys, tmp_path, g1_file):
        spec = tmp_path / "low.strel"
        spec.write_text("# battery check\nlow\n", encoding="utf-8")
        code = main(["monitor", "--spec", str(spec), "--trace", g1_file, "--ego", "b", "--define", "low=battery<=4"])
        assert code == 0
        assert read_spec(str(spec)).startswith("# battery check")

    def test_online_per_step_matches_offline(self, capsys, single_file):
        assert main(["monitor", "--spec", "F p", "--trace", single_file, "--ego", "a"]) == 0
        offline = lines(capsys)
        assert main(["monitor", "--spec", "F p", "--trace", single_file, "--ego", "a",
                     "--mode", "online", "--per-step"]) == 0
        online = lines(capsys)
        assert online[:4] == ["STEP 0 EGO a VALUE ⊥", "STEP 1 EGO a VALUE ⊥", "STEP 2 EGO a VALUE ⊤",
                              "STEP 3 EGO a VALUE ⊤"]
        assert online[4:] == offline

    def test_online_jsonl_records(self, capsys, single_file):
        main(["monitor", "--spec", "F p", "--trace", single_file, "--ego", "a", "--mode", "online",
              "--per-step", "--format", "jsonl", "--semantics", "robust"])
        records = [json.loads(line) for line in lines(capsys)]
        assert [r["value"] for r in records[:4]] == ["-inf", "-inf", "inf", "inf"]
        assert records[2]["conclusive"] is True
        assert records[4] == {"ego": "a", "verdict": "inf", "satisfied": True}

    def test_offline_all_egos_in_one_pass(self, capsys, monkeypatch, three_step_file):
        built = []
        original = Automaton.transitions

        def counting(aut, S):
            built.append(S.step)
            return original(aut, S)

        monkeypatch.setattr(Automaton, "transitions", counting)
        assert main(["monitor", "--spec", "G (battery >= 0)", "--trace", three_step_file, "--ego", "all"]) == 0
        assert built == [0, 1, 2]
        assert lines(capsys) == ["EGO a VERDICT ⊤", "EGO b VERDICT ⊤", "EGO c VERDICT ⊤"]

    def test_non_numeric_attribute(self, capsys, tmp_path):
        trace = tmp_path / "text_battery.jsonl"
        trace.write_text('{"universe":["a"]}\n'
                         '{"t":0,"nodes":[{"id":"a","kind":"drone","attrs":{"battery":"5"}}],"edges":[]}\n',
                         encoding="utf-8")
        assert main(["monitor", "--spec", "battery >= 4", "--trace", str(trace)]) == 2
        err = capsys.readouterr().err
        assert "line 2" in err
        assert "is not a number" in err

    def test_unknown_ego(self, capsys, g1_file):
        assert main(["monitor", "--spec", "p", "--trace", g1_file, "--ego", "z"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_parse_error(self, capsys, g1_file):
        assert main(["monitor", "--spec", "p and (q", "--trace", g1_file]) == 2
        assert "line 1, column 9" in capsys.readouterr().err

    def test_per_step_needs_online(self, g1_file):
        assert main(["monitor", "--spec", "p", "--trace", g1_file, "--per-step"]) == 2

    def test_missing_arguments(self):
        assert main(["monitor", "--spec", "p"]) == 2

    def test_missing_trace(self, tmp_path):
        assert main(["monitor", "--spec", "p", "--trace", str(tmp_path / "none.jsonl")]) == 2


class TestCheckCommand:
    """Random and explicit cross-checks"""

    def test_zero_instances(self, capsys):
        assert main(["check", "--random", "0"]) == 0
        assert lines(capsys) == ["OK 0/0"]

    def test_random_instances(self, capsys, tmp_path):
        export = tmp_path / "check.json"
        assert main(["check", "--random", "30", "--seed", "3", "--export", str(export)]) == 0
        assert lines(capsys) == ["OK 30/30"]
        summary = json.loads(export.read_text(encoding="utf-8"))
        assert summary["passed"] == 30
        assert summary["counterexample"] is None

    def test_explicit_instance(self, capsys, g1_file):
        assert main(["check", "--spec", "G q", "--trace", g1_file, "--ego", "a"]) == 0
        assert lines(capsys) == ["OK 1/1"]

    def test_explicit_instance_needs_trace(self):
        assert main(["check", "--spec", "G q"]) == 2

    def test_broken_evaluator_is_reported(self, capsys, monkeypatch, g1_file):
        monkeypatch.setattr("monitor.current_value", lambda st, aut: aut.alg.bot)
        assert main(["check", "--spec", "true", "--trace", g1_file, "--ego", "a"]) == 1
        out = lines(capsys)
        assert out[0] == "COUNTEREXAMPLE (boolean mismatch)"
        assert out[-1] == "FAIL 0/1"


class TestGenCommand:
    """Scenario generation"""

    def test_single_drone(self, capsys, tmp_path):
        out = tmp_path / "single.jsonl"
        assert main(["gen", "--config", str(CONFIG_DIR / "single_drone.json"), "--out", str(out)]) == 0
        report = lines(capsys)
        assert report[0] == "nodes 1 (drones 1, stations 0), obstacles 0, steps 1"
        assert report[1] == "edges per step: min 0 mean 0.00 max 0"
        records = out.read_text(encoding="utf-8").splitlines()
        assert json.loads(records[0])["universe"] == ["d0"]
        assert len(records) == 2

    def test_unknown_config_key(self, tmp_path):
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"drones": 1, "wind": 2}), encoding="utf-8")
        assert main(["gen", "--config", str(config), "--out", str(tmp_path / "x.jsonl")]) == 2


class TestInfoCommand:
    """Automaton size reports"""

    def test_until_on_two_locations(self, capsys):
        assert main(["info", "--spec", "p U q", "--locations", "2"]) == 0
        out = lines(capsys)
        assert out[0] == "formula: p U q"
        assert out[1] == "|phi|=3 T=0 |phi'|=6 size(phi')=3"
        assert "|Q|=12 bound=24" in out
        assert "|F|=2" in out

    def test_pruning(self, capsys):
        assert main(["info", "--spec", "X p", "--locations", "1", "--prune", "--states"]) == 0
        out = lines(capsys)
        assert "|Q|=5 bound=8" in out
        assert "pruned |Q|=2" in out
        assert "|F|=0" in out

    def test_locations_from_trace(self, capsys, g1_file):
        assert main(["info", "--spec", "G p", "--locations", g1_file]) == 0
        assert "|L|=3" in lines(capsys)

    def test_window_growth(self, capsys):
        sizes = []
        for n in (10, 20):
            main(["info", "--spec", f"F[0,{n}] p", "--locations", "1"])
            header = lines(capsys)[1]
            sizes.append(int(header.split("size(phi')=")[1]))
        assert sizes[1] - sizes[0] == 20

    def test_dot(self, capsys):
        assert main(["info", "--spec", "p U q", "--locations", "1", "--dot"]) == 0
        assert "digraph automaton {" in capsys.readouterr().out


def test_satisfied():
    assert satisfied(True, BOOLEAN)
    assert not satisfied(False, BOOLEAN)
    assert satisfied(0.5, MINMAX)
    assert not satisfied(0.0, MINMAX)
