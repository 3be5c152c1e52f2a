import io
import json
import random

import pytest

from algebra import BOOLEAN, MINMAX
from errors import LabelingError, TraceFormatError
from logic import Comparison, KindTest
from trace_io import LabeledTrace, TraceReader, TraceWriter, label, load_trace, make_snapshot, save_trace


def write_lines(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


def header(universe=("a", "b", "c"), **extra):
    return dict({"universe": list(universe), "period_ms": 10}, **extra)


def record(t, kinds=("drone", "drone", "groundstation"), edges=(("a", "b"), ("b", "c"))):
    return {
        "t": t,
        "nodes": [{"id": loc, "kind": kind, "attrs": {"battery": 5.0}} for loc, kind in zip("abc", kinds)],
        "edges": [{"src": s, "w": 1.0, "dst": d} for s, d in edges],
    }


class TestLabel:
    """Predicate values at one location"""

    @pytest.fixture
    def snapshot(self):
        return make_snapshot([{"id": "d0", "kind": "drone", "attrs": {"battery": 5.0}}])

    def test_kind_test(self, snapshot):
        assert label(snapshot, "d0", KindTest("drone"), BOOLEAN) is True
        assert label(snapshot, "d0", KindTest("groundstation"), MINMAX) == float("-inf")

    def test_comparison_margins(self, snapshot):
        assert label(snapshot, "d0", Comparison("battery", ">=", 4.0), MINMAX) == 1.0
        assert label(snapshot, "d0", Comparison("battery", "<=", 4.0), MINMAX) == -1.0
        assert label(snapshot, "d0", Comparison("battery", "<", 5.0), BOOLEAN) is False

    def test_robust_sign_matches_boolean(self):
        rng = random.Random(41)
        for _ in range(500):
            kind = rng.choice(("drone", "groundstation"))
            snapshot = make_snapshot([{"id": "d0", "kind": kind, "attrs": {"battery": rng.randint(-6, 6) / 2}}])
            pred = rng.choice((KindTest("drone"),
                               Comparison("battery", rng.choice((">=", "<=", ">", "<")), float(rng.randint(-3, 3)))))
            margin = label(snapshot, "d0", pred, MINMAX)
            verdict = label(snapshot, "d0", pred, BOOLEAN)
            if margin > 0:
                assert verdict is True, pred
            elif margin < 0:
                assert verdict is False, pred

    def test_missing_attribute(self, snapshot):
        with pytest.raises(LabelingError):
            label(snapshot, "d0", Comparison("speed", ">", 1.0), BOOLEAN)


class TestLoad:
    """Whole-file loading and validation"""

    def test_two_steps(self, tmp_path):
        path = write_lines(tmp_path / "trace.jsonl", [header(), record(0), record(1)])
        trace = load_trace(path)
        assert len(trace) == 2
        assert trace.universe == ("a", "b", "c")
        assert len(trace[1].edges) == 2
        assert trace.get_info()["edges_per_step"] == [2, 2]

    def test_undirected_expansion(self, tmp_path):
        path = write_lines(tmp_path / "trace.jsonl", [header(("a", "b"), undirected=True),
                                                      {"t": 0, "nodes": [{"id": "a"}, {"id": "b"}],
                                                       "edges": [{"src": "a", "w": 2.0, "dst": "b"}]}])
        trace = load_trace(path)
        assert {(e.src, e.dst) for e in trace[0].edges} == {("a", "b"), ("b", "a")}
        assert trace.undirected

    def test_universe_drift(self, tmp_path):
        drifted = record(1)
        drifted["nodes"][2]["id"] = "x"
        path = write_lines(tmp_path / "trace.jsonl", [header(), record(0), drifted])
        with pytest.raises(TraceFormatError) as e:
            load_trace(path)
        assert e.value.line_number == 3
        assert "universe drift" in str(e.value)

    def test_non_monotone_step(self, tmp_path):
        path = write_lines(tmp_path / "trace.jsonl", [header(), record(0), record(1), record(1)])
        with pytest.raises(TraceFormatError) as e:
            load_trace(path)
        assert e.value.line_number == 4

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        path.write_text(json.dumps(header()) + "\n" + json.dumps(record(0)) + "\n{\"t\": 1,\n", encoding="utf-8")
        with pytest.raises(TraceFormatError) as e:
            load_trace(path)
        assert str(e.value).startswith("line 3:")

    def test_dangling_edge(self, tmp_path):
        path = write_lines(tmp_path / "trace.jsonl", [header(), record(0, edges=(("a", "z"),))])
        with pytest.raises(TraceFormatError) as e:
            load_trace(path)
        assert "dangling endpoint" in str(e.value)

    def test_header_without_snapshots(self, tmp_path):
        path = write_lines(tmp_path / "trace.jsonl", [header()])
        with pytest.raises(TraceFormatError):
            load_trace(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_trace(tmp_path / "missing.jsonl")


class TestStreaming:
    """Reader over open streams and the writer"""

    def test_reader_on_stream(self):
        text = "\n".join(json.dumps(r) for r in [header(), record(0), record(1), record(2)]) + "\n"
        reader = TraceReader(io.StringIO(text))
        assert reader.universe == ("a", "b", "c")
        steps = [model.step for model in reader]
        assert steps == [0, 1, 2]

    def test_gaps_in_step_index_are_allowed(self):
        text = "\n".join(json.dumps(r) for r in [header(), record(0), record(5)]) + "\n"
        assert [model.step for model in TraceReader(io.StringIO(text))] == [0, 5]

    def test_save_and_load(self, tmp_path, g1_trace):
        path = tmp_path / "out" / "g1.jsonl"
        save_trace(g1_trace, path)
        loaded = load_trace(path)
        assert loaded.universe == g1_trace.universe
        assert loaded[0].to_dict() == g1_trace[0].to_dict()

    def test_round_trip_keeps_gaps_and_asymmetric_weights(self, tmp_path):
        first = {"t": 0, "nodes": [{"id": "a"}, {"id": "b"}],
                 "edges": [{"src": "a", "w": 1.0, "dst": "b"}, {"src": "b", "w": 2.0, "dst": "a"}]}
        source = write_lines(tmp_path / "in.jsonl", [header(("a", "b"), undirected=True), first, dict(first, t=5)])
        trace = load_trace(source)
        save_trace(trace, tmp_path / "once.jsonl")
        again = load_trace(tmp_path / "once.jsonl")
        assert [model.step for model in again] == [0, 5]
        assert again[1].edge_weight("a", "b") == 1.0
        assert again[1].edge_weight("b", "a") == 2.0
        assert [model.to_dict() for model in again] == [model.to_dict() for model in trace]
        save_trace(again, tmp_path / "twice.jsonl")
        assert (tmp_path / "twice.jsonl").read_bytes() == (tmp_path / "once.jsonl").read_bytes()

    def test_writer_numbers_unstamped_snapshots(self):
        buffer = io.StringIO()
        with TraceWriter(buffer, ("a",)) as writer:
            for _ in range(3):
                writer.write(make_snapshot(["a"]))
        assert [json.loads(line)["t"] for line in buffer.getvalue().splitlines()[1:]] == [0, 1, 2]
        assert writer.steps == 3

    def test_stream_closed_when_header_is_rejected(self, monkeypatch):
        stream = io.StringIO(json.dumps({"universe": []}) + "\n")
        monkeypatch.setattr("trace_io._open_for_reading", lambda source: (stream, True))
        with pytest.raises(TraceFormatError):
            TraceReader("trace.jsonl")
        assert stream.closed

    def test_undirected_writer_lists_pairs_once(self, g1):
        buffer = io.StringIO()
        with TraceWriter(buffer, g1.locations, undirected=True) as writer:
            writer.write(g1)
        lines = buffer.getvalue().splitlines()
        assert json.loads(lines[0])["undirected"] is True
        assert len(json.loads(lines[1])["edges"]) == 2

    def test_empty_trace_rejected(self):
        with pytest.raises(TraceFormatError):
            LabeledTrace([])
