"""
Trace I/O Module
Loading, streaming, saving and labeling of spatial-model traces (JSON lines)
"""

import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from algebra import Algebra, AlgebraValue
from errors import LabelingError, ModelValidationError, TraceFormatError
from logic import Comparison, KindTest, Predicate
from spatial import SpatialModel, validate_model

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
JSON_SEPARATORS = (",", ":")


def label(S: SpatialModel, l: str, pred: Predicate, alg: Algebra) -> AlgebraValue:
    """
    Value of a predicate at one location of a snapshot

    Args:
        S: Snapshot
        l: Location id
        pred: Kind test or numeric comparison
        alg: Boolean gives truth values; min-max gives signed margins
             (attr - c for >= and >, c - attr for <= and <) and +/-inf for kind tests

    Returns:
        Algebra value
    """
    if isinstance(pred, KindTest):
        return alg.top if S.kind(l) == pred.kind else alg.bot
    if isinstance(pred, Comparison):
        attrs = S.attrs(l)
        if pred.attr not in attrs:
            raise LabelingError(l, S.step, pred.attr)
        value = attrs[pred.attr]
        if alg.is_boolean():
            if pred.op == ">=":
                return value >= pred.value
            if pred.op == "<=":
                return value <= pred.value
            if pred.op == ">":
                return value > pred.value
            return value < pred.value
        if pred.op in (">=", ">"):
            return float(value - pred.value)
        return float(pred.value - value)
    raise TypeError(f"not a predicate: {pred!r}")


@dataclass
class LabeledTrace:
    """Finite sequence of snapshots over one location universe"""
    snapshots: List[SpatialModel]
    period_ms: float = 10.0
    undirected: bool = False
    attributes: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.snapshots:
            raise TraceFormatError("trace has no snapshots")
        self.universe: Tuple[str, ...] = self.snapshots[0].locations
        reference = self.snapshots[0].universe
        for t, model in enumerate(self.snapshots):
            if model.universe != reference:
                drift = sorted(reference.symmetric_difference(model.universe))
                raise TraceFormatError(f"universe drift at step {t}: {drift}")

    def __len__(self) -> int:
        return len(self.snapshots)

    def __getitem__(self, t: int) -> SpatialModel:
        return self.snapshots[t]

    def __iter__(self) -> Iterator[SpatialModel]:
        return iter(self.snapshots)

    def label(self, t: int, l: str, pred: Predicate, alg: Algebra) -> AlgebraValue:
        return label(self.snapshots[t], l, pred, alg)

    def get_info(self) -> Dict[str, Any]:
        return {
            "steps": len(self.snapshots),
            "locations": len(self.universe),
            "period_ms": self.period_ms,
            "undirected": self.undirected,
            "edges_per_step": [len(model.edges) for model in self.snapshots],
        }


def _open_for_reading(source: Union[PathLike, IO[str]]) -> Tuple[IO[str], bool]:
    if hasattr(source, "readline"):
        return source, False
    if str(source) == "-":
        return sys.stdin, False
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(f"Trace file not found: {path}")
    return open(path, "r", encoding="utf-8"), True


class TraceReader:
    """
    Streaming reader: parses the header eagerly, then yields one validated
    snapshot per record so online monitors can consume stdin line by line.
    """

    def __init__(self, source: Union[PathLike, IO[str]]):
        self.source = source
        self._stream, self._owned = _open_for_reading(source)
        self._line_number = 0
        self.metadata: Dict[str, Any] = {}
        try:
            self._read_header()
        except Exception:
            self.close()
            raise

    def _next_line(self) -> Optional[str]:
        while True:
            line = self._stream.readline()
            if not line:
                return None
            self._line_number += 1
            if line.strip():
                return line

    def _decode(self, line: str) -> Dict[str, Any]:
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise TraceFormatError(f"malformed record: {e.msg}", self._line_number) from None
        if not isinstance(record, dict):
            raise TraceFormatError("record is not an object", self._line_number)
        return record

    def _read_header(self) -> None:
        line = self._next_line()
        if line is None:
            raise TraceFormatError("empty trace file", 1)
        header = self._decode(line)
        universe = header.get("universe")
        if not isinstance(universe, list) or not universe:
            raise TraceFormatError("header needs a non-empty 'universe' list", self._line_number)
        ids = [str(loc) for loc in universe]
        if len(set(ids)) != len(ids):
            raise TraceFormatError("duplicate location in header universe", self._line_number)
        self.universe: Tuple[str, ...] = tuple(ids)
        self.period_ms = float(header.get("period_ms", 10))
        self.undirected = bool(header.get("undirected", False))
        self.attributes = list(header.get("attributes", []))
        self.metadata = {
            "universe": list(self.universe),
            "period_ms": self.period_ms,
            "undirected": self.undirected,
            "attributes": self.attributes,
            "source": str(self.source),
        }

    def _model(self, record: Dict[str, Any], expected_after: int) -> SpatialModel:
        line = self._line_number
        t = record.get("t")
        if isinstance(t, bool) or not isinstance(t, int):
            raise TraceFormatError("record needs an integer step index 't'", line)
        if expected_after < 0 and t != 0:
            raise TraceFormatError(f"first step index must be 0, got {t}", line)
        if t <= expected_after:
            raise TraceFormatError(f"non-monotone step index {t} after {expected_after}", line)
        nodes = record.get("nodes")
        edges = record.get("edges", [])
        if not isinstance(nodes, list) or not isinstance(edges, list):
            raise TraceFormatError("record needs 'nodes' and 'edges' lists", line)
        by_id = {}
        for node in nodes:
            if not isinstance(node, dict) or "id" not in node:
                raise TraceFormatError(f"malformed node {node!r}", line)
            by_id[str(node["id"])] = node
        if set(by_id) != set(self.universe) or len(by_id) != len(nodes):
            drift = sorted(set(self.universe).symmetric_difference(by_id))
            raise TraceFormatError(f"universe drift at step {t}: {drift or 'duplicate node ids'}", line)
        ordered = [by_id[loc] for loc in self.universe]
        if self.undirected:
            edges = _symmetric(edges)
        try:
            return validate_model(ordered, edges, step=t)
        except ModelValidationError as e:
            raise TraceFormatError(f"invalid snapshot at step {t}: {e}", line) from None

    def __iter__(self) -> Iterator[SpatialModel]:
        last = -1
        try:
            while True:
                line = self._next_line()
                if line is None:
                    break
                model = self._model(self._decode(line), last)
                last = model.step
                yield model
        finally:
            self.close()

    def close(self) -> None:
        if self._owned and not self._stream.closed:
            self._stream.close()

    def get_info(self) -> Dict[str, Any]:
        return dict(self.metadata)


def _symmetric(edges: Sequence[Any]) -> List[Any]:
    """Listed edges followed by the reverse of every edge whose reverse is not listed"""
    pairs = set()
    for edge in edges:
        if isinstance(edge, dict) and "src" in edge and "dst" in edge:
            pairs.add((str(edge["src"]), str(edge["dst"])))
    expanded = list(edges)
    for edge in edges:
        if not isinstance(edge, dict) or "src" not in edge or "dst" not in edge:
            continue
        src, dst = str(edge["src"]), str(edge["dst"])
        if (dst, src) not in pairs:
            expanded.append({"src": dst, "w": edge.get("w"), "dst": src})
            pairs.add((dst, src))
    return expanded


def load_trace(source: Union[PathLike, IO[str]]) -> LabeledTrace:
    """
    Load and validate a whole trace

    Args:
        source: File path, "-" for stdin, or an open text stream

    Returns:
        LabeledTrace
    """
    logger.info(f"Loading trace: {source}")
    t0 = time.perf_counter()
    reader = TraceReader(source)
    snapshots = list(reader)
    if not snapshots:
        raise TraceFormatError("trace has no snapshots")
    trace = LabeledTrace(snapshots, reader.period_ms, reader.undirected, reader.attributes)
    logger.info(f"Loaded {len(trace)} steps over {len(trace.universe)} locations in {time.perf_counter() - t0:.3f}s")
    return trace


def snapshot_record(model: SpatialModel, t: int, undirected: bool = False) -> Dict[str, Any]:
    """
    JSON record of one snapshot

    Args:
        model: Snapshot
        t: Step index written as "t"
        undirected: List a location pair once when both directions carry the
                    same weight; asymmetric pairs keep both edges

    Returns:
        Record with "t", "nodes" and "edges"
    """
    weights = {(edge.src, edge.dst): edge.weight for edge in model.edges}
    edges = []
    seen = set()
    for edge in model.edges:
        if undirected and weights.get((edge.dst, edge.src)) == edge.weight:
            pair = frozenset((edge.src, edge.dst))
            if pair in seen:
                continue
            seen.add(pair)
        edges.append({"src": edge.src, "w": edge.weight, "dst": edge.dst})
    nodes = [{"id": loc, "kind": model.kind(loc), "attrs": dict(model.attrs(loc))} for loc in model.locations]
    return {"t": t, "nodes": nodes, "edges": edges}


class TraceWriter:
    """Incremental writer for the JSON-lines trace format"""

    def __init__(self, target: Union[PathLike, IO[str]], universe: Sequence[str], period_ms: float = 10.0,
                 undirected: bool = False, attributes: Optional[Sequence[str]] = None):
        if hasattr(target, "write"):
            self._stream, self._owned = target, False
        elif str(target) == "-":
            self._stream, self._owned = sys.stdout, False
        else:
            path = Path(target)
            path.parent.mkdir(parents=True, exist_ok=True)
            self._stream, self._owned = open(path, "w", encoding="utf-8"), True
        self.undirected = undirected
        self.steps = 0
        self._last = -1
        header: Dict[str, Any] = {"universe": list(universe), "period_ms": period_ms, "undirected": undirected}
        if attributes:
            header["attributes"] = list(attributes)
        self._write(header)

    def _write(self, record: Dict[str, Any]) -> None:
        self._stream.write(json.dumps(record, separators=JSON_SEPARATORS) + "\n")

    def write(self, model: SpatialModel) -> None:
        """Append one snapshot under its own step index, or the next free one when it has none"""
        t = self._last + 1 if model.step is None else model.step
        self._write(snapshot_record(model, t, self.undirected))
        self._last = t
        self.steps += 1

    def close(self) -> None:
        if self._owned:
            self._stream.close()
        else:
            self._stream.flush()

    def __enter__(self) -> "TraceWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def save_trace(trace: LabeledTrace, target: Union[PathLike, IO[str]]) -> None:
    """Write a trace in the JSON-lines format, keeping the step index of every snapshot"""
    logger.info(f"Saving trace: {target}")
    with TraceWriter(target, trace.universe, trace.period_ms, trace.undirected, trace.attributes) as writer:
        for model in trace:
            writer.write(model)
    logger.info(f"Saved {len(trace)} steps")


def make_snapshot(nodes: Iterable[Any], edges: Iterable[Any] = (), step: Optional[int] = None,
                  undirected: bool = False) -> SpatialModel:
    """Validated snapshot from raw nodes and edges; ``undirected`` mirrors every edge"""
    raw_edges = []
    for edge in edges:
        if isinstance(edge, dict):
            raw_edges.append(edge)
        else:
            src, weight, dst = edge
            raw_edges.append({"src": src, "w": weight, "dst": dst})
    if undirected:
        raw_edges = _symmetric(raw_edges)
    return validate_model(nodes, raw_edges, step=step)
