"""
Spatial Model Module
Graph snapshots, distance functions, bounded simple-path enumeration and shortest distances
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from algebra import COUNTING, TROPICAL, DistanceDomain, DistanceValue
from errors import ModelValidationError, PathError, UnknownDistanceFunctionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Node:
    """One location of a snapshot with its kind and numeric attributes"""
    id: str
    kind: str = ""
    attrs: Mapping[str, float] = field(default_factory=dict)


class Edge(NamedTuple):
    src: str
    weight: float
    dst: str


class Path(NamedTuple):
    """Simple path with its cumulative prefix distances (``distances[0]`` is the domain zero)"""
    locations: Tuple[str, ...]
    distances: Tuple[DistanceValue, ...]

    @property
    def last(self) -> str:
        return self.locations[-1]

    @property
    def distance(self) -> DistanceValue:
        return self.distances[-1]


@dataclass(frozen=True)
class DistanceFunction:
    """Maps an edge weight into a distance domain"""
    name: str
    domain: DistanceDomain
    mapping: Callable[[float], DistanceValue] = field(repr=False, compare=False)
    non_negative: bool = True

    def __call__(self, weight: float) -> DistanceValue:
        return self.domain.check(self.mapping(weight))


HOPS = DistanceFunction("hops", COUNTING, lambda weight: 1)
WEIGHT = DistanceFunction("weight", TROPICAL, lambda weight: float(weight))


class DistanceRegistry:
    """Named distance functions available to formulas"""

    def __init__(self, functions: Iterable[DistanceFunction] = (HOPS, WEIGHT)):
        self._functions: Dict[str, DistanceFunction] = {}
        for fn in functions:
            self.register(fn)

    def register(self, fn: DistanceFunction) -> None:
        if not fn.non_negative:
            raise ValueError(f"Distance function '{fn.name}' must be non-negative to support pruned path search")
        self._functions[fn.name] = fn

    def get(self, name: str) -> DistanceFunction:
        try:
            return self._functions[name]
        except KeyError:
            raise UnknownDistanceFunctionError(f"unknown distance function '{name}'") from None

    def __contains__(self, name: str) -> bool:
        return name in self._functions

    def names(self) -> List[str]:
        return sorted(self._functions)


DEFAULT_REGISTRY = DistanceRegistry()


class SpatialModel:
    """
    One snapshot of the spatial graph.

    Edges are directed; successors are kept in lexicographic order of the
    destination id so that every traversal is reproducible.
    """

    def __init__(self, nodes: Sequence[Node], edges: Sequence[Edge], step: Optional[int] = None):
        self.nodes: Dict[str, Node] = {node.id: node for node in nodes}
        self.locations: Tuple[str, ...] = tuple(node.id for node in nodes)
        self.edges: Tuple[Edge, ...] = tuple(edges)
        self.step = step
        self._succ: Dict[str, List[Tuple[str, float]]] = {loc: [] for loc in self.locations}
        for edge in self.edges:
            self._succ[edge.src].append((edge.dst, edge.weight))
        for targets in self._succ.values():
            targets.sort()
        self._graph: Optional[nx.DiGraph] = None
        self._shortest: Dict[Tuple[str, str], Dict[str, DistanceValue]] = {}
        self._paths: Dict[Tuple[str, str, DistanceValue], List[Path]] = {}

    @property
    def universe(self) -> frozenset:
        return frozenset(self.locations)

    def __contains__(self, location: str) -> bool:
        return location in self.nodes

    def __len__(self) -> int:
        return len(self.locations)

    def __repr__(self) -> str:
        return f"SpatialModel(step={self.step}, locations={len(self.locations)}, edges={len(self.edges)})"

    def kind(self, location: str) -> str:
        return self.nodes[location].kind

    def attrs(self, location: str) -> Mapping[str, float]:
        return self.nodes[location].attrs

    def successors(self, location: str) -> List[Tuple[str, float]]:
        return self._succ[location]

    def edge_weight(self, src: str, dst: str) -> Optional[float]:
        for target, weight in self._succ.get(src, ()):
            if target == dst:
                return weight
        return None

    def to_networkx(self) -> nx.DiGraph:
        if self._graph is None:
            graph = nx.DiGraph()
            graph.add_nodes_from(self.locations)
            graph.add_weighted_edges_from((e.src, e.dst, e.weight) for e in self.edges)
            self._graph = graph
        return self._graph

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nodes": [{"id": n.id, "kind": n.kind, "attrs": dict(n.attrs)} for n in self.nodes.values()],
            "edges": [{"src": e.src, "w": e.weight, "dst": e.dst} for e in self.edges],
        }


def _raw_node(raw: Any) -> Node:
    if isinstance(raw, Node):
        return raw
    if isinstance(raw, str):
        return Node(raw)
    if isinstance(raw, Mapping):
        return Node(str(raw["id"]), str(raw.get("kind", "")), dict(raw.get("attrs", {})))
    raise TypeError(f"cannot read node from {raw!r}")


def _raw_edge(raw: Any) -> Edge:
    if isinstance(raw, Mapping):
        return Edge(str(raw["src"]), raw["w"], str(raw["dst"]))
    src, weight, dst = raw
    return Edge(str(src), weight, str(dst))


def validate_model(raw_nodes: Iterable[Any], raw_edges: Iterable[Any], step: Optional[int] = None) -> SpatialModel:
    """
    Build a spatial model, reporting every violation at once

    Args:
        raw_nodes: Node objects, ids, or ``{"id", "kind", "attrs"}`` mappings
        raw_edges: Edge triples ``(src, weight, dst)`` or ``{"src", "w", "dst"}`` mappings
        step: Time index of the snapshot, kept for diagnostics

    Returns:
        Validated SpatialModel
    """
    violations: List[str] = []
    nodes: List[Node] = []
    seen_ids = set()
    for raw in raw_nodes:
        try:
            node = _raw_node(raw)
        except (KeyError, TypeError, ValueError) as e:
            violations.append(f"malformed node {raw!r}: {e}")
            continue
        if node.id in seen_ids:
            violations.append(f"duplicate location id '{node.id}'")
            continue
        for name, value in node.attrs.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                violations.append(f"attribute '{name}' of '{node.id}' is not a number: {value!r}")
        seen_ids.add(node.id)
        nodes.append(node)
    if not nodes:
        violations.append("empty location set")

    edges: List[Edge] = []
    seen_pairs = set()
    for raw in raw_edges:
        try:
            edge = _raw_edge(raw)
        except (KeyError, TypeError, ValueError) as e:
            violations.append(f"malformed edge {raw!r}: {e}")
            continue
        if isinstance(edge.weight, bool) or not isinstance(edge.weight, (int, float)):
            violations.append(f"edge ({edge.src}, {edge.weight!r}, {edge.dst}) has a non-numeric weight")
            continue
        for end in (edge.src, edge.dst):
            if end not in seen_ids:
                violations.append(f"dangling endpoint '{end}' in edge ({edge.src}, {edge.weight}, {edge.dst})")
        if (edge.src, edge.dst) in seen_pairs:
            violations.append(f"duplicate edge ({edge.src}, {edge.weight}, {edge.dst})")
            continue
        seen_pairs.add((edge.src, edge.dst))
        edges.append(edge)

    if violations:
        raise ModelValidationError(violations)
    return SpatialModel(nodes, edges, step=step)


def path_distance(model: SpatialModel, path: Sequence[str], f: DistanceFunction) -> DistanceValue:
    """
    Distance of an explicit path

    Args:
        model: Snapshot holding the edges
        path: Locations in visiting order
        f: Distance function applied to each edge weight

    Returns:
        Sum of f over consecutive edges; the domain zero for paths shorter than two
    """
    dom = f.domain
    total = dom.bot
    for src, dst in zip(path, path[1:]):
        weight = model.edge_weight(src, dst)
        if weight is None:
            raise PathError(f"no edge between '{src}' and '{dst}'")
        total = dom.add(total, f(weight))
    return total


def iter_bounded_paths(model: SpatialModel, origin: str, f: DistanceFunction,
                       d_hi: DistanceValue) -> Iterator[Path]:
    """Depth-first walk over simple paths, pruning extensions beyond ``d_hi``"""
    if origin not in model:
        raise PathError(f"origin '{origin}' is not a location of the model")
    dom = f.domain
    visited = {origin}
    locations = [origin]
    distances = [dom.bot]

    def extend() -> Iterator[Path]:
        yield Path(tuple(locations), tuple(distances))
        for target, weight in model.successors(locations[-1]):
            if target in visited:
                continue
            d = dom.add(distances[-1], f(weight))
            if not dom.leq(d, d_hi):
                continue
            visited.add(target)
            locations.append(target)
            distances.append(d)
            yield from extend()
            distances.pop()
            locations.pop()
            visited.discard(target)

    yield from extend()


def enumerate_bounded_paths(model: SpatialModel, origin: str, f: DistanceFunction,
                            d_hi: DistanceValue) -> List[Path]:
    """Every simple path from ``origin`` whose prefix distances stay within ``d_hi``, cached per snapshot"""
    key = (origin, f.name, d_hi)
    paths = model._paths.get(key)
    if paths is None:
        paths = list(iter_bounded_paths(model, origin, f, d_hi))
        model._paths[key] = paths
    return paths


def shortest_distances(model: SpatialModel, origin: str, f: DistanceFunction) -> Dict[str, DistanceValue]:
    """Single-source shortest distances under f (Dijkstra); unreachable locations are absent"""
    if origin not in model:
        raise PathError(f"location '{origin}' is not in the model")
    key = (origin, f.name)
    lengths = model._shortest.get(key)
    if lengths is None:
        graph = model.to_networkx()
        raw = nx.single_source_dijkstra_path_length(
            graph, origin, weight=lambda u, v, data: f(data["weight"]))
        lengths = {loc: f.domain.add(f.domain.bot, d) for loc, d in raw.items()}
        model._shortest[key] = lengths
    return lengths


def shortest_distance(model: SpatialModel, l1: str, l2: str, f: DistanceFunction) -> DistanceValue:
    """
    Shortest distance between two locations of a snapshot

    Args:
        model: Snapshot
        l1: Origin location
        l2: Target location
        f: Distance function applied to edge weights

    Returns:
        Minimum over paths from l1 to l2 of the summed distances; the domain
        top when l2 is unreachable
    """
    if l2 not in model:
        raise PathError(f"location '{l2}' is not in the model")
    return shortest_distances(model, l1, f).get(l2, f.domain.top)
