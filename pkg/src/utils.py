"""
Utility functions for monitor checks: random instances, result export, timing
"""

import json
import logging
import math
import random
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, is_dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Tuple, Union

from logic import (FALSE, TRUE, And, Atom, Comparison, DistInterval, Escape, Eventually, Everywhere, Formula,
                   Globally, KindTest, Next, Not, Or, Reach, Somewhere, TimeInterval, Until)
from spatial import SpatialModel, validate_model
from trace_io import LabeledTrace

logger = logging.getLogger(__name__)


@dataclass
class CheckConfig:
    """Bounds of the random instances used to cross-check automaton and oracle"""
    instances: int = 1000
    seed: int = 7
    max_locations: int = 4
    max_depth: int = 3
    max_len: int = 5
    max_bound: int = 3
    edge_probability: float = 0.5
    kinds: Tuple[str, ...] = ("p", "q")
    attributes: Tuple[str, ...] = ("a", "b")


def random_predicate(rng: random.Random, cfg: CheckConfig):
    if rng.random() < 0.5:
        return KindTest(rng.choice(cfg.kinds))
    return Comparison(rng.choice(cfg.attributes), rng.choice((">=", "<=", ">", "<")),
                      rng.choice((-1.0, 0.0, 1.0, 2.0)))


def random_time_interval(rng: random.Random, cfg: CheckConfig) -> TimeInterval:
    lo = rng.randint(0, cfg.max_bound)
    hi = math.inf if rng.random() < 0.15 else rng.randint(lo, cfg.max_bound)
    return TimeInterval(lo, hi)


def random_dist_interval(rng: random.Random) -> DistInterval:
    if rng.random() < 0.6:
        lo = rng.choice((0, 0, 1, 2))
        hi = rng.choice([h for h in (0, 1, 2, math.inf) if h >= lo])
        return DistInterval("hops", lo, hi)
    lo = rng.choice((0.0, 0.0, 1.0))
    hi = rng.choice([h for h in (1.0, 2.5, math.inf) if h >= lo])
    return DistInterval("weight", lo, hi)


def random_formula(rng: random.Random, depth: int, cfg: CheckConfig) -> Formula:
    """Random formula of nesting depth at most ``depth``, timed and spatial operators included"""
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.05:
            return TRUE
        if roll < 0.1:
            return FALSE
        return Atom(random_predicate(rng, cfg))
    sub = depth - 1
    op = rng.choice(("not", "and", "or", "X", "U", "Ut", "F", "G", "reach", "escape", "somewhere", "everywhere"))
    if op == "not":
        return Not(random_formula(rng, sub, cfg))
    if op == "and":
        return And(random_formula(rng, sub, cfg), random_formula(rng, sub, cfg))
    if op == "or":
        return Or(random_formula(rng, sub, cfg), random_formula(rng, sub, cfg))
    if op == "X":
        return Next(random_formula(rng, sub, cfg))
    if op in ("U", "Ut"):
        interval = random_time_interval(rng, cfg) if op == "Ut" else None
        return Until(random_formula(rng, sub, cfg), random_formula(rng, sub, cfg), interval)
    if op in ("F", "G"):
        interval = random_time_interval(rng, cfg) if rng.random() < 0.8 else None
        node = Eventually if op == "F" else Globally
        return node(random_formula(rng, sub, cfg), interval)
    if op == "reach":
        return Reach(random_formula(rng, sub, cfg), random_formula(rng, sub, cfg), random_dist_interval(rng))
    node = {"escape": Escape, "somewhere": Somewhere, "everywhere": Everywhere}[op]
    return node(random_formula(rng, sub, cfg), random_dist_interval(rng))


def random_model(rng: random.Random, locations: List[str], cfg: CheckConfig, step: int = 0) -> SpatialModel:
    """Random directed snapshot; each ordered pair is an edge with probability ``edge_probability``"""
    nodes = [{"id": loc, "kind": rng.choice(cfg.kinds),
              "attrs": {attr: float(rng.randint(-2, 3)) for attr in cfg.attributes}}
             for loc in locations]
    edges = [(src, rng.choice((1.0, 1.5, 2.0, 3.0)), dst)
             for src in locations for dst in locations
             if src != dst and rng.random() < cfg.edge_probability]
    return validate_model(nodes, edges, step=step)


def random_trace(rng: random.Random, cfg: CheckConfig) -> LabeledTrace:
    n = rng.randint(1, cfg.max_locations)
    length = rng.randint(1, cfg.max_len)
    locations = [f"l{i}" for i in range(n)]
    return LabeledTrace([random_model(rng, locations, cfg, t) for t in range(length)])


def random_instance(rng: random.Random, cfg: CheckConfig) -> Tuple[Formula, LabeledTrace, str]:
    trace = random_trace(rng, cfg)
    f = random_formula(rng, cfg.max_depth, cfg)
    return f, trace, rng.choice(trace.universe)


def to_jsonable(obj: Any) -> Any:
    """Convert results to JSON-safe values; infinities become "inf" / "-inf" """
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def export_results(results: Dict[str, Any], output_path: Union[str, Path]) -> None:
    """
    Export check or monitoring results to a JSON file

    Args:
        results: Result dictionary
        output_path: Output file path
    """
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(results), f, indent=2)
    logger.info(f"Results exported to {output_path}")


def load_results(input_path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load results written by export_results

    Args:
        input_path: Input file path

    Returns:
        Result dictionary ("inf" strings stay strings)
    """
    with open(input_path, "r", encoding="utf-8") as f:
        results = json.load(f)
    logger.info(f"Results loaded from {input_path}")
    return results


@contextmanager
def timed(label: str) -> Iterator[Dict[str, float]]:
    """Measure a block with perf_counter; the yielded dict receives ``seconds``"""
    record: Dict[str, float] = {}
    t0 = time.perf_counter()
    try:
        yield record
    finally:
        record["seconds"] = time.perf_counter() - t0
        logger.info(f"{label}: {record['seconds']:.3f}s")
