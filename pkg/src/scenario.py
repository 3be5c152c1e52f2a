"""
Scenario Module
Deterministic drone-swarm generator: goal-seeking flock among circular
obstacles and fixed ground stations, emitted as proximity-graph traces
"""

import json
import logging
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import IO, Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist
from tqdm import tqdm

from errors import ScenarioConfigError
from spatial import Edge, Node, SpatialModel
from trace_io import LabeledTrace, TraceWriter

logger = logging.getLogger(__name__)

DRONE = "drone"
STATION = "groundstation"
ATTRIBUTES = ["x", "y", "dist_to_obstacle", "dist_to_goal"]


@dataclass
class ScenarioConfig:
    """Scenario parameters; JSON config files use the same field names"""
    seed: int = 0
    drones: int = 10
    stations: int = 5
    obstacles: int = 23
    extent: Tuple[float, float] = (400.0, 400.0)  # map width, height in meters
    goal_center: Optional[Tuple[float, float]] = None  # default: near the far corner
    goal_radius: float = 20.0
    start_center: Optional[Tuple[float, float]] = None  # default: near the origin corner
    start_spread: float = 8.0
    drone_positions: Optional[List[Tuple[float, float]]] = None
    station_positions: Optional[List[Tuple[float, float]]] = None
    obstacle_positions: Optional[List[Tuple[float, float, float]]] = None  # x, y, radius
    obstacle_radius: Tuple[float, float] = (5.0, 15.0)
    obstacle_density: Optional[float] = None  # share of obstacles inside the start-goal corridor; None: uniform
    corridor_width: float = 80.0
    period_ms: float = 10.0
    steps: int = 100
    station_radius: float = 40.0  # communication reach when a ground station is involved
    drone_radius: float = 30.0  # drone-to-drone reach
    max_speed: float = 8.0
    separation_distance: float = 5.0
    separation_gain: float = 20.0
    obstacle_margin: float = 10.0
    obstacle_gain: float = 12.0
    velocity_blend: float = 0.1
    noise: float = 0.2

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ScenarioConfigError(f"unknown config keys: {unknown}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ScenarioConfig":
        path = Path(path)
        if not path.exists():
            raise ScenarioConfigError(f"Config file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ScenarioConfigError(f"malformed config {path}: {e}") from None
        if not isinstance(data, dict):
            raise ScenarioConfigError(f"config {path} must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def validate(self) -> None:
        problems = []
        for name in ("drones", "stations", "obstacles"):
            if getattr(self, name) < 0:
                problems.append(f"{name} must be >= 0")
        if self.drones + self.stations < 1:
            problems.append("scenario needs at least one drone or station")
        if self.steps < 1:
            problems.append("steps must be >= 1")
        for name in ("goal_radius", "station_radius", "drone_radius", "period_ms", "max_speed"):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be > 0")
        if min(self.extent) <= 0:
            problems.append("extent must be positive")
        lo, hi = self.obstacle_radius
        if lo <= 0 or hi < lo:
            problems.append("obstacle_radius must be a positive range")
        if self.obstacle_density is not None and not 0.0 <= self.obstacle_density <= 1.0:
            problems.append("obstacle_density must be in [0, 1]")
        if self.corridor_width <= 0:
            problems.append("corridor_width must be > 0")
        if self.drone_positions is not None and len(self.drone_positions) != self.drones:
            problems.append("drone_positions must list one position per drone")
        if self.station_positions is not None and len(self.station_positions) != self.stations:
            problems.append("station_positions must list one position per station")
        if self.obstacle_positions is not None and len(self.obstacle_positions) != self.obstacles:
            problems.append("obstacle_positions must list one circle per obstacle")
        if problems:
            raise ScenarioConfigError("; ".join(problems))


# drones, stations, obstacles, obstacle density, steps
CASE_STUDY_MAPS: Dict[int, Tuple[int, int, int, float, int]] = {
    1: (10, 5, 23, 0.75, 6001),
    2: (10, 7, 46, 0.6, 6001),
    3: (15, 6, 46, 0.3, 8001),
    4: (3, 3, 8, 0.5, 6001),
    5: (5, 5, 23, 0.25, 7501),
}


def map_config(n: int, seed: int = 0) -> ScenarioConfig:
    """
    Case-study map configuration

    Args:
        n: Map number, 1 to 5
        seed: Generator seed

    Returns:
        ScenarioConfig with the map's counts, obstacle density and trace length
    """
    if n not in CASE_STUDY_MAPS:
        raise ScenarioConfigError(f"unknown map {n}; known maps: {sorted(CASE_STUDY_MAPS)}")
    drones, stations, obstacles, density, steps = CASE_STUDY_MAPS[n]
    return ScenarioConfig(seed=seed, drones=drones, stations=stations, obstacles=obstacles,
                          obstacle_density=density, steps=steps)


class ScenarioGenerator:
    """Point-mass flock simulation producing one snapshot per step"""

    def __init__(self, cfg: ScenarioConfig):
        cfg.validate()
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        width, height = cfg.extent
        self.diagonal = float(np.hypot(width, height))
        self.goal = np.array(cfg.goal_center if cfg.goal_center is not None else (0.85 * width, 0.85 * height),
                             dtype=float)
        self.start = np.array(cfg.start_center if cfg.start_center is not None else (0.1 * width, 0.1 * height),
                              dtype=float)
        start = self.start
        self.drone_ids = [f"d{i}" for i in range(cfg.drones)]
        self.station_ids = [f"s{i}" for i in range(cfg.stations)]
        self.universe = self.drone_ids + self.station_ids
        self.kinds = [DRONE] * cfg.drones + [STATION] * cfg.stations

        if cfg.drone_positions is not None:
            self.drones = np.array(cfg.drone_positions, dtype=float).reshape(cfg.drones, 2)
        else:
            self.drones = start + self.rng.normal(0.0, cfg.start_spread, size=(cfg.drones, 2))
        if cfg.station_positions is not None:
            self.stations = np.array(cfg.station_positions, dtype=float).reshape(cfg.stations, 2)
        else:
            fractions = (np.arange(cfg.stations) + 1.0) / (cfg.stations + 1.0)
            line = start + fractions[:, None] * (self.goal - start)
            self.stations = line + self.rng.normal(0.0, 5.0, size=(cfg.stations, 2))
        self.obstacles = self._place_obstacles()
        self.velocity = np.zeros((cfg.drones, 2))
        self.dt = cfg.period_ms / 1000.0
        logger.info(f"Scenario: {cfg.drones} drones, {cfg.stations} stations, "
                    f"{len(self.obstacles)} obstacles, {cfg.steps} steps, seed {cfg.seed}")

    def _place_obstacles(self) -> np.ndarray:
        cfg = self.cfg
        if cfg.obstacle_positions is not None:
            obstacles = np.array(cfg.obstacle_positions, dtype=float).reshape(cfg.obstacles, 3)
            for x, y, r in obstacles:
                if r <= 0:
                    raise ScenarioConfigError(f"obstacle at ({x}, {y}) has non-positive radius")
                if np.hypot(self.goal[0] - x, self.goal[1] - y) <= r:
                    raise ScenarioConfigError(f"goal center lies inside the obstacle at ({x}, {y}) radius {r}")
            return obstacles

        width, height = cfg.extent
        keep_clear = np.vstack([self.drones, self.stations]) if cfg.drones + cfg.stations else np.zeros((0, 2))
        in_corridor = 0 if cfg.obstacle_density is None else int(round(cfg.obstacle_density * cfg.obstacles))
        half = cfg.corridor_width / 2.0
        placed: List[Tuple[float, float, float]] = []
        attempts = 0
        while len(placed) < cfg.obstacles:
            attempts += 1
            if attempts > 1000 * max(cfg.obstacles, 1):
                raise ScenarioConfigError("infeasible obstacle placement: map too crowded")
            if len(placed) < in_corridor:
                x, y = self._corridor_point(half)
            else:
                x, y = self.rng.uniform(0.0, width), self.rng.uniform(0.0, height)
                if cfg.obstacle_density is not None and self.corridor_distance(np.array([[x, y]]))[0] <= half:
                    continue
            r = self.rng.uniform(*cfg.obstacle_radius)
            if np.hypot(self.goal[0] - x, self.goal[1] - y) <= r + cfg.goal_radius:
                continue
            if len(keep_clear) and cdist([[x, y]], keep_clear).min() <= r + cfg.obstacle_margin:
                continue
            placed.append((x, y, r))
        return np.array(placed, dtype=float).reshape(len(placed), 3)

    def _corridor_point(self, half: float) -> Tuple[float, float]:
        axis = self.goal - self.start
        length = max(float(np.linalg.norm(axis)), 1e-9)
        normal = np.array([-axis[1], axis[0]]) / length
        point = self.start + self.rng.uniform(0.15, 0.85) * axis + self.rng.uniform(-half, half) * normal
        return float(point[0]), float(point[1])

    def corridor_distance(self, points: np.ndarray) -> np.ndarray:
        """Distance of each point to the segment from the start center to the goal center"""
        axis = self.goal - self.start
        along = np.clip((points - self.start) @ axis / max(float(axis @ axis), 1e-12), 0.0, 1.0)
        return np.linalg.norm(points - (self.start + along[:, None] * axis), axis=1)

    def clearance(self, points: np.ndarray) -> np.ndarray:
        """Signed distance to the nearest obstacle boundary (negative inside)"""
        if len(self.obstacles) == 0:
            return np.full(len(points), self.diagonal)
        return (cdist(points, self.obstacles[:, :2]) - self.obstacles[:, 2]).min(axis=1)

    def snapshot(self, t: int) -> SpatialModel:
        cfg = self.cfg
        positions = np.vstack([self.drones, self.stations])
        to_obstacle = self.clearance(positions)
        to_goal = np.linalg.norm(positions - self.goal, axis=1) - cfg.goal_radius
        nodes = [
            Node(loc, kind, {"x": float(p[0]), "y": float(p[1]),
                             "dist_to_obstacle": float(c), "dist_to_goal": float(g)})
            for loc, kind, p, c, g in zip(self.universe, self.kinds, positions, to_obstacle, to_goal)
        ]
        dist = cdist(positions, positions)
        is_station = np.array([k == STATION for k in self.kinds])
        radius = np.where(is_station[:, None] | is_station[None, :], cfg.station_radius, cfg.drone_radius)
        forward = []
        for i, j in zip(*np.nonzero(np.triu(dist <= radius, k=1))):
            forward.append(Edge(self.universe[i], float(dist[i, j]), self.universe[j]))
        edges = forward + [Edge(e.dst, e.weight, e.src) for e in forward]
        return SpatialModel(nodes, edges, step=t)

    def advance(self) -> None:
        """Move the drones one period: goal seeking, separation, obstacle repulsion, noise"""
        cfg = self.cfg
        if cfg.drones == 0:
            return
        p = self.drones
        offset = self.goal - p
        dist_goal = np.linalg.norm(offset, axis=1, keepdims=True)
        desired = cfg.max_speed * offset / np.maximum(dist_goal, cfg.goal_radius)

        if cfg.drones > 1:
            diff = p[:, None, :] - p[None, :, :]
            d = np.linalg.norm(diff, axis=2)
            np.fill_diagonal(d, np.inf)
            close = d < cfg.separation_distance
            push = np.where(close[:, :, None], diff / np.maximum(d, 1e-6)[:, :, None] ** 2, 0.0)
            desired = desired + cfg.separation_gain * push.sum(axis=1)

        if len(self.obstacles):
            centers, radii = self.obstacles[:, :2], self.obstacles[:, 2]
            away = p[:, None, :] - centers[None, :, :]
            d = np.linalg.norm(away, axis=2)
            gap = d - radii
            strength = np.clip((cfg.obstacle_margin - gap) / cfg.obstacle_margin, 0.0, None)
            desired = desired + cfg.obstacle_gain * (strength[:, :, None] * away / np.maximum(d, 1e-6)[:, :, None]).sum(axis=1)

        if cfg.noise > 0:
            desired = desired + self.rng.normal(0.0, cfg.noise, size=desired.shape)
        self.velocity += cfg.velocity_blend * (desired - self.velocity)
        speed = np.linalg.norm(self.velocity, axis=1, keepdims=True)
        self.velocity *= np.minimum(1.0, cfg.max_speed / np.maximum(speed, 1e-9))
        self.drones = p + self.velocity * self.dt

    def __iter__(self) -> Iterator[SpatialModel]:
        for t in range(self.cfg.steps):
            yield self.snapshot(t)
            self.advance()


def generate(cfg: ScenarioConfig) -> LabeledTrace:
    """Generate a scenario trace in memory"""
    t0 = time.perf_counter()
    generator = ScenarioGenerator(cfg)
    trace = LabeledTrace(list(generator), period_ms=cfg.period_ms, undirected=True, attributes=list(ATTRIBUTES))
    logger.info(f"Generated {len(trace)} steps in {time.perf_counter() - t0:.3f}s")
    return trace


def write_scenario(cfg: ScenarioConfig, out: Union[str, Path, IO[str]], progress: bool = False) -> Dict[str, Any]:
    """
    Generate a scenario straight into a trace file

    Args:
        cfg: Scenario configuration
        out: Output path, "-" for stdout, or an open text stream
        progress: Show a progress bar

    Returns:
        Summary with node, step and edge counts
    """
    t0 = time.perf_counter()
    generator = ScenarioGenerator(cfg)
    edge_counts: List[int] = []
    with TraceWriter(out, generator.universe, cfg.period_ms, undirected=True, attributes=ATTRIBUTES) as writer:
        for model in tqdm(generator, total=cfg.steps, desc="Generating", unit="step", disable=not progress):
            writer.write(model)
            edge_counts.append(len(model.edges) // 2)
    summary = {
        "nodes": len(generator.universe),
        "drones": cfg.drones,
        "stations": cfg.stations,
        "obstacles": len(generator.obstacles),
        "steps": len(edge_counts),
        "edges_min": min(edge_counts),
        "edges_mean": float(np.mean(edge_counts)),
        "edges_max": max(edge_counts),
        "seconds": time.perf_counter() - t0,
    }
    logger.info(f"Wrote scenario with {summary['nodes']} nodes and {summary['steps']} steps "
                f"in {summary['seconds']:.3f}s")
    return summary
