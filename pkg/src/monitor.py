"""
Monitor Module
Runs automata over snapshot streams by polynomial substitution, online and offline
"""

import logging
import time
from dataclasses import dataclass, replace
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from algebra import AlgebraValue
from automaton import Automaton, Transitions
from errors import UnknownLocationError
from polynomial import Polynomial
from spatial import SpatialModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonitorState:
    """Run state of one monitor: the polynomial theta plus bookkeeping"""
    theta: Polynomial
    step: int
    ego: str
    conclusive: bool = False

    def snapshot(self) -> Dict[str, Any]:
        return {"ego": self.ego, "step": self.step, "theta": self.theta.to_text(), "conclusive": self.conclusive}


@dataclass(frozen=True)
class Verdict:
    """Value of one monitor after consuming the snapshot with index ``step``"""
    step: int
    ego: str
    value: AlgebraValue
    conclusive: bool
    spec: str = ""

    def to_dict(self) -> Dict[str, Any]:
        value = self.value
        if isinstance(value, float) and value in (float("inf"), float("-inf")):
            value = "inf" if value > 0 else "-inf"
        return {"spec": self.spec, "step": self.step, "ego": self.ego, "value": value, "conclusive": self.conclusive}


def start(aut: Automaton, ego: str) -> MonitorState:
    """
    Fresh monitor state

    Args:
        aut: Automaton to run
        ego: Location the verdict is computed for

    Returns:
        State whose theta is the initial variable of the root state at ego
    """
    return MonitorState(theta=aut.initial(ego), step=0, ego=ego, conclusive=False)


def step(aut: Automaton, st: MonitorState, S: SpatialModel,
         transitions: Optional[Transitions] = None) -> MonitorState:
    """
    Consume one snapshot

    Args:
        aut: Automaton the state belongs to
        st: Current state
        S: Snapshot over the automaton universe
        transitions: Shared transition evaluator for S (built when omitted)

    Returns:
        New state; a conclusive Boolean state only advances its step counter
    """
    if st.conclusive and aut.alg.is_boolean():
        return replace(st, step=st.step + 1)
    if transitions is None:
        transitions = aut.transitions(S)
    theta = st.theta.substitute(transitions)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"step {st.step} ego {st.ego}: {len(theta)} terms, support {len(theta.support())}")
    return replace(st, theta=theta, step=st.step + 1, conclusive=theta.is_constant())


def current_value(st: MonitorState, aut: Automaton) -> AlgebraValue:
    """
    Value of the prefix consumed so far

    Args:
        st: Monitor state
        aut: Automaton the state belongs to

    Returns:
        theta evaluated under the terminal weighting: strongly pending states
        count as bottom, weakly pending ones as top
    """
    return st.theta.evaluate(aut.beta)


def run_offline(aut: Automaton, trace: Iterable[SpatialModel], ego: str) -> AlgebraValue:
    st = start(aut, ego)
    consumed = 0
    for S in trace:
        st = step(aut, st, S)
        consumed += 1
        if st.conclusive and aut.alg.is_boolean():
            break
    if consumed == 0:
        raise ValueError("cannot monitor an empty trace")
    return current_value(st, aut)


def run_online(aut: Automaton, snapshots: Iterable[SpatialModel], ego: str, spec: str = "") -> Iterator[Verdict]:
    """Yield the current value after every snapshot"""
    st = start(aut, ego)
    for S in snapshots:
        st = step(aut, st, S)
        yield Verdict(st.step - 1, ego, current_value(st, aut), st.conclusive, spec)


class Monitor:
    """Single-writer monitor for one (automaton, ego) pair"""

    def __init__(self, aut: Automaton, ego: str, spec: str = ""):
        self.aut = aut
        self.spec = spec
        self.state = start(aut, ego)

    @property
    def ego(self) -> str:
        return self.state.ego

    def step(self, S: SpatialModel, transitions: Optional[Transitions] = None) -> Verdict:
        self.state = step(self.aut, self.state, S, transitions)
        return Verdict(self.state.step - 1, self.ego, self.value(), self.state.conclusive, self.spec)

    def value(self) -> AlgebraValue:
        return current_value(self.state, self.aut)

    def snapshot(self) -> Dict[str, Any]:
        return self.state.snapshot()

    @classmethod
    def restore(cls, aut: Automaton, snapshot: Dict[str, Any], spec: str = "") -> "Monitor":
        ego = snapshot["ego"]
        if ego not in aut.universe:
            raise UnknownLocationError(f"ego '{ego}' is not in the universe")
        monitor = cls(aut, ego, spec)
        theta = Polynomial.from_text(aut.alg, snapshot["theta"])
        monitor.state = MonitorState(theta, int(snapshot["step"]), ego, bool(snapshot.get("conclusive", False)))
        return monitor


class MonitorBank:
    """
    Independent monitors fed from one snapshot stream.

    Monitors over the same automaton share one transition evaluator per
    snapshot, so labels, path enumerations and transition polynomials are
    computed once per step.
    """

    def __init__(self):
        self.monitors: List[Monitor] = []
        self.steps = 0
        self.elapsed = 0.0

    def add(self, aut: Automaton, egos: Sequence[str], spec: str = "") -> None:
        for ego in egos:
            self.monitors.append(Monitor(aut, ego, spec))

    def __len__(self) -> int:
        return len(self.monitors)

    def step(self, S: SpatialModel) -> List[Verdict]:
        t0 = time.perf_counter()
        shared: Dict[int, Transitions] = {}
        verdicts = []
        for monitor in self.monitors:
            key = id(monitor.aut)
            if key not in shared:
                shared[key] = monitor.aut.transitions(S)
            verdicts.append(monitor.step(S, shared[key]))
        self.elapsed += time.perf_counter() - t0
        self.steps += 1
        return verdicts

    def run(self, snapshots: Iterable[SpatialModel]) -> Iterator[List[Verdict]]:
        for S in snapshots:
            yield self.step(S)

    def conclusive(self) -> bool:
        return all(m.state.conclusive for m in self.monitors)

    def values(self) -> List[Tuple[str, str, AlgebraValue]]:
        return [(m.spec, m.ego, m.value()) for m in self.monitors]

    def snapshot(self) -> List[Dict[str, Any]]:
        return [dict(m.snapshot(), spec=m.spec) for m in self.monitors]

    def mean_step_time(self) -> float:
        """Mean wall-clock seconds per step per monitor"""
        if not self.steps or not self.monitors:
            return 0.0
        return self.elapsed / (self.steps * len(self.monitors))
