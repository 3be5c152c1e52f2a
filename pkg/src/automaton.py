"""
Automaton Module
Alternating weighted automata built from interval-free formulas, with an
on-demand transition evaluator over spatial snapshots
"""

import logging
import time
from typing import Dict, FrozenSet, List, Sequence, Set, Tuple

from algebra import Algebra, AlgebraValue
from errors import AutomatonError, UniverseMismatchError, UnknownLocationError
from logic import (And, Atom, Bottom, Escape, Formula, Next, Not, Or, Reach, Top, Until, closure, distance_functions,
                   is_spltl, negate, size, to_text)
from polynomial import Polynomial, StateId
from spatial import DEFAULT_REGISTRY, DistanceRegistry, SpatialModel, enumerate_bounded_paths, shortest_distance
from trace_io import label

logger = logging.getLogger(__name__)


def _weak(f: Formula) -> bool:
    """Default pending mode: negated Until and negated Next hold at the end of the trace"""
    return isinstance(f, Not) and isinstance(f.operand, (Until, Next))


class Automaton:
    """
    Alternating weighted automaton over the states closure x universe.

    States are ``StateId(state_index, location)``. A state index pairs a
    closure formula ``formulas[i]`` with a pending mode: strong states weigh
    bottom at the end of the trace, weak ones top. Closure members come
    first with their default mode; a formula gets a second index only when
    a Next or Until needs the other mode. ``negation[i]`` is the dual state
    (negated formula, flipped mode) and ``live`` holds the indices kept
    after pruning.
    """

    def __init__(self, formula: Formula, universe: Sequence[str], alg: Algebra,
                 registry: DistanceRegistry = DEFAULT_REGISTRY):
        self.formula = formula
        self.universe: Tuple[str, ...] = tuple(universe)
        self.alg = alg
        self.registry = registry
        members = closure(formula)
        self.closure_size = len(members)
        self.formulas: List[Formula] = list(members)
        self.index: Dict[Formula, int] = {f: i for i, f in enumerate(members)}
        self.weak: List[bool] = [_weak(f) for f in members]
        self._modes: Dict[Tuple[Formula, bool], int] = {(f, w): i for i, (f, w) in enumerate(zip(members, self.weak))}
        self.children: List[Tuple[int, ...]] = [tuple(self.index[c] for c in f.children()) for f in members]
        self.root = self.index[formula]
        self.strong: Dict[int, int] = {}
        self.pendable: FrozenSet[int] = self._pendable()
        self.base: List[int] = [self.index[f] for f in self.formulas]
        self.negation: List[int] = [
            self._modes.get((negate(f), not w), self.index[negate(f)]) for f, w in zip(self.formulas, self.weak)
        ]
        self.terminal: List[AlgebraValue] = [alg.top if w else alg.bot for w in self.weak]
        self.live: FrozenSet[int] = frozenset(range(len(self.formulas)))
        self._universe_set = frozenset(self.universe)
        self._successors: Dict[int, FrozenSet[int]] = {}

    def _state(self, f: Formula, weak: bool) -> int:
        key = (f, weak)
        if key not in self._modes:
            self._modes[key] = len(self.formulas)
            self.formulas.append(f)
            self.weak.append(weak)
        return self._modes[key]

    def _pendable(self) -> FrozenSet[int]:
        """
        States that can still be pending when the trace ends.

        Until loops on itself and Next waits on its operand, both strongly;
        their duals wait weakly. ``strong`` maps the closure index of the
        awaited formula to its strong state.
        """
        pending: Set[int] = set()
        for i in range(self.closure_size):
            f = self.formulas[i]
            if isinstance(f, Until):
                awaited = i
            elif isinstance(f, Next):
                awaited = self.children[i][0]
            else:
                continue
            g = self.formulas[awaited]
            self.strong[awaited] = self._state(g, False)
            pending.add(self.strong[awaited])
            pending.add(self._state(negate(g), True))
        return frozenset(pending)

    # -- state set ----------------------------------------------------------

    @property
    def state_count(self) -> int:
        return len(self.live) * len(self.universe)

    @property
    def state_bound(self) -> int:
        """2 * |L| * |phi'| with |phi'| taken as the closure size"""
        return 2 * len(self.universe) * self.closure_size

    def states(self) -> List[StateId]:
        return [StateId(i, loc) for i in sorted(self.live) for loc in self.universe]

    def accepting(self) -> List[StateId]:
        return [q for q in self.states() if self.is_accepting(q.formula)]

    def is_accepting(self, i: int) -> bool:
        return i in self.pendable and self.weak[i]

    def beta(self, q: StateId) -> AlgebraValue:
        """Terminal weighting"""
        return self.terminal[q.formula]

    def negmap(self, q: StateId) -> StateId:
        return StateId(self.negation[q.formula], q.location)

    def state_formula(self, q: StateId) -> Formula:
        return self.formulas[q.formula]

    def initial(self, ego: str) -> Polynomial:
        if ego not in self._universe_set:
            raise UnknownLocationError(f"ego '{ego}' is not in the universe")
        return Polynomial.var(self.alg, StateId(self.root, ego))

    # -- state-level successor relation ---------------------------------------

    def successors(self, i: int) -> FrozenSet[int]:
        """State indices of the variables that can occur in a transition image of state ``i``"""
        i = self.base[i]
        if i in self._successors:
            return self._successors[i]
        f = self.formulas[i]
        kids = self.children[i]
        if isinstance(f, (Top, Bottom, Atom)):
            out: FrozenSet[int] = frozenset()
        elif isinstance(f, Not):
            out = frozenset(self.negation[j] for j in self.successors(kids[0]))
        elif isinstance(f, Next):
            out = frozenset({self.strong[kids[0]]})
        elif isinstance(f, Until):
            out = frozenset({self.strong[i]}).union(*(self.successors(k) for k in kids))
        else:
            out = frozenset().union(*(self.successors(k) for k in kids))
        self._successors[i] = out
        return out

    def reachable(self) -> FrozenSet[int]:
        seen = {self.root}
        frontier = [self.root]
        while frontier:
            i = frontier.pop()
            for j in self.successors(i):
                if j not in seen:
                    seen.add(j)
                    frontier.append(j)
        return frozenset(seen)

    def prune_unreachable(self) -> "Automaton":
        pruned = Automaton.__new__(Automaton)
        pruned.__dict__.update(self.__dict__)
        pruned.live = self.reachable()
        logger.info(f"Pruned automaton states: {self.state_count} -> {pruned.state_count}")
        return pruned

    # -- transitions --------------------------------------------------------

    def transitions(self, S: SpatialModel) -> "Transitions":
        return Transitions(self, S)

    def delta(self, q: StateId, S: SpatialModel) -> Polynomial:
        return Transitions(self, S)(q)

    # -- reports ------------------------------------------------------------

    def get_info(self) -> Dict[str, int]:
        """
        Size report

        Returns:
            Formula size, closure size, universe size, live states, the state
            bound and the live accepting states
        """
        return {
            "formula_size": size(self.formula),
            "closure": self.closure_size,
            "locations": len(self.universe),
            "states": self.state_count,
            "bound": self.state_bound,
            "accepting": len(self.accepting()),
        }

    def to_dot(self) -> str:
        """State-level successor graph of the live states in DOT format"""
        lines = ["digraph automaton {", "  rankdir=LR;"]
        for i in sorted(self.live):
            shape = "doublecircle" if self.is_accepting(i) else "circle"
            text = to_text(self.formulas[i]).replace('"', '\\"')
            if len(text) > 60:
                text = text[:57] + "..."
            lines.append(f'  q{i} [shape={shape}, label="q{i}: {text}"];')
        lines.append("  init [shape=point];")
        lines.append(f"  init -> q{self.root};")
        for i in sorted(self.live):
            for j in sorted(self.successors(i)):
                lines.append(f"  q{i} -> q{j};")
        lines.append("}")
        return "\n".join(lines)


class Transitions:
    """Transition evaluator for one snapshot, memoized per (closure index, location)"""

    def __init__(self, aut: Automaton, S: SpatialModel):
        if S.universe != aut._universe_set:
            drift = sorted(S.universe.symmetric_difference(aut._universe_set))
            raise UniverseMismatchError(f"snapshot universe differs from the automaton universe: {drift}")
        self.aut = aut
        self.S = S
        self.memo: Dict[Tuple[int, str], Polynomial] = {}

    def __call__(self, q: StateId) -> Polynomial:
        return self.delta(self.aut.base[q.formula], q.location)

    def delta(self, i: int, l: str) -> Polynomial:
        key = (i, l)
        result = self.memo.get(key)
        if result is None:
            result = self._delta(i, l)
            self.memo[key] = result
        return result

    def _delta(self, i: int, l: str) -> Polynomial:
        aut = self.aut
        alg = aut.alg
        f = aut.formulas[i]
        kids = aut.children[i]
        if isinstance(f, Top):
            return Polynomial.top(alg)
        if isinstance(f, Bottom):
            return Polynomial.bot(alg)
        if isinstance(f, Atom):
            return Polynomial.const(alg, label(self.S, l, f.predicate, alg))
        if isinstance(f, Not):
            return self.delta(kids[0], l).dual(aut.negmap)
        if isinstance(f, And):
            return self.delta(kids[0], l) * self.delta(kids[1], l)
        if isinstance(f, Or):
            return self.delta(kids[0], l) + self.delta(kids[1], l)
        if isinstance(f, Next):
            return Polynomial.var(alg, StateId(aut.strong[kids[0]], l))
        if isinstance(f, Until):
            return self.delta(kids[1], l) + self.delta(kids[0], l) * Polynomial.var(alg, StateId(aut.strong[i], l))
        if isinstance(f, Reach):
            return self._reach(kids[0], kids[1], f, l)
        if isinstance(f, Escape):
            return self._escape(kids[0], f, l)
        raise AutomatonError(f"no transition rule for {type(f).__name__}")

    def _reach(self, phi: int, psi: int, f: Reach, l: str) -> Polynomial:
        alg = self.aut.alg
        fn = self.aut.registry.get(f.dist.fn)
        result = Polynomial.bot(alg)
        prefix: Dict[Tuple[str, ...], Polynomial] = {}
        for path in enumerate_bounded_paths(self.S, l, fn, f.dist.hi):
            locs = path.locations
            if len(locs) == 1:
                guard = Polynomial.top(alg)
            else:
                guard = prefix[locs[:-1]] * self.delta(phi, locs[-2])
            prefix[locs] = guard
            if guard.is_bot() or not fn.domain.in_interval(path.distance, f.dist.lo, f.dist.hi):
                continue
            result = result + self.delta(psi, locs[-1]) * guard
            if result.is_top():
                break
        return result

    def _escape(self, phi: int, f: Escape, l: str) -> Polynomial:
        alg = self.aut.alg
        fn = self.aut.registry.get(f.dist.fn)
        result = Polynomial.bot(alg)
        along: Dict[Tuple[str, ...], Polynomial] = {}
        for path in enumerate_bounded_paths(self.S, l, fn, fn.domain.top):
            locs = path.locations
            base = along[locs[:-1]] if len(locs) > 1 else Polynomial.top(alg)
            along[locs] = base * self.delta(phi, locs[-1])
            if along[locs].is_bot():
                continue
            if fn.domain.in_interval(shortest_distance(self.S, l, locs[-1], fn), f.dist.lo, f.dist.hi):
                result = result + along[locs]
                if result.is_top():
                    break
        return result


def build(f: Formula, L: Sequence[str], alg: Algebra, registry: DistanceRegistry = DEFAULT_REGISTRY) -> Automaton:
    """
    Build the automaton of an interval-free formula

    Args:
        f: Formula without sugar or time intervals (see logic.normalize)
        L: Location universe
        alg: Algebra of weights
        registry: Distance functions named in f

    Returns:
        Automaton with every state live
    """
    if not is_spltl(f):
        raise AutomatonError("formula still contains sugar or time intervals; normalize it first")
    if not L:
        raise AutomatonError("location universe is empty")
    if len(set(L)) != len(L):
        raise AutomatonError("location universe has duplicates")
    for name in distance_functions(f):
        registry.get(name)
    t0 = time.perf_counter()
    aut = Automaton(f, L, alg, registry)
    logger.info(f"Automaton built: |closure|={aut.closure_size}, |L|={len(L)}, "
                f"|Q|={aut.state_count}, {time.perf_counter() - t0:.3f}s")
    return aut


def initial(aut: Automaton, ego: str) -> Polynomial:
    return aut.initial(ego)


def delta(aut: Automaton, q: StateId, S: SpatialModel) -> Polynomial:
    return aut.delta(q, S)


def prune_unreachable(aut: Automaton) -> Automaton:
    return aut.prune_unreachable()
