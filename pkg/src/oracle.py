"""
Oracle Module
Direct recursive evaluation of the STREL semantics over a labeled trace
"""

import logging
from typing import Dict, Optional, Tuple

from algebra import Algebra, AlgebraValue
from errors import TimeIndexError, UnknownLocationError, UnsupportedOperatorError
from logic import (And, Atom, Bottom, Escape, Eventually, Everywhere, Formula, Globally, Next, Not, Or,
                   Reach, Somewhere, Surround, Top, Until)
from spatial import DEFAULT_REGISTRY, DistanceRegistry, enumerate_bounded_paths, shortest_distance
from trace_io import LabeledTrace

logger = logging.getLogger(__name__)


class Oracle:
    """
    Evaluates formulas literally, timed operators included.

    Time windows are cut at the end of the trace. Next at the last step is
    bottom whatever its operand, so its negation is top.
    """

    def __init__(self, trace: LabeledTrace, alg: Algebra, registry: DistanceRegistry = DEFAULT_REGISTRY,
                 memo: bool = True):
        self.trace = trace
        self.alg = alg
        self.registry = registry
        self.memo: Optional[Dict[Tuple[Formula, str, int], AlgebraValue]] = {} if memo else None

    def value(self, f: Formula, l: str, t: int) -> AlgebraValue:
        if self.memo is None:
            return self._eval(f, l, t)
        key = (f, l, t)
        if key not in self.memo:
            self.memo[key] = self._eval(f, l, t)
        return self.memo[key]

    def _window(self, t: int, interval) -> range:
        lo, hi = (0, None) if interval is None else (interval.lo, interval.hi)
        last = len(self.trace) - 1
        end = last if hi is None or hi == float("inf") else min(last, t + int(hi))
        return range(t + lo, end + 1)

    def _eval(self, f: Formula, l: str, t: int) -> AlgebraValue:
        alg = self.alg
        if isinstance(f, Top):
            return alg.top
        if isinstance(f, Bottom):
            return alg.bot
        if isinstance(f, Atom):
            return self.trace.label(t, l, f.predicate, alg)
        if isinstance(f, Not):
            return alg.ominus(self.value(f.operand, l, t))
        if isinstance(f, And):
            return alg.otimes(self.value(f.left, l, t), self.value(f.right, l, t))
        if isinstance(f, Or):
            return alg.oplus(self.value(f.left, l, t), self.value(f.right, l, t))
        if isinstance(f, Next):
            if t + 1 < len(self.trace):
                return self.value(f.operand, l, t + 1)
            return alg.bot
        if isinstance(f, Until):
            return self._until(f.left, f.right, f.interval, l, t)
        if isinstance(f, Eventually):
            return alg.sum(self.value(f.operand, l, s) for s in self._window(t, f.interval))
        if isinstance(f, Globally):
            return alg.product(self.value(f.operand, l, s) for s in self._window(t, f.interval))
        if isinstance(f, Reach):
            return self._reach(f.left, f.right, f.dist, l, t)
        if isinstance(f, Somewhere):
            return self._reach(None, f.operand, f.dist, l, t)
        if isinstance(f, Everywhere):
            return alg.ominus(self._reach(None, Not(f.operand), f.dist, l, t))
        if isinstance(f, Escape):
            return self._escape(f.operand, f.dist, l, t)
        if isinstance(f, Surround):
            raise UnsupportedOperatorError("the surround operator is not supported")
        raise TypeError(f"not a formula: {f!r}")

    def _until(self, phi: Formula, psi: Formula, interval, l: str, t: int) -> AlgebraValue:
        alg = self.alg
        window = self._window(t, interval)
        result = alg.bot
        prefix = alg.top
        for s in range(t, window.stop):
            if s >= window.start:
                result = alg.oplus(result, alg.otimes(self.value(psi, l, s), prefix))
            prefix = alg.otimes(prefix, self.value(phi, l, s))
        return result

    def _reach(self, phi: Optional[Formula], psi: Formula, dist, l: str, t: int) -> AlgebraValue:
        alg = self.alg
        fn = self.registry.get(dist.fn)
        model = self.trace[t]
        result = alg.bot
        for path in enumerate_bounded_paths(model, l, fn, dist.hi):
            prefix = alg.top
            for i, loc in enumerate(path.locations):
                if fn.domain.in_interval(path.distances[i], dist.lo, dist.hi):
                    result = alg.oplus(result, alg.otimes(self.value(psi, loc, t), prefix))
                if phi is not None:
                    prefix = alg.otimes(prefix, self.value(phi, loc, t))
        return result

    def _escape(self, phi: Formula, dist, l: str, t: int) -> AlgebraValue:
        alg = self.alg
        fn = self.registry.get(dist.fn)
        model = self.trace[t]
        result = alg.bot
        for path in enumerate_bounded_paths(model, l, fn, fn.domain.top):
            prefix = alg.top
            for loc in path.locations:
                prefix = alg.otimes(prefix, self.value(phi, loc, t))
                if fn.domain.in_interval(shortest_distance(model, l, loc, fn), dist.lo, dist.hi):
                    result = alg.oplus(result, prefix)
        return result


def eval_semantics(trace: LabeledTrace, f: Formula, l: str, t: int, alg: Algebra,
                   registry: DistanceRegistry = DEFAULT_REGISTRY, memo: bool = True) -> AlgebraValue:
    """
    Value of f at location l and time t

    Args:
        trace: Labeled trace
        f: Any formula, timed operators and sugar included
        l: Location in the trace universe
        t: Time index, 0 <= t < len(trace)
        alg: Algebra of the result
        registry: Distance functions named in f
        memo: Cache values per (subformula, location, time)

    Returns:
        Algebra value
    """
    if not 0 <= t < len(trace):
        raise TimeIndexError(f"time {t} outside trace of length {len(trace)}")
    if l not in trace[0]:
        raise UnknownLocationError(f"location '{l}' is not in the trace universe")
    return Oracle(trace, alg, registry, memo).value(f, l, t)
