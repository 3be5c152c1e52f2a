"""
Algebra Module
De Morgan algebras (Boolean, min-max) and distance domains (counting, tropical)
"""

import logging
import math
from dataclasses import dataclass, field
from numbers import Real
from typing import Any, Callable, Dict, Iterable, Union

from errors import AlgebraTypeError, InvalidIntervalError

logger = logging.getLogger(__name__)

AlgebraValue = Union[bool, float]
DistanceValue = Union[int, float]


def _is_bool(value: Any) -> bool:
    return isinstance(value, bool)


def _is_extended_real(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool) and not math.isnan(value)


@dataclass(frozen=True)
class Algebra:
    """De Morgan algebra descriptor: carrier test, join, meet, negation, bottom and top"""
    name: str
    bot: AlgebraValue
    top: AlgebraValue
    member: Callable[[Any], bool] = field(repr=False, compare=False)
    join: Callable[[Any, Any], Any] = field(repr=False, compare=False)
    meet: Callable[[Any, Any], Any] = field(repr=False, compare=False)
    negate: Callable[[Any], Any] = field(repr=False, compare=False)

    def check(self, value: Any) -> AlgebraValue:
        if not self.member(value):
            raise AlgebraTypeError(f"{value!r} is not a {self.name} value")
        return value

    def oplus(self, a: AlgebraValue, b: AlgebraValue) -> AlgebraValue:
        return self.join(self.check(a), self.check(b))

    def otimes(self, a: AlgebraValue, b: AlgebraValue) -> AlgebraValue:
        return self.meet(self.check(a), self.check(b))

    def ominus(self, a: AlgebraValue) -> AlgebraValue:
        return self.negate(self.check(a))

    def leq(self, a: AlgebraValue, b: AlgebraValue) -> bool:
        """Natural order of the idempotent semiring: a <= b iff a + b == b"""
        return self.oplus(a, b) == b

    def sum(self, values: Iterable[AlgebraValue]) -> AlgebraValue:
        result = self.bot
        for value in values:
            result = self.oplus(result, value)
            if result == self.top:
                break
        return result

    def product(self, values: Iterable[AlgebraValue]) -> AlgebraValue:
        result = self.top
        for value in values:
            result = self.otimes(result, value)
            if result == self.bot:
                break
        return result

    def is_boolean(self) -> bool:
        return self.bot is False

    def format(self, value: AlgebraValue) -> str:
        """Render a value for verdict lines: ⊤/⊥ for Boolean, repr for reals"""
        if self.is_boolean():
            return "⊤" if value else "⊥"
        return repr(float(value) + 0.0)


BOOLEAN = Algebra(
    name="boolean",
    bot=False,
    top=True,
    member=_is_bool,
    join=lambda a, b: a or b,
    meet=lambda a, b: a and b,
    negate=lambda a: not a,
)

MINMAX = Algebra(
    name="minmax",
    bot=-math.inf,
    top=math.inf,
    member=_is_extended_real,
    join=max,
    meet=min,
    negate=lambda a: -a,
)

ALGEBRAS: Dict[str, Algebra] = {
    "bool": BOOLEAN,
    "boolean": BOOLEAN,
    "robust": MINMAX,
    "minmax": MINMAX,
}


def get_algebra(name: str) -> Algebra:
    try:
        return ALGEBRAS[name]
    except KeyError:
        raise ValueError(f"Unknown semantics '{name}', expected one of {sorted(ALGEBRAS)}") from None


def oplus(a: AlgebraValue, b: AlgebraValue, alg: Algebra) -> AlgebraValue:
    return alg.oplus(a, b)


def otimes(a: AlgebraValue, b: AlgebraValue, alg: Algebra) -> AlgebraValue:
    return alg.otimes(a, b)


def ominus(a: AlgebraValue, alg: Algebra) -> AlgebraValue:
    return alg.ominus(a)


def _is_count(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return value >= 0
    return isinstance(value, float) and value == math.inf


def _is_nonneg_real(value: Any) -> bool:
    return _is_extended_real(value) and value >= 0


@dataclass(frozen=True)
class DistanceDomain:
    """Totally ordered monoid of path distances, saturating at ``top``"""
    name: str
    bot: DistanceValue
    top: DistanceValue
    member: Callable[[Any], bool] = field(repr=False, compare=False)

    def check(self, value: Any) -> DistanceValue:
        if not self.member(value):
            raise AlgebraTypeError(f"{value!r} is not a {self.name} distance")
        return value

    def add(self, a: DistanceValue, b: DistanceValue) -> DistanceValue:
        a, b = self.check(a), self.check(b)
        if a == self.top or b == self.top:
            return self.top
        return a + b

    def leq(self, a: DistanceValue, b: DistanceValue) -> bool:
        return self.check(a) <= self.check(b)

    def in_interval(self, d: DistanceValue, lo: DistanceValue, hi: DistanceValue) -> bool:
        if not self.leq(lo, hi):
            raise InvalidIntervalError(f"Distance interval [{lo}, {hi}] is empty")
        return self.leq(lo, d) and self.leq(d, hi)


COUNTING = DistanceDomain(name="counting", bot=0, top=math.inf, member=_is_count)
TROPICAL = DistanceDomain(name="tropical", bot=0.0, top=math.inf, member=_is_nonneg_real)


def dist_add(d1: DistanceValue, d2: DistanceValue, dom: DistanceDomain) -> DistanceValue:
    return dom.add(d1, d2)


def dist_in_interval(d: DistanceValue, lo: DistanceValue, hi: DistanceValue, dom: DistanceDomain) -> bool:
    return dom.in_interval(d, lo, hi)
