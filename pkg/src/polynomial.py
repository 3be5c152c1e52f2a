"""
Polynomial Module
Canonical multilinear polynomials over automaton states with coefficients in a De Morgan algebra
"""

import logging
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Tuple, Union

from algebra import Algebra, AlgebraValue
from errors import PolynomialError

logger = logging.getLogger(__name__)


class StateId(NamedTuple):
    """Automaton state: state index (formula and pending mode) paired with a location"""
    formula: int
    location: str

    def __str__(self) -> str:
        return f"q{self.formula}@{self.location}"

    @classmethod
    def parse(cls, text: str) -> "StateId":
        head, sep, location = text.partition("@")
        if not sep or not head.startswith("q") or not head[1:].isdigit():
            raise PolynomialError(f"malformed state '{text}'")
        return cls(int(head[1:]), location)


Monomial = FrozenSet[StateId]
Lookup = Union[Mapping[StateId, object], Callable[[StateId], object]]

_EMPTY: Monomial = frozenset()


def _lookup(table: Lookup, var: StateId, what: str):
    try:
        return table(var) if callable(table) else table[var]
    except KeyError:
        raise PolynomialError(f"no {what} for variable {var}") from None


def _canonical(alg: Algebra, raw: Dict[Monomial, AlgebraValue]) -> Dict[Monomial, AlgebraValue]:
    """Drop bottom coefficients, then absorb every monomial dominated by one with fewer variables"""
    items = sorted(((m, c) for m, c in raw.items() if c != alg.bot), key=lambda item: len(item[0]))
    kept: List[Tuple[Monomial, AlgebraValue]] = []
    for monomial, coeff in items:
        if any(k_vars <= monomial and alg.join(coeff, k_coeff) == k_coeff for k_vars, k_coeff in kept):
            continue
        kept.append((monomial, coeff))
    return dict(kept)


class Polynomial:
    """
    Sum of monomials ``c * q1 * ... * qk`` in canonical form.

    No two monomials share a variable set and no monomial is dominated
    (fewer-or-equal variables with a greater-or-equal coefficient) by
    another, so equal polynomials compare equal term by term.
    """

    __slots__ = ("alg", "terms")

    def __init__(self, alg: Algebra, terms: Mapping[Monomial, AlgebraValue] = (), canonical: bool = False):
        self.alg = alg
        self.terms: Dict[Monomial, AlgebraValue] = dict(terms) if canonical else _canonical(alg, dict(terms))

    # -- constructors -----------------------------------------------------

    @classmethod
    def const(cls, alg: Algebra, c: AlgebraValue) -> "Polynomial":
        alg.check(c)
        if c == alg.bot:
            return cls(alg, {}, canonical=True)
        return cls(alg, {_EMPTY: c}, canonical=True)

    @classmethod
    def var(cls, alg: Algebra, q: StateId) -> "Polynomial":
        return cls(alg, {frozenset((q,)): alg.top}, canonical=True)

    @classmethod
    def bot(cls, alg: Algebra) -> "Polynomial":
        return cls(alg, {}, canonical=True)

    @classmethod
    def top(cls, alg: Algebra) -> "Polynomial":
        return cls(alg, {_EMPTY: alg.top}, canonical=True)

    # -- queries ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.alg == other.alg and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()})"

    def support(self) -> FrozenSet[StateId]:
        return frozenset().union(*self.terms) if self.terms else frozenset()

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _EMPTY in self.terms)

    def constant_value(self) -> AlgebraValue:
        if not self.is_constant():
            raise PolynomialError("polynomial is not constant")
        return self.terms.get(_EMPTY, self.alg.bot)

    def is_bot(self) -> bool:
        return not self.terms

    def is_top(self) -> bool:
        return self.terms.get(_EMPTY) == self.alg.top

    # -- semiring operations ----------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not other.terms or self.is_top():
            return self
        if not self.terms or other.is_top():
            return other
        join = self.alg.join
        raw = dict(self.terms)
        for monomial, coeff in other.terms.items():
            raw[monomial] = join(raw[monomial], coeff) if monomial in raw else coeff
        return Polynomial(self.alg, raw)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.terms or other.is_top():
            return self
        if not other.terms or self.is_top():
            return other
        alg = self.alg
        raw: Dict[Monomial, AlgebraValue] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                coeff = alg.meet(c1, c2)
                if coeff == alg.bot:
                    continue
                monomial = m1 | m2
                raw[monomial] = alg.join(raw[monomial], coeff) if monomial in raw else coeff
        return Polynomial(alg, raw)

    def dual(self, negmap: Lookup) -> "Polynomial":
        """Swap sums and products, negate coefficients, map each variable to its negation"""
        alg = self.alg
        result = Polynomial.top(alg)
        for monomial, coeff in self.terms.items():
            factor = Polynomial.const(alg, alg.negate(coeff))
            for q in sorted(monomial):
                factor = factor + Polynomial.var(alg, _lookup(negmap, q, "negation"))
            result = result * factor
            if result.is_bot():
                break
        return result

    def substitute(self, assignment: Lookup) -> "Polynomial":
        """Simultaneous substitution of every variable"""
        alg = self.alg
        result = Polynomial.bot(alg)
        for monomial, coeff in self.terms.items():
            product = Polynomial.const(alg, coeff)
            for q in sorted(monomial):
                product = product * _lookup(assignment, q, "assignment")
                if product.is_bot():
                    break
            result = result + product
            if result.is_top():
                break
        return result

    def evaluate(self, valuation: Lookup) -> AlgebraValue:
        """
        Value of the polynomial under a valuation of its variables

        Args:
            valuation: Mapping or callable from StateId to an algebra value

        Returns:
            Sum over terms of the coefficient times the product of the variable values
        """
        alg = self.alg
        total = alg.bot
        for monomial, coeff in self.terms.items():
            value = coeff
            for q in monomial:
                value = alg.otimes(value, _lookup(valuation, q, "valuation"))
            total = alg.join(total, value)
        return total

    # -- text form --------------------------------------------------------

    def _coeff_text(self, c: AlgebraValue) -> str:
        if self.alg.is_boolean():
            return "top" if c else "bot"
        return repr(float(c))

    def sorted_terms(self) -> List[Tuple[Monomial, AlgebraValue]]:
        return sorted(self.terms.items(), key=lambda item: (len(item[0]), sorted(item[0])))

    def to_text(self) -> str:
        """Canonical sum-of-products text, e.g. ``top*q3@a + 1.5*q1@a*q2@b``; ``bot`` when empty"""
        if not self.terms:
            return "bot"
        parts = []
        for monomial, coeff in self.sorted_terms():
            factors = [self._coeff_text(coeff)] + [str(q) for q in sorted(monomial)]
            parts.append("*".join(factors))
        return " + ".join(parts)

    @classmethod
    def from_text(cls, alg: Algebra, text: str) -> "Polynomial":
        text = text.strip()
        if text == "bot":
            return cls.bot(alg)
        result = cls.bot(alg)
        for part in text.split(" + "):
            head, *variables = part.strip().split("*")
            if head == "top":
                coeff = alg.top
            elif head == "bot":
                coeff = alg.bot
            elif alg.is_boolean():
                raise PolynomialError(f"malformed Boolean coefficient '{head}'")
            else:
                try:
                    coeff = float(head)
                except ValueError:
                    raise PolynomialError(f"malformed coefficient '{head}'") from None
            term = cls.const(alg, coeff)
            for name in variables:
                term = term * cls.var(alg, StateId.parse(name))
            result = result + term
        return result


def poly_const(alg: Algebra, c: AlgebraValue) -> Polynomial:
    return Polynomial.const(alg, c)


def poly_var(alg: Algebra, q: StateId) -> Polynomial:
    return Polynomial.var(alg, q)


def poly_add(p1: Polynomial, p2: Polynomial) -> Polynomial:
    return p1 + p2


def poly_mul(p1: Polynomial, p2: Polynomial) -> Polynomial:
    return p1 * p2


def poly_sum(alg: Algebra, polys: Iterable[Polynomial]) -> Polynomial:
    result = Polynomial.bot(alg)
    for p in polys:
        result = result + p
        if result.is_top():
            break
    return result


def poly_dual(p: Polynomial, negmap: Lookup) -> Polynomial:
    return p.dual(negmap)


def substitute(p: Polynomial, assignment: Lookup) -> Polynomial:
    return p.substitute(assignment)


def evaluate(p: Polynomial, valuation: Lookup) -> AlgebraValue:
    return p.evaluate(valuation)
