"""
Logic Module
STREL formulas: syntax tree, text parser and printer, desugaring,
interval elimination and subformula closure
"""

import logging
import math
import re
from dataclasses import dataclass, fields
from typing import Dict, List, Mapping, NamedTuple, Optional, Tuple, Union

from errors import InvalidIntervalError, ParseError, UnknownDistanceFunctionError, UnsupportedOperatorError
from spatial import DEFAULT_REGISTRY, DistanceRegistry

logger = logging.getLogger(__name__)

INF = math.inf
Bound = Union[int, float]


# ---------------------------------------------------------------------------
# Predicates and intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KindTest:
    """Holds where the location's kind equals ``kind``"""
    kind: str

    def to_text(self) -> str:
        return self.kind


@dataclass(frozen=True)
class Comparison:
    """Numeric test ``attr op value`` with op one of >=, <=, >, <"""
    attr: str
    op: str
    value: float

    def __post_init__(self):
        if not self.attr:
            raise ValueError("comparison needs an attribute name")
        if self.op not in COMPARISON_OPS:
            raise ValueError(f"unknown comparison operator '{self.op}'")

    def to_text(self) -> str:
        return f"{self.attr} {self.op} {self.value!r}"


COMPARISON_OPS = (">=", "<=", ">", "<")
Predicate = Union[KindTest, Comparison]


@dataclass(frozen=True)
class TimeInterval:
    lo: int
    hi: Bound = INF

    @property
    def extent(self) -> int:
        return int(self.lo) if self.hi == INF else int(self.hi)

    def is_trivial(self) -> bool:
        return self.lo == 0 and self.hi == INF

    def to_text(self) -> str:
        return f"[{_bound_text(self.lo)},{_bound_text(self.hi)}]"


@dataclass(frozen=True)
class DistInterval:
    fn: str
    lo: Bound
    hi: Bound

    def to_text(self) -> str:
        return f"[{self.fn}][{_bound_text(self.lo)},{_bound_text(self.hi)}]"


def _bound_text(value: Bound) -> str:
    if value == INF:
        return "inf"
    return repr(value)


# ---------------------------------------------------------------------------
# Formula tree
# ---------------------------------------------------------------------------

class Formula:
    """Base of every formula node; equality is structural, hashes are cached"""

    def _values(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return type(self) is type(other) and self._values() == other._values()

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((type(self).__name__, self._values()))
            object.__setattr__(self, "_hash", cached)
        return cached

    def children(self) -> Tuple["Formula", ...]:
        return tuple(v for v in self._values() if isinstance(v, Formula))

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, eq=False)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Bottom(Formula):
    pass


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    predicate: Predicate


@dataclass(frozen=True, eq=False)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True, eq=False)
class Until(Formula):
    left: Formula
    right: Formula
    interval: Optional[TimeInterval] = None


@dataclass(frozen=True, eq=False)
class Eventually(Formula):
    operand: Formula
    interval: Optional[TimeInterval] = None


@dataclass(frozen=True, eq=False)
class Globally(Formula):
    operand: Formula
    interval: Optional[TimeInterval] = None


@dataclass(frozen=True, eq=False)
class Reach(Formula):
    left: Formula
    right: Formula
    dist: DistInterval


@dataclass(frozen=True, eq=False)
class Escape(Formula):
    operand: Formula
    dist: DistInterval


@dataclass(frozen=True, eq=False)
class Somewhere(Formula):
    operand: Formula
    dist: DistInterval


@dataclass(frozen=True, eq=False)
class Everywhere(Formula):
    operand: Formula
    dist: DistInterval


@dataclass(frozen=True, eq=False)
class Surround(Formula):
    left: Formula
    right: Formula
    dist: DistInterval


def atom(text: str) -> Atom:
    """Shorthand used by tests and the generators: ``atom("p")`` or ``atom("battery >= 4")``"""
    return Atom(parse_predicate(text))


def negate(f: Formula) -> Formula:
    """Negation with double-negation elimination"""
    if isinstance(f, Not):
        return f.operand
    return Not(f)


# ---------------------------------------------------------------------------
# Tokenizer and parser
# ---------------------------------------------------------------------------

KEYWORDS = {
    "true", "false", "not", "and", "or", "X", "U", "F", "G",
    "reach", "escape", "somewhere", "everywhere", "surround", "inf",
}

TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<number>-?(?:\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<cmp>>=|<=|>|<)
  | (?P<punct>[()\[\],])
""", re.VERBOSE)


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        value = match.group()
        if kind == "ws":
            newlines = value.count("\n")
            if newlines:
                line += newlines
                line_start = match.start() + value.rindex("\n") + 1
        else:
            if kind == "ident" and value in KEYWORDS:
                kind = "keyword"
            tokens.append(Token(kind, value, line, match.start() - line_start + 1))
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    """
    Recursive-descent parser for the formula language.

    Binding strength, loosest first: ``U`` (right-associative, optional
    time interval), ``or``, ``and``, binary spatial ``reach`` / ``surround``
    (left-associative), then the prefix operators ``not X F G somewhere
    everywhere escape``. Bare identifiers are kind tests unless bound in
    ``aliases``.
    """

    def __init__(self, text: str, aliases: Optional[Mapping[str, Predicate]] = None,
                 registry: DistanceRegistry = DEFAULT_REGISTRY):
        self.tokens = tokenize(text)
        self.pos = 0
        self.aliases = dict(aliases or {})
        self.registry = registry

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.current
        return ParseError(message, token.line, token.column)

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.kind in ("keyword", "punct", "cmp") and self.current.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        token = self.current
        if not self.accept(text):
            found = token.text or "end of input"
            raise self.error(f"expected '{text}' but found '{found}'", token)
        return token

    def parse(self) -> Formula:
        f = self.parse_until()
        if self.current.kind != "eof":
            raise self.error(f"unexpected '{self.current.text}'")
        return f

    def parse_until(self) -> Formula:
        left = self.parse_or()
        if self.accept("U"):
            interval = self.parse_time_interval() if self.current.text == "[" else None
            right = self.parse_until()
            return Until(left, right, interval)
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.accept("or"):
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_spatial()
        while self.accept("and"):
            left = And(left, self.parse_spatial())
        return left

    def parse_spatial(self) -> Formula:
        left = self.parse_unary()
        while self.current.kind == "keyword" and self.current.text in ("reach", "surround"):
            op = self.advance().text
            dist = self.parse_dist_interval()
            right = self.parse_unary()
            left = Reach(left, right, dist) if op == "reach" else Surround(left, right, dist)
        return left

    def parse_unary(self) -> Formula:
        token = self.current
        if token.kind == "keyword":
            if self.accept("not"):
                return Not(self.parse_unary())
            if self.accept("X"):
                return Next(self.parse_unary())
            if token.text in ("F", "G"):
                self.advance()
                interval = self.parse_time_interval() if self.current.text == "[" else None
                operand = self.parse_unary()
                return Eventually(operand, interval) if token.text == "F" else Globally(operand, interval)
            if token.text in ("somewhere", "everywhere", "escape"):
                self.advance()
                dist = self.parse_dist_interval()
                operand = self.parse_unary()
                node = {"somewhere": Somewhere, "everywhere": Everywhere, "escape": Escape}[token.text]
                return node(operand, dist)
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        token = self.current
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.accept("("):
            f = self.parse_until()
            self.expect(")")
            return f
        if token.kind == "ident":
            self.advance()
            if self.current.kind == "cmp":
                op = self.advance().text
                value = self.parse_number()
                return Atom(Comparison(token.text, op, float(value)))
            if token.text in self.aliases:
                return Atom(self.aliases[token.text])
            return Atom(KindTest(token.text))
        found = token.text or "end of input"
        raise self.error(f"expected a formula but found '{found}'", token)

    def parse_number(self) -> float:
        token = self.current
        if token.kind != "number":
            raise self.error(f"expected a number but found '{token.text or 'end of input'}'")
        self.advance()
        return float(token.text)

    def parse_bound(self, allow_inf: bool) -> Tuple[Bound, Token]:
        token = self.current
        if token.kind == "keyword" and token.text == "inf":
            if not allow_inf:
                raise self.error("lower bound cannot be inf", token)
            self.advance()
            return INF, token
        return self.parse_number(), token

    def parse_time_interval(self) -> TimeInterval:
        start = self.expect("[")
        lo, lo_token = self.parse_bound(allow_inf=False)
        self.expect(",")
        hi, hi_token = self.parse_bound(allow_inf=True)
        self.expect("]")
        for value, token in ((lo, lo_token), (hi, hi_token)):
            if value != INF and (value < 0 or value != int(value)):
                raise self.error(f"time bound {token.text} must be a non-negative integer", token)
        if lo > hi:
            raise self.error(f"malformed interval [{lo_token.text},{hi_token.text}]", start)
        return TimeInterval(int(lo), hi if hi == INF else int(hi))

    def parse_dist_interval(self) -> DistInterval:
        self.expect("[")
        name_token = self.current
        if name_token.kind != "ident":
            raise self.error("expected a distance function name")
        self.advance()
        self.expect("]")
        try:
            fn = self.registry.get(name_token.text)
        except UnknownDistanceFunctionError as e:
            raise UnknownDistanceFunctionError(e.message, name_token.line, name_token.column) from None
        start = self.expect("[")
        lo, lo_token = self.parse_bound(allow_inf=False)
        self.expect(",")
        hi, hi_token = self.parse_bound(allow_inf=True)
        self.expect("]")
        bounds = []
        for value, token in ((lo, lo_token), (hi, hi_token)):
            if value == INF:
                bounds.append(INF)
            elif value < 0:
                raise self.error(f"distance bound {token.text} must be non-negative", token)
            elif isinstance(fn.domain.bot, int):
                if value != int(value):
                    raise self.error(f"distance bound {token.text} must be an integer for '{fn.name}'", token)
                bounds.append(int(value))
            else:
                bounds.append(float(value))
        if bounds[0] > bounds[1]:
            raise self.error(f"malformed interval [{lo_token.text},{hi_token.text}]", start)
        return DistInterval(fn.name, bounds[0], bounds[1])


def parse(text: str, aliases: Optional[Mapping[str, Predicate]] = None,
          registry: DistanceRegistry = DEFAULT_REGISTRY) -> Formula:
    """Parse formula text; raises ParseError with line and column on failure"""
    return Parser(text, aliases, registry).parse()


def parse_predicate(text: str) -> Predicate:
    """Parse ``name`` or ``attr op number``"""
    tokens = tokenize(text)
    if tokens[0].kind != "ident":
        raise ParseError(f"expected an identifier in predicate '{text}'", tokens[0].line, tokens[0].column)
    if tokens[1].kind == "eof":
        return KindTest(tokens[0].text)
    if tokens[1].kind == "cmp" and tokens[2].kind == "number" and tokens[3].kind == "eof":
        return Comparison(tokens[0].text, tokens[1].text, float(tokens[2].text))
    raise ParseError(f"malformed predicate '{text}'", tokens[1].line, tokens[1].column)


def parse_alias(definition: str) -> Tuple[str, Predicate]:
    """Parse ``name=expr`` (or ``name:=expr``) into an alias binding"""
    name, sep, expr = definition.partition("=")
    name = name.rstrip(":").strip()
    if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", name) or name in KEYWORDS:
        raise ParseError(f"malformed alias definition '{definition}'")
    return name, parse_predicate(expr.strip())


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_BINARY_WORDS = {And: "and", Or: "or"}


def _wrap(f: Formula) -> str:
    text = to_text(f)
    if isinstance(f, (And, Or, Until, Reach, Surround)):
        return f"({text})"
    return text


def to_text(f: Formula) -> str:
    """Print a formula in the concrete grammar; ``parse(to_text(f)) == f``"""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f.predicate.to_text()
    if isinstance(f, Not):
        return f"not {_wrap(f.operand)}"
    if isinstance(f, Next):
        return f"X {_wrap(f.operand)}"
    if isinstance(f, (And, Or)):
        return f"{_wrap(f.left)} {_BINARY_WORDS[type(f)]} {_wrap(f.right)}"
    if isinstance(f, Until):
        interval = f.interval.to_text() if f.interval is not None else ""
        return f"{_wrap(f.left)} U{interval} {_wrap(f.right)}"
    if isinstance(f, (Eventually, Globally)):
        op = "F" if isinstance(f, Eventually) else "G"
        interval = f.interval.to_text() if f.interval is not None else ""
        return f"{op}{interval} {_wrap(f.operand)}"
    if isinstance(f, (Reach, Surround)):
        op = "reach" if isinstance(f, Reach) else "surround"
        return f"{_wrap(f.left)} {op}{f.dist.to_text()} {_wrap(f.right)}"
    if isinstance(f, (Escape, Somewhere, Everywhere)):
        op = type(f).__name__.lower()
        return f"{op}{f.dist.to_text()} {_wrap(f.operand)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Structural queries
# ---------------------------------------------------------------------------

def subformulas(f: Formula) -> List[Formula]:
    """Distinct subformulas in post-order (children before parents)"""
    seen = set()
    order: List[Formula] = []

    def visit(g: Formula) -> None:
        if g in seen:
            return
        for child in g.children():
            visit(child)
        seen.add(g)
        order.append(g)

    visit(f)
    return order


def size(f: Formula) -> int:
    """Number of distinct subformulas"""
    return len(subformulas(f))


def temporal_extent(f: Formula) -> int:
    """Sum of time-interval extents over distinct subformulas ([a,b] counts b, [a,inf] counts a)"""
    total = 0
    for g in subformulas(f):
        interval = getattr(g, "interval", None)
        if interval is not None:
            total += interval.extent
    return total


def distance_functions(f: Formula) -> List[str]:
    names = {g.dist.fn for g in subformulas(f) if hasattr(g, "dist")}
    return sorted(names)


def is_spltl(f: Formula) -> bool:
    """True when no sugar and no time interval remains"""
    for g in subformulas(f):
        if isinstance(g, (Eventually, Globally, Somewhere, Everywhere, Surround)):
            return False
        if isinstance(g, Until) and g.interval is not None:
            return False
    return True


# ---------------------------------------------------------------------------
# Rewriting
# ---------------------------------------------------------------------------

def _rebuild(f: Formula, children: List[Formula]) -> Formula:
    it = iter(children)
    values = [next(it) if isinstance(v, Formula) else v for v in f._values()]
    return type(f)(*values)


def desugar(f: Formula) -> Formula:
    """Rewrite Somewhere, Everywhere, Eventually and Globally into core operators"""
    memo: Dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if g in memo:
            return memo[g]
        if isinstance(g, Surround):
            raise UnsupportedOperatorError("the surround operator is not supported")
        kids = [go(c) for c in g.children()]
        if isinstance(g, Somewhere):
            out = Reach(TRUE, kids[0], g.dist)
        elif isinstance(g, Everywhere):
            out = Not(Reach(TRUE, negate(kids[0]), g.dist))
        elif isinstance(g, Eventually):
            out = Until(TRUE, kids[0], g.interval)
        elif isinstance(g, Globally):
            out = Not(Until(TRUE, negate(kids[0]), g.interval))
        else:
            out = _rebuild(g, kids)
        memo[g] = out
        return out

    return go(f)


def _check_interval(interval: TimeInterval) -> None:
    if interval.lo < 0 or interval.lo == INF or interval.lo > interval.hi:
        raise InvalidIntervalError(f"time interval {interval.to_text()} is empty or negative")


def _eventually_chain(psi: Formula, lo: int, hi: int) -> Formula:
    """psi somewhere in [lo, hi]: X^lo (psi or X(psi or ... X psi))"""
    body = psi
    for _ in range(hi - lo):
        body = Or(psi, Next(body))
    for _ in range(lo):
        body = Next(body)
    return body


def _delayed_until(phi: Formula, psi: Formula, lo: int) -> Formula:
    """phi U[lo,inf) psi: phi and X(phi and X(... X(phi U psi)))"""
    body: Formula = Until(phi, psi)
    for _ in range(lo):
        body = And(phi, Next(body))
    return body


def _expand_until(phi: Formula, psi: Formula, interval: Optional[TimeInterval]) -> Formula:
    if interval is None or interval.is_trivial():
        return Until(phi, psi)
    _check_interval(interval)
    lo, hi = interval.lo, interval.hi
    if phi == TRUE:
        if hi == INF:
            return _delayed_next(Until(TRUE, psi), lo)
        return _eventually_chain(psi, lo, int(hi))
    if hi == INF:
        return _delayed_until(phi, psi, lo)
    return And(_eventually_chain(psi, lo, int(hi)), _delayed_until(phi, psi, lo))


def _delayed_next(f: Formula, count: int) -> Formula:
    for _ in range(count):
        f = Next(f)
    return f


def eliminate_intervals(f: Formula) -> Formula:
    """
    Rewrite a formula into an equivalent interval-free one.

    Sugar is expanded first. Bounded windows become chains of Next; the
    result is exactly equivalent on finite traces, including at the end of
    the trace.
    """
    memo: Dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if g in memo:
            return memo[g]
        if isinstance(g, Surround):
            raise UnsupportedOperatorError("the surround operator is not supported")
        if isinstance(g, Not):
            out = negate(go(g.operand))
        elif isinstance(g, Somewhere):
            out = Reach(TRUE, go(g.operand), g.dist)
        elif isinstance(g, Everywhere):
            out = Not(Reach(TRUE, negate(go(g.operand)), g.dist))
        elif isinstance(g, Eventually):
            out = _expand_until(TRUE, go(g.operand), g.interval)
        elif isinstance(g, Globally):
            out = negate(_expand_until(TRUE, negate(go(g.operand)), g.interval))
        elif isinstance(g, Until):
            out = _expand_until(go(g.left), go(g.right), g.interval)
        else:
            out = _rebuild(g, [go(c) for c in g.children()])
        memo[g] = out
        return out

    result = go(f)
    logger.debug(f"Interval elimination: |phi|={size(f)} -> |phi'|={size(result)}")
    return result


def normalize(f: Formula) -> Formula:
    """Desugar and eliminate intervals: the input of automaton construction"""
    return eliminate_intervals(desugar(f))


def closure(f: Formula) -> List[Formula]:
    """Subformulas and their negations (double negation removed), each formula followed by its negation"""
    seen = set()
    order: List[Formula] = []
    for g in subformulas(f):
        for h in (g, negate(g)):
            if h not in seen:
                seen.add(h)
                order.append(h)
    return order
