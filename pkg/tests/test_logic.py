import math
import random

import pytest

from algebra import BOOLEAN, MINMAX
from errors import InvalidIntervalError, ParseError, UnknownDistanceFunctionError, UnsupportedOperatorError
from logic import (TRUE, And, Atom, Comparison, DistInterval, Eventually, Globally, KindTest, Next, Not, Or,
                   Reach, Somewhere, TimeInterval, Until, atom, closure, desugar, eliminate_intervals, is_spltl,
                   negate, normalize, parse, parse_alias, size, subformulas, temporal_extent, to_text)
from oracle import eval_semantics
from utils import CheckConfig, random_formula, random_trace

p, q, a = atom("p"), atom("q"), atom("a")
HOPS_0_2 = DistInterval("hops", 0, 2)


class TestParse:
    """Grammar, precedence and error positions"""

    def test_bounded_eventually(self):
        assert parse("F[0,3] a") == Eventually(a, TimeInterval(0, 3))

    def test_reach_until(self):
        f = parse("(drone reach[hops][0,2] groundstation) U goal")
        assert f == Until(Reach(atom("drone"), atom("groundstation"), HOPS_0_2), atom("goal"))

    def test_globally_somewhere(self):
        f = parse("G (somewhere[hops][1,2] drone)")
        assert f == Globally(Somewhere(atom("drone"), DistInterval("hops", 1, 2)))

    def test_precedence(self):
        assert parse("p or q and r") == Or(p, And(q, atom("r")))
        assert parse("p U q U r") == Until(p, Until(q, atom("r")))
        assert parse("not p and q") == And(Not(p), q)
        assert parse("p reach[hops][0,2] q and r") == And(Reach(p, q, HOPS_0_2), atom("r"))

    def test_comparison_and_alias(self):
        f = parse("battery >= 4 and not obstacle", aliases={"obstacle": Comparison("dist_to_obstacle", "<=", 0.0)})
        assert f == And(Atom(Comparison("battery", ">=", 4.0)), Not(Atom(Comparison("dist_to_obstacle", "<=", 0.0))))

    def test_unbounded_interval(self):
        assert parse("p U[2,inf] q") == Until(p, q, TimeInterval(2, math.inf))

    def test_weight_bounds_are_real(self):
        f = parse("somewhere[weight][0.5,2] p")
        assert f.dist == DistInterval("weight", 0.5, 2.0)

    def test_comments_and_newlines(self):
        assert parse("p  # first\nU q") == Until(p, q)

    def test_error_position(self):
        with pytest.raises(ParseError) as e:
            parse("p and (q")
        assert (e.value.line, e.value.column) == (1, 9)

    def test_error_on_second_line(self):
        with pytest.raises(ParseError) as e:
            parse("p and\n  or q")
        assert (e.value.line, e.value.column) == (2, 3)

    def test_reversed_interval(self):
        with pytest.raises(ParseError):
            parse("F[3,1] p")

    def test_fractional_hops(self):
        with pytest.raises(ParseError):
            parse("somewhere[hops][0,1.5] p")

    def test_unknown_distance_function(self):
        with pytest.raises(UnknownDistanceFunctionError) as e:
            parse("somewhere[euclid][0,1] p")
        assert e.value.column == 11

    def test_alias_definition(self):
        assert parse_alias("low=battery<=2") == ("low", Comparison("battery", "<=", 2.0))
        with pytest.raises(ParseError):
            parse_alias("and=p")

    def test_round_trip_random(self):
        rng = random.Random(21)
        cfg = CheckConfig(max_depth=4)
        for _ in range(300):
            f = random_formula(rng, cfg.max_depth, cfg)
            assert parse(to_text(f)) == f


class TestDesugar:
    """Derived operators rewritten into the core"""

    def test_somewhere(self):
        assert desugar(parse("somewhere[hops][0,2] p")) == Reach(TRUE, p, HOPS_0_2)

    def test_everywhere(self):
        f = desugar(parse("everywhere[hops][0,1] p"))
        assert f == Not(Reach(TRUE, Not(p), DistInterval("hops", 0, 1)))

    def test_globally(self):
        assert desugar(parse("G p")) == Not(Until(TRUE, Not(p)))

    def test_surround_rejected(self):
        with pytest.raises(UnsupportedOperatorError):
            desugar(parse("p surround[hops][0,1] q"))


class TestEliminateIntervals:
    """Bounded windows become Next chains"""

    def test_eventually_chain(self):
        expected = Or(a, Next(Or(a, Next(Or(a, Next(a))))))
        assert eliminate_intervals(parse("F[0,3] a")) == expected

    def test_point_window(self):
        assert eliminate_intervals(parse("F[0,0] a")) == a

    def test_delayed_window(self):
        assert eliminate_intervals(parse("F[2,2] a")) == Next(Next(a))

    def test_bounded_globally(self):
        na = Not(a)
        expected = Not(Or(na, Next(Or(na, Next(na)))))
        assert eliminate_intervals(parse("G[0,2] a")) == expected

    def test_delayed_until(self):
        assert eliminate_intervals(parse("p U[1,inf] q")) == And(p, Next(Until(p, q)))

    def test_bounded_until(self):
        f = eliminate_intervals(parse("p U[0,1] q"))
        assert f == And(Or(q, Next(q)), Until(p, q))

    def test_unbounded_eventually_passes_through(self):
        assert eliminate_intervals(parse("F p")) == Until(TRUE, p)

    def test_result_is_interval_free(self):
        f = normalize(parse("G[1,3] (p U[0,2] q) and everywhere[hops][0,1] F[2,inf] p"))
        assert is_spltl(f)

    def test_invalid_interval(self):
        with pytest.raises(InvalidIntervalError):
            eliminate_intervals(Eventually(p, TimeInterval(3, 1)))

    def test_linear_growth(self):
        sizes = [size(normalize(parse(f"F[0,{n}] p"))) for n in (10, 20, 40)]
        assert sizes[1] - sizes[0] == 2 * 10
        assert sizes[2] - sizes[1] == 2 * 20

    @pytest.mark.parametrize("alg", [BOOLEAN, MINMAX], ids=["boolean", "minmax"])
    def test_equivalent_to_windowed_semantics(self, alg):
        rng = random.Random(1 if alg is BOOLEAN else 2)
        cfg = CheckConfig(max_locations=3, max_len=6)
        for _ in range(500):
            f = random_formula(rng, 3, cfg)
            trace = random_trace(rng, cfg)
            ego = rng.choice(trace.universe)
            assert eval_semantics(trace, f, ego, 0, alg) == eval_semantics(trace, normalize(f), ego, 0, alg), to_text(f)

    def test_size_bound(self):
        rng = random.Random(4)
        cfg = CheckConfig()
        for _ in range(500):
            f = random_formula(rng, 3, cfg)
            assert size(normalize(f)) <= 4 * size(f) * (1 + temporal_extent(f))


class TestClosure:
    """Subformulas with their negations"""

    def test_until(self):
        expected = {p, q, Not(p), Not(q), Until(p, q), Not(Until(p, q))}
        assert set(closure(parse("p U q"))) == expected
        assert len(closure(parse("p U q"))) == 6

    def test_negation_collapses(self):
        assert set(closure(Not(p))) == {p, Not(p)}

    def test_next(self):
        assert set(closure(Next(p))) == {p, Not(p), Next(p), Not(Next(p))}

    def test_each_formula_followed_by_its_negation(self):
        members = closure(parse("X (p and q)"))
        for g in members:
            assert negate(g) in members

    def test_subformulas_post_order(self):
        order = subformulas(parse("p U q"))
        assert order == [p, q, Until(p, q)]
        assert size(parse("p U q")) == 3


class TestMeasures:
    """Extent and text of small formulas"""

    def test_temporal_extent(self):
        assert temporal_extent(parse("F[0,3] p and G[2,inf] q")) == 5
        assert temporal_extent(parse("p U q")) == 0

    def test_kind_test_text(self):
        assert KindTest("drone").to_text() == "drone"
