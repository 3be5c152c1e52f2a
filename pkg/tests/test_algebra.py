import itertools
import math
import random

import pytest

from algebra import (BOOLEAN, COUNTING, MINMAX, TROPICAL, dist_add, dist_in_interval, get_algebra, ominus, oplus,
                     otimes)
from errors import AlgebraTypeError, InvalidIntervalError

MINMAX_POOL = [-math.inf, -3.0, -1.0, 0.0, 0.5, 2.5, math.inf]


def sample(alg, rng):
    if alg.is_boolean():
        return rng.choice([False, True])
    return rng.choice(MINMAX_POOL)


class TestOperations:
    """Examples for oplus, otimes and ominus in both algebras"""

    def test_boolean_oplus_is_or(self):
        assert oplus(True, False, BOOLEAN) is True

    def test_minmax_oplus_is_max(self):
        assert oplus(2.5, -1.0, MINMAX) == 2.5

    @pytest.mark.parametrize("x", [-math.inf, -2.0, 0.0, 7.5, math.inf])
    def test_minmax_bottom_is_additive_identity(self, x):
        assert oplus(-math.inf, x, MINMAX) == x

    def test_boolean_otimes_annihilates(self):
        assert otimes(True, False, BOOLEAN) is False

    def test_minmax_otimes_is_min(self):
        assert otimes(2.5, -1.0, MINMAX) == -1.0

    @pytest.mark.parametrize("x", [-math.inf, -2.0, 0.0, 7.5, math.inf])
    def test_minmax_top_is_multiplicative_identity(self, x):
        assert otimes(math.inf, x, MINMAX) == x

    def test_negation(self):
        assert ominus(True, BOOLEAN) is False
        assert ominus(3.0, MINMAX) == -3.0

    @pytest.mark.parametrize("x", MINMAX_POOL)
    def test_minmax_negation_is_involution(self, x):
        assert ominus(ominus(x, MINMAX), MINMAX) == x


class TestCarrier:
    """Values outside the carrier raise AlgebraTypeError"""

    def test_boolean_rejects_numbers(self):
        with pytest.raises(AlgebraTypeError):
            oplus(1, True, BOOLEAN)

    def test_minmax_rejects_bool(self):
        with pytest.raises(AlgebraTypeError):
            otimes(True, 1.0, MINMAX)

    def test_minmax_rejects_nan(self):
        with pytest.raises(AlgebraTypeError):
            ominus(float("nan"), MINMAX)

    def test_algebra_error_is_a_type_error(self):
        with pytest.raises(TypeError):
            MINMAX.check("1.0")

    def test_lookup_by_name(self):
        assert get_algebra("bool") is BOOLEAN
        assert get_algebra("robust") is MINMAX
        with pytest.raises(ValueError):
            get_algebra("fuzzy")

    def test_format(self):
        assert BOOLEAN.format(True) == "⊤"
        assert BOOLEAN.format(False) == "⊥"
        assert MINMAX.format(1) == "1.0"
        assert MINMAX.format(-math.inf) == "-inf"
        assert MINMAX.format(-0.0) == "0.0"


class TestLaws:
    """Semiring, idempotence, simplicity and De Morgan laws on random samples"""

    @pytest.mark.parametrize("alg", [BOOLEAN, MINMAX], ids=["boolean", "minmax"])
    def test_random_laws(self, alg):
        rng = random.Random(11)
        for _ in range(2500):
            a, b, c = sample(alg, rng), sample(alg, rng), sample(alg, rng)
            assert alg.oplus(a, b) == alg.oplus(b, a)
            assert alg.otimes(a, b) == alg.otimes(b, a)
            assert alg.oplus(alg.oplus(a, b), c) == alg.oplus(a, alg.oplus(b, c))
            assert alg.otimes(alg.otimes(a, b), c) == alg.otimes(a, alg.otimes(b, c))
            assert alg.otimes(a, alg.oplus(b, c)) == alg.oplus(alg.otimes(a, b), alg.otimes(a, c))
            assert alg.oplus(a, alg.bot) == a
            assert alg.otimes(a, alg.top) == a
            assert alg.otimes(a, alg.bot) == alg.bot
            assert alg.oplus(a, a) == a
            assert alg.otimes(a, a) == a
            assert alg.oplus(a, alg.top) == alg.top
            assert alg.ominus(alg.ominus(a)) == a
            assert alg.ominus(alg.oplus(a, b)) == alg.otimes(alg.ominus(a), alg.ominus(b))
            assert alg.ominus(alg.otimes(a, b)) == alg.oplus(alg.ominus(a), alg.ominus(b))

    def test_natural_order(self):
        assert MINMAX.leq(-1.0, 2.0)
        assert not MINMAX.leq(2.0, -1.0)
        assert BOOLEAN.leq(False, True)

    def test_sum_and_product(self):
        assert MINMAX.sum([]) == -math.inf
        assert MINMAX.product([]) == math.inf
        assert MINMAX.sum([1.0, 3.0, -2.0]) == 3.0
        assert BOOLEAN.product([True, True, False]) is False


class TestDistanceDomains:
    """Saturating addition and inclusive interval membership"""

    def test_counting_saturates(self):
        assert dist_add(2, math.inf, COUNTING) == math.inf

    def test_counting_identity(self):
        assert dist_add(0, 5, COUNTING) == 5

    def test_tropical_addition(self):
        assert dist_add(1.5, 2.25, TROPICAL) == 3.75

    def test_interval_bounds_are_inclusive(self):
        assert dist_in_interval(2, 0, 2, COUNTING)
        assert not dist_in_interval(3, 0, 2, COUNTING)
        assert dist_in_interval(math.inf, 0, math.inf, COUNTING)

    def test_empty_interval_rejected(self):
        with pytest.raises(InvalidIntervalError):
            dist_in_interval(1, 3, 2, COUNTING)

    def test_counting_rejects_fractions_and_negatives(self):
        with pytest.raises(AlgebraTypeError):
            dist_add(1.5, 1, COUNTING)
        with pytest.raises(AlgebraTypeError):
            dist_add(-1, 1, COUNTING)

    def test_total_order_and_monoid(self):
        values = [0, 1, 2, 5, math.inf]
        for a, b, c in itertools.product(values, repeat=3):
            assert COUNTING.leq(a, b) or COUNTING.leq(b, a)
            assert COUNTING.add(COUNTING.add(a, b), c) == COUNTING.add(a, COUNTING.add(b, c))
            assert COUNTING.add(a, COUNTING.bot) == a
            assert COUNTING.add(a, COUNTING.top) == COUNTING.top
