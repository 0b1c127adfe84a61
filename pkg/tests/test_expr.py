import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellcanon.expr import (BellExpression, CorrelationPoint, OrientedExpression, all_tuples,
                            evaluate, index_of, negate, permute_parties, reorder, tensor,
                            tuple_of)
from bellcanon.scenario import Scenario, canonical_scenario

import bellfixtures as fx


def test_enumeration_order():
    s = fx.S222
    # Alice's outcome, then Alice's setting, then Bob's outcome, then Bob's setting
    assert [tuple_of(i, s) for i in (1, 2, 3, 5)] == [
        ((1, 1), (1, 1)), ((2, 1), (1, 1)), ((1, 2), (1, 1)), ((1, 1), (2, 1))]
    assert index_of(((2, 2), (2, 2)), s) == 16


@pytest.mark.parametrize("s", fx.SMALL_SCENARIOS, ids=str)
def test_index_round_trip(s):
    ts = all_tuples(s)
    assert len(ts) == s.full_dimension()
    assert [index_of(t, s) for t in ts] == list(range(1, len(ts) + 1))


def test_chsh_coefficients():
    e = fx.chsh()
    assert e.as_ints() == [1, -1, 1, -1, -1, 1, -1, 1, -1, 1, 1, -1, 1, -1, -1, 1]


def test_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        BellExpression(fx.S222, [1, 2, 3])


def test_float_rejected():
    with pytest.raises(TypeError):
        BellExpression(Scenario([(2,)]), [0.5, 1])


def test_arithmetic_exact():
    e = BellExpression(Scenario([(2,)]), [Fraction(1, 3), 2])
    assert (e * 3).as_ints() == [1, 6]
    assert (e - e).is_zero()
    assert -(-e) == e
    assert hash(e) == hash(BellExpression(Scenario([(2,)]), ["1/3", 2]))


def test_chsh_local_values():
    e = fx.chsh()
    values = {evaluate(e, CorrelationPoint.deterministic(fx.S222, [(a1, a2), (b1, b2)]))
              for a1 in (1, 2) for a2 in (1, 2) for b1 in (1, 2) for b2 in (1, 2)}
    assert values == {-2, 2}


def test_point_normalization_checked():
    with pytest.raises(ValueError):
        CorrelationPoint(Scenario([(2,)]), [Fraction(1, 2), Fraction(1, 3)])


def test_negate_swaps_orientation():
    oe = negate(OrientedExpression(fx.chsh(), {"local": 2}), {"local": 2})
    assert oe.expression == -fx.chsh() and oe.bound("local") == 2


def _random_point(rng, s):
    return CorrelationPoint.deterministic(s, [tuple(rng.randint(1, k) for k in p) for p in s.parties])


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_tensor_evaluates_as_product(seed):
    rng = random.Random(seed)
    sa, sb = rng.choice(fx.SMALL_SCENARIOS[:5]), Scenario([(2, 3)])
    ea, eb = fx.random_expression(rng, sa), fx.random_expression(rng, sb)
    pa, pb = _random_point(rng, sa), _random_point(rng, sb)
    assert evaluate(tensor(ea, eb), pa * pb) == evaluate(ea, pa) * evaluate(eb, pb)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_reorder_round_trip_and_value(seed):
    rng = random.Random(seed)
    s = rng.choice(fx.SMALL_SCENARIOS)
    e = fx.random_expression(rng, s, rational=True)
    target, rmap = canonical_scenario(s)
    r = reorder(e, rmap)
    assert r.scenario == target
    assert reorder(r, rmap.inverse()) == e
    # the coefficient multiset is untouched by a reordering
    assert sorted(r.coefficients) == sorted(e.coefficients)


def test_permute_parties():
    e = fx.random_expression(random.Random(1), Scenario([(3,), (2, 2)]))
    p = permute_parties(e, [1, 0])
    assert p.scenario == Scenario([(2, 2), (3,)])
    assert np.all(p.tensor() == e.tensor().T)
    assert permute_parties(p, [1, 0]) == e
