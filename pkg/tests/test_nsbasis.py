import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellcanon.expr import CorrelationPoint, evaluate
from bellcanon.nsbasis import (LAMBDA, MU, NU, SymmetricTensor, from_symmetric, mu_tensor,
                               normalize_integer, normalize_tensor, party_basis, project,
                               project_expression, to_symmetric)
from bellcanon.scenario import Scenario

import bellfixtures as fx

F = Fraction


def _col(values):
    return tuple(F(v) for v in values)


def test_pironio_alice_basis():
    b = party_basis((3, 2))
    assert b.labels == ((MU,), (LAMBDA, 1, 1), (LAMBDA, 2, 1), (LAMBDA, 1, 2), (NU, 1))
    assert b.vectors == (
        _col([F(1, 2)] * 5), _col([1, -1, 0, 0, 0]), _col([0, 1, -1, 0, 0]),
        _col([0, 0, 0, 1, -1]), _col([1, 1, 1, -1, -1]))


def test_pironio_bob_basis():
    b = party_basis((2, 2, 2))
    assert b.kinds == (MU, LAMBDA, LAMBDA, LAMBDA, NU, NU)
    assert b.vector((MU,)) == _col([F(1, 3)] * 6)
    assert b.vector((LAMBDA, 1, 3)) == _col([0, 0, 0, 0, 1, -1])
    assert b.vector((NU, 1)) == _col([1, 1, -1, -1, 0, 0])
    assert b.vector((NU, 2)) == _col([0, 0, 1, 1, -1, -1])


@pytest.mark.parametrize("party", [(2,), (2, 2), (3, 2), (2, 2, 2), (4, 3, 2)])
def test_basis_is_invertible(party):
    b = party_basis(party)
    U = b.matrix()
    assert U.shape == (sum(party), sum(party))
    I = U.dot(b.inverse_matrix())
    assert np.all(I == np.eye(sum(party), dtype=int))


def test_ch_gamma_table():
    t = to_symmetric(fx.ch_deltas())
    assert (t * 8).gamma.tolist() == [[-4, 0, 0, -2], [0, 2, -2, 2], [0, 2, 2, -2], [-2, -2, -2, 1]]
    tp, bound = project(t, 0)
    assert tp.is_projected()
    g, b, scale = normalize_tensor(tp, bound)
    assert g.gamma.tolist() == [[0, 0, 0, 0], [0, 1, -1, 0], [0, 1, 1, 0], [0, 0, 0, 0]]
    assert (b, scale) == (2, 4)


def test_ch_projects_to_chsh():
    e, b = project_expression(fx.ch_deltas(), 0)
    e, b, _ = normalize_integer(e, b)
    assert e == fx.chsh() and b == 2


def test_chsh_already_projected():
    t = to_symmetric(fx.chsh())
    assert t.is_projected()
    # only the correlator block survives: E11 - E12 + E21 + E22
    assert t.gamma[1:3, 1:3].tolist() == [[1, -1], [1, 1]]
    rest = np.array(t.gamma)
    rest[1:3, 1:3] = 0
    assert not rest.any()


def test_mu_tensor_is_one_on_normalized_points():
    for s in fx.SMALL_SCENARIOS:
        p = CorrelationPoint.deterministic(s, [tuple(1 for _ in party) for party in s.parties])
        assert evaluate(mu_tensor(s), p) == 1
        assert to_symmetric(mu_tensor(s)).normalization == 1


def _points(rng, s, n=6):
    for _ in range(n):
        yield CorrelationPoint.deterministic(s, [tuple(rng.randint(1, k) for k in p) for p in s.parties])


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_symmetric_round_trip(seed):
    rng = random.Random(seed)
    s = rng.choice(fx.SMALL_SCENARIOS)
    e = fx.random_expression(rng, s, rational=True)
    assert from_symmetric(to_symmetric(e)) == e


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_projection_preserves_value_on_local_points(seed):
    rng = random.Random(seed)
    s = rng.choice(fx.SMALL_SCENARIOS)
    e = fx.random_expression(rng, s, rational=True)
    t = to_symmetric(e)
    pe, shift = project_expression(e, 0)
    for p in _points(rng, s):
        assert evaluate(e, p) == evaluate(pe, p) - shift


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_projection_kills_nu_terms(seed):
    rng = random.Random(seed)
    s = rng.choice(fx.SMALL_SCENARIOS)
    e = fx.random_expression(rng, s)
    t = to_symmetric(e)
    noise = np.array(t.gamma)
    mask = t.nu_mask()
    noise[mask] = [F(rng.randint(-5, 5)) for _ in range(int(mask.sum()))]
    noise[(0,) * s.n_parties] += rng.randint(-5, 5)
    shifted = from_symmetric(SymmetricTensor(s, noise))
    assert project_expression(shifted)[0] == project_expression(e)[0]


def test_normalize_rejects_zero():
    with pytest.raises(ValueError):
        normalize_integer(fx.chsh() * 0)


def test_normalize_gcd_one():
    e, b, scale = normalize_integer(fx.chsh() * F(6, 35), F(12, 35))
    assert e == fx.chsh() and b == 2 and scale == F(35, 6)
