import pytest
from hypothesis import given, strategies as st

from bellcanon.scenario import (Scenario, ScenarioError, canonical_scenario, full_dimension,
                                is_canonical, ns_dimension)

parties = st.lists(st.lists(st.integers(2, 4), min_size=1, max_size=3), min_size=1, max_size=3)


def test_dimensions_homogeneous():
    s = Scenario.homogeneous(2, 2, 2)
    assert full_dimension(s) == 16
    assert ns_dimension(s) == 8
    assert s.is_homogeneous


def test_dimensions_nonhomogeneous():
    s = Scenario.parse("[(3 2) (2 2 2)]")
    assert s.parties == ((3, 2), (2, 2, 2))
    assert s.full_dimension() == 30
    # (1 + 2 + 1)(1 + 1 + 1 + 1) - 1
    assert s.ns_dimension() == 15
    assert not s.is_homogeneous


@pytest.mark.parametrize("text,expected", [
    ("(2,2,2)", ((2, 2), (2, 2))),
    ("( 3, 1, 4 )", ((4,), (4,), (4,))),
    ("[(2 3)(2 2 2)]", ((2, 3), (2, 2, 2))),
    ("[(2)]", ((2,),)),
])
def test_parse(text, expected):
    assert Scenario.parse(text).parties == expected


@pytest.mark.parametrize("bad", ["", "(2,2)", "[(2 x)]", "[]"])
def test_parse_rejects(bad):
    with pytest.raises(ScenarioError):
        Scenario.parse(bad)


@pytest.mark.parametrize("parties", [[], [()], [(1, 2)], [(2,), (0,)]])
def test_validation(parties):
    with pytest.raises(ScenarioError):
        Scenario(parties)


def test_str_round_trip():
    s = Scenario([(3, 2), (2, 2, 2)])
    assert str(s) == "[(3 2) (2 2 2)]"
    assert Scenario.parse(str(s)) == s


def test_canonical_scenario_example():
    target, rmap = canonical_scenario(Scenario([(2, 3), (2, 2, 2)]))
    assert target == Scenario([(3, 2), (2, 2, 2)])
    assert rmap.party_map == (0, 1)
    assert rmap.setting_maps[0] == (1, 0)


def test_party_order_pads_with_zero():
    # (2 2 2) precedes (2 2): equal prefix, then 2 > 0
    target, _ = canonical_scenario(Scenario([(2, 2), (2, 2, 2)]))
    assert target.parties == ((2, 2, 2), (2, 2))
    target, _ = canonical_scenario(Scenario([(2,), (3,), (2, 2)]))
    assert target.parties == ((3,), (2, 2), (2,))


@given(parties)
def test_canonical_idempotent(ps):
    target, rmap = canonical_scenario(Scenario(ps))
    assert is_canonical(target)
    again, r2 = canonical_scenario(target)
    assert again == target and r2.is_identity()
    inv = rmap.inverse()
    assert inv.source == target and inv.inverse() == rmap


@given(parties)
def test_canonical_preserves_multiset(ps):
    s = Scenario(ps)
    target, _ = canonical_scenario(s)
    assert sorted(sorted(p) for p in s.parties) == sorted(sorted(p) for p in target.parties)
    for p in target.parties:
        assert list(p) == sorted(p, reverse=True)
