"""Bell expressions as exact rational coefficient vectors.

Coefficients are enumerated with party 1's outcome varying fastest, then
party 1's setting, then party 2's outcome, party 2's setting, and so on.
Within a party the local index of ``(a, x)`` is ``a + sum(k_j for j < x)``.
Reshaping a coefficient vector in Fortran order therefore gives a tensor
with one axis per party.

Labels in the public API are 1-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .scenario import ReorderMap, Scenario


def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        raise TypeError("floating point coefficients are not accepted; use Fraction or str")
    return Fraction(v)


def fraction_array(values: Iterable) -> np.ndarray:
    arr = np.array([to_fraction(v) for v in values], dtype=object)
    return arr


def party_offsets(party: Sequence[int]) -> list[int]:
    offs = [0]
    for k in party[:-1]:
        offs.append(offs[-1] + k)
    return offs


def local_pairs(party: Sequence[int]) -> list[tuple[int, int]]:
    """0-based (outcome, setting) pairs of a party in local enumeration order."""
    return [(a, x) for x, k in enumerate(party) for a in range(k)]


def index_of(t: Sequence[tuple[int, int]], s: Scenario) -> int:
    """1-based flat index of a tuple of 1-based ``(outcome, setting)`` pairs."""
    if len(t) != s.n_parties:
        raise IndexError(f"expected {s.n_parties} (outcome, setting) pairs, got {len(t)}")
    idx, stride = 0, 1
    for i, ((a, x), party) in enumerate(zip(t, s.parties)):
        if not 1 <= x <= len(party):
            raise IndexError(f"party {i + 1}: setting {x} out of range 1..{len(party)}")
        if not 1 <= a <= party[x - 1]:
            raise IndexError(f"party {i + 1}: outcome {a} out of range 1..{party[x - 1]}")
        idx += (party_offsets(party)[x - 1] + a - 1) * stride
        stride *= sum(party)
    return idx + 1


def tuple_of(i: int, s: Scenario) -> tuple[tuple[int, int], ...]:
    D = s.full_dimension()
    if not 1 <= i <= D:
        raise IndexError(f"index {i} out of range 1..{D}")
    r = i - 1
    out = []
    for party in s.parties:
        size = sum(party)
        r, loc = divmod(r, size)
        a, x = local_pairs(party)[loc]
        out.append((a + 1, x + 1))
    return tuple(out)


def all_tuples(s: Scenario) -> list[tuple[tuple[int, int], ...]]:
    return [tuple_of(i, s) for i in range(1, s.full_dimension() + 1)]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BellExpression:
    scenario: Scenario
    coefficients: np.ndarray

    def __init__(self, scenario: Scenario, coefficients):
        coeffs = fraction_array(np.asarray(coefficients, dtype=object).ravel(order="F")
                                if isinstance(coefficients, np.ndarray) else coefficients)
        if len(coeffs) != scenario.full_dimension():
            raise ValueError(
                f"length mismatch: {len(coeffs)} coefficients for scenario {scenario} "
                f"of dimension {scenario.full_dimension()}")
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "coefficients", _frozen(coeffs))

    @classmethod
    def from_tensor(cls, scenario: Scenario, tensor: np.ndarray) -> "BellExpression":
        return cls(scenario, np.asarray(tensor, dtype=object).ravel(order="F"))

    @classmethod
    def from_function(cls, scenario: Scenario,
                      f: Callable[[tuple[int, ...], tuple[int, ...]], object]) -> "BellExpression":
        """Build coefficients from ``f(outcomes, settings)`` with 1-based labels."""
        vals = []
        for t in all_tuples(scenario):
            vals.append(f(tuple(a for a, _ in t), tuple(x for _, x in t)))
        return cls(scenario, vals)

    @classmethod
    def zero(cls, scenario: Scenario) -> "BellExpression":
        return cls(scenario, [0] * scenario.full_dimension())

    @classmethod
    def from_terms(cls, scenario: Scenario,
                   terms: Mapping[tuple[tuple[int, ...], tuple[int, ...]], object]) -> "BellExpression":
        """Sum of ``coef * P(outcomes|settings)`` over full correlators."""
        vals = [Fraction(0)] * scenario.full_dimension()
        for (outs, sets), c in terms.items():
            vals[index_of(tuple(zip(outs, sets)), scenario) - 1] += to_fraction(c)
        return cls(scenario, vals)

    def tensor(self) -> np.ndarray:
        return self.coefficients.reshape(self.scenario.party_sizes(), order="F")

    def __len__(self) -> int:
        return len(self.coefficients)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BellExpression) and self.scenario == other.scenario
                and all(a == b for a, b in zip(self.coefficients, other.coefficients)))

    def __hash__(self) -> int:
        return hash((self.scenario, tuple(self.coefficients)))

    def __repr__(self) -> str:
        body = " ".join(str(c) for c in self.coefficients[:24])
        more = " ..." if len(self) > 24 else ""
        return f"BellExpression({self.scenario}, [{body}{more}])"

    def __neg__(self) -> "BellExpression":
        return BellExpression(self.scenario, -self.coefficients)

    def __add__(self, other: "BellExpression") -> "BellExpression":
        _check_same(self.scenario, other.scenario)
        return BellExpression(self.scenario, self.coefficients + other.coefficients)

    def __sub__(self, other: "BellExpression") -> "BellExpression":
        return self + (-other)

    def __mul__(self, k) -> "BellExpression":
        return BellExpression(self.scenario, self.coefficients * to_fraction(k))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def is_integer(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients)

    def as_ints(self) -> list[int]:
        if not self.is_integer():
            raise ValueError("expression has non-integer coefficients")
        return [int(c) for c in self.coefficients]


def _check_same(s1: Scenario, s2: Scenario) -> None:
    if s1 != s2:
        raise ValueError(f"scenario mismatch: {s1} vs {s2}")


#: Bound sets whose bounds are inherited under composition.
CONDITIONAL_BOUND_SETS = {"local": True, "no-signaling": True, "quantum": True,
                          "svetlichny": False}


@dataclass(frozen=True)
class Bound:
    value: Fraction
    conditional: bool = True

    def __init__(self, value, conditional: bool = True):
        object.__setattr__(self, "value", to_fraction(value))
        object.__setattr__(self, "conditional", bool(conditional))


@dataclass(frozen=True, eq=False)
class OrientedExpression:
    """A Bell expression read as ``B(P) <= bound`` for each named bound set."""
    expression: BellExpression
    bounds: Mapping[str, Bound] = field(default_factory=dict)

    def __init__(self, expression: BellExpression, bounds: Mapping[str, object] | None = None):
        bs = {}
        for name, b in (bounds or {}).items():
            if not isinstance(b, Bound):
                b = Bound(b, CONDITIONAL_BOUND_SETS.get(name, False))
            bs[name] = b
        object.__setattr__(self, "expression", expression)
        object.__setattr__(self, "bounds", dict(bs))

    @property
    def scenario(self) -> Scenario:
        return self.expression.scenario

    def bound(self, name: str = "local") -> Fraction | None:
        b = self.bounds.get(name)
        return None if b is None else b.value

    def __eq__(self, other) -> bool:
        return (isinstance(other, OrientedExpression) and self.expression == other.expression
                and self.bounds == other.bounds)

    def __repr__(self) -> str:
        bs = ", ".join(f"{k}<={v.value}" for k, v in self.bounds.items())
        return f"OrientedExpression({self.expression!r}, {{{bs}}})"


def negate(e: OrientedExpression, bounds: Mapping[str, object] | None = None) -> OrientedExpression:
    """Flip the orientation. Upper bounds of ``-B`` (the old lower bounds) may be supplied."""
    return OrientedExpression(-e.expression, bounds or {})


@dataclass(frozen=True, eq=False)
class CorrelationPoint:
    scenario: Scenario
    values: np.ndarray

    def __init__(self, scenario: Scenario, values, check: bool = True):
        vals = fraction_array(values)
        if len(vals) != scenario.full_dimension():
            raise ValueError("length mismatch for correlation point")
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "values", _frozen(vals))
        if check:
            self.check()

    def check(self) -> None:
        if any(v < 0 or v > 1 for v in self.values):
            raise ValueError("probabilities must lie in [0, 1]")
        t = self.values.reshape(self.scenario.party_sizes(), order="F")
        for sets in np.ndindex(*[len(p) for p in self.scenario.parties]):
            idx = np.ix_(*[
                [party_offsets(p)[x] + a for a in range(p[x])]
                for p, x in zip(self.scenario.parties, sets)])
            if sum(t[idx].ravel()) != 1:
                raise ValueError(f"probabilities for settings {tuple(x + 1 for x in sets)} "
                                 "do not sum to one")

    @classmethod
    def from_function(cls, scenario: Scenario, f) -> "CorrelationPoint":
        vals = [f(tuple(a for a, _ in t), tuple(x for _, x in t)) for t in all_tuples(scenario)]
        return cls(scenario, vals)

    @classmethod
    def deterministic(cls, scenario: Scenario,
                      strategy: Sequence[Sequence[int]]) -> "CorrelationPoint":
        """Point where party i answers ``strategy[i][x-1]`` (1-based) to setting x."""
        return cls.from_function(scenario, lambda a, x: int(all(
            ai == strategy[i][xi - 1] for i, (ai, xi) in enumerate(zip(a, x)))))

    def __mul__(self, other: "CorrelationPoint") -> "CorrelationPoint":
        s = Scenario(self.scenario.parties + other.scenario.parties)
        return CorrelationPoint(s, np.multiply.outer(self.values, other.values).ravel(order="F"),
                                check=False)


def evaluate(e: BellExpression, p: CorrelationPoint) -> Fraction:
    _check_same(e.scenario, p.scenario)
    return sum((c * v for c, v in zip(e.coefficients, p.values) if c and v), Fraction(0))


def tensor(eA: BellExpression, eB: BellExpression) -> BellExpression:
    """Product expression on the parties of ``eA`` followed by those of ``eB``."""
    s = Scenario(eA.scenario.parties + eB.scenario.parties)
    # party-1-fastest enumeration: eA's index varies fastest
    return BellExpression(s, np.multiply.outer(eB.coefficients, eA.coefficients).ravel())


def tensor_all(exprs: Sequence[BellExpression]) -> BellExpression:
    return reduce(tensor, exprs)


def constant_expression(scenario: Scenario, value=1) -> BellExpression:
    return BellExpression(scenario, [value] * scenario.full_dimension())


def permute_parties(e: BellExpression, order: Sequence[int]) -> BellExpression:
    """Expression whose party ``j`` is party ``order[j]`` of ``e``."""
    s = Scenario([e.scenario.parties[i] for i in order])
    return BellExpression.from_tensor(s, np.transpose(e.tensor(), order))


def reorder(e: BellExpression, rmap: ReorderMap) -> BellExpression:
    """Move coefficients of ``e`` (in ``rmap.source``) into ``rmap.target``."""
    _check_same(e.scenario, rmap.source)
    t = e.tensor()
    for i, party in enumerate(rmap.source.parties):
        sm = rmap.setting_maps[i]
        new_party = [0] * len(party)
        for old, new in enumerate(sm):
            new_party[new] = party[old]
        offs_old = party_offsets(party)
        offs_new = party_offsets(new_party)
        perm = [0] * sum(party)  # perm[new_local] = old_local
        for x, k in enumerate(party):
            for a in range(k):
                perm[offs_new[sm[x]] + a] = offs_old[x] + a
        t = np.take(t, perm, axis=i)
    order = [0] * len(rmap.party_map)
    for old, new in enumerate(rmap.party_map):
        order[new] = old
    t = np.transpose(t, order)
    return BellExpression.from_tensor(rmap.target, t)
