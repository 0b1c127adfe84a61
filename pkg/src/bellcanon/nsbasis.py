"""Relabeling-compatible basis {mu, lambda, nu} and no-signaling projection.

Each party gets a basis of its (outcome, setting) space:

* ``mu``: constant ``1/m``, pairs with the normalization constraint;
* ``lambda^{zeta xi}``: ``delta_{x,xi} (delta_{a,zeta} - delta_{a,zeta+1})``;
* ``nu^{xi}``: ``delta_{x,xi} - delta_{x,xi+1}``, pairs with no-signaling.

Vectors are ordered mu, then lambdas grouped by setting (outcome index
fastest), then nus. A Bell expression's coordinates in the tensor product of
these bases form a :class:`SymmetricTensor`. Projection zeroes every entry
touching a ``nu`` and moves the all-``mu`` entry into the bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import lcm, prod
from typing import Sequence

import numpy as np

from . import _linalg
from .expr import BellExpression, fraction_array, to_fraction
from .scenario import Scenario

MU, LAMBDA, NU = "mu", "lambda", "nu"


@dataclass(frozen=True)
class PartyBasis:
    party: tuple[int, ...]
    labels: tuple[tuple, ...]
    vectors: tuple[tuple[Fraction, ...], ...]

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(lab[0] for lab in self.labels)

    def matrix(self) -> np.ndarray:
        """Basis vectors as columns: ``c = U @ gamma``."""
        return np.array(self.vectors, dtype=object).T

    def inverse_matrix(self) -> np.ndarray:
        return _inverse_cached(self.party)

    def vector(self, label: tuple) -> tuple[Fraction, ...]:
        return self.vectors[self.labels.index(label)]


@lru_cache(maxsize=None)
def party_basis(party: tuple[int, ...]) -> PartyBasis:
    party = tuple(party)
    m = len(party)
    size = sum(party)
    offs = [sum(party[:x]) for x in range(m)]
    labels: list[tuple] = [(MU,)]
    vectors: list[tuple[Fraction, ...]] = [tuple(Fraction(1, m) for _ in range(size))]
    for xi, k in enumerate(party):
        for zeta in range(k - 1):
            v = [Fraction(0)] * size
            v[offs[xi] + zeta] = Fraction(1)
            v[offs[xi] + zeta + 1] = Fraction(-1)
            labels.append((LAMBDA, zeta + 1, xi + 1))
            vectors.append(tuple(v))
    for xi in range(m - 1):
        v = [Fraction(0)] * size
        for a in range(party[xi]):
            v[offs[xi] + a] = Fraction(1)
        for a in range(party[xi + 1]):
            v[offs[xi + 1] + a] = Fraction(-1)
        labels.append((NU, xi + 1))
        vectors.append(tuple(v))
    return PartyBasis(party, tuple(labels), tuple(vectors))


def _coordinates(party: tuple[int, ...], c: Sequence[Fraction]) -> list[Fraction]:
    """Closed-form coordinates of one party's vector in the mu/lambda/nu basis.

    Within setting x the lambda part telescopes to zero, so the setting mean
    S_x equals mu/m + (nu_x - nu_{x-1}); summing over x gives mu, partial sums
    give the nu coordinates and partial sums of c - S_x the lambda ones.
    """
    m = len(party)
    offs = [sum(party[:x]) for x in range(m)]
    means = [sum(c[offs[x]:offs[x] + k], Fraction(0)) / k for x, k in enumerate(party)]
    mu = sum(means, Fraction(0))
    out = [mu]
    for x, k in enumerate(party):
        acc = Fraction(0)
        for a in range(k - 1):
            acc += c[offs[x] + a] - means[x]
            out.append(acc)
    acc = Fraction(0)
    for x in range(m - 1):
        acc += means[x] - mu / m
        out.append(acc)
    return out


@lru_cache(maxsize=None)
def _inverse_cached(party: tuple[int, ...]) -> np.ndarray:
    size = sum(party)
    cols = []
    for j in range(size):
        unit = [Fraction(int(i == j)) for i in range(size)]
        cols.append(_coordinates(party, unit))
    inv = np.array(cols, dtype=object).T
    inv.setflags(write=False)
    return inv


def _lcm_den(values) -> int:
    d = 1
    for v in values:
        d = lcm(d, Fraction(v).denominator)
    return d


@lru_cache(maxsize=None)
def _integer_matrix(party: tuple[int, ...], inverse: bool) -> tuple[np.ndarray, int]:
    """``(M, d)`` with integer ``M`` and ``M / d`` equal to the basis (inverse) matrix."""
    m = len(party)
    size = sum(party)
    offs = [sum(party[:x]) for x in range(m)]
    if not inverse:
        # mu column is 1/m, lambda and nu columns are 0/+-1
        d = m
        out = np.zeros((size, size), dtype=object)
        out[:, 0] = 1
        col = 1
        for x, k in enumerate(party):
            for a in range(k - 1):
                out[offs[x] + a, col] = d
                out[offs[x] + a + 1, col] = -d
                col += 1
        for x in range(m - 1):
            out[offs[x]:offs[x] + party[x], col] = d
            out[offs[x + 1]:offs[x + 1] + party[x + 1], col] = -d
            col += 1
    else:
        # column j is _coordinates of the unit vector at (a0, x0), times d
        d = m * reduce(lcm, party, 1)
        out = np.zeros((size, size), dtype=object)
        for x0, k0 in enumerate(party):
            w = d // k0
            for a0 in range(k0):
                j = offs[x0] + a0
                out[0, j] = w
                row = 1 + sum(k - 1 for k in party[:x0])
                for a in range(k0 - 1):
                    out[row + a, j] = d * (a >= a0) - (a + 1) * w
                row = 1 + size - m
                for x in range(m - 1):
                    out[row + x, j] = w * (x >= x0) - (x + 1) * w // m
    out.setflags(write=False)
    return out, d


def _apply_exact(t: np.ndarray, parties, inverse: bool) -> np.ndarray:
    """Apply per-axis basis matrices exactly, on Python ints over one common denominator.

    Integer object arithmetic is much cheaper than Fraction arithmetic, so the
    tensor is scaled to integers first and divided once at the end.
    """
    den = _lcm_den(t.ravel())
    out = np.array([int(v * den) for v in t.ravel()], dtype=object).reshape(t.shape)
    for axis, party in enumerate(parties):
        m, d = _integer_matrix(tuple(party), inverse)
        out = np.moveaxis(np.tensordot(m, out, axes=([1], [axis])), 0, axis)
        den *= d
    flat = [Fraction(int(v), den) for v in out.ravel()]
    return np.array(flat, dtype=object).reshape(out.shape)


@dataclass(frozen=True, eq=False)
class SymmetricTensor:
    scenario: Scenario
    gamma: np.ndarray

    def __init__(self, scenario: Scenario, gamma):
        g = np.array(gamma, dtype=object)
        shape = scenario.party_sizes()
        if g.shape != shape:
            raise ValueError(f"tensor shape {g.shape} does not match scenario {scenario} {shape}")
        g = fraction_array(g.ravel()).reshape(shape)
        g.setflags(write=False)
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "gamma", g)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SymmetricTensor) and self.scenario == other.scenario
                and bool(np.all(self.gamma == other.gamma)))

    def __mul__(self, k) -> "SymmetricTensor":
        return SymmetricTensor(self.scenario, self.gamma * to_fraction(k))

    __rmul__ = __mul__

    @property
    def normalization(self) -> Fraction:
        """The all-mu entry (the constant term)."""
        return self.gamma[(0,) * self.scenario.n_parties]

    def nu_mask(self) -> np.ndarray:
        masks = [np.array([k == NU for k in party_basis(p).kinds]) for p in self.scenario.parties]
        out = np.zeros(self.scenario.party_sizes(), dtype=bool)
        for axis, m in enumerate(masks):
            shape = [1] * len(masks)
            shape[axis] = len(m)
            out = out | m.reshape(shape)
        return out

    def is_projected(self) -> bool:
        return self.normalization == 0 and all(v == 0 for v in self.gamma[self.nu_mask()])

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.gamma.ravel())


def to_symmetric(e: BellExpression) -> SymmetricTensor:
    return SymmetricTensor(e.scenario, _apply_exact(e.tensor(), e.scenario.parties, True))


def from_symmetric(t: SymmetricTensor) -> BellExpression:
    return BellExpression.from_tensor(t.scenario, _apply_exact(t.gamma, t.scenario.parties, False))


def project(t: SymmetricTensor, bound=0) -> tuple[SymmetricTensor, Fraction]:
    """Drop no-signaling and normalization components; the constant moves into the bound."""
    g = np.array(t.gamma, dtype=object)
    shift = g[(0,) * t.scenario.n_parties]
    g[t.nu_mask()] = Fraction(0)
    g[(0,) * t.scenario.n_parties] = Fraction(0)
    return SymmetricTensor(t.scenario, g), to_fraction(bound) - shift


def project_expression(e: BellExpression, bound=0) -> tuple[BellExpression, Fraction]:
    """Convenience: project in coefficient space."""
    t, b = project(to_symmetric(e), bound)
    return from_symmetric(t), b


def normalize_integer(e: BellExpression, bound=0) -> tuple[BellExpression, Fraction, Fraction]:
    """Scale by a positive factor so that coefficients are coprime integers."""
    if e.is_zero():
        raise ValueError("zero expression has no canonical scale (trivial inequality)")
    scale = _linalg.integer_scale(e.coefficients)
    return e * scale, to_fraction(bound) * scale, scale


def normalize_tensor(t: SymmetricTensor, bound=0) -> tuple[SymmetricTensor, Fraction, Fraction]:
    """Coprime-integer scaling of the symmetric coordinates themselves."""
    scale = _linalg.integer_scale(t.gamma.ravel())
    return t * scale, to_fraction(bound) * scale, scale


def mu_tensor(s: Scenario) -> BellExpression:
    """The normalization functional mu x ... x mu (equal to 1 on normalized points)."""
    t = np.ones(s.party_sizes(), dtype=object)
    val = Fraction(1, prod(len(p) for p in s.parties))
    return BellExpression.from_tensor(s, t * val)
