"""Canonical decomposition of Bell expressions.

``decompose`` runs the reduction loop (project onto the normalized
no-signaling subspace, reorder the scenario, scale to coprime integers,
drop one superfluous party / setting / outcome distinction, repeat), then
splits composite expressions recursively and finally relabels every
non-composite component to its lexicographically minimal form.

Every transformation is recorded as a step that can be undone exactly, so
``tree.recompose()`` returns the input coefficients bit for bit. Projection
and setting removal discard terms that vanish on normalized no-signaling
correlations; those terms are kept in the steps as residuals and checked to
be null.

Sign convention for composite factors: each factor is oriented so that its
minimal form is lexicographically smaller than the minimal form of its
negation (ties keep the computed sign); the sign goes into the product's
scale.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Mapping, Sequence

import numpy as np

from . import _linalg
from .expr import (BellExpression, CorrelationPoint, OrientedExpression, party_offsets,
                   permute_parties, reorder, tensor_all, to_fraction)
from .nsbasis import (LAMBDA, MU, NU, SymmetricTensor, from_symmetric, mu_tensor,
                      normalize_integer, party_basis, project, to_symmetric)
from .scenario import ReorderMap, Scenario, canonical_scenario
from .symmgroup import act, chain_for, inverse, is_identity, lex_min, rank_of


class TrivialExpressionError(ValueError):
    """The expression is constant on normalized no-signaling correlations."""


class NotInheritableError(ValueError):
    """Bounds of this set do not compose (the set lacks the conditioning property)."""


class StrategyCapError(ValueError):
    pass


DEFAULT_STRATEGY_CAP = 2_000_000


def is_ns_null(e: BellExpression) -> bool:
    """True when ``e`` vanishes on every normalized no-signaling point."""
    t = to_symmetric(e)
    nu = t.nu_mask()
    return all(v == 0 for v in t.gamma[~nu])


# -- steps -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Step:
    def lift(self, e: BellExpression) -> BellExpression:
        raise NotImplementedError

    def value_map(self) -> tuple[Fraction, Fraction]:
        """``(alpha, beta)`` with ``value(before) = alpha * value(after) + beta``."""
        return Fraction(1), Fraction(0)


@dataclass(frozen=True, eq=False)
class Project(Step):
    shift: Fraction
    residual: BellExpression

    def lift(self, e):
        return e + mu_tensor(e.scenario) * self.shift + self.residual

    def value_map(self):
        return Fraction(1), self.shift


@dataclass(frozen=True, eq=False)
class Reorder(Step):
    rmap: ReorderMap

    def lift(self, e):
        return reorder(e, self.rmap.inverse())


@dataclass(frozen=True, eq=False)
class Scale(Step):
    factor: Fraction

    def lift(self, e):
        return e * (1 / self.factor)

    def value_map(self):
        return 1 / self.factor, Fraction(0)


@dataclass(frozen=True, eq=False)
class Negate(Step):
    def lift(self, e):
        return -e

    def value_map(self):
        return Fraction(-1), Fraction(0)


@dataclass(frozen=True, eq=False)
class RemoveParty(Step):
    party: int
    signature: tuple[int, ...]

    def lift(self, e):
        parties = list(e.scenario.parties)
        parties.insert(self.party, self.signature)
        big = Scenario(parties)
        mu = np.array(party_basis(self.signature).vectors[0], dtype=object)
        t = np.multiply.outer(e.tensor(), mu)          # new axis last
        t = np.moveaxis(t, -1, self.party)
        return BellExpression.from_tensor(big, t)


@dataclass(frozen=True, eq=False)
class RemoveSetting(Step):
    party: int
    setting: int            # 0-based
    outcomes: int
    residual: BellExpression

    def lift(self, e):
        parties = list(e.scenario.parties)
        p = list(parties[self.party])
        p.insert(self.setting, self.outcomes)
        parties[self.party] = tuple(p)
        big = Scenario(parties)
        pos = party_offsets(p)[self.setting]
        t = e.tensor()
        shape = list(t.shape)
        shape[self.party] = self.outcomes
        zeros = np.zeros(shape, dtype=object) + Fraction(0)
        t = np.concatenate([np.take(t, range(pos), axis=self.party), zeros,
                            np.take(t, range(pos, t.shape[self.party]), axis=self.party)],
                           axis=self.party)
        return BellExpression.from_tensor(big, t) + self.residual


@dataclass(frozen=True, eq=False)
class MergeOutcomes(Step):
    party: int
    setting: int            # 0-based
    kept: int               # 0-based outcome label kept
    removed: int            # 0-based outcome label merged into ``kept``

    def lift(self, e):
        parties = list(e.scenario.parties)
        p = list(parties[self.party])
        p[self.setting] += 1
        parties[self.party] = tuple(p)
        big = Scenario(parties)
        off = party_offsets(p)[self.setting]
        t = e.tensor()
        src = np.take(t, [off + self.kept], axis=self.party)
        ins = off + self.removed
        t = np.concatenate([np.take(t, range(ins), axis=self.party), src,
                            np.take(t, range(ins, t.shape[self.party]), axis=self.party)],
                           axis=self.party)
        return BellExpression.from_tensor(big, t)


@dataclass(frozen=True, eq=False)
class Relabel(Step):
    witness: np.ndarray

    def lift(self, e):
        return act(self.witness, e)


def _lift_all(steps: Sequence[Step], e: BellExpression) -> BellExpression:
    for st in reversed(steps):
        e = st.lift(e)
    return e


def _value_map(steps: Sequence[Step]) -> tuple[Fraction, Fraction]:
    a, b = Fraction(1), Fraction(0)
    for st in steps:
        sa, sb = st.value_map()
        a, b = a * sa, a * sb + b
    return a, b


# -- superfluous structure ---------------------------------------------------------

def _axis_kinds(party):
    return party_basis(tuple(party)).labels


def _find_superfluous(e: BellExpression, t: SymmetricTensor):
    """First superfluous party, setting or outcome pair of a projected expression."""
    g = t.gamma
    s = e.scenario
    nz = np.array([v != 0 for v in g.ravel()]).reshape(g.shape)
    for i, party in enumerate(s.parties):
        others = tuple(a for a in range(len(party)) if a != i)
        used = nz.any(axis=tuple(ax for ax in range(g.ndim) if ax != i)) if g.ndim > 1 else nz
        labels = _axis_kinds(party)
        if not any(used[j] for j, lab in enumerate(labels) if lab[0] != MU):
            if s.n_parties > 1:
                return ("party", i)
    for i, party in enumerate(s.parties):
        if len(party) < 2:
            continue
        used = nz.any(axis=tuple(ax for ax in range(g.ndim) if ax != i)) if g.ndim > 1 else nz
        labels = _axis_kinds(party)
        for xi in range(len(party)):
            if not any(used[j] for j, lab in enumerate(labels)
                       if lab[0] == LAMBDA and lab[2] == xi + 1):
                return ("setting", i, xi)
    c = e.tensor()
    for i, party in enumerate(s.parties):
        offs = party_offsets(party)
        for x, k in enumerate(party):
            if k < 3:
                continue
            for a1 in range(k):
                for a2 in range(a1 + 1, k):
                    s1 = np.take(c, offs[x] + a1, axis=i)
                    s2 = np.take(c, offs[x] + a2, axis=i)
                    if np.all(s1 == s2):
                        return ("outcome", i, x, a1, a2)
    return None


def _remove(e: BellExpression, t: SymmetricTensor, op) -> tuple[BellExpression, Step]:
    s = e.scenario
    kind = op[0]
    if kind == "party":
        i = op[1]
        small = Scenario([p for j, p in enumerate(s.parties) if j != i])
        gs = np.take(t.gamma, 0, axis=i)
        out = from_symmetric(SymmetricTensor(small, gs))
        step = RemoveParty(i, s.parties[i])
        assert step.lift(out) == e
        return out, step
    if kind == "setting":
        _, i, xi = op
        party = s.parties[i]
        new_party = tuple(k for x, k in enumerate(party) if x != xi)
        labels = _axis_kinds(party)
        keep = [0] + [j for j, lab in enumerate(labels)
                      if lab[0] == LAMBDA and lab[2] != xi + 1]
        gs = np.take(t.gamma, keep, axis=i)
        pad = len(new_party) - 1
        if pad:
            shape = list(gs.shape)
            shape[i] = pad
            gs = np.concatenate([gs, np.zeros(shape, dtype=object) + Fraction(0)], axis=i)
        small = Scenario([new_party if j == i else p for j, p in enumerate(s.parties)])
        out = from_symmetric(SymmetricTensor(small, gs))
        bare = RemoveSetting(i, xi, party[xi], BellExpression.zero(s))
        residual = e - bare.lift(out)
        if not is_ns_null(residual):
            raise AssertionError("setting removal changed the expression on no-signaling points")
        return out, RemoveSetting(i, xi, party[xi], residual)
    if kind == "outcome":
        _, i, x, a1, a2 = op
        party = list(s.parties[i])
        off = party_offsets(party)[x]
        party[x] -= 1
        small = Scenario([tuple(party) if j == i else p for j, p in enumerate(s.parties)])
        c = e.tensor()
        keep = [j for j in range(c.shape[i]) if j != off + a2]
        out = BellExpression.from_tensor(small, np.take(c, keep, axis=i))
        step = MergeOutcomes(i, x, a1, a2)
        assert step.lift(out) == e
        return out, step
    raise ValueError(op)


def _project_step(e: BellExpression) -> tuple[BellExpression, SymmetricTensor, Project]:
    t = to_symmetric(e)
    tp, _ = project(t)
    shift = t.normalization
    out = from_symmetric(tp)
    residual = e - out - mu_tensor(e.scenario) * shift
    if not is_ns_null(residual):
        raise AssertionError("projection residual is not no-signaling null")
    return out, tp, Project(shift, residual)


def _reduce(e: BellExpression) -> tuple[BellExpression, list[Step], SymmetricTensor]:
    """Project, reorder, normalize and strip superfluous structure until stable."""
    steps: list[Step] = []
    cur = e
    while True:
        cur, tp, st = _project_step(cur)
        steps.append(st)
        if tp.is_zero():
            raise TrivialExpressionError("expression is constant on no-signaling correlations")
        target, rmap = canonical_scenario(cur.scenario)
        if not rmap.is_identity():
            cur = reorder(cur, rmap)
            tp = to_symmetric(cur)
            steps.append(Reorder(rmap))
        cur2, _, sc = normalize_integer(cur)
        if sc != 1:
            cur = cur2
            tp = tp * sc
            steps.append(Scale(sc))
        op = _find_superfluous(cur, tp)
        if op is None:
            return cur, steps, tp
        cur, st = _remove(cur, tp, op)
        steps.append(st)


def remove_superfluous(e: BellExpression) -> tuple[BellExpression, list[Step]]:
    """Smallest-scenario form of ``e`` with the list of steps that undo the reduction."""
    out, steps, _ = _reduce(e)
    return out, steps


# -- composite expressions ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Split:
    """``e == kappa * mu...mu + scale * place(factors[0] (x) factors[1])``."""
    kappa: Fraction
    scale: Fraction
    factors: tuple[BellExpression, BellExpression]
    partition: tuple[tuple[int, ...], tuple[int, ...]]

    def recompose(self, scenario: Scenario) -> BellExpression:
        return _place(scenario, self.kappa, self.scale, self.factors, self.partition)


def _place(scenario: Scenario, kappa, scale, factors, partition) -> BellExpression:
    prod_e = tensor_all(list(factors))
    order = [p for block in partition for p in block]
    # axis j of prod_e is party order[j]; bring parties back to scenario order
    back = [order.index(p) for p in range(len(order))]
    placed = permute_parties(prod_e, back)
    assert placed.scenario == scenario
    return placed * scale + mu_tensor(scenario) * kappa


def _bipartitions(n: int):
    """Subsets containing party 0, smaller side first."""
    rest = list(range(1, n))
    cands = []
    for r in range(0, n - 1):
        for comb in itertools.combinations(rest, r):
            A = (0,) + comb
            B = tuple(p for p in range(n) if p not in A)
            cands.append((min(len(A), len(B)), A, B))
    cands.sort(key=lambda c: c[0])
    return [(A, B) for _, A, B in cands]


def _try_split(t: SymmetricTensor, A: tuple[int, ...], B: tuple[int, ...]):
    s = t.scenario
    sizes = s.party_sizes()
    g = np.transpose(t.gamma, A + B)
    ra, rb = prod(sizes[p] for p in A), prod(sizes[p] for p in B)
    M = g.reshape((ra, rb), order="F")
    sub = M[1:, 1:]
    nz = np.argwhere(np.array([[v != 0 for v in row] for row in sub], dtype=bool))
    if not len(nz):
        return None
    p, q = int(nz[0][0]) + 1, int(nz[0][1]) + 1
    a = M[:, q].copy()
    b = M[p, :] / M[p, q]
    outer = np.multiply.outer(a, b)
    diff = M - outer
    diff[0, 0] = 0
    if any(v != 0 for v in diff.ravel()):
        return None
    kappa = M[0, 0] - a[0] * b[0]
    return kappa, a, b


def _oriented_key(e: BellExpression):
    red, _, _ = _reduce(e)
    m, _ = lex_min(red, chain_for(red.scenario))
    return (red.scenario.parties, tuple(m.coefficients))


def _orient(e: BellExpression) -> tuple[BellExpression, int]:
    if _oriented_key(-e) < _oriented_key(e):
        return -e, -1
    return e, 1


def split_composite(e: BellExpression) -> Split | None:
    """Split a non-i/o-lifted expression across the first admissible bipartition.

    The input may carry a normalization component but no terms that vanish on
    no-signaling points (project first).
    """
    t = to_symmetric(e)
    if any(v != 0 for v in t.gamma[t.nu_mask()]):
        raise ValueError("split_composite expects an expression without no-signaling-null terms")
    s = e.scenario
    for A, B in _bipartitions(s.n_parties):
        res = _try_split(t, A, B)
        if res is None:
            continue
        kappa, a, b = res
        factors, scale = [], Fraction(1)
        for block, vec in ((A, a), (B, b)):
            sub = s.subscenario(block)
            f = from_symmetric(SymmetricTensor(sub, vec.reshape(sub.party_sizes(), order="F")))
            f, _, sc = normalize_integer(f)
            f, sign = _orient(f)
            factors.append(f)
            scale /= sc * sign
        split = Split(to_fraction(kappa), scale, tuple(factors), (A, B))
        if split.recompose(s) != e:
            raise AssertionError("composite split does not recompose")
        return split
    return None


# -- decomposition tree ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Leaf:
    steps: tuple[Step, ...]
    canonical: OrientedExpression
    rank: int

    @property
    def expression(self) -> BellExpression:
        return self.canonical.expression

    @property
    def key(self) -> str:
        from .compendium import canonical_key
        return canonical_key(self.expression)

    def _affine(self):
        return _value_map(self.steps)

    @property
    def sign(self) -> int:
        return 1 if self._affine()[0] > 0 else -1

    @property
    def scale(self) -> Fraction:
        """Positive factor with ``canonical = sign * scale * (input - shift)`` in value."""
        return 1 / abs(self._affine()[0])

    @property
    def shift(self) -> Fraction:
        return self._affine()[1]

    @property
    def witness(self) -> np.ndarray:
        for st in self.steps:
            if isinstance(st, Relabel):
                return st.witness
        return np.arange(len(self.expression))

    @property
    def reorderings(self) -> list[ReorderMap]:
        return [st.rmap for st in self.steps if isinstance(st, Reorder)]

    @property
    def removed(self) -> list[Step]:
        return [st for st in self.steps if isinstance(st, (RemoveParty, RemoveSetting, MergeOutcomes))]

    def leaves(self) -> list["Leaf"]:
        return [self]

    def recompose(self) -> BellExpression:
        return _lift_all(self.steps, self.expression)

    def sort_key(self):
        return (0, self.expression.scenario.parties, tuple(self.expression.coefficients))

    def describe(self, indent: int = 0) -> str:
        pad = "  " * indent
        coeffs = " ".join(str(c) for c in self.expression.coefficients)
        bounds = ", ".join(f"{k} {v.value}" for k, v in self.canonical.bounds.items())
        return (f"{pad}leaf {self.expression.scenario} rank {self.rank} sign {self.sign:+d} "
                f"scale {self.scale} shift {self.shift}\n{pad}  [{coeffs}]"
                + (f"\n{pad}  bounds: {bounds}" if bounds else ""))

    def to_dict(self) -> dict:
        return {
            "type": "leaf",
            "scenario": str(self.expression.scenario),
            "coefficients": [str(c) for c in self.expression.coefficients],
            "bounds": {k: str(v.value) for k, v in self.canonical.bounds.items()},
            "sign": self.sign, "scale": str(self.scale), "shift": str(self.shift),
            "rank": self.rank,
            "witness": [int(v) + 1 for v in self.witness],
        }


@dataclass(frozen=True, eq=False)
class Product:
    steps: tuple[Step, ...]
    scenario: Scenario          # scenario of the stage expression
    kappa: Fraction
    scale: Fraction
    children: tuple
    partition: tuple[tuple[int, ...], ...]

    def leaves(self) -> list[Leaf]:
        return [lf for ch in self.children for lf in ch.leaves()]

    def recompose(self) -> BellExpression:
        stage = _place(self.scenario, self.kappa, self.scale,
                       [ch.recompose() for ch in self.children], self.partition)
        return _lift_all(self.steps, stage)

    def sort_key(self):
        return (1, tuple(ch.sort_key() for ch in self.children), self.kappa)

    def describe(self, indent: int = 0) -> str:
        pad = "  " * indent
        head = (f"{pad}product {self.scenario} kappa {self.kappa} scale {self.scale} "
                f"parties {[[p + 1 for p in b] for b in self.partition]}")
        return "\n".join([head] + [ch.describe(indent + 1) for ch in self.children])

    def to_dict(self) -> dict:
        return {"type": "product", "scenario": str(self.scenario), "kappa": str(self.kappa),
                "scale": str(self.scale),
                "partition": [[p + 1 for p in b] for b in self.partition],
                "children": [ch.to_dict() for ch in self.children]}


DecompositionTree = Leaf | Product


def _decompose_expr(e: BellExpression, bounds=None):
    cur, steps, tp = _reduce(e)
    split = split_composite(cur)
    if split is None:
        chain = chain_for(cur.scenario)
        m, w = lex_min(cur, chain)
        rank = rank_of(cur, chain)
        steps.append(Relabel(w))
        a, b = _value_map(steps)
        cb = {}
        for name, bd in (bounds or {}).items():
            if a > 0:
                cb[name] = type(bd)((bd.value - b) / a, bd.conditional)
        return Leaf(tuple(steps), OrientedExpression(m, cb), rank)
    children, partition = [], []
    scale = split.scale
    kappa = split.kappa
    for f, block in zip(split.factors, split.partition):
        child = _decompose_expr(f)
        if isinstance(child, Product) and child.kappa == 0 and _trivial_steps(child.steps):
            # pure tensor factor: flatten into this product
            scale *= child.scale
            for gch, gpart in zip(child.children, child.partition):
                children.append(gch)
                partition.append(tuple(block[p] for p in gpart))
        else:
            children.append(child)
            partition.append(tuple(block))
    order = sorted(range(len(children)), key=lambda i: children[i].sort_key())
    return Product(tuple(steps), cur.scenario, kappa, scale,
                   tuple(children[i] for i in order), tuple(partition[i] for i in order))


def _trivial_steps(steps) -> bool:
    """Steps that leave an integer, projected, canonical-scenario expression unchanged."""
    for st in steps:
        if isinstance(st, Project) and (st.shift != 0 or not st.residual.is_zero()):
            return False
        if isinstance(st, Scale) and st.factor != 1:
            return False
        if not isinstance(st, (Project, Scale)):
            return False
    return True




def decompose(oe: OrientedExpression | BellExpression) -> Leaf | Product:
    """Canonical decomposition tree; ``tree.recompose()`` reproduces the input exactly."""
    if isinstance(oe, BellExpression):
        oe = OrientedExpression(oe)
    tree = _decompose_expr(oe.expression, oe.bounds)
    if tree.recompose() != oe.expression:
        raise AssertionError("decomposition does not recompose to the input")
    return tree


def canonical_form(oe: OrientedExpression | BellExpression) -> OrientedExpression:
    """Canonical oriented expression of a non-composite input."""
    tree = decompose(oe)
    if not isinstance(tree, Leaf):
        raise ValueError("expression is composite; use decompose()")
    return tree.canonical


# -- bounds ------------------------------------------------------------------------

def compose_bounds(a: tuple, b: tuple, kappa=0, conditional: bool = True) -> tuple[Fraction, Fraction]:
    """Lower and upper bound of ``kappa + A (x) B`` from ``(lower, upper)`` of each factor."""
    if not conditional:
        raise NotInheritableError("bounds of this set are not inherited under composition")
    if a[0] is None or b[0] is None or a[1] is None or b[1] is None:
        raise ValueError("composition needs both lower and upper bounds of each factor")
    prods = [to_fraction(x) * to_fraction(y) for x in a for y in b]
    k = to_fraction(kappa)
    return k + min(prods), k + max(prods)


def compose_bound_sets(a: Mapping[str, tuple], b: Mapping[str, tuple], kappa=0,
                       conditional: Mapping[str, bool] | None = None) -> dict[str, tuple]:
    from .expr import CONDITIONAL_BOUND_SETS
    flags = dict(CONDITIONAL_BOUND_SETS)
    flags.update(conditional or {})
    out = {}
    for name in sorted(set(a) & set(b)):
        out[name] = compose_bounds(a[name], b[name], kappa, flags.get(name, False))
    return out


def _strategy_matrix(party: Sequence[int]) -> np.ndarray:
    """Rows: deterministic strategies of a party as 0/1 vectors over its (a, x) pairs."""
    offs = party_offsets(party)
    rows = []
    for outs in itertools.product(*[range(k) for k in party]):
        v = np.zeros(sum(party), dtype=np.int64)
        for x, a in enumerate(outs):
            v[offs[x] + a] = 1
        rows.append(v)
    return np.array(rows)


def strategy_count(s: Scenario) -> int:
    return prod(prod(p) for p in s.parties)


def _integer_tensor(e: BellExpression) -> tuple[np.ndarray, int]:
    den = 1
    for c in e.coefficients:
        den = den * c.denominator // np.gcd(den, c.denominator)
    ints = [int(c * den) for c in e.coefficients]
    big = max((abs(v) for v in ints), default=0) * strategy_count(e.scenario) > 2 ** 62
    arr = np.array(ints, dtype=object if big else np.int64)
    return arr.reshape(e.scenario.party_sizes(), order="F"), den


def _all_values(e: BellExpression) -> tuple[np.ndarray, int]:
    t, den = _integer_tensor(e)
    for i, party in enumerate(e.scenario.parties):
        S = _strategy_matrix(party).astype(t.dtype)
        t = np.moveaxis(np.tensordot(S, t, axes=([1], [i])), 0, i)
    return t, den


def local_bound(e: BellExpression, cap: int = DEFAULT_STRATEGY_CAP) -> Fraction:
    """Maximum over deterministic local strategies (vertices of the local polytope)."""
    s = e.scenario
    if strategy_count(s) > cap:
        raise StrategyCapError(f"{strategy_count(s)} deterministic strategies exceed the cap {cap}")
    t, den = _integer_tensor(e)
    n = s.n_parties
    # enumerate all parties but the last; maximize the last party setting by setting
    for i in range(n - 1):
        S = _strategy_matrix(s.parties[i]).astype(t.dtype)
        t = np.moveaxis(np.tensordot(S, t, axes=([1], [i])), 0, i)
    last = s.parties[-1]
    offs = party_offsets(last)
    total = 0
    for x, k in enumerate(last):
        block = np.take(t, range(offs[x], offs[x] + k), axis=n - 1)
        total = total + block.max(axis=n - 1)
    return Fraction(int(np.max(total)), den)


def facet_check(e: BellExpression, bound, cap: int = DEFAULT_STRATEGY_CAP) -> bool:
    """Whether ``e <= bound`` is a facet of the local polytope."""
    s = e.scenario
    beta = to_fraction(bound)
    lb = local_bound(e, cap)
    if lb != beta:
        raise ValueError(f"bound {beta} is not the local bound {lb}; facet question is ill-posed")
    vals, den = _all_values(e)
    target = beta * den
    hits = np.argwhere(vals == int(target)) if target.denominator == 1 else []
    mats = [_strategy_matrix(p) for p in s.parties]
    points = []
    for idx in hits:
        vecs = [mats[i][j] for i, j in enumerate(idx)]
        v = vecs[-1]
        for u in reversed(vecs[:-1]):
            v = np.multiply.outer(v, u).ravel()
        points.append(v)
    if not points:
        return False
    p0 = points[0]
    diffs = [[int(x) for x in (p - p0)] for p in points[1:]]
    dim = _linalg.rank(diffs) if diffs else 0
    return dim == s.ns_dimension() - 1


def compose_facets(eA: BellExpression, betaA, eB: BellExpression, betaB) -> OrientedExpression:
    """``-(eA - betaA mu) (x) (eB - betaB mu) <= 0`` built from two facets."""
    fa = eA - mu_tensor(eA.scenario) * to_fraction(betaA)
    fb = eB - mu_tensor(eB.scenario) * to_fraction(betaB)
    from .expr import tensor
    return OrientedExpression(-tensor(fa, fb), {"local": 0})
