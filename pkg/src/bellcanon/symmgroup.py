"""Relabeling groups, stabilizer chains and minimal images.

Permutations are 0-based integer arrays ``g`` with ``g[i]`` the image of
point ``i``; products are right actions, ``mul(g, h)[i] == h[g[i]]``.
A permutation acts on a coefficient vector by moving entry ``i`` to
position ``g[i]`` (``act``).

Minimization works on the *image* ``c[g]`` (that is ``act(inverse(g), c)``):
the witness ``g`` returned by :func:`lex_min` satisfies
``act(inverse(g), e) == minimal``.

Two minimal-image searches are provided. ``filter`` walks the stabilizer
chain point by point, keeping the candidates whose image is smallest on the
points fixed so far. ``matrix`` splits the indices into the first party's
(outcome, setting) rows and the remaining parties' columns and minimizes
column by column, exploiting the row group explicitly; it is run once per
admissible first party.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations as _itperms
from typing import Sequence

import numpy as np

from .expr import BellExpression, local_pairs, party_offsets
from .scenario import Scenario, is_canonical

INDEX = np.int32


class ChainError(RuntimeError):
    """Internal inconsistency while building or using a stabilizer chain."""


# -- permutation helpers -------------------------------------------------------

def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=INDEX)


def mul(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Right-action product: apply ``g`` first, then ``h``."""
    return h[g]


def inverse(g: np.ndarray) -> np.ndarray:
    inv = np.empty_like(g)
    inv[g] = np.arange(len(g), dtype=g.dtype)
    return inv


def is_identity(g: np.ndarray) -> bool:
    return bool(np.all(g == np.arange(len(g))))


def act(g: np.ndarray, e: BellExpression) -> BellExpression:
    """Relabeled expression: coefficient at ``i`` moves to ``g[i]``."""
    if len(g) != len(e):
        raise ValueError(f"permutation of degree {len(g)} cannot act on dimension {len(e)}")
    out = np.empty(len(e), dtype=object)
    out[g] = e.coefficients
    return BellExpression(e.scenario, out)


# -- relabelings -------------------------------------------------------------------

@dataclass(frozen=True)
class Relabeling:
    """Structured relabeling, 0-based.

    ``parties[p]`` is the new position of party ``p``; ``settings[p][x]`` the
    new label of setting ``x`` of party ``p``; ``outcomes[p][x][a]`` the new
    label of outcome ``a`` of that setting.
    """
    parties: tuple[int, ...]
    settings: tuple[tuple[int, ...], ...]
    outcomes: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def identity(cls, s: Scenario) -> "Relabeling":
        return cls(tuple(range(s.n_parties)),
                   tuple(tuple(range(len(p))) for p in s.parties),
                   tuple(tuple(tuple(range(k)) for k in p) for p in s.parties))

    def check(self, s: Scenario) -> None:
        if sorted(self.parties) != list(range(s.n_parties)):
            raise ValueError("party map is not a bijection")
        for p, party in enumerate(s.parties):
            if s.parties[self.parties[p]] != party:
                raise ValueError(f"party {p + 1} cannot move onto a party with another signature")
            sm = self.settings[p]
            if sorted(sm) != list(range(len(party))):
                raise ValueError("setting map is not a bijection")
            for x, k in enumerate(party):
                if party[sm[x]] != k:
                    raise ValueError("settings with different outcome counts cannot be exchanged")
                if sorted(self.outcomes[p][x]) != list(range(k)):
                    raise ValueError("outcome map is not a bijection")

    def to_permutation(self, s: Scenario) -> np.ndarray:
        self.check(s)
        sizes = s.party_sizes()
        strides = np.cumprod((1,) + sizes[:-1])
        D = s.full_dimension()
        idx = np.arange(D)
        out = np.zeros(D, dtype=np.int64)
        rem = idx.copy()
        for p, party in enumerate(s.parties):
            loc = rem % sizes[p]
            rem //= sizes[p]
            offs = party_offsets(party)
            lmap = np.empty(sizes[p], dtype=np.int64)
            for li, (a, x) in enumerate(local_pairs(party)):
                nx = self.settings[p][x]
                lmap[li] = offs[nx] + self.outcomes[p][x][a]
            out += lmap[loc] * strides[self.parties[p]]
        return out.astype(INDEX)


def _party_transposition(s: Scenario, p: int, q: int) -> np.ndarray:
    r = Relabeling.identity(s)
    pm = list(r.parties)
    pm[p], pm[q] = q, p
    return Relabeling(tuple(pm), r.settings, r.outcomes).to_permutation(s)


def _runs(seq: Sequence) -> list[int]:
    out, prev, n = [], object(), 0
    for v in seq:
        if v == prev:
            n += 1
        else:
            if n:
                out.append(n)
            prev, n = v, 1
    if n:
        out.append(n)
    return out


def group_order(s: Scenario) -> int:
    """Order of the relabeling group of a canonical scenario."""
    order = 1
    for r in _runs(s.parties):
        order *= math.factorial(r)
    for party in s.parties:
        for r in _runs(party):
            order *= math.factorial(r)
        for k in party:
            order *= math.factorial(k)
    return order


def relabeling_generators(s: Scenario) -> list[np.ndarray]:
    """Adjacent transpositions of outcomes, equal-size settings and identical parties."""
    gens = []
    base = Relabeling.identity(s)
    for p, party in enumerate(s.parties):
        for x, k in enumerate(party):
            for a in range(k - 1):
                outs = [list(map(list, po)) for po in base.outcomes]
                outs[p][x][a], outs[p][x][a + 1] = a + 1, a
                gens.append(Relabeling(base.parties, base.settings,
                                       tuple(tuple(map(tuple, po)) for po in outs)).to_permutation(s))
        for x in range(len(party) - 1):
            if party[x] == party[x + 1]:
                sets = [list(ps) for ps in base.settings]
                sets[p][x], sets[p][x + 1] = x + 1, x
                gens.append(Relabeling(base.parties, tuple(map(tuple, sets)),
                                       base.outcomes).to_permutation(s))
    for p in range(s.n_parties - 1):
        if s.parties[p] == s.parties[p + 1]:
            gens.append(_party_transposition(s, p, p + 1))
    return gens


def relabeling_group(s: Scenario) -> tuple[list[np.ndarray], int]:
    if not is_canonical(s):
        raise ValueError(f"scenario {s} is not in canonical form")
    return relabeling_generators(s), group_order(s)


# -- stabilizer chains -------------------------------------------------------------

@dataclass
class _Level:
    point: int
    gens: list
    orbit: np.ndarray = None      # orbit points, base point first
    reps: np.ndarray = None       # reps[t][point] == orbit[t]
    where: dict = None

    def rebuild(self, degree: int) -> None:
        pts = [self.point]
        reps = [identity(degree)]
        where = {self.point: 0}
        i = 0
        while i < len(pts):
            q, u = pts[i], reps[i]
            for s in self.gens:
                r = int(s[q])
                if r not in where:
                    where[r] = len(pts)
                    pts.append(r)
                    reps.append(s[u])
            i += 1
        self.orbit = np.array(pts, dtype=INDEX)
        self.reps = np.array(reps, dtype=INDEX)
        self.where = where


@dataclass(frozen=True, eq=False)
class StabilizerChain:
    """Stabilizer chain with base points in increasing order.

    ``transversals[j]`` holds coset representatives ``u`` of level ``j`` as rows;
    ``u[base[j]]`` runs through the basic orbit ``orbits[j]``, identity first.
    ``orders[j]`` is the order of the group fixing ``base[:j]``.
    """
    degree: int
    base: tuple[int, ...]
    orbits: tuple[np.ndarray, ...]
    transversals: tuple[np.ndarray, ...]
    orders: tuple[int, ...]
    scenario: Scenario | None = None
    generators: tuple = field(default=(), repr=False)

    @property
    def order(self) -> int:
        return self.orders[0] if self.orders else 1

    def subgroup_order(self, level: int) -> int:
        """Order of the subgroup fixing the first ``level`` base points."""
        return self.orders[level] if level < len(self.orders) else 1

    def windows(self) -> list[tuple[int, int]]:
        ends = list(self.base[1:]) + [self.degree]
        return list(zip(self.base, ends))

    def sift(self, g: np.ndarray) -> tuple[list[int], bool]:
        """Decompose ``g`` as ``u_L ... u_1``; returns transversal indices and membership."""
        h = np.array(g, dtype=INDEX)
        idx = []
        for b, orb, reps in zip(self.base, self.orbits, self.transversals):
            img = int(h[b])
            hits = np.nonzero(orb == img)[0]
            if not len(hits):
                return idx, False
            t = int(hits[0])
            idx.append(t)
            h = inverse(reps[t])[h]
        return idx, is_identity(h)

    def contains(self, g: np.ndarray) -> bool:
        return self.sift(g)[1]

    def element(self, indices: Sequence[int]) -> np.ndarray:
        """``u_L ... u_1`` (right action) from transversal indices."""
        g = identity(self.degree)
        for j, t in enumerate(indices):
            g = g[self.transversals[j][t]]
        return g

    def elements(self):
        """Iterate over all group elements (small groups only)."""
        def rec(j, g):
            if j == len(self.base):
                yield g
                return
            for u in self.transversals[j]:
                yield from rec(j + 1, g[u])
        yield from rec(0, identity(self.degree))


def _first_moved(g: np.ndarray) -> int:
    nz = np.nonzero(g != np.arange(len(g)))[0]
    return int(nz[0]) if len(nz) else -1


def build_chain(generators: Sequence[np.ndarray], known_order: int | None = None,
                degree: int | None = None, scenario: Scenario | None = None) -> StabilizerChain:
    """Schreier-Sims with base ``0, 1, 2, ...``; stops once ``known_order`` is reached.

    Points whose basic orbit is trivial are left out of the base. When
    ``known_order`` is given the final order is checked against it.
    """
    gens = [np.asarray(g, dtype=INDEX) for g in generators]
    if degree is None:
        if not gens:
            raise ValueError("degree is required for an empty generating set")
        degree = len(gens[0])
    gens = [g for g in gens if not is_identity(g)]
    levels: dict[int, _Level] = {}

    def level_points() -> list[int]:
        return sorted(levels)

    def add_strong(g: np.ndarray) -> int:
        f = _first_moved(g)
        if f not in levels:
            levels[f] = _Level(f, [])
        for p, lev in levels.items():
            if p <= f:
                lev.gens.append(g)
        # a new level inherits generators that fix everything below it
        lev = levels[f]
        if len(lev.gens) == 1:
            for other in strong:
                if other is not g and _first_moved(other) > f:
                    lev.gens.append(other)
        strong.append(g)
        for p in level_points():
            if p <= f:
                levels[p].rebuild(degree)
        return f

    def order() -> int:
        return math.prod(len(lev.orbit) for lev in levels.values())

    def sift(h: np.ndarray) -> np.ndarray:
        while True:
            f = _first_moved(h)
            if f < 0:
                return h
            lev = levels.get(f)
            if lev is None:
                return h
            t = lev.where.get(int(h[f]))
            if t is None:
                return h
            h = inverse(lev.reps[t])[h]

    strong: list[np.ndarray] = []
    for g in gens:
        r = sift(g)
        if _first_moved(r) >= 0:
            add_strong(r)

    done = known_order is not None and order() == known_order
    if not done:
        pts = level_points()
        i = len(pts) - 1
        while i >= 0 and not done:
            p = pts[i]
            lev = levels[p]
            added_at = None
            for t, q in enumerate(lev.orbit):
                u = lev.reps[t]
                for s in list(lev.gens):
                    img = int(s[q])
                    v = lev.reps[lev.where[img]]
                    # Schreier generator u s v^-1 fixes p
                    sg = inverse(v)[s[u]]
                    r = sift(sg)
                    if _first_moved(r) >= 0:
                        added_at = add_strong(r)
                        break
                if added_at is not None:
                    break
            if known_order is not None and order() == known_order:
                done = True
                break
            if added_at is not None:
                pts = level_points()
                i = pts.index(added_at)
                # levels between p and added_at may need rechecking; restart below added_at
                continue
            i -= 1

    pts = level_points()
    orbits = tuple(levels[p].orbit for p in pts)
    reps = tuple(levels[p].reps for p in pts)
    sizes = [len(o) for o in orbits]
    orders = tuple(math.prod(sizes[j:]) for j in range(len(sizes)))
    chain = StabilizerChain(degree, tuple(pts), orbits, reps, orders, scenario, tuple(gens))
    if known_order is not None and chain.order != known_order:
        raise ChainError(f"stabilizer chain has order {chain.order}, expected {known_order}")
    return chain


@lru_cache(maxsize=64)
def chain_for(s: Scenario) -> StabilizerChain:
    """Stabilizer chain of the relabeling group of a canonical scenario (cached)."""
    gens, order = relabeling_group(s)
    return build_chain(gens, order, degree=s.full_dimension(), scenario=s)


# -- exact values as order-preserving integers -------------------------------------

def value_ranks(values: Sequence[Fraction]) -> tuple[np.ndarray, list[Fraction]]:
    distinct = sorted(set(values))
    pos = {v: i for i, v in enumerate(distinct)}
    return np.array([pos[v] for v in values], dtype=np.int64), distinct


def _lexmin_rows(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Smallest row of a 2-d array and the mask of rows equal to it."""
    mask = np.ones(a.shape[0], dtype=bool)
    for c in range(a.shape[1]):
        col = a[:, c]
        m = col[mask].min()
        mask &= col == m
    return a[np.argmax(mask)], mask


# -- Algorithm: point-by-point candidate filtering ---------------------------------

def _minimal_image(c: np.ndarray, chain: StabilizerChain, start: int = 0):
    """Minimal image of ``c`` under the subgroup fixing ``base[:start]``.

    Returns ``(image, g, count)`` with ``image == c[g]`` lexicographically
    minimal and ``count`` the number of group elements mapping ``c`` onto it
    (the order of the stabilizer of ``c``).
    """
    D = chain.degree
    cands = identity(D)[None, :]
    mults = [1]
    windows = chain.windows()
    for j in range(start, len(chain.base)):
        lo, hi = windows[j]
        U = chain.transversals[j]
        # values c[g[u[p]]] for p in the window, all candidate/transversal pairs
        sub = U[:, lo:hi]                                  # T x w
        vals = c[cands[:, sub]]                             # K x T x w
        K, T = vals.shape[0], vals.shape[1]
        flat = vals.reshape(K * T, hi - lo)
        _, mask = _lexmin_rows(flat)
        survivors = np.nonzero(mask)[0]
        seen: dict[bytes, int] = {}
        new_c, new_m = [], []
        for s_ in survivors:
            k, t = divmod(int(s_), T)
            g = cands[k][U[t]]
            key = c[g].tobytes()
            at = seen.get(key)
            if at is None:
                seen[key] = len(new_c)
                new_c.append(g)
                new_m.append(mults[k])
            else:
                new_m[at] += mults[k]
        cands = np.array(new_c, dtype=INDEX)
        mults = new_m
    g = cands[0]
    return c[g], g, sum(mults)


# -- Algorithm: row/column matrix variant ------------------------------------------

MATRIX_ROW_GROUP_CAP = 400_000


@lru_cache(maxsize=64)
def _row_group_elements(party: tuple[int, ...]) -> np.ndarray:
    """All relabelings of one party's (outcome, setting) pairs, identity first."""
    offs = party_offsets(party)
    size = sum(party)
    # settings may only be exchanged within runs of equal outcome counts
    runs, start = [], 0
    for r in _runs(party):
        runs.append(list(range(start, start + r)))
        start += r
    setting_perms = [[]]
    for run in runs:
        setting_perms = [sp + list(p) for sp in setting_perms for p in _itperms(run)]
    outcome_perms = [[]]
    for k in party:
        outcome_perms = [op + [p] for op in outcome_perms for p in _itperms(range(k))]
    elems = []
    for sp in setting_perms:
        for op in outcome_perms:
            g = np.empty(size, dtype=INDEX)
            for x, k in enumerate(party):
                for a in range(k):
                    # image convention: row i of the image reads row g[i] of the source
                    g[offs[sp[x]] + op[x][a]] = offs[x] + a
            elems.append(g)
    arr = np.array(elems, dtype=INDEX)
    ident = np.nonzero(np.all(arr == np.arange(size), axis=1))[0][0]
    arr[[0, ident]] = arr[[ident, 0]]
    arr.setflags(write=False)
    return arr


def _row_group_order(party: tuple[int, ...]) -> int:
    o = 1
    for r in _runs(party):
        o *= math.factorial(r)
    for k in party:
        o *= math.factorial(k)
    return o


@lru_cache(maxsize=64)
def _column_chain(s: Scenario) -> StabilizerChain:
    rest = Scenario(s.parties[1:])
    return chain_for(rest)


def matrix_variant_available(s: Scenario) -> bool:
    return s.n_parties >= 2 and _row_group_order(s.parties[0]) <= MATRIX_ROW_GROUP_CAP


def _canonical_columns(cols: np.ndarray, party: tuple[int, ...]) -> np.ndarray:
    """Minimal image of each row of ``cols`` under all relabelings of one party."""
    offs = party_offsets(party)
    blocks = [np.sort(cols[:, o:o + k], axis=1) for o, k in zip(offs, party)]
    out = np.empty_like(cols)
    start = 0
    pos = 0
    for run in _runs(party):
        k = party[start]
        stacked = np.stack(blocks[start:start + run], axis=1)      # N x run x k
        # sort settings of equal size by their sorted outcome tuples
        order = _lexsort_settings(stacked)
        stacked = np.take_along_axis(stacked, order[:, :, None], axis=1)
        out[:, pos:pos + run * k] = stacked.reshape(len(cols), run * k)
        pos += run * k
        start += run
    return out


def _lexsort_settings(stacked: np.ndarray) -> np.ndarray:
    # stacked: N x run x k; returns per-row order of the run axis
    N, run, k = stacked.shape
    keys = [stacked[:, :, a] for a in reversed(range(k))]
    return np.lexsort(keys, axis=-1) if run > 1 else np.zeros((N, 1), dtype=np.int64)


def _matrix_minimal_image(c: np.ndarray, s: Scenario):
    r = sum(s.parties[0])
    J = len(c) // r
    H = _row_group_elements(s.parties[0])
    col_chain = _column_chain(s)
    level_of = {b: j for j, b in enumerate(col_chain.base)}
    ident_J = identity(J)[None, :]
    best = None
    for q in range(s.n_parties):
        if s.parties[q] != s.parties[0]:
            continue
        P = identity(len(c)) if q == 0 else _party_transposition(s, 0, q)
        M = c[P].reshape(J, r).T                  # M[i, j] = c[P[i + r j]]
        hs = np.zeros((1, r), dtype=INDEX) + np.arange(r, dtype=INDEX)
        gs = np.zeros((1, J), dtype=INDEX) + np.arange(J, dtype=INDEX)
        mults = [1]
        S = H
        for col in range(J):
            j = level_of.get(col)
            U = col_chain.transversals[j] if j is not None else ident_J
            colidx = gs[:, U[:, col]]                               # K x T
            if S is H:
                # full row group: the minimal column has a closed form
                cols = M[hs[:, None, :], colidx[:, :, None]]       # K x T x r
                K, T = cols.shape[0], cols.shape[1]
                canon = _canonical_columns(cols.reshape(K * T, r), s.parties[0])
                mcol, mask = _lexmin_rows(canon)
                hit = np.nonzero(mask)[0]
                hit_kt = (hit // T, hit % T)
                first_s = np.zeros((K, T), dtype=np.int64)
                for k, t in zip(*hit_kt):
                    ok = np.all(cols[k, t][S] == mcol, axis=1)
                    first_s[k, t] = int(np.argmax(ok))
            else:
                rows = hs[:, S]                                     # K x |S| x r
                # W[k, t, s, i] = M[rows[k, s, i], colidx[k, t]]
                W = M[rows[:, None, :, :], colidx[:, :, None, None]]
                K, T, NS = W.shape[0], W.shape[1], W.shape[2]
                mcol, mask = _lexmin_rows(W.reshape(K * T * NS, r))
                mask = mask.reshape(K, T, NS)
                hit_kt = np.nonzero(mask.any(axis=2))
                first_s = mask.argmax(axis=2)
            seen: dict[bytes, int] = {}
            new_h, new_g, new_m = [], [], []
            for k, t in zip(*hit_kt):
                h2 = hs[k][S[first_s[k, t]]]
                g2 = gs[k][U[t]]
                key = M[np.ix_(h2, g2)].tobytes()
                at = seen.get(key)
                if at is None:
                    seen[key] = len(new_h)
                    new_h.append(h2)
                    new_g.append(g2)
                    new_m.append(mults[k])
                else:
                    new_m[at] += mults[k]
            hs = np.array(new_h, dtype=INDEX)
            gs = np.array(new_g, dtype=INDEX)
            mults = new_m
            S = S[np.all(mcol[S] == mcol, axis=1)]
        h, g = hs[0], gs[0]
        phi = (h[:, None] + r * g[None, :]).T.ravel()              # phi[i + r j] = h[i] + r g[j]
        full = P[phi]
        img = c[full]
        if best is None or tuple(img) < tuple(best[0]):
            best = (img, full)
    return best


# -- public operations -------------------------------------------------------------

def _chain_for_expression(e: BellExpression, chain: StabilizerChain | None) -> StabilizerChain:
    if chain is None:
        chain = chain_for(e.scenario)
    if chain.degree != len(e):
        raise ValueError("chain degree does not match expression dimension")
    return chain


def lex_min(e: BellExpression, chain: StabilizerChain | None = None,
            method: str = "auto") -> tuple[BellExpression, np.ndarray]:
    """Lexicographically minimal relabeling of ``e`` and a witness ``g``.

    ``act(inverse(g), e)`` equals the returned expression. ``method`` is
    ``"matrix"``, ``"filter"`` or ``"auto"`` (matrix when the chain knows its
    scenario and the first party's relabeling group is small enough).
    """
    chain = _chain_for_expression(e, chain)
    ranks, distinct = value_ranks(list(e.coefficients))
    if method == "auto":
        method = "matrix" if (chain.scenario is not None
                              and matrix_variant_available(chain.scenario)) else "filter"
    if method == "matrix":
        if chain.scenario is None:
            raise ValueError("the matrix variant needs a chain built for a scenario")
        img, g = _matrix_minimal_image(ranks, chain.scenario)
    elif method == "filter":
        img, g, _ = _minimal_image(ranks, chain)
    else:
        raise ValueError(f"unknown method {method!r}")
    return BellExpression(e.scenario, [distinct[v] for v in img]), g


def stabilizer_order(e: BellExpression, chain: StabilizerChain | None = None) -> int:
    chain = _chain_for_expression(e, chain)
    ranks, _ = value_ranks(list(e.coefficients))
    return _minimal_image(ranks, chain)[2]


def orbit_size(e: BellExpression, chain: StabilizerChain | None = None) -> int:
    chain = _chain_for_expression(e, chain)
    return chain.order // stabilizer_order(e, chain)


def _blocks(C: list[np.ndarray], chain: StabilizerChain, j: int, upto=None):
    """Blocks of the level-``j`` branching: key -> (count, minimal candidate set).

    ``upto`` restricts computation to keys not larger than it.
    """
    lo, hi = chain.windows()[j]
    U = chain.transversals[j]
    sub_order = chain.subgroup_order(j + 1)
    groups: dict[tuple, list[np.ndarray]] = {}
    for c in C:
        for u in U:
            cu = c[u]
            key = tuple(int(v) for v in cu[lo:hi])
            if upto is not None and key > upto:
                continue
            groups.setdefault(key, []).append(cu)
    out = {}
    for key in sorted(groups):
        seen: dict[bytes, np.ndarray] = {}
        count = 0
        for cu in groups[key]:
            m, _, stab = _minimal_image(cu, chain, j + 1)
            b = m.tobytes()
            if b not in seen:
                seen[b] = m
                count += sub_order // stab
        out[key] = (count, list(seen.values()))
    return out


def _orbit_setup(e: BellExpression, chain: StabilizerChain | None):
    chain = _chain_for_expression(e, chain)
    ranks, distinct = value_ranks(list(e.coefficients))
    m, _, _ = _minimal_image(ranks, chain)
    return chain, ranks, distinct, m


def rank_of(e: BellExpression, chain: StabilizerChain | None = None) -> int:
    """1-based position of ``e`` in the lexicographically sorted orbit."""
    chain, t, _, m = _orbit_setup(e, chain)
    b0 = chain.base[0] if chain.base else chain.degree
    if not np.array_equal(t[:b0], m[:b0]):
        raise ValueError("expression is not in the orbit")
    C = [m]
    rank = 0
    for j, (lo, hi) in enumerate(chain.windows()):
        target = tuple(int(v) for v in t[lo:hi])
        blocks = _blocks(C, chain, j, upto=target)
        if target not in blocks:
            raise ValueError("expression is not in the orbit")
        for key, (count, cs) in blocks.items():
            if key < target:
                rank += count
        C = blocks[target][1]
    if not any(np.array_equal(c, t) for c in C):
        raise ValueError("expression is not in the orbit")
    return rank + 1


def unrank(min_rep: BellExpression, r: int, chain: StabilizerChain | None = None) -> BellExpression:
    """The ``r``-th (1-based) element of the sorted orbit of ``min_rep``."""
    chain, _, distinct, m = _orbit_setup(min_rep, chain)
    total = chain.order // _minimal_image(m, chain)[2]
    if not 1 <= r <= total:
        raise ValueError(f"rank {r} out of range 1..{total}")
    C = [m]
    left = r
    for j in range(len(chain.base)):
        blocks = _blocks(C, chain, j)
        for key, (count, cs) in blocks.items():
            if left <= count:
                C = cs
                break
            left -= count
        else:
            raise ChainError("block counts do not cover the requested rank")
    if len(C) != 1 or left != 1:
        raise ChainError("unranking did not end on a single representative")
    return BellExpression(min_rep.scenario, [distinct[v] for v in C[0]])


def enumerate_orbit(e: BellExpression, chain: StabilizerChain | None = None) -> list[BellExpression]:
    """Sorted list of all distinct relabelings, by explicit enumeration (small groups)."""
    chain = _chain_for_expression(e, chain)
    ranks, distinct = value_ranks(list(e.coefficients))
    seen = {tuple(ranks[g]) for g in chain.elements()}
    return [BellExpression(e.scenario, [distinct[v] for v in img]) for img in sorted(seen)]
