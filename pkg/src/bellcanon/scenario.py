"""Bell scenarios: parties, settings and outcome counts.

A scenario is stored as a tuple of parties, each party a tuple of outcome
counts (one per measurement setting). ``Scenario.parse`` understands the
homogeneous shorthand ``(n,m,k)`` and the general ``[(k11 k12) (k21 k22 k23)]``
form.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    parties: tuple[tuple[int, ...], ...]

    def __init__(self, parties: Sequence[Sequence[int]]):
        parties = tuple(tuple(int(k) for k in p) for p in parties)
        if not parties:
            raise ScenarioError("a scenario needs at least one party")
        for i, p in enumerate(parties):
            if not p:
                raise ScenarioError(f"party {i + 1} has no measurement settings")
            if any(k < 2 for k in p):
                raise ScenarioError(
                    f"party {i + 1}: every setting needs at least 2 outcomes, got {p}")
        object.__setattr__(self, "parties", parties)

    @classmethod
    def homogeneous(cls, n: int, m: int, k: int) -> "Scenario":
        return cls([(k,) * m] * n)

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        s = text.strip()
        m = re.fullmatch(r"\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)", s)
        if m:
            return cls.homogeneous(*map(int, m.groups()))
        m = re.fullmatch(r"\[\s*((?:\(\s*[\d\s]+\)\s*)+)\]", s)
        if not m:
            raise ScenarioError(f"cannot parse scenario {text!r}")
        groups = re.findall(r"\(([\d\s]+)\)", m.group(1))
        return cls([[int(t) for t in g.split()] for g in groups])

    def __str__(self) -> str:
        return "[" + " ".join("(" + " ".join(map(str, p)) + ")" for p in self.parties) + "]"

    def __repr__(self) -> str:
        return f"Scenario({str(self)!r})"

    @property
    def n_parties(self) -> int:
        return len(self.parties)

    def party_sizes(self) -> tuple[int, ...]:
        """Number of (outcome, setting) pairs of each party."""
        return tuple(sum(p) for p in self.parties)

    @property
    def is_homogeneous(self) -> bool:
        return len({k for p in self.parties for k in p}) == 1 and \
            len({len(p) for p in self.parties}) == 1

    def full_dimension(self) -> int:
        return math.prod(self.party_sizes())

    def ns_dimension(self) -> int:
        return math.prod(1 + sum(k - 1 for k in p) for p in self.parties) - 1

    def subscenario(self, parties: Sequence[int]) -> "Scenario":
        return Scenario([self.parties[i] for i in parties])


def full_dimension(s: Scenario) -> int:
    return s.full_dimension()


def ns_dimension(s: Scenario) -> int:
    return s.ns_dimension()


@dataclass(frozen=True)
class ReorderMap:
    """Reordering of parties and settings, as old->new index maps.

    ``party_map[i]`` is the new position of old party ``i``;
    ``setting_maps[i][j]`` is the new position of setting ``j`` of old party ``i``.
    """
    source: Scenario
    target: Scenario
    party_map: tuple[int, ...]
    setting_maps: tuple[tuple[int, ...], ...]

    def is_identity(self) -> bool:
        return self.party_map == tuple(range(len(self.party_map))) and all(
            sm == tuple(range(len(sm))) for sm in self.setting_maps)

    def inverse(self) -> "ReorderMap":
        n = len(self.party_map)
        pm = [0] * n
        sms: list[tuple[int, ...]] = [()] * n
        for old, new in enumerate(self.party_map):
            pm[new] = old
            sm = self.setting_maps[old]
            inv = [0] * len(sm)
            for o, nw in enumerate(sm):
                inv[nw] = o
            sms[new] = tuple(inv)
        return ReorderMap(self.target, self.source, tuple(pm), tuple(sms))


def _party_key(p: tuple[int, ...], width: int) -> tuple[int, ...]:
    # larger-first lexicographic order, padding with zeros
    padded = p + (0,) * (width - len(p))
    return tuple(-k for k in padded)


def canonical_scenario(s: Scenario) -> tuple[Scenario, ReorderMap]:
    """Sort settings by non-increasing outcome count and parties lexicographically."""
    setting_maps = []
    sorted_parties = []
    for p in s.parties:
        order = sorted(range(len(p)), key=lambda j: -p[j])  # stable
        new_pos = [0] * len(p)
        for new, old in enumerate(order):
            new_pos[old] = new
        setting_maps.append(tuple(new_pos))
        sorted_parties.append(tuple(p[j] for j in order))
    width = max(len(p) for p in sorted_parties)
    porder = sorted(range(len(sorted_parties)), key=lambda i: _party_key(sorted_parties[i], width))
    party_map = [0] * len(porder)
    for new, old in enumerate(porder):
        party_map[old] = new
    target = Scenario([sorted_parties[i] for i in porder])
    return target, ReorderMap(s, target, tuple(party_map), tuple(setting_maps))


def is_canonical(s: Scenario) -> bool:
    return canonical_scenario(s)[0] == s
