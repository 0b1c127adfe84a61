"""Interchange documents and a content-addressed store of canonical inequalities.

Document schema (a YAML subset; only scalars, sequences and mappings)::

    scenario: [[2, 2], [2, 2]]
    notation: probabilities          # or collins-gisin
    coefficients: [-1, 1, ...]       # integers or p/q rationals
    bounds:
      local: 2                       # or {value: 2, provenance: "..."}
    metadata:
      names: [CHSH]
      references: ["..."]
      notes: "..."

Collins-Gisin coefficients use, per party, the index 0 for "not measured"
followed by the pairs (a, x) with a < k_x - 1 (outcome fastest), and the
first party varies fastest across parties. On loading, a marginal term of a
party is embedded through that party's first setting.
"""
from __future__ import annotations

import fcntl
import hashlib
import json
import os
import re
import struct
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np
import yaml

from .expr import Bound, BellExpression, OrientedExpression, CONDITIONAL_BOUND_SETS, party_offsets
from .scenario import Scenario, ScenarioError

NOTATIONS = ("probabilities", "collins-gisin")
HASH_NAME = "sha256"
KEY_DOMAIN = b"bellcanon-key-v1"


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line, self.column = line, column


class StoreError(ValueError):
    pass


# -- rationals ---------------------------------------------------------------------

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(v, what: str = "value") -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise DocumentError(f"{what}: {v!r} is not an exact rational (use an integer or p/q)")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        m = _RATIONAL.match(v)
        if m:
            den = int(m.group(2) or 1)
            if den == 0:
                raise DocumentError(f"{what}: zero denominator in {v!r}")
            return Fraction(int(m.group(1)), den)
    raise DocumentError(f"{what}: {v!r} is not an exact rational (use an integer or p/q)")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- Collins-Gisin -------------------------------------------------------------------

def _cg_to_prob_matrix(party: Sequence[int]) -> np.ndarray:
    """Columns map a party's CG index to probability coefficients."""
    offs = party_offsets(party)
    cols = [[1 if j < party[0] else 0 for j in range(sum(party))]]
    for x, k in enumerate(party):
        for a in range(k - 1):
            col = [0] * sum(party)
            col[offs[x] + a] = 1
            cols.append(col)
    return np.array(cols, dtype=object).T


def _prob_to_cg_matrix(party: Sequence[int]) -> np.ndarray:
    """Rows map probability coefficients to CG coefficients (valid on no-signaling points)."""
    offs = party_offsets(party)
    size = 1 + sum(k - 1 for k in party)
    W = np.zeros((size, sum(party)), dtype=object)
    row = 1
    for x, k in enumerate(party):
        first = row
        for a in range(k - 1):
            W[row, offs[x] + a] = 1
            row += 1
        last = offs[x] + k - 1
        W[0, last] = 1
        for r in range(first, row):
            W[r, last] = -1
    return W


def cg_dimension(s: Scenario) -> int:
    out = 1
    for p in s.parties:
        out *= 1 + sum(k - 1 for k in p)
    return out


def _apply(t: np.ndarray, mats) -> np.ndarray:
    for i, M in enumerate(mats):
        t = np.moveaxis(np.tensordot(M, t, axes=([1], [i])), 0, i)
    return t


def from_collins_gisin(s: Scenario, coefficients: Sequence) -> BellExpression:
    g = np.empty(len(coefficients), dtype=object)
    g[:] = [Fraction(c) for c in coefficients]
    shape = tuple(1 + sum(k - 1 for k in p) for p in s.parties)
    t = _apply(g.reshape(shape, order="F"), [_cg_to_prob_matrix(p) for p in s.parties])
    return BellExpression.from_tensor(s, t)


def to_collins_gisin(e: BellExpression) -> list[Fraction]:
    t = _apply(e.tensor(), [_prob_to_cg_matrix(p) for p in e.scenario.parties])
    return [Fraction(v) for v in t.ravel(order="F")]


# -- documents -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InterchangeDocument:
    scenario: Scenario
    coefficients: tuple[Fraction, ...]
    notation: str = "probabilities"
    bounds: dict = field(default_factory=dict)          # name -> (Fraction, provenance | None)
    names: tuple[str, ...] = ()
    references: tuple[str, ...] = ()
    notes: str | None = None

    def expression(self) -> BellExpression:
        if self.notation == "collins-gisin":
            return from_collins_gisin(self.scenario, self.coefficients)
        return BellExpression(self.scenario, self.coefficients)

    def oriented(self) -> OrientedExpression:
        return OrientedExpression(self.expression(), {k: v for k, (v, _) in self.bounds.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, InterchangeDocument) and serialize(self) == serialize(other)


def _check_keys(d: Mapping, allowed: set, where: str) -> None:
    extra = sorted(set(d) - allowed)
    if extra:
        raise DocumentError(f"{where}: unknown key(s) {', '.join(map(str, extra))}")


def _parse_scenario(v) -> Scenario:
    try:
        if isinstance(v, str):
            return Scenario.parse(v)
        if isinstance(v, list) and all(isinstance(p, list) for p in v):
            return Scenario([tuple(int(k) for k in p) for p in v])
    except (ScenarioError, TypeError, ValueError) as exc:
        raise DocumentError(f"scenario: {exc}") from None
    raise DocumentError(f"scenario: cannot read {v!r}")


def _str_list(v, where: str) -> tuple[str, ...]:
    if v is None:
        return ()
    if isinstance(v, str):
        return (v,)
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise DocumentError(f"{where}: expected a list of strings")
    return tuple(v)


def from_mapping(data) -> InterchangeDocument:
    if not isinstance(data, dict):
        raise DocumentError("document must be a mapping")
    _check_keys(data, {"scenario", "notation", "coefficients", "bounds", "metadata", "key"}, "document")
    if "scenario" not in data:
        raise DocumentError("missing key 'scenario'")
    s = _parse_scenario(data["scenario"])
    notation = data.get("notation", "probabilities")
    if notation not in NOTATIONS:
        raise DocumentError(f"unknown notation {notation!r} (expected one of {', '.join(NOTATIONS)})")
    coeffs = data.get("coefficients")
    if coeffs is None:
        coeffs = []
    if not isinstance(coeffs, list):
        raise DocumentError("coefficients: expected a sequence")
    expected = s.full_dimension() if notation == "probabilities" else cg_dimension(s)
    if len(coeffs) != expected:
        raise DocumentError(f"coefficients: length mismatch, {len(coeffs)} given, "
                            f"{expected} expected for {s} in {notation} notation")
    values = tuple(parse_rational(c, f"coefficient {i + 1}") for i, c in enumerate(coeffs))
    bounds = {}
    for name, b in (data.get("bounds") or {}).items():
        if isinstance(b, dict):
            _check_keys(b, {"value", "provenance"}, f"bound {name}")
            if "value" not in b:
                raise DocumentError(f"bound {name}: missing 'value'")
            prov = b.get("provenance")
            bounds[str(name)] = (parse_rational(b["value"], f"bound {name}"),
                                 None if prov is None else str(prov))
        else:
            bounds[str(name)] = (parse_rational(b, f"bound {name}"), None)
    meta = data.get("metadata") or {}
    if not isinstance(meta, dict):
        raise DocumentError("metadata: expected a mapping")
    _check_keys(meta, {"names", "references", "notes"}, "metadata")
    notes = meta.get("notes")
    if notes is not None and not isinstance(notes, str):
        raise DocumentError("metadata.notes: expected a string")
    return InterchangeDocument(s, values, notation, bounds,
                               _str_list(meta.get("names"), "metadata.names"),
                               _str_list(meta.get("references"), "metadata.references"),
                               notes)


def parse(text: str) -> InterchangeDocument:
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise DocumentError(f"syntax error: {exc.problem or exc}", line, col) from None
    except yaml.YAMLError as exc:
        raise DocumentError(f"syntax error: {exc}") from None
    return from_mapping(data)


_PLAIN = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")


_NONPRINTABLE = re.compile("[^\t\n\r\x20-\x7e\xa0-\u2027\u202a-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]")


def _escape(ch: str) -> str:
    n = ord(ch)
    return f"\\u{n:04x}" if n <= 0xFFFF else f"\\U{n:08x}"


def _q(s: str) -> str:
    """Double-quoted scalar; characters YAML cannot carry raw are escaped."""
    return _NONPRINTABLE.sub(lambda m: _escape(m.group()), json.dumps(s, ensure_ascii=False))


def _name(s: str) -> str:
    if _PLAIN.match(s) and s.lower() not in ("true", "false", "yes", "no", "on", "off", "null"):
        return s
    return _q(s)


def serialize(doc: InterchangeDocument, key: str | None = None) -> str:
    """Deterministic text form; ``parse(serialize(d))`` equals ``d``."""
    lines = []
    if key is not None:
        lines.append(f"key: {key}")
    sc = ", ".join("[" + ", ".join(str(k) for k in p) + "]" for p in doc.scenario.parties)
    lines.append(f"scenario: [{sc}]")
    lines.append(f"notation: {doc.notation}")
    lines.append("coefficients: [" + ", ".join(format_rational(c) for c in doc.coefficients) + "]")
    if doc.bounds:
        lines.append("bounds:")
        for name in sorted(doc.bounds):
            v, prov = doc.bounds[name]
            if prov is None:
                lines.append(f"  {_name(name)}: {format_rational(v)}")
            else:
                lines.append(f"  {_name(name)}: {{value: {format_rational(v)}, provenance: {_q(prov)}}}")
    if doc.names or doc.references or doc.notes is not None:
        lines.append("metadata:")
        if doc.names:
            lines.append("  names: [" + ", ".join(_q(n) for n in doc.names) + "]")
        if doc.references:
            lines.append("  references: [" + ", ".join(_q(r) for r in doc.references) + "]")
        if doc.notes is not None:
            lines.append(f"  notes: {_q(doc.notes)}")
    return "\n".join(lines) + "\n"


# -- canonical keys and records ---------------------------------------------------------

def canonical_key(e: BellExpression) -> str:
    """SHA-256 over a length-prefixed encoding of the scenario and integer coefficients."""
    if not e.is_integer():
        raise ValueError("canonical keys are defined for integer coefficient vectors")
    h = hashlib.new(HASH_NAME)
    h.update(KEY_DOMAIN)

    def put(b: bytes):
        h.update(struct.pack(">Q", len(b)))
        h.update(b)

    parties = e.scenario.parties
    put(str(len(parties)).encode())
    for p in parties:
        put(",".join(str(k) for k in p).encode())
    put(str(len(e)).encode())
    for c in e.as_ints():
        put(str(c).encode())
    return h.hexdigest()


@dataclass(frozen=True, eq=False)
class Record:
    expression: OrientedExpression
    names: tuple[str, ...] = ()
    provenance: dict = field(default_factory=dict)      # bound name -> provenance string
    references: tuple[str, ...] = ()
    notes: str | None = None

    @property
    def key(self) -> str:
        return canonical_key(self.expression.expression)

    @property
    def name(self) -> str:
        return self.names[0] if self.names else self.key[:12]

    def document(self) -> InterchangeDocument:
        e = self.expression
        bounds = {k: (b.value, self.provenance.get(k)) for k, b in e.bounds.items()}
        return InterchangeDocument(e.scenario, tuple(e.expression.coefficients), "probabilities",
                                   bounds, tuple(self.names), tuple(self.references), self.notes)

    @classmethod
    def from_document(cls, doc: InterchangeDocument) -> "Record":
        prov = {k: p for k, (_, p) in doc.bounds.items() if p is not None}
        return cls(doc.oriented(), doc.names, prov, doc.references, doc.notes)

    def text(self) -> str:
        return serialize(self.document(), key=self.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, Record) and self.text() == other.text()


def is_canonical_expression(oe: OrientedExpression) -> bool:
    from .canonical import Leaf, TrivialExpressionError, decompose
    try:
        tree = decompose(OrientedExpression(oe.expression))
    except TrivialExpressionError:
        return False
    return (isinstance(tree, Leaf) and tree.rank == 1 and tree.scale == 1 and tree.shift == 0
            and bool(np.all(tree.witness == np.arange(len(oe.expression))))
            and tree.expression == oe.expression)


def canonical_record(oe: OrientedExpression, **meta) -> Record:
    """Record for the canonical form of a non-composite expression, bounds carried over."""
    from .canonical import canonical_form
    return Record(canonical_form(oe), **meta)


# -- store ---------------------------------------------------------------------------

class Store:
    """Directory of records, one document per record under ``records/<2 hex>/``.

    ``index.yaml`` maps keys to names and scenarios; it is derived data and can
    be rebuilt from the record files at any time.
    """

    MANIFEST = "manifest.yaml"
    INDEX = "index.yaml"

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "records").mkdir(exist_ok=True)
        man = self.root / self.MANIFEST
        if not man.exists():
            self._atomic_write(man, f"format: 1\nhash: {HASH_NAME}\n")
        else:
            data = yaml.safe_load(man.read_text()) or {}
            if data.get("hash") != HASH_NAME:
                raise StoreError(f"store uses hash {data.get('hash')!r}, expected {HASH_NAME}")
        self._index: dict[str, dict] | None = None

    # locking and atomic writes
    @contextmanager
    def _lock(self):
        with open(self.root / ".lock", "a+") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    @staticmethod
    def _atomic_write(path: Path, text: str) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _path(self, key: str) -> Path:
        return self.root / "records" / key[:2] / f"{key}.yaml"

    # index
    def _read_index(self) -> dict[str, dict]:
        p = self.root / self.INDEX
        if not p.exists():
            return self._scan()
        return yaml.safe_load(p.read_text()) or {}

    def _scan(self) -> dict[str, dict]:
        out = {}
        for f in sorted((self.root / "records").glob("*/*.yaml")):
            rec = self._load(f)
            out[rec.key] = {"names": list(rec.names), "scenario": str(rec.expression.scenario)}
        return out

    def _write_index(self, index: dict[str, dict]) -> None:
        lines = []
        for key in sorted(index):
            ent = index[key]
            names = ", ".join(_q(n) for n in ent["names"])
            lines.append(f"{key}: {{names: [{names}], scenario: {_q(ent['scenario'])}}}")
        self._atomic_write(self.root / self.INDEX, "\n".join(lines) + ("\n" if lines else ""))

    @property
    def index(self) -> dict[str, dict]:
        if self._index is None:
            self._index = self._read_index()
        return self._index

    def rebuild_index(self) -> int:
        with self._lock():
            self._index = self._scan()
            self._write_index(self._index)
        return len(self._index)

    def _load(self, path: Path) -> Record:
        text = path.read_text(encoding="utf-8")
        try:
            data = yaml.safe_load(text)
            rec = Record.from_document(from_mapping(data))
        except DocumentError as exc:
            raise StoreError(f"{path}: {exc}") from None
        if data.get("key") != rec.key:
            raise StoreError(f"{path}: stored key does not match content")
        return rec

    # public API
    def store(self, rec: Record, merge: bool = False) -> str:
        if not is_canonical_expression(rec.expression):
            raise StoreError("record expression is not in canonical form")
        key = rec.key
        with self._lock():
            path = self._path(key)
            if path.exists():
                old = self._load(path)
                if old != rec:
                    if not merge:
                        raise StoreError(f"key {key[:12]} already stored with different content "
                                         "(pass merge=True to combine)")
                    rec = _merge(old, rec)
            self._atomic_write(path, rec.text())
            index = self._read_index()
            index[key] = {"names": list(rec.names), "scenario": str(rec.expression.scenario)}
            self._write_index(index)
            self._index = index
        return key

    def lookup(self, key: str) -> Record | None:
        path = self._path(key)
        if not path.exists():
            return None
        return self._load(path)

    def __contains__(self, key: str) -> bool:
        return self._path(key).exists()

    def __iter__(self) -> Iterator[Record]:
        for f in sorted((self.root / "records").glob("*/*.yaml")):
            yield self._load(f)

    def __len__(self) -> int:
        return len(self.index)

    def find_by_expression(self, oe: OrientedExpression | BellExpression) -> Record | None:
        from .canonical import Leaf, decompose
        tree = decompose(oe)
        if not isinstance(tree, Leaf):
            return None
        return self.lookup(canonical_key(tree.expression))


def _merge(old: Record, new: Record) -> Record:
    bounds = dict(old.expression.bounds)
    for name, b in new.expression.bounds.items():
        if name in bounds and bounds[name].value != b.value:
            raise StoreError(f"cannot merge: conflicting {name} bounds "
                             f"{bounds[name].value} and {b.value}")
        bounds[name] = b
    prov = dict(old.provenance)
    prov.update(new.provenance)

    def union(a, b):
        return tuple(dict.fromkeys(tuple(a) + tuple(b)))

    notes = old.notes if not new.notes or new.notes == old.notes else \
        "\n".join(n for n in (old.notes, new.notes) if n)
    return Record(OrientedExpression(old.expression.expression, bounds), union(old.names, new.names),
                  prov, union(old.references, new.references), notes)


# -- matching ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LeafMatch:
    path: tuple[int, ...]
    leaf: object
    record: Record | None

    @property
    def matched(self) -> bool:
        return self.record is not None


@dataclass(frozen=True, eq=False)
class MatchReport:
    tree: object
    leaves: tuple[LeafMatch, ...]

    @property
    def matched(self) -> list[LeafMatch]:
        return [m for m in self.leaves if m.matched]

    @property
    def unmatched(self) -> list[LeafMatch]:
        return [m for m in self.leaves if not m.matched]

    def text(self) -> str:
        out = [self.tree.describe()]
        for m in self.leaves:
            label = m.record.name if m.record else "unknown"
            w = " ".join(str(int(v) + 1) for v in m.leaf.witness)
            out.append(f"leaf {'.'.join(str(p + 1) for p in m.path) or 'root'}: {label}, "
                       f"key {m.leaf.key[:16]}, rank {m.leaf.rank}, witness [{w}]")
        return "\n".join(out)

    def to_dict(self) -> dict:
        return {"tree": self.tree.to_dict(),
                "leaves": [{"path": [p + 1 for p in m.path], "key": m.leaf.key,
                            "record": m.record.name if m.record else None,
                            "rank": m.leaf.rank} for m in self.leaves]}


def _walk(tree, path=()):
    from .canonical import Leaf
    if isinstance(tree, Leaf):
        yield path, tree
    else:
        for i, ch in enumerate(tree.children):
            yield from _walk(ch, path + (i,))


def match(oe: OrientedExpression | BellExpression, db: Store | None) -> MatchReport:
    from .canonical import decompose
    tree = decompose(oe)
    leaves = []
    for path, leaf in _walk(tree):
        rec = db.lookup(leaf.key) if db is not None else None
        leaves.append(LeafMatch(path, leaf, rec))
    return MatchReport(tree, tuple(leaves))
