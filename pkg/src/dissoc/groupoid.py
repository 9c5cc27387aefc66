"""Finite operation tables, the base-n code n:j, and structural predicates.

The code of a table on ``{0..n-1}`` is the integer whose n**2 base-n digits,
most significant first, are the entries read row by row from the upper-left
corner.  ``decode(2, 13)`` is the implication table and ``decode(2, 14)`` is
NAND.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import permutations, product
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DissocError, ResourceLimitError

ENUMERATION_CAP_N = 3


class TableError(DissocError, ValueError):
    pass


class GroupoidTable:
    """An n×n operation table; ``t(a, b)`` is ``a ⋄ b``.  Immutable."""

    __slots__ = ("n", "entries", "name", "_key")

    def __init__(self, entries, name: str | None = None):
        arr = np.array(entries, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise TableError(f"table must be a non-empty square array, got shape {arr.shape}")
        n = arr.shape[0]
        if n > 255:
            raise TableError("universe size above 255 is not supported")
        if arr.min() < 0 or arr.max() >= n:
            raise TableError(f"entries must lie in 0..{n - 1}")
        cells = arr.astype(np.uint8)
        cells.flags.writeable = False
        self.n = n
        self.entries = cells
        self.name = name
        self._key = (n, cells.tobytes())

    def __call__(self, a: int, b: int) -> int:
        return int(self.entries[a, b])

    def __eq__(self, other):
        return isinstance(other, GroupoidTable) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<GroupoidTable{label} n={self.n} code={self.code.j}>"

    def rows(self) -> list[list[int]]:
        return self.entries.astype(int).tolist()

    @property
    def code(self) -> "GroupoidCode":
        return encode(self)

    @property
    def label(self) -> str:
        return self.name or str(self.code)

    def transpose(self) -> "GroupoidTable":
        return GroupoidTable(self.entries.T)

    def to_record(self) -> dict:
        rec = {"n": self.n, "entries": self.entries.ravel().astype(int).tolist()}
        if self.name:
            rec["name"] = self.name
        return rec

    def format(self) -> str:
        width = len(str(self.n - 1))
        head = "⋄ | " + " ".join(str(c).rjust(width) for c in range(self.n))
        lines = [head, "-" * len(head)]
        for r, row in enumerate(self.rows()):
            lines.append(f"{str(r).rjust(width)} | " + " ".join(str(v).rjust(width) for v in row))
        return "\n".join(lines)


@dataclass(frozen=True)
class GroupoidCode:
    n: int
    j: int

    def __post_init__(self):
        if self.n < 1:
            raise TableError("universe size must be positive")
        if not 0 <= self.j < self.n ** (self.n * self.n):
            raise TableError(f"code {self.j} out of range for n={self.n}")

    def __str__(self):
        return f"{self.n}:{self.j}"

    @classmethod
    def parse(cls, text: str) -> "GroupoidCode":
        m = re.fullmatch(r"\s*(\d+)\s*:\s*(\d+)\s*", text)
        if not m:
            raise TableError(f"expected a code of the form n:j, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


def decode(n_or_code, j: int | None = None) -> GroupoidTable:
    code = n_or_code if isinstance(n_or_code, GroupoidCode) else GroupoidCode(n_or_code, j)
    n, rest = code.n, code.j
    digits = []
    for _ in range(n * n):
        rest, d = divmod(rest, n)
        digits.append(d)
    digits.reverse()
    return GroupoidTable(np.array(digits).reshape(n, n))


def encode(table: GroupoidTable) -> GroupoidCode:
    j = 0
    for d in table.entries.ravel():
        j = j * table.n + int(d)
    return GroupoidCode(table.n, j)


def ci3_decode(alpha: int) -> GroupoidTable:
    """Commutative idempotent 3-element table with 0⋄1=a, 0⋄2=b, 1⋄2=c, alpha=9a+3b+c."""
    if not 0 <= alpha <= 26:
        raise TableError("alpha must lie in 0..26")
    a, b, c = alpha // 9, (alpha // 3) % 3, alpha % 3
    return GroupoidTable([[0, a, b], [a, 1, c], [b, c, 2]], name=f"CI3_{alpha}")


NAMED_TABLES = {
    "B": [[0, 1, 2, 3], [1, 1, 3, 2], [2, 3, 2, 1], [3, 2, 1, 3]],
    "D": [[0, 1, 0], [1, 1, 0], [0, 0, 2]],
    "E": [[0, 2, 1], [2, 1, 0], [1, 0, 2]],
}

ALIASES = {"implication": "2:13", "nand": "2:14"}


def named_table(name: str) -> GroupoidTable:
    key = name.strip()
    if key in NAMED_TABLES:
        return GroupoidTable(NAMED_TABLES[key], name=key)
    if key.lower() in ALIASES:
        t = decode(GroupoidCode.parse(ALIASES[key.lower()]))
        t.name = key.lower()
        return t
    m = re.fullmatch(r"CI3_(\d+)", key, flags=re.IGNORECASE)
    if m:
        return ci3_decode(int(m.group(1)))
    raise TableError(f"unknown table name {name!r}")


def load_table_file(path) -> GroupoidTable:
    rec = json.loads(Path(path).read_text())
    n = int(rec["n"])
    entries = rec["entries"]
    if len(entries) != n * n:
        raise TableError(f"table file needs {n * n} entries, got {len(entries)}")
    return GroupoidTable(np.array(entries).reshape(n, n), name=rec.get("name"))


def resolve_table(ref) -> GroupoidTable:
    """Accept a table, a GroupoidCode, "n:j", a known name, or a JSON file path."""
    if isinstance(ref, GroupoidTable):
        return ref
    if isinstance(ref, GroupoidCode):
        return decode(ref)
    text = str(ref).strip()
    if re.fullmatch(r"\d+\s*:\s*\d+", text):
        return decode(GroupoidCode.parse(text))
    if Path(text).is_file():
        return load_table_file(text)
    return named_table(text)


def is_semigroup(t: GroupoidTable) -> bool:
    e = t.entries.astype(np.intp)
    # (x⋄y)⋄z against x⋄(y⋄z) for all triples at once
    left = e[e, :]
    right = e[:, e]
    return bool(np.array_equal(left, right))


def associating_triples(t: GroupoidTable) -> int:
    e = t.entries.astype(np.intp)
    return int((e[e, :] == e[:, e]).sum())


def is_commutative(t: GroupoidTable) -> bool:
    return bool(np.array_equal(t.entries, t.entries.T))


def idempotent_elements(t: GroupoidTable) -> set[int]:
    return {a for a in range(t.n) if t(a, a) == a}


def identity_elements(t: GroupoidTable) -> set[int]:
    """Two-sided identities."""
    r = np.arange(t.n)
    return {e for e in range(t.n)
            if np.array_equal(t.entries[e], r) and np.array_equal(t.entries[:, e], r)}


def _maps_onto(a: GroupoidTable, b: GroupoidTable, perm: Sequence[int]) -> bool:
    p = np.asarray(perm)
    # p(x ⋄a y) == p(x) ⋄b p(y)
    return bool(np.array_equal(p[a.entries], b.entries[np.ix_(p, p)]))


def is_isomorphic(a: GroupoidTable, b: GroupoidTable) -> tuple | None:
    """A permutation p with p(x⋄y) = p(x)⋄'p(y), or None."""
    if a.n != b.n:
        return None
    for perm in permutations(range(a.n)):
        if _maps_onto(a, b, perm):
            return perm
    return None


def is_anti_isomorphic(a: GroupoidTable, b: GroupoidTable) -> tuple | None:
    return is_isomorphic(a, b.transpose())


def asymp(a: GroupoidTable, b: GroupoidTable) -> bool:
    return is_isomorphic(a, b) is not None or is_anti_isomorphic(a, b) is not None


def isomorphism_classes(tables: Iterable[GroupoidTable]) -> list[list[GroupoidTable]]:
    classes: list[list[GroupoidTable]] = []
    for t in tables:
        for cls in classes:
            if is_isomorphic(cls[0], t) is not None:
                cls.append(t)
                break
        else:
            classes.append([t])
    return classes


def asymp_classes(tables: Iterable[GroupoidTable]) -> list[list[GroupoidTable]]:
    """Partition by 'isomorphic or anti-isomorphic', in first-seen order."""
    classes: list[list[GroupoidTable]] = []
    for t in tables:
        for cls in classes:
            if asymp(cls[0], t):
                cls.append(t)
                break
        else:
            classes.append([t])
    return classes


def automorphisms(t: GroupoidTable) -> list[tuple]:
    return [p for p in permutations(range(t.n)) if _maps_onto(t, t, p)]


def subgroupoid_closure(t: GroupoidTable, s: Iterable[int]) -> set[int]:
    closed = set(s)
    if not closed:
        raise ValueError("closure of the empty set is not defined here")
    frontier = set(closed)
    while frontier:
        new = set()
        for a in closed:
            for b in frontier:
                new.add(t(a, b))
                new.add(t(b, a))
        frontier = new - closed
        closed |= frontier
    return closed


def is_semilattice_pair(t: GroupoidTable, a: int, b: int) -> bool:
    """{a, b} with aa=a and ab=ba=bb=b, so b absorbs."""
    return a != b and t(a, a) == a and t(b, b) == b and t(a, b) == b and t(b, a) == b


def enumerate_tables(n: int, cap: int = ENUMERATION_CAP_N) -> Iterator[GroupoidCode]:
    if n > cap:
        raise ResourceLimitError(f"n={n} exceeds table enumeration cap {cap}", cap)
    for j in range(n ** (n * n)):
        yield GroupoidCode(n, j)


def all_tables_array(n: int, cap: int = ENUMERATION_CAP_N) -> np.ndarray:
    """Every table on n as an array of shape (n**(n*n), n, n), indexed by code."""
    if n > cap:
        raise ResourceLimitError(f"n={n} exceeds table enumeration cap {cap}", cap)
    digits = np.array(list(product(range(n), repeat=n * n)), dtype=np.uint8)
    return digits.reshape(-1, n, n)
