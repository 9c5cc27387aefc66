"""Prime implicants, complete sums, and formal products read in the NAND groupoid.

Truth tables over k variables are integers: bit ``idx`` holds the value at
the assignment whose binary numeral is x0 x1 ... x{k-1} (x0 most
significant), matching the tuple order of induced operation vectors.

Prime implicants come from a sweep over all 3**k cubes: a cube with x free
is an implicant exactly when both of its halves are.  The combine/delete
reduction (iterated consensus plus subsumption) is a second, independent
route to the same complete sum.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DissocError, ResourceLimitError
from .evaluation import induced_values
from .formal_products import FormalProduct, enumerate_products, factorize
from .groupoid import decode

SWEEP_CAP = 14
NAND_CAP = 14


class TrivialFormula(DissocError, ValueError):
    """The formula is constantly 0 or constantly 1."""


class FormulaError(DissocError, ValueError):
    pass


def _check_k(k: int, cap: int = SWEEP_CAP) -> None:
    if k < 1:
        raise ValueError("need at least one variable")
    if k > cap:
        raise ResourceLimitError(f"{k} variables exceeds the cap of {cap}", cap)


@lru_cache(maxsize=None)
def _full(k: int) -> int:
    return (1 << (1 << k)) - 1


@lru_cache(maxsize=None)
def var_mask(k: int, v: int) -> int:
    """Truth table of the positive literal x_v."""
    idx = np.arange(1 << k)
    bits = ((idx >> (k - 1 - v)) & 1).astype(np.uint8)
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


@dataclass(frozen=True)
class TruthTable:
    k: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> (1 << self.k):
            raise ValueError(f"bits do not fit {1 << self.k} rows")

    @classmethod
    def from_values(cls, values) -> "TruthTable":
        values = np.asarray(values, dtype=np.uint8)
        size = values.size
        k = size.bit_length() - 1
        if size != 1 << k or k < 1:
            raise ValueError("need 2**k values with k >= 1")
        packed = np.packbits(values & 1, bitorder="little").tobytes()
        return cls(k, int.from_bytes(packed, "little"))

    @classmethod
    def from_hex(cls, text: str, k: int) -> "TruthTable":
        return cls(k, int(text, 16))

    @property
    def values(self) -> np.ndarray:
        raw = self.bits.to_bytes(max(1, (1 << self.k) // 8 + 1), "little")
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little",
                             count=1 << self.k)

    def __call__(self, assignment: Sequence[int]) -> int:
        idx = 0
        for x in assignment:
            idx = idx * 2 + int(x)
        return (self.bits >> idx) & 1

    def to_hex(self) -> str:
        return format(self.bits, f"0{max(1, (1 << self.k) // 4)}x")

    def complement(self) -> "TruthTable":
        return TruthTable(self.k, _full(self.k) ^ self.bits)

    @property
    def is_constant(self) -> bool:
        return self.bits in (0, _full(self.k))

    def depends_on(self, v: int) -> bool:
        arr = self.values.reshape((2,) * self.k)
        return not np.array_equal(np.take(arr, 0, axis=v), np.take(arr, 1, axis=v))

    def support(self) -> list[int]:
        return [v for v in range(self.k) if self.depends_on(v)]


@dataclass(frozen=True, order=True)
class Cube:
    """A conjunction of literals: bit v of pos (neg) marks x_v (x_v')."""

    k: int
    pos: int
    neg: int

    def __post_init__(self):
        if self.pos & self.neg:
            raise FormulaError("a cube cannot hold a variable both ways")
        if not (self.pos | self.neg):
            raise FormulaError("a cube needs at least one literal")
        if (self.pos | self.neg) >> self.k:
            raise FormulaError("literal outside the variable range")

    @property
    def support(self) -> int:
        return self.pos | self.neg

    def literals(self) -> list[tuple]:
        return [(v, bool(self.pos >> v & 1)) for v in range(self.k) if self.support >> v & 1]

    def minterms(self) -> int:
        m = _full(self.k)
        for v, positive in self.literals():
            vm = var_mask(self.k, v)
            m &= vm if positive else _full(self.k) ^ vm
        return m

    def subsumes(self, other: "Cube") -> bool:
        """self is implied by other (every literal of self occurs in other)."""
        return (self.pos & ~other.pos) == 0 and (self.neg & ~other.neg) == 0

    def drop(self, v: int) -> "Cube | None":
        bit = 1 << v
        pos, neg = self.pos & ~bit, self.neg & ~bit
        return Cube(self.k, pos, neg) if pos | neg else None

    def sort_key(self) -> tuple:
        return (self.support, self.pos)

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{v}" for v in range(self.k)]
        return " & ".join(names[v] + ("" if positive else "'") for v, positive in self.literals())


@dataclass(frozen=True)
class NormalFormula:
    """A disjunction of cubes, stored sorted by (support mask, sign pattern)."""

    k: int
    cubes: tuple

    @classmethod
    def of(cls, k: int, cubes: Iterable[Cube]) -> "NormalFormula":
        uniq = {c for c in cubes}
        for c in uniq:
            if c.k != k:
                raise FormulaError("cube arity mismatch")
        return cls(k, tuple(sorted(uniq, key=Cube.sort_key)))

    def truth_table(self) -> TruthTable:
        bits = 0
        for c in self.cubes:
            bits |= c.minterms()
        return TruthTable(self.k, bits)

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.cubes:
            return "0"
        return " | ".join(c.format(names) for c in self.cubes)

    def __str__(self):
        return self.format()


_LIT = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)('?)$")


def parse_formula(text: str, names: Sequence[str] | None = None) -> NormalFormula:
    """Read ``x0' & x2 | x1``; with ``names`` given, variables are looked up there."""
    clauses = [c.strip() for c in text.split("|")]
    parsed = []
    seen = set()
    for clause in clauses:
        lits = []
        for lit in clause.split("&"):
            m = _LIT.match(lit.strip())
            if not m:
                raise FormulaError(f"bad literal {lit.strip()!r}")
            name, prime = m.groups()
            if names is not None:
                if name not in names:
                    raise FormulaError(f"unknown variable {name!r}")
                v = list(names).index(name)
            else:
                mm = re.fullmatch(r"x(\d+)", name)
                if not mm:
                    raise FormulaError(f"variables are x0, x1, ...; got {name!r}")
                v = int(mm.group(1))
            seen.add(v)
            lits.append((v, not prime))
        parsed.append(lits)
    k = len(names) if names is not None else max(seen) + 1
    cubes = []
    for lits in parsed:
        pos = neg = 0
        for v, positive in lits:
            if positive:
                pos |= 1 << v
            else:
                neg |= 1 << v
        if pos & neg:
            continue            # contradictory clause contributes nothing
        cubes.append(Cube(k, pos, neg))
    return NormalFormula.of(k, cubes)


def implies(q: Cube, phi: TruthTable) -> bool:
    if q.k != phi.k:
        raise ValueError("cube and truth table have different variable counts")
    return q.minterms() & ~phi.bits == 0


def _implicant_array(phi: TruthTable) -> np.ndarray:
    """Flags over cubes in base 3, digit 0 = x', 1 = x, 2 = x absent."""
    arr = phi.values.astype(bool).reshape((2,) * phi.k)
    for v in range(phi.k):
        both = np.logical_and(np.take(arr, [0], axis=v), np.take(arr, [1], axis=v))
        arr = np.concatenate([arr, both], axis=v)
    return arr


def prime_implicants(phi: TruthTable) -> list[Cube]:
    _check_k(phi.k)
    if phi.is_constant:
        raise TrivialFormula("constant formulas have no complete sum")
    imp = _implicant_array(phi)
    prime = imp.copy()
    for v in range(phi.k):
        free = np.take(imp, [2], axis=v)
        for d in (0, 1):
            sl = [slice(None)] * phi.k
            sl[v] = slice(d, d + 1)
            prime[tuple(sl)] &= ~free
    out = []
    for digits in zip(*np.nonzero(prime)):
        pos = neg = 0
        for v, d in enumerate(digits):
            if d == 1:
                pos |= 1 << v
            elif d == 0:
                neg |= 1 << v
        out.append(Cube(phi.k, pos, neg))
    return sorted(out, key=Cube.sort_key)


def complete_sum(phi: TruthTable) -> NormalFormula:
    return NormalFormula.of(phi.k, prime_implicants(phi))


def _consensus(a: Cube, b: Cube):
    """Consensus of two cubes opposed in exactly one variable; None otherwise.

    The empty cube (the constant 1) comes back as the string "one".
    """
    clash = (a.pos & b.neg) | (a.neg & b.pos)
    if clash == 0 or clash & (clash - 1):
        return None
    pos = (a.pos | b.pos) & ~clash
    neg = (a.neg | b.neg) & ~clash
    if pos & neg:
        return None
    if not (pos | neg):
        return "one"
    return Cube(a.k, pos, neg)


def _delete_subsumed(cubes: set) -> set:
    keep = set()
    for c in sorted(cubes, key=lambda x: bin(x.support).count("1")):
        if not any(d.subsumes(c) for d in keep):
            keep.add(c)
    return keep


def reduce_to_complete_sum(nf: NormalFormula) -> NormalFormula:
    """Combine clauses by consensus and delete subsumed ones until neither applies."""
    if not nf.cubes:
        raise TrivialFormula("the empty disjunction is constantly 0")
    cubes = _delete_subsumed(set(nf.cubes))
    changed = True
    while changed:
        changed = False
        ordered = sorted(cubes, key=Cube.sort_key)
        for x in range(len(ordered)):
            for y in range(x + 1, len(ordered)):
                c = _consensus(ordered[x], ordered[y])
                if c is None:
                    continue
                if c == "one":
                    raise TrivialFormula("the formula is constantly 1")
                if not any(d.subsumes(c) for d in cubes):
                    cubes = _delete_subsumed(cubes | {c})
                    changed = True
                    break
            if changed:
                break
    return NormalFormula.of(nf.k, cubes)


# -- formal products in the NAND groupoid ----------------------------------------

NAND = decode(2, 14)


def nand_truth_table(u: FormalProduct) -> TruthTable:
    _check_k(u.arity, NAND_CAP)
    if u.arity == 1:
        return TruthTable(1, 0b10)
    return TruthTable.from_values(induced_values(u, NAND))


def lift(nf: NormalFormula, k: int, offset: int) -> list[Cube]:
    return [Cube(k, c.pos << offset, c.neg << offset) for c in nf.cubes]


def claim1_check(u: FormalProduct) -> bool:
    """Nonconstant and dependent on every variable."""
    tt = nand_truth_table(u)
    return not tt.is_constant and tt.support() == list(range(u.arity))


def claim2_check(u: FormalProduct) -> bool:
    """Complete sum of u equals the union of the complete sums of the complemented factors."""
    f = factorize(u)
    p = complete_sum(nand_truth_table(u))
    s = complete_sum(nand_truth_table(f.left).complement())
    t = complete_sum(nand_truth_table(f.right).complement())
    joined = NormalFormula.of(u.arity, lift(s, u.arity, 0) + lift(t, u.arity, f.split))
    return p == joined


def rho_classes(phi: TruthTable) -> list[frozenset]:
    """Classes of variables linked by sharing a clause of the complete sum."""
    parent = list(range(phi.k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in complete_sum(phi).cubes:
        vs = [v for v, _ in c.literals()]
        for v in vs[1:]:
            parent[find(v)] = find(vs[0])
    groups: dict = {}
    for v in range(phi.k):
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def claim3_check(u: FormalProduct) -> bool:
    """Exactly two linked classes, namely the left and right factor variables."""
    f = factorize(u)
    classes = rho_classes(nand_truth_table(u))
    return classes == [frozenset(range(f.split)), frozenset(range(f.split, u.arity))]


@dataclass(frozen=True)
class NandInjectivity:
    k: int
    injective: bool
    products: int
    pair: tuple | None = None

    def __bool__(self):
        return self.injective


def nand_injectivity(k: int) -> NandInjectivity:
    """Whether distinct formal k-products have distinct complete sums under NAND."""
    if k > 12:
        raise ResourceLimitError(f"arity {k} exceeds the injectivity cap of 12", 12)
    if k < 1:
        raise ValueError("k must be positive")
    seen: dict = {}
    products = enumerate_products(k)
    for u in products:
        tt = nand_truth_table(u)
        key = complete_sum(tt) if k > 1 else tt
        if key in seen:
            return NandInjectivity(k, False, len(products), (seen[key], u))
        seen[key] = u
    return NandInjectivity(k, True, len(products))


WORKED_EXAMPLE = "x & y | x & y' | z | x' & y & z"
WORKED_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class NandSuite:
    max_arity: int
    worked_example: str
    claim1: bool
    claim2: bool
    claim3: bool
    injective: dict

    @property
    def ok(self) -> bool:
        return (self.worked_example == "x | z" and self.claim1 and self.claim2 and self.claim3
                and all(self.injective.values()))


def run_suite(max_arity: int = 7, injectivity_to: int = 8) -> NandSuite:
    nf = parse_formula(WORKED_EXAMPLE, WORKED_NAMES)
    worked = reduce_to_complete_sum(nf).format(WORKED_NAMES)
    c1 = c2 = c3 = True
    for k in range(1, max_arity + 1):
        for u in enumerate_products(k):
            c1 = c1 and claim1_check(u)
            if k >= 2:
                c2 = c2 and claim2_check(u)
                c3 = c3 and claim3_check(u)
    inj = {k: nand_injectivity(k).injective for k in range(1, injectivity_to + 1)}
    return NandSuite(max_arity, worked, c1, c2, c3, inj)
