"""Which k-ary operations arise as a formal product read through k-1 binary tables.

A target phi is represented by (u, beta) when interpreting the j-th
operator of u as beta[j] (left to right in rPn) induces phi.  The
exhaustive search evaluates every candidate in batches; the propagating
search treats the entries of each beta[j] as unknowns, walks the input
tuples in order, fills entries that the target forces, branches on the
rest, and backtracks on a contradiction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .backend import kernels
from .errors import DissocError, ResourceLimitError
from .evaluation import OpVector, all_tuples, interpret, pack
from .formal_products import OP, FormalProduct, count, enumerate_products, rank
from .groupoid import GroupoidTable, all_tables_array

EXHAUSTIVE_BUDGET = 1 << 22
BATCH = 1 << 14
TRACE_CAP = 5000


class SearchBudgetExceeded(ResourceLimitError):
    pass


def phi_count(n: int, k: int) -> int:
    """Interpreted formal k-products counted with multiplicity: n^(n^2 (k-1)) C(k-1)."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    return n ** (n * n * (k - 1)) * count(k)


def ratio_R(n: int, k: int) -> Fraction:
    """Number of k-ary operations over the interpreted-product count, n^(n^k - n^2 (k-1)) / C(k-1)."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    e = n ** k - n * n * (k - 1)
    return Fraction(n ** e, count(k)) if e >= 0 else Fraction(1, n ** -e * count(k))


def r_exceeds_one(n: int, k: int) -> bool:
    """R(n, k) > 1, decided from the exponent without forming n^(n^k)."""
    if n < 2:
        return False
    e = n ** k - n * n * (k - 1)
    if e <= 0:
        return False
    # C(k-1) < 4^k <= n^e once e >= 2k, since n >= 2
    if e >= 2 * k:
        return True
    return n ** e > count(k)


def unrepresentable_phi() -> OpVector:
    """The ternary operation with value 1 exactly at 001, 100 and 101."""
    ones = {(0, 0, 1), (1, 0, 0), (1, 0, 1)}
    return OpVector.from_values(2, 3, [1 if g in ones else 0 for g in all_tuples(2, 3)])


@dataclass(frozen=True)
class RepresentationWitness:
    product: FormalProduct
    ops: tuple            # GroupoidTable per operator, left to right

    def verify(self, phi: OpVector) -> bool:
        return interpret(self.product, self.ops) == phi

    def to_record(self) -> dict:
        return {"product": str(self.product), "rank": rank(self.product),
                "ops": [str(t.code) for t in self.ops]}


@dataclass
class SearchResult:
    mode: str
    witness: RepresentationWitness | None
    explored: int = 0
    trace: list = field(default_factory=list)

    @property
    def representable(self) -> bool:
        return self.witness is not None


def _combo_tables(tables: np.ndarray, combos: np.ndarray, ops: int) -> list:
    """Per operator j, the stack tables[digit j of each combo] (digit 0 most significant)."""
    T = tables.shape[0]
    out = []
    for j in range(ops):
        digit = (combos // T ** (ops - 1 - j)) % T
        out.append(tables[digit])
    return out


def _batch_interpret(u: FormalProduct, op_tables: list, n: int) -> np.ndarray:
    """Vectors of u under a batch of operator assignments, shape (batch, n^k)."""
    batch = op_tables[0].shape[0] if op_tables else 1
    proj = np.broadcast_to(np.arange(n, dtype=np.uint8), (batch, n))
    stack = []
    j = 0
    for s in u.word:
        if s == OP:
            vb = stack.pop()
            va = stack.pop()
            stack.append(kernels.batch_compose(op_tables[j], np.ascontiguousarray(va),
                                               np.ascontiguousarray(vb)))
            j += 1
        else:
            stack.append(proj)
    return np.asarray(stack[0])


def _candidates(n: int, k: int):
    tables = all_tables_array(n)
    return tables, tables.shape[0] ** (k - 1)


def _exhaustive(phi: OpVector, budget: int) -> SearchResult:
    n, k = phi.n, phi.k
    total = n ** (n * n * (k - 1)) * count(k)
    if total > budget:
        raise SearchBudgetExceeded(f"{total} candidates exceed the budget of {budget}")
    target = phi.values
    tables, combos = _candidates(n, k)
    res = SearchResult("exhaustive", None)
    for u in enumerate_products(k):
        for start in range(0, combos, BATCH):
            idx = np.arange(start, min(combos, start + BATCH))
            op_tables = _combo_tables(tables, idx, k - 1)
            vecs = _batch_interpret(u, op_tables, n)
            hits = np.nonzero((vecs == target).all(axis=1))[0]
            res.explored += idx.size
            if hits.size:
                ops = tuple(GroupoidTable(t[hits[0]]) for t in op_tables)
                res.witness = RepresentationWitness(u, ops)
                return res
    return res


def _propagate_product(u: FormalProduct, target: np.ndarray, n: int, res: SearchResult):
    """Depth-first fill of the operator entries for one product; None if no fill works."""
    k = u.arity
    tuples = list(all_tuples(n, k))
    # operator j's entry (a, b) lives at slot j*n*n + a*n + b; -1 is unknown
    entries = [-1] * ((k - 1) * n * n)

    def note(event):
        if len(res.trace) < TRACE_CAP:
            res.trace.append(event)

    def evaluate(g, want):
        """Walk u on g; returns ('ok',), ('need', slot) or ('conflict', slot, value)."""
        stack = []
        j = 0
        last = len(u.word) - 1
        for pos, s in enumerate(u.word):
            if s == OP:
                b = stack.pop()
                a = stack.pop()
                slot = j * n * n + a * n + b
                v = entries[slot]
                if v < 0:
                    if pos == last:
                        return ("force", slot, want)
                    return ("need", slot)
                stack.append(v)
                j += 1
            else:
                stack.append(g[s])
        if stack[0] != want:
            return ("conflict", slot, stack[0])
        return ("ok",)

    def slot_name(slot):
        j, rest = divmod(slot, n * n)
        a, b = divmod(rest, n)
        return f"{a}{b}β{j}"

    def solve(pos):
        res.explored += 1
        while pos < len(tuples):
            g = tuples[pos]
            want = int(target[pos])
            r = evaluate(g, want)
            if r[0] == "ok":
                pos += 1
                continue
            if r[0] == "force":
                slot = r[1]
                entries[slot] = want
                note(("forced", u, "".join(map(str, g)), slot_name(slot), want))
                ok = solve(pos + 1)
                if ok:
                    return True
                entries[slot] = -1
                return False
            if r[0] == "need":
                slot = r[1]
                for v in range(n):
                    entries[slot] = v
                    note(("branch", u, "".join(map(str, g)), slot_name(slot), v))
                    if solve(pos):
                        return True
                entries[slot] = -1
                return False
            note(("wall", u, "".join(map(str, g)), slot_name(r[1]), r[2], want))
            return False
        return True

    if not solve(0):
        return None
    filled = [max(v, 0) for v in entries]
    ops = tuple(GroupoidTable(np.array(filled[j * n * n:(j + 1) * n * n], dtype=np.uint8)
                              .reshape(n, n)) for j in range(k - 1))
    return RepresentationWitness(u, ops)


def _propagate(phi: OpVector) -> SearchResult:
    n, k = phi.n, phi.k
    if k > 6 or n > 3:
        raise ResourceLimitError("propagating search is limited to k <= 6 and n <= 3")
    res = SearchResult("propagate", None)
    target = phi.values
    for u in enumerate_products(k):
        w = _propagate_product(u, target, n, res)
        if w is not None:
            res.witness = w
            return res
    return res


def search_representation(phi: OpVector, mode: str = "exhaustive",
                          budget: int = EXHAUSTIVE_BUDGET) -> SearchResult:
    if phi.k < 2:
        raise ValueError("need arity at least 2 (x0 alone takes no tables)")
    if mode == "exhaustive":
        return _exhaustive(phi, budget)
    if mode == "propagate":
        return _propagate(phi)
    raise ValueError(f"unknown mode {mode!r}")


def representable_vectors(n: int, k: int, budget: int = EXHAUSTIVE_BUDGET) -> set:
    """Packed vectors of every interpreted formal k-product."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if phi_count(n, k) > budget:
        raise SearchBudgetExceeded(f"Phi({n},{k}) = {phi_count(n, k)} exceeds the budget")
    tables, combos = _candidates(n, k)
    seen = set()
    for u in enumerate_products(k):
        for start in range(0, combos, BATCH):
            idx = np.arange(start, min(combos, start + BATCH))
            vecs = _batch_interpret(u, _combo_tables(tables, idx, k - 1), n)
            for row in np.unique(vecs, axis=0):
                seen.add(pack(row, n))
    return seen


@dataclass(frozen=True)
class RepresentableCensus:
    n: int
    k: int
    representable: int
    total: int
    phi_count: int

    @property
    def unrepresentable(self) -> int:
        return self.total - self.representable


def representable_census(n: int, k: int, budget: int = EXHAUSTIVE_BUDGET) -> RepresentableCensus:
    total = n ** (n ** k)
    if n == 1:
        return RepresentableCensus(n, k, 1, 1, phi_count(n, k))
    return RepresentableCensus(n, k, len(representable_vectors(n, k, budget)), total,
                               phi_count(n, k))
