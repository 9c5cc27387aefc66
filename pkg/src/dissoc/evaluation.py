"""Evaluating formal products and terms under operation tables.

The induced operation of a k-product is an :class:`OpVector`: its values on
all n**k input tuples, where tuple (g0, ..., g{k-1}) sits at the index whose
base-n numeral is g0 g1 ... g{k-1} (g0 most significant).  Because the left
factor of ``a b ⊙`` reads the first block of coordinates and the right
factor the rest, the vector of a composite is a table lookup on an outer
product of the two factor vectors; :func:`induced_vector` builds vectors
that way and :func:`induced_vector_naive` is the tuple-by-tuple oracle.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .backend import kernels
from .errors import DissocError, ResourceLimitError
from .formal_products import OP, FormalProduct
from .groupoid import GroupoidTable

VECTOR_CAP = 1 << 26


def check_vector_size(n: int, k: int, cap: int = VECTOR_CAP) -> None:
    if n ** k > cap:
        largest = 1
        while n ** (largest + 1) <= cap:
            largest += 1
        raise ResourceLimitError(f"n**k = {n}**{k} exceeds vector cap {cap}", largest)


def pack(values: np.ndarray, n: int) -> bytes:
    if n == 2:
        return np.packbits(values.astype(np.uint8)).tobytes()
    return np.ascontiguousarray(values, dtype=np.uint8).tobytes()


def unpack(data: bytes, n: int, k: int) -> np.ndarray:
    raw = np.frombuffer(data, dtype=np.uint8)
    if n == 2:
        return np.unpackbits(raw, count=1 << k)
    return raw


@dataclass(frozen=True)
class OpVector:
    """A k-ary operation on {0..n-1}.  ``data`` is bit-packed when n == 2."""

    n: int
    k: int
    data: bytes

    @classmethod
    def from_values(cls, n: int, k: int, values) -> "OpVector":
        values = np.asarray(values, dtype=np.uint8)
        if values.shape != (n ** k,):
            raise ValueError(f"expected {n ** k} values, got shape {values.shape}")
        if values.size and int(values.max()) >= n:
            raise ValueError("value out of range")
        return cls(n, k, pack(values, n))

    @property
    def values(self) -> np.ndarray:
        return unpack(self.data, self.n, self.k)

    def __getitem__(self, g: Sequence[int]) -> int:
        return int(self.values[tuple_index(g, self.n)])

    def __len__(self):
        return self.n ** self.k

    def to_hex(self) -> str:
        if self.n != 2:
            raise ValueError("hex form is defined for n = 2 only")
        bits = 0
        for idx, v in enumerate(self.values):
            if v:
                bits |= 1 << idx
        return format(bits, f"0{max(1, (1 << self.k) // 4)}x")

    def digits(self) -> str:
        return "".join(str(int(v)) for v in self.values) if self.n <= 10 else \
            ",".join(str(int(v)) for v in self.values)

    @classmethod
    def from_hex(cls, text: str, k: int) -> "OpVector":
        bits = int(text, 16)
        if bits >> (1 << k):
            raise ValueError(f"hex value too wide for arity {k}")
        return cls.from_values(2, k, [(bits >> i) & 1 for i in range(1 << k)])

    @classmethod
    def from_digits(cls, text: str, n: int) -> "OpVector":
        parts = text.split(",") if "," in text else list(text.strip())
        values = [int(p) for p in parts]
        k = 0
        while n ** k < len(values):
            k += 1
        if n ** k != len(values):
            raise ValueError(f"{len(values)} digits is not a power of {n}")
        return cls.from_values(n, k, values)


def tuple_index(g: Sequence[int], n: int) -> int:
    idx = 0
    for x in g:
        idx = idx * n + int(x)
    return idx


def index_tuple(idx: int, n: int, k: int) -> tuple:
    out = []
    for _ in range(k):
        idx, d = divmod(idx, n)
        out.append(d)
    return tuple(reversed(out))


def all_tuples(n: int, k: int):
    return product(range(n), repeat=k)


def eval_rpn(w: FormalProduct, t: GroupoidTable, g: Sequence[int]) -> int:
    """Stack-machine value of w on the first arity(w) entries of g."""
    if len(g) < w.arity:
        raise ValueError(f"need at least {w.arity} inputs, got {len(g)}")
    entries = t.entries
    stack = []
    for s in w.word:
        if s == OP:
            b = stack.pop()
            stack.append(int(entries[stack.pop(), b]))
        else:
            stack.append(int(g[s]))
    return stack[0]


def projection(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.uint8)


def compose_values(va: np.ndarray, vb: np.ndarray, entries: np.ndarray) -> np.ndarray:
    """result[a-block, b-block] = entries[va[a-block], vb[b-block]], flattened."""
    blocks = entries[:, vb]
    return kernels.fanout(va[None, :], blocks)[0]


def compose_vectors(va: OpVector, vb: OpVector, t: GroupoidTable) -> OpVector:
    if not va.n == vb.n == t.n:
        raise ValueError("vectors and table must share n")
    check_vector_size(t.n, va.k + vb.k)
    out = compose_values(va.values, vb.values, t.entries)
    return OpVector(t.n, va.k + vb.k, pack(out, t.n))


def _interpret_values(w: FormalProduct, tables: Sequence[GroupoidTable]) -> np.ndarray:
    n = tables[0].n
    check_vector_size(n, w.arity)
    stack = []
    j = 0
    for s in w.word:
        if s == OP:
            vb = stack.pop()
            va = stack.pop()
            stack.append(compose_values(va, vb, tables[j].entries))
            j += 1
        else:
            stack.append(projection(n))
    return stack[0]


def induced_vector(w: FormalProduct, t: GroupoidTable) -> OpVector:
    values = _interpret_values(w, [t] * max(1, w.n_ops))
    return OpVector(t.n, w.arity, pack(values, t.n))


def induced_values(w: FormalProduct, t: GroupoidTable) -> np.ndarray:
    """Unpacked induced vector."""
    return _interpret_values(w, [t] * max(1, w.n_ops))


def induced_vector_naive(w: FormalProduct, t: GroupoidTable) -> OpVector:
    check_vector_size(t.n, w.arity)
    values = [eval_rpn(w, t, g) for g in all_tuples(t.n, w.arity)]
    return OpVector.from_values(t.n, w.arity, values)


def interpret(w: FormalProduct, beta: Sequence[GroupoidTable]) -> OpVector:
    """Induced operation with the j-th operator (left to right) read as beta[j]."""
    beta = list(beta)
    if len(beta) != w.n_ops:
        raise ValueError(f"need {w.n_ops} tables, got {len(beta)}")
    if w.arity == 1:
        raise ValueError("arity-1 products take no tables; use induced_vector")
    if len({b.n for b in beta}) != 1:
        raise ValueError("all tables must share n")
    values = _interpret_values(w, beta)
    return OpVector(beta[0].n, w.arity, pack(values, beta[0].n))


# -- terms with repeated variables -------------------------------------------

class TermError(DissocError, ValueError):
    pass


class UnboundVariable(DissocError, KeyError):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"({_inner(self.left)}*{_inner(self.right)})"


Term = Var | App


def _inner(t) -> str:
    return str(t)


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{_top(self.lhs)} = {_top(self.rhs)}"


def _top(t) -> str:
    s = str(t)
    return s[1:-1] if isinstance(t, App) else s


def term_variables(t: Term) -> list[str]:
    out: list[str] = []

    def walk(x):
        if isinstance(x, Var):
            if x.name not in out:
                out.append(x.name)
        else:
            walk(x.left)
            walk(x.right)

    walk(t)
    return out


def identity_variables(ident: Identity) -> list[str]:
    names = term_variables(ident.lhs)
    for v in term_variables(ident.rhs):
        if v not in names:
            names.append(v)
    return names


def op_count(t: Term) -> int:
    return 0 if isinstance(t, Var) else 1 + op_count(t.left) + op_count(t.right)


_TERM_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z_0-9]*)|(\*|⋆|•)|(\()|(\)))")


def _term_tokens(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TERM_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise TermError(f"unexpected character at offset {pos}: {text[pos:pos + 8]!r}")
        tokens.append("*" if m.group(2) else m.group(0).strip())
        pos = m.end()
    return tokens


def parse_term(text: str) -> Term:
    """Infix term with explicit parentheses; the outermost pair may be omitted."""
    tokens = _term_tokens(text)
    pos = 0

    def operand():
        nonlocal pos
        if pos >= len(tokens):
            raise TermError("unexpected end of term")
        tok = tokens[pos]
        if tok == "(":
            pos += 1
            inner = expression()
            if pos >= len(tokens) or tokens[pos] != ")":
                raise TermError("expected ')'")
            pos += 1
            return inner
        if tok in ("*", ")"):
            raise TermError(f"unexpected {tok!r}")
        pos += 1
        return Var(tok)

    def expression():
        nonlocal pos
        left = operand()
        if pos < len(tokens) and tokens[pos] == "*":
            pos += 1
            right = operand()
            if pos < len(tokens) and tokens[pos] == "*":
                raise TermError("ambiguous product: parenthesize a*b*c")
            return App(left, right)
        return left

    term = expression()
    if pos != len(tokens):
        raise TermError(f"trailing input {' '.join(tokens[pos:])!r}")
    return term


def parse_identity(text: str) -> Identity:
    parts = re.split(r"≈|=", text)
    if len(parts) != 2:
        raise TermError("an identity needs exactly one '=' (or '≈')")
    return Identity(parse_term(parts[0]), parse_term(parts[1]))


def eval_term(term: Term, t: GroupoidTable, assignment: Mapping[str, int]) -> int:
    if isinstance(term, Var):
        try:
            return int(assignment[term.name])
        except KeyError:
            raise UnboundVariable(term.name) from None
    return t(eval_term(term.left, t, assignment), eval_term(term.right, t, assignment))


@dataclass(frozen=True)
class IdentityCheck:
    holds: bool
    variables: tuple
    countermodel: dict | None = None
    lhs_value: int | None = None
    rhs_value: int | None = None

    def __bool__(self):
        return self.holds


def identity_holds(ident: Identity, t: GroupoidTable) -> IdentityCheck:
    """Check all n**v assignments in lexicographic order (first variable slowest)."""
    names = identity_variables(ident)
    for values in product(range(t.n), repeat=len(names)):
        env = dict(zip(names, values))
        lv = eval_term(ident.lhs, t, env)
        rv = eval_term(ident.rhs, t, env)
        if lv != rv:
            return IdentityCheck(False, tuple(names), env, lv, rv)
    return IdentityCheck(True, tuple(names))


def beta_identity() -> Identity:
    return parse_identity("((x*y)*z)*z = ((x*y)*(x*z))*(x*z)")


def associative_law() -> Identity:
    return parse_identity("x*(y*z) = (x*y)*z")


def commutative_law() -> Identity:
    return parse_identity("x*y = y*x")


def idempotent_law() -> Identity:
    return parse_identity("x*x = x")
