"""Formal k-products: parenthesizations of x0 x1 ... x{k-1} written in rPn.

A formal product is stored as a flat tuple of symbols.  Variables are
non-negative integers (``3`` is ``x3``) and the operator is :data:`OP`.
Products of arity ``k`` are ordered recursively: by split index ascending,
then by the order of the left factor, then by the order of the right factor.
That order drives :func:`enumerate_products`, :func:`rank` and :func:`unrank`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

from .errors import DissocError, ResourceLimitError

OP = -1
OP_SYMBOL = "•"
ENUMERATION_CAP = 10**8

_TOKEN = re.compile(r"x(\d+)|([.•*])|(\()|(\))")


class FormalProductError(DissocError, ValueError):
    """Text or word that is not a formal product.

    ``criteria`` lists the violated defining criteria (1: variables are
    x0..x{k-1} in order, 2: length is 2k-1, 3: k-1 operators, 4: every
    prefix has more variables than operators).  It is empty for lexical
    errors such as an unknown token.
    """

    def __init__(self, message, criteria=()):
        super().__init__(message)
        self.criteria = tuple(criteria)


class NoFactorization(DissocError, ValueError):
    """Raised when factorizing the arity-1 product x0."""


@dataclass(frozen=True)
class FormalProduct:
    word: tuple
    arity: int = field(compare=False)

    @classmethod
    def from_word(cls, word: Sequence[int]) -> "FormalProduct":
        word = tuple(int(s) for s in word)
        validate_word(word)
        return cls(word, (len(word) + 1) // 2)

    @property
    def n_ops(self) -> int:
        return self.arity - 1

    def shifted(self, offset: int) -> tuple:
        return tuple(s if s == OP else s + offset for s in self.word)

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"FormalProduct({render(self)!r})"


@dataclass(frozen=True)
class Factorization:
    left: FormalProduct
    right: FormalProduct
    split: int


def _violations(word: Sequence[int]) -> list[tuple[int, str]]:
    found = []
    variables = [s for s in word if s != OP]
    k = len(variables)
    n_ops = len(word) - k
    if variables != list(range(k)):
        found.append((1, f"variables must be x0..x{k - 1} in order, got "
                          + " ".join(f"x{v}" for v in variables)))
    if len(word) != 2 * k - 1:
        found.append((2, f"length {len(word)} != 2k-1 = {2 * k - 1}"))
    if n_ops != k - 1:
        found.append((3, f"{n_ops} operators != k-1 = {k - 1}"))
    depth = 0
    for pos, s in enumerate(word):
        depth += -1 if s == OP else 1
        if depth < 1:
            prefix = " ".join(_sym(t) for t in word[:pos + 1])
            found.append((4, f"prefix {prefix!r} has at least as many "
                             "operators as variables"))
            break
    return found


def validate_word(word: Sequence[int]) -> None:
    if not word:
        raise FormalProductError("empty word is not a formal product", ())
    bad = [s for s in word if s != OP and (not isinstance(s, int) or s < 0)]
    if bad:
        raise FormalProductError(f"invalid symbols {bad!r}", ())
    found = _violations(word)
    if found:
        message = "; ".join(f"criterion {c}: {msg}" for c, msg in found)
        raise FormalProductError(message, [c for c, _ in found])


def _sym(s: int, op: str = OP_SYMBOL) -> str:
    return op if s == OP else f"x{s}"


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormalProductError(f"malformed token at offset {pos}: {text[pos:pos + 8]!r}")
        if m.group(1) is not None:
            tokens.append(int(m.group(1)))
        elif m.group(2) is not None:
            tokens.append(OP)
        else:
            tokens.append(m.group(0))
        pos = m.end()
    return tokens


def _parse_infix(tokens: list) -> tuple:
    pos = 0

    def expr():
        nonlocal pos
        if pos >= len(tokens):
            raise FormalProductError("unexpected end of infix expression")
        tok = tokens[pos]
        if tok == "(":
            pos += 1
            left = expr()
            if pos >= len(tokens) or tokens[pos] != OP:
                raise FormalProductError("expected operator inside parentheses")
            pos += 1
            right = expr()
            if pos >= len(tokens) or tokens[pos] != ")":
                raise FormalProductError("expected ')'")
            pos += 1
            return left + right + (OP,)
        if isinstance(tok, int) and tok != OP:
            pos += 1
            return (tok,)
        raise FormalProductError(f"unexpected token {tok!r} in infix expression")

    word = expr()
    if pos < len(tokens) and tokens[pos] == OP:
        # bare top level "a • b" without the outer pair
        pos += 1
        word = word + expr() + (OP,)
    if pos != len(tokens):
        raise FormalProductError("trailing tokens after infix expression")
    return word


def parse(text: str) -> FormalProduct:
    """Parse rPn (``"x0 x1 • x2 •"``, ``.`` also accepted) or infix text."""
    tokens = _tokenize(text)
    if not tokens:
        raise FormalProductError("empty input")
    if "(" in tokens or ")" in tokens:
        word = _parse_infix(tokens)
    else:
        word = tuple(tokens)
    return FormalProduct.from_word(word)


def render(w: FormalProduct, op: str = OP_SYMBOL) -> str:
    """rPn text with single spaces, the inverse of :func:`parse`."""
    return " ".join(_sym(s, op) for s in w.word)


def to_infix(w: FormalProduct, op: str = OP_SYMBOL) -> str:
    stack = []
    for s in w.word:
        if s == OP:
            b = stack.pop()
            a = stack.pop()
            stack.append(f"({a}{op}{b})")
        else:
            stack.append(f"x{s}")
    return stack[0]


X0 = FormalProduct((0,), 1)


def compose(a: FormalProduct, b: FormalProduct) -> FormalProduct:
    """The product a b ⊙: b's variables shifted past a's, joined by one operator."""
    return FormalProduct(a.word + b.shifted(a.arity) + (OP,), a.arity + b.arity)


def factorize(w: FormalProduct) -> Factorization:
    if w.arity < 2:
        raise NoFactorization("x0 has no factorization")
    need = 1
    pos = len(w.word) - 2
    while True:
        need += 1 if w.word[pos] == OP else -1
        if need == 0:
            break
        pos -= 1
    left_word = w.word[:pos]
    split = (len(left_word) + 1) // 2
    right_word = tuple(s if s == OP else s - split for s in w.word[pos:-1])
    return Factorization(FormalProduct(left_word, split),
                         FormalProduct(right_word, w.arity - split), split)


def count(k: int) -> int:
    """Number of formal k-products, the Catalan number C(k-1)."""
    if k < 1:
        raise ValueError("arity must be positive")
    return comb(2 * k - 1, k) // (2 * k - 1)


def _catalan_recurrence(m: int) -> int:
    c = [1]
    for t in range(1, m + 1):
        c.append(sum(c[s] * c[t - 1 - s] for s in range(t)))
    return c[m]


@lru_cache(maxsize=None)
def _split_offsets(k: int) -> tuple:
    offsets = [0, 0]
    for i in range(1, k):
        offsets.append(offsets[-1] + count(i) * count(k - i))
    return tuple(offsets)


def split_offset(k: int, i: int) -> int:
    """Rank of the first i-split among the formal k-products."""
    return _split_offsets(k)[i]


@lru_cache(maxsize=64)
def _enumerate(k: int) -> tuple:
    if k == 1:
        return (X0,)
    out = []
    for i in range(1, k):
        rights = _enumerate(k - i)
        for a in _enumerate(i):
            for b in rights:
                out.append(compose(a, b))
    return tuple(out)


def enumerate_products(k: int, cap: int = ENUMERATION_CAP) -> tuple:
    """All formal k-products in canonical order."""
    if k < 1:
        raise ValueError("arity must be positive")
    if count(k) > cap:
        largest = k
        while count(largest) > cap:
            largest -= 1
        raise ResourceLimitError(f"C({k - 1}) = {count(k)} exceeds cap {cap}", largest)
    return _enumerate(k)


def iter_products(k: int) -> Iterator[FormalProduct]:
    """Lazy canonical-order enumeration, no cap."""
    if k == 1:
        yield X0
        return
    for i in range(1, k):
        for a in iter_products(i):
            for b in iter_products(k - i):
                yield compose(a, b)


def rank(w: FormalProduct) -> int:
    if w.arity == 1:
        return 0
    f = factorize(w)
    return (split_offset(w.arity, f.split)
            + rank(f.left) * count(w.arity - f.split) + rank(f.right))


def unrank(k: int, r: int) -> FormalProduct:
    if not 0 <= r < count(k):
        raise IndexError(f"rank {r} out of range for arity {k}")
    if k == 1:
        return X0
    offsets = _split_offsets(k)
    i = 1
    while offsets[i + 1] <= r:
        i += 1
    ra, rb = divmod(r - offsets[i], count(k - i))
    return compose(unrank(i, ra), unrank(k - i, rb))


def is_formal_product(word: Sequence[int]) -> bool:
    try:
        validate_word(word)
    except FormalProductError:
        return False
    return True
