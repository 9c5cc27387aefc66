"""Value sets over all parenthesizations, yields, and separation certificates.

``allvals(w)`` is the set of values that the formal |w|-products take on the
word w; it is an interval DP over value bitmasks (the CYK recurrence with
set union and the elementwise table product).  A sequence yields S when
every formal product, evaluated on the matching prefix, lands in S.

Block patterns describe families of words such as ``a^{p} b a^{q+r+1} b``;
the exponents are affine in p, q, r >= 0.  Replacing each growing exponent e
by "at least e(0, 0, 0)" turns a family into a regular language containing
it, and the value set of a regular language is the least fixpoint of
V[s][t] |= V[s][m] ⋄ V[m][t] over an ε-free automaton.  That gives sound
all-length statements from a finite computation.

The separation check assembles three kinds of evidence for a target set T:
left and right witness sets for every pair of T, and a covering of the
(i, j, k) obligations by block patterns whose i-split and j-split values
are disjoint subsets of T.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import combinations, product
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .backend import kernels
from .errors import DissocError
from .groupoid import (
    GroupoidTable, ci3_decode, decode, idempotent_elements, identity_elements,
    is_semilattice_pair, named_table, subgroupoid_closure,
)

DEFAULT_BOUNDED_LENGTH = 30
DEFAULT_SEARCH_BUDGET = 20000


class CertificateError(DissocError):
    """A certificate's side condition does not hold on the table."""


class CertificateNotFound(DissocError):
    """Even the bounded evidence contradicts the requested yield set."""


class TemplateError(DissocError, ValueError):
    pass


def mask_to_set(mask: int) -> frozenset:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


def set_to_mask(values: Iterable[int]) -> int:
    m = 0
    for v in values:
        m |= 1 << int(v)
    return m


def fmt_set(s: Iterable[int]) -> str:
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


# -- words and sequences ------------------------------------------------------

def _check_word(word: Sequence[int], t: GroupoidTable) -> list[int]:
    word = [int(x) for x in word]
    if not word:
        raise ValueError("word must be nonempty")
    if min(word) < 0 or max(word) >= t.n:
        raise ValueError(f"word letters must lie in 0..{t.n - 1}")
    return word


def allvals(word: Sequence[int], t: GroupoidTable) -> frozenset:
    """Values of every formal |word|-product evaluated on the word."""
    word = _check_word(word, t)
    return mask_to_set(kernels.prefix_value_masks(word, t.entries)[-1])


def prefix_allvals(word: Sequence[int], t: GroupoidTable) -> list[frozenset]:
    """allvals of word[:m] for m = 1..len(word)."""
    word = _check_word(word, t)
    return [mask_to_set(m) for m in kernels.prefix_value_masks(word, t.entries)]


def split_values(word: Sequence[int], i: int, t: GroupoidTable) -> frozenset:
    """Values of the i-splits evaluated on the word."""
    word = _check_word(word, t)
    if not 1 <= i < len(word):
        raise ValueError(f"split index must satisfy 1 <= i < {len(word)}")
    return _product_sets(t, allvals(word[:i], t), allvals(word[i:], t))


def _product_sets(t: GroupoidTable, left: Iterable[int], right: Iterable[int]) -> frozenset:
    right = list(right)
    return frozenset(t(a, b) for a in left for b in right)


_SEQ_TOKEN = re.compile(r"\s*(\d+|\(|\))\s*,?")


@dataclass(frozen=True)
class EventuallyPeriodicSeq:
    """prefix followed by period repeated forever."""

    prefix: tuple
    period: tuple

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")

    @classmethod
    def parse(cls, text: str) -> "EventuallyPeriodicSeq":
        """Syntax ``10(0)``: prefix letters, then the period in parentheses.

        Letters are single digits, or comma-separated numbers such as
        ``1,0,(12)`` when parentheses group a multi-digit letter list.
        """
        text = text.strip()
        if text.count("(") != 1 or not text.endswith(")"):
            raise ValueError(f"expected prefix(period), got {text!r}")
        head, tail = text[:-1].split("(")

        def letters(s):
            s = s.strip().strip(",")
            if not s:
                return ()
            if "," in s or " " in s:
                return tuple(int(x) for x in re.split(r"[,\s]+", s) if x)
            return tuple(int(c) for c in s)

        return cls(letters(head), letters(tail))

    @classmethod
    def constant(cls, a: int) -> "EventuallyPeriodicSeq":
        return cls((), (a,))

    def take(self, m: int) -> list[int]:
        out = list(self.prefix[:m])
        while len(out) < m:
            out.extend(self.period[:m - len(out)])
        return out

    def letters(self) -> set:
        return set(self.prefix) | set(self.period)

    def __str__(self):
        sep = "," if max(self.letters()) > 9 else ""
        return sep.join(map(str, self.prefix)) + "(" + sep.join(map(str, self.period)) + ")"


def seq_yield(seq: EventuallyPeriodicSeq, t: GroupoidTable, L: int) -> tuple:
    """Union of allvals over the first m terms, m = 1..L, and where it stopped growing.

    The second component is the last m at which the union grew; it is None
    when that happens at m = L > 1, since the window shows no plateau.
    """
    if L < 1:
        raise ValueError("L must be positive")
    acc = 0
    last = 1
    for m, mask in enumerate(kernels.prefix_value_masks(seq.take(L), t.entries), 1):
        if mask | acc != acc:
            acc |= mask
            last = m
    stabilized = None if (last == L and L > 1) else last
    return mask_to_set(acc), stabilized


# -- automata ------------------------------------------------------------------

@dataclass(frozen=True)
class Automaton:
    """ε-free automaton; edges[s] maps targets to letter masks."""

    size: int
    start: int
    accept: frozenset
    edges: tuple

    def init_matrix(self) -> list:
        rows = [[0] * self.size for _ in range(self.size)]
        for s, targets in enumerate(self.edges):
            for tgt, mask in targets.items():
                rows[s][tgt] |= mask
        return rows


def automaton_values(aut: Automaton, t: GroupoidTable) -> frozenset:
    """Values of all parenthesizations of all accepted words."""
    closure = kernels.automaton_closure(aut.init_matrix(), t.entries)
    mask = 0
    for a in aut.accept:
        mask |= closure[aut.start][a]
    return mask_to_set(mask)


def prefix_automaton(seq: EventuallyPeriodicSeq) -> Automaton:
    """Accepts exactly the nonempty prefixes of the sequence."""
    word = list(seq.prefix) + list(seq.period)
    size = len(word)
    edges = [dict() for _ in range(size)]
    for pos, letter in enumerate(word):
        nxt = pos + 1 if pos + 1 < size else len(seq.prefix)
        edges[pos][nxt] = edges[pos].get(nxt, 0) | (1 << letter)
    # prefixes end anywhere once at least one letter is read; the start
    # state is accepting only if a path returns to it
    accept = frozenset(range(size))
    return Automaton(size, 0, accept, tuple(edges))


def block_automaton(items: Sequence[tuple]) -> Automaton:
    """Glushkov automaton of a concatenation of letter^count and letter^(>=count) items.

    ``items`` holds (letter, count, unbounded).  Positions are the states;
    the automaton is ε-free by construction.
    """
    positions = []          # (letter, starred)
    groups = []             # per item: list of position ids, starred flag
    for letter, c, unbounded in items:
        ids = []
        for _ in range(c):
            ids.append(len(positions))
            positions.append((letter, False))
        star = None
        if unbounded:
            star = len(positions)
            positions.append((letter, True))
        groups.append((ids, star))
    size = len(positions) + 1
    start = len(positions)
    edges = [dict() for _ in range(size)]

    def add(src, dst):
        edges[src][dst] = edges[src].get(dst, 0) | (1 << positions[dst][0])

    # last positions reached so far (start counts as the empty prefix)
    frontier = {start}
    for ids, star in groups:
        for pid in ids:
            for src in frontier:
                add(src, pid)
            frontier = {pid}
        if star is not None:
            for src in frontier:
                add(src, star)
            add(star, star)
            frontier = frontier | {star}
    accept = frozenset(frontier - {start})
    if not accept:
        raise TemplateError("pattern admits only the empty word")
    return Automaton(size, start, accept, tuple(edges))


# -- affine block patterns -----------------------------------------------------

PARAMS = ("p", "q", "r")
_BLOCK = re.compile(r"^([a-z]|\d+)(?:\^(?:\{([^}]*)\}|(\d+|[pqr])))?$")
_TERM = re.compile(r"^(\d*)([pqr]?)$")


def parse_affine(text: str, params: Sequence[str] = PARAMS) -> tuple:
    """'p+q+1' -> (1, 1, 1, 0): constant first, then one coefficient per parameter."""
    coeffs = [0] * (len(params) + 1)
    text = text.replace(" ", "")
    if not text:
        raise TemplateError("empty exponent")
    for term in text.split("+"):
        m = _TERM.match(term)
        if not m or not term:
            raise TemplateError(f"bad exponent term {term!r}")
        num, var = m.groups()
        if var:
            if var not in params:
                raise TemplateError(f"unknown parameter {var!r}")
            coeffs[1 + params.index(var)] += int(num) if num else 1
        else:
            coeffs[0] += int(num)
    return tuple(coeffs)


def _affine_eval(a: tuple, values: Sequence[int]) -> int:
    return a[0] + sum(c * v for c, v in zip(a[1:], values))


def _affine_sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def _affine_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _nonneg(a: tuple) -> bool:
    return all(c >= 0 for c in a)


def _is_zero(a: tuple) -> bool:
    return all(c == 0 for c in a)


def _fmt_affine(a: tuple, params: Sequence[str] = PARAMS) -> str:
    parts = [(f"{c}" if c != 1 else "") + v for c, v in zip(a[1:], params) if c]
    if a[0] or not parts:
        parts.append(str(a[0]))
    return "+".join(parts)


@dataclass(frozen=True)
class BlockPattern:
    """A word family written as blocks symbol^{affine exponent}."""

    name: str
    blocks: tuple          # (symbol, affine exponent)
    params: tuple = PARAMS

    @classmethod
    def parse(cls, text: str, name: str | None = None, params: Sequence[str] = PARAMS):
        if ":" in text:
            name, text = (s.strip() for s in text.split(":", 1))
        blocks = []
        for tok in text.split():
            m = _BLOCK.match(tok)
            if not m:
                raise TemplateError(f"bad block {tok!r}")
            sym, braced, bare = m.groups()
            expo = braced if braced is not None else (bare if bare is not None else "1")
            blocks.append((sym, parse_affine(expo, params)))
        if not blocks:
            raise TemplateError("pattern has no blocks")
        return cls(name or text, tuple(blocks), tuple(params))

    @property
    def symbols(self) -> tuple:
        seen = []
        for sym, _ in self.blocks:
            if not sym.isdigit() and sym not in seen:
                seen.append(sym)
        return tuple(seen)

    def length(self) -> tuple:
        total = (0,) * (len(self.params) + 1)
        for _, e in self.blocks:
            total = _affine_add(total, e)
        return total

    def bind(self, assignment: dict) -> list:
        out = []
        for sym, e in self.blocks:
            letter = int(sym) if sym.isdigit() else assignment[sym]
            out.append((letter, e))
        return out

    def instantiate(self, assignment: dict, values: Sequence[int]) -> list[int]:
        word = []
        for letter, e in self.bind(assignment):
            count = _affine_eval(e, values)
            if count < 0:
                raise TemplateError("negative exponent")
            word.extend([letter] * count)
        return word

    def __str__(self):
        parts = []
        for sym, e in self.blocks:
            if e == (1,) + (0,) * len(self.params):
                parts.append(sym)
            else:
                parts.append(f"{sym}^{{{_fmt_affine(e, self.params)}}}")
        return " ".join(parts)


SPLIT_LENGTH = (3, 1, 1, 1)
CUT_I = (1, 1, 0, 0)
CUT_J = (2, 1, 1, 0)


def cut_blocks(bound: list, cut: tuple) -> tuple[list, list]:
    """Split bound blocks at an affine position, splitting one block if needed."""
    left, right = [], []
    start = (0,) * len(cut)
    done = False
    for letter, e in bound:
        if done:
            right.append((letter, e))
            continue
        d = _affine_sub(cut, start)
        if _is_zero(d):
            right.append((letter, e))
            done = True
            continue
        rem = _affine_sub(e, d)
        if _nonneg(d) and _nonneg(rem):
            left.append((letter, d))
            if not _is_zero(rem):
                right.append((letter, rem))
            done = True
        elif _nonneg(_affine_sub(d, e)):
            left.append((letter, e))
            start = _affine_add(start, e)
        else:
            raise TemplateError("cut position is not aligned with the blocks for all parameters")
    if not done:
        raise TemplateError("cut falls beyond the pattern")
    return left, right


def _over_approx(blocks: list) -> list:
    items = []
    for letter, e in blocks:
        grows = any(c > 0 for c in e[1:])
        if not grows and e[0] == 0:
            continue
        items.append((letter, e[0], grows))
    return items


def pattern_values(blocks: list, t: GroupoidTable) -> frozenset:
    """Values over every member of the block family (an over-approximation if coupled)."""
    return automaton_values(block_automaton(_over_approx(blocks)), t)


def load_patterns(path=None, kind: str = "split") -> list[BlockPattern]:
    """Read a pattern library: lines ``name: blocks``; ``#`` starts a comment."""
    if path is None:
        text = resources.files("dissoc").joinpath(f"templates/{kind}.txt").read_text()
    else:
        text = Path(path).read_text()
    params = PARAMS if kind == "split" else ("p",)
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            pat = BlockPattern.parse(line, params=params)
            if kind == "split" and pat.length() != SPLIT_LENGTH:
                raise TemplateError(f"{pat.name}: length must be p+q+r+3, got "
                                    f"{_fmt_affine(pat.length())}")
            if kind == "yield" and pat.length() != (1, 1):
                raise TemplateError(f"{pat.name}: length must be p+1")
            out.append(pat)
    return out


@lru_cache(maxsize=None)
def default_split_patterns() -> tuple:
    return tuple(load_patterns(kind="split"))


@lru_cache(maxsize=None)
def default_yield_patterns() -> tuple:
    return tuple(load_patterns(kind="yield"))


# -- yield certificates ---------------------------------------------------------

KINDS = ("constant-idempotent", "semilattice-absorb", "identity-deletion", "subgroupoid",
         "regular-exact", "bounded-empirical")


@dataclass(frozen=True)
class YieldCertificate:
    """Evidence that a sequence's yield lies in ``target``.

    ``claimed`` is the yield set the certificate asserts; ``exact`` says the
    claim is the yield set itself rather than a superset.  Only
    bounded-empirical certificates are limited to a window of lengths.
    """

    kind: str
    target: frozenset
    claimed: frozenset
    exact: bool
    detail: str
    params: tuple = ()
    inner: "YieldCertificate | None" = None
    window: int | None = None
    stabilized_at: int | None = None

    @property
    def all_lengths(self) -> bool:
        return self.kind != "bounded-empirical"

    def to_record(self) -> dict:
        rec = {"kind": self.kind, "target": sorted(self.target), "claimed": sorted(self.claimed),
               "exact": self.exact, "detail": self.detail, "all_lengths": self.all_lengths}
        if self.inner is not None:
            rec["inner"] = self.inner.to_record()
        if self.window is not None:
            rec["window"] = self.window
            rec["stabilized_at"] = self.stabilized_at
        return rec


def constant_idempotent(t: GroupoidTable, seq: EventuallyPeriodicSeq, S) -> YieldCertificate:
    letters = seq.letters()
    if len(letters) != 1:
        raise CertificateError("sequence is not constant")
    (a,) = letters
    if t(a, a) != a:
        raise CertificateError(f"{a} is not idempotent")
    return YieldCertificate("constant-idempotent", frozenset(S), frozenset({a}), True,
                            f"{a}^ω with {a}{a}⋄={a}", (a,))


def semilattice_absorb(t: GroupoidTable, seq: EventuallyPeriodicSeq, S) -> YieldCertificate:
    letters = seq.letters()
    if len(letters) != 2:
        raise CertificateError("sequence does not use exactly two letters")
    first = seq.take(1)[0]
    (other,) = letters - {first}
    if not is_semilattice_pair(t, other, first):
        raise CertificateError(f"{{{other},{first}}} is not a semilattice with {first} absorptive")
    return YieldCertificate("semilattice-absorb", frozenset(S), frozenset({first}), True,
                            f"{{{other},{first}}} semilattice, absorptive {first} comes first",
                            (other, first))


def _strip(word: Sequence[int], e: int) -> tuple:
    return tuple(x for x in word if x != e)


def delete_identity(word: Sequence[int], e: int) -> tuple:
    """Drop the letters equal to a two-sided identity; allvals is unchanged unless nothing is left."""
    return _strip(word, e)


def identity_deletion(t: GroupoidTable, seq: EventuallyPeriodicSeq, S,
                      inner_search=None) -> YieldCertificate:
    ids = identity_elements(t)
    usable = [e for e in sorted(ids) if e in seq.letters()]
    if not usable:
        raise CertificateError("sequence contains no two-sided identity")
    e = usable[0]
    core_prefix, core_period = _strip(seq.prefix, e), _strip(seq.period, e)
    lead = frozenset({e}) if seq.take(1)[0] == e else frozenset()
    if not core_prefix and not core_period:
        raise CertificateError("sequence consists of the identity only")
    if core_period:
        core = EventuallyPeriodicSeq(core_prefix, core_period)
        inner = (inner_search or certify_yield)(core, frozenset(range(t.n)), t, _allow_deletion=False)
    else:
        vals = frozenset().union(*prefix_allvals(core_prefix, t))
        inner = YieldCertificate("regular-exact", frozenset(range(t.n)), vals, True,
                                 "finite core " + "".join(map(str, core_prefix)))
    claimed = inner.claimed | lead
    if not inner.all_lengths:
        raise CertificateError("core has only bounded evidence")
    return YieldCertificate("identity-deletion", frozenset(S), claimed, inner.exact,
                            f"delete identity {e}", (e,), inner)


def subgroupoid(t: GroupoidTable, seq: EventuallyPeriodicSeq, S) -> YieldCertificate:
    h = frozenset(subgroupoid_closure(t, seq.letters()))
    return YieldCertificate("subgroupoid", frozenset(S), h, False,
                            f"terms lie in the subgroupoid {fmt_set(h)}", tuple(sorted(h)))


def regular_exact(t: GroupoidTable, seq: EventuallyPeriodicSeq, S) -> YieldCertificate:
    vals = automaton_values(prefix_automaton(seq), t)
    return YieldCertificate("regular-exact", frozenset(S), vals, True,
                            f"fixpoint over the prefix automaton of {seq}")


def bounded_empirical(t: GroupoidTable, seq: EventuallyPeriodicSeq, S,
                      L: int = DEFAULT_BOUNDED_LENGTH) -> YieldCertificate:
    vals, stab = seq_yield(seq, t, L)
    return YieldCertificate("bounded-empirical", frozenset(S), vals, False,
                            f"prefixes up to length {L}", window=L, stabilized_at=stab)


def certify_yield(seq: EventuallyPeriodicSeq, S, t: GroupoidTable,
                  L: int = DEFAULT_BOUNDED_LENGTH, symbolic: bool = True,
                  _allow_deletion: bool = True) -> YieldCertificate:
    """Strongest certificate that seq yields a subset of S.

    Tried in order: constant idempotent, semilattice with the absorptive
    letter first, identity deletion, subgroupoid, the automaton fixpoint,
    and finally bounded evidence over the first L prefixes.
    """
    S = frozenset(S)
    builders = [constant_idempotent, semilattice_absorb]
    if _allow_deletion:
        builders.append(identity_deletion)
    builders.append(subgroupoid)
    if symbolic:
        builders.append(regular_exact)
    exact_miss = None
    for build in builders:
        try:
            cert = build(t, seq, S)
        except CertificateError:
            continue
        if cert.claimed <= S:
            return cert
        if cert.exact:
            exact_miss = cert
    bounded = bounded_empirical(t, seq, S, L)
    if not bounded.claimed <= S:
        raise CertificateNotFound(f"{seq} yields {fmt_set(bounded.claimed)} within {L} terms, "
                                  f"not inside {fmt_set(S)}")
    if exact_miss is not None:
        raise CertificateNotFound(f"{seq} yields exactly {fmt_set(exact_miss.claimed)}, "
                                  f"not inside {fmt_set(S)}")
    return bounded


# -- witness sources for left and right separation ---------------------------------

@dataclass(frozen=True)
class YieldSource:
    """A yieldable set with the words that yield it (a sequence or a per-arity family)."""

    values: frozenset
    description: str
    kind: str
    all_lengths: bool
    seq: EventuallyPeriodicSeq | None = None
    family: tuple | None = None      # (pattern, assignment items)

    def words(self, m: int) -> list[int]:
        if self.seq is not None:
            return self.seq.take(m)
        pat, items = self.family
        return pat.instantiate(dict(items), (m - 1,))

    def check_bounded(self, t: GroupoidTable, K: int) -> bool:
        """Recompute allvals of the arity-m word for m <= K against the claimed set."""
        if self.seq is not None:
            got = set().union(*prefix_allvals(self.seq.take(K), t))
            return got <= self.values
        return all(allvals(self.words(m), t) <= self.values for m in range(1, K + 1))

    def to_record(self) -> dict:
        return {"values": sorted(self.values), "source": self.description, "kind": self.kind}


def sequence_source(t: GroupoidTable, seq: EventuallyPeriodicSeq,
                    symbolic: bool = True) -> YieldSource:
    cert = certify_yield(seq, range(t.n), t, symbolic=symbolic)
    if cert.all_lengths and not cert.exact:
        # a superset is not a usable witness set; take the exact values
        cert = regular_exact(t, seq, range(t.n)) if symbolic else bounded_empirical(t, seq, range(t.n))
    return YieldSource(cert.claimed, f"{seq}", cert.kind, cert.all_lengths, seq=seq)


def family_source(t: GroupoidTable, pat: BlockPattern, assignment: dict) -> YieldSource:
    vals = pattern_values(pat.bind(assignment), t)
    word = " ".join(f"{sym}={v}" for sym, v in sorted(assignment.items()))
    return YieldSource(vals, f"{pat} with {word}, one word per arity", "regular-exact", True,
                       family=(pat, tuple(sorted(assignment.items()))))


def _primitive(period: tuple) -> bool:
    n = len(period)
    return not any(n % d == 0 and period == period[:d] * (n // d) for d in range(1, n))


def candidate_sources(t: GroupoidTable, max_prefix: int = 3, max_period: int = 3,
                      symbolic: bool = True) -> Iterator[YieldSource]:
    """Witness sets in increasing description size: idempotents, families, sequences."""
    G = range(t.n)
    for a in sorted(idempotent_elements(t)):
        yield sequence_source(t, EventuallyPeriodicSeq.constant(a), symbolic)
    if symbolic:
        for pat in default_yield_patterns():
            for letters in product(G, repeat=len(pat.symbols)):
                if len(set(letters)) == len(letters):
                    yield family_source(t, pat, dict(zip(pat.symbols, letters)))
    for size in range(1, max_prefix + max_period + 1):
        for plen in range(0, min(max_prefix, size - 1) + 1):
            qlen = size - plen
            if not 1 <= qlen <= max_period:
                continue
            for period in product(G, repeat=qlen):
                if not _primitive(period):
                    continue
                for prefix in product(G, repeat=plen):
                    # skip prefixes that merely rotate into the period
                    if plen and prefix[-1] == period[-1]:
                        continue
                    seq = EventuallyPeriodicSeq(prefix, period)
                    if plen == 0 and qlen == 1 and period[0] in idempotent_elements(t):
                        continue
                    yield sequence_source(t, seq, symbolic)


def left_separates(t: GroupoidTable, L: frozenset, x: int, y: int, T: frozenset) -> bool:
    for s in L:
        for s2 in L:
            u, v = t(s, x), t(s2, y)
            if u == v or u not in T or v not in T:
                return False
    return True


def right_separates(t: GroupoidTable, R: frozenset, x: int, y: int, T: frozenset) -> bool:
    for s in R:
        for s2 in R:
            u, v = t(x, s), t(y, s2)
            if u == v or u not in T or v not in T:
                return False
    return True


# -- split separation -----------------------------------------------------------------

def split_triples(K: int) -> Iterator[tuple]:
    """All (i, j, k) with 1 <= i < j < k <= K, by increasing k."""
    for k in range(3, K + 1):
        for i in range(1, k - 1):
            for j in range(i + 1, k):
                yield i, j, k


def triple_params(i: int, j: int, k: int) -> tuple:
    return i - 1, j - i - 1, k - j - 1


@dataclass(frozen=True)
class SplitWitness:
    pattern: str
    assignment: tuple
    word: tuple
    A: frozenset
    B: frozenset

    def to_record(self) -> dict:
        return {"pattern": self.pattern, "assignment": dict(self.assignment),
                "word": "".join(map(str, self.word)) if max(self.word) < 10 else list(self.word),
                "A": sorted(self.A), "B": sorted(self.B)}


@dataclass(frozen=True)
class SymbolicSplit:
    pattern: str
    assignment: tuple
    A: frozenset
    B: frozenset
    holds: bool


def split_pair(word: Sequence[int], i: int, j: int, t: GroupoidTable) -> tuple:
    return split_values(word, i, t), split_values(word, j, t)


def symbolic_split(t: GroupoidTable, pat: BlockPattern, assignment: dict,
                   T: frozenset) -> SymbolicSplit:
    """Over-approximate i-split and j-split values over every (p, q, r) at once."""
    bound = pat.bind(assignment)
    sets = []
    for cut in (CUT_I, CUT_J):
        left, right = cut_blocks(bound, cut)
        sets.append(_product_sets(t, pattern_values(left, t), pattern_values(right, t)))
    A, B = sets
    holds = not (A & B) and A <= T and B <= T and bool(A) and bool(B)
    return SymbolicSplit(pat.name, tuple(sorted(assignment.items())), A, B, holds)


def _split_ok(A: frozenset, B: frozenset, T: frozenset) -> bool:
    return bool(A) and bool(B) and not (A & B) and A <= T and B <= T


# -- the report ---------------------------------------------------------------------

@dataclass
class SeparationReport:
    table: str
    T: frozenset
    K: int
    left: dict = field(default_factory=dict)
    right: dict = field(default_factory=dict)
    split: dict = field(default_factory=dict)
    symbolic: list = field(default_factory=list)
    failure: tuple | None = None
    uniformly_certified: bool = False
    candidates_tried: int = 0

    @property
    def certified(self) -> bool:
        return self.failure is None

    @property
    def verdict(self) -> str:
        if self.failure is not None:
            cond, detail = self.failure
            return f"failed(condition {cond}: {detail})"
        return f"certified-to-{self.K}"

    def to_record(self) -> dict:
        def pairs(d):
            return {f"{x},{y}": src.to_record() for (x, y), src in sorted(d.items())}

        split_groups: dict = {}
        for triple, w in sorted(self.split.items()):
            key = (w.pattern, w.assignment)
            split_groups.setdefault(key, []).append(list(triple))
        return {
            "schema": "separation-report/1",
            "table": self.table,
            "T": sorted(self.T),
            "K": self.K,
            "verdict": self.verdict,
            "uniformly_certified": self.uniformly_certified,
            "left": pairs(self.left),
            "right": pairs(self.right),
            "split": [{"pattern": p, "assignment": dict(a), "triples": len(ts)}
                      for (p, a), ts in split_groups.items()],
            "symbolic": [{"pattern": s.pattern, "assignment": dict(s.assignment),
                          "A": sorted(s.A), "B": sorted(s.B), "holds": s.holds}
                         for s in self.symbolic],
        }


def _candidate_splits(t: GroupoidTable, patterns) -> Iterator[tuple]:
    for pat in patterns:
        for letters in product(range(t.n), repeat=len(pat.symbols)):
            yield pat, dict(zip(pat.symbols, letters))


def _separation(t, T, K, budget, symbolic, separates):
    """Map each pair of T to the first witness source that separates it."""
    pairs = list(combinations(sorted(T), 2))
    found = {}
    tried = 0
    for src in candidate_sources(t, symbolic=symbolic):
        tried += 1
        if tried > budget:
            break
        if symbolic and not src.all_lengths:
            continue
        for x, y in pairs:
            if (x, y) not in found and separates(t, src.values, x, y, T):
                if symbolic or src.check_bounded(t, K):
                    found[(x, y)] = src
        if len(found) == len(pairs):
            break
    missing = [p for p in pairs if p not in found]
    return found, missing, tried


def certify_separation(t: GroupoidTable, T: Iterable[int] | None = None, K: int = 10,
                  search_budget: int = DEFAULT_SEARCH_BUDGET, patterns=None,
                  symbolic: bool = True) -> SeparationReport:
    """Search for the evidence of the three separation conditions on T, up to arity K.

    With T omitted, subsets of the universe are tried from largest to
    smallest and the first certified report is returned (or the report for
    the whole universe if none certifies).
    """
    if T is None:
        first = None
        for size in range(t.n, 1, -1):
            for sub in combinations(range(t.n), size):
                rep = certify_separation(t, sub, K, search_budget, patterns, symbolic)
                if rep.certified:
                    return rep
                first = first or rep
        if first is None:
            raise ValueError("need a universe with at least two elements")
        return first
    T = frozenset(int(x) for x in T)
    if len(T) < 2 or not T <= set(range(t.n)):
        raise ValueError(f"T must be a subset of 0..{t.n - 1} with at least two elements")
    if K < 3:
        raise ValueError("K must be at least 3")
    patterns = default_split_patterns() if patterns is None else tuple(patterns)
    report = SeparationReport(t.label, T, K)

    left, missing, tried = _separation(t, T, K, search_budget, symbolic, left_separates)
    report.left = left
    report.candidates_tried += tried
    if missing:
        x, y = missing[0]
        report.failure = (1, f"no yieldable witness set separates {x},{y} on the left")
        return report
    right, missing, tried = _separation(t, T, K, search_budget, symbolic, right_separates)
    report.right = right
    report.candidates_tried += tried
    if missing:
        x, y = missing[0]
        report.failure = (2, f"no yieldable witness set separates {x},{y} on the right")
        return report

    obligations = list(split_triples(K))
    uncovered = set(obligations)
    budget = search_budget
    for pat, assignment in _candidate_splits(t, patterns):
        if not uncovered:
            break
        budget -= 1
        if budget < 0:
            break
        covered = {}
        full = True
        for (i, j, k) in obligations:
            word = pat.instantiate(assignment, triple_params(i, j, k))
            A, B = split_pair(word, i, j, t)
            if _split_ok(A, B, T):
                covered[(i, j, k)] = SplitWitness(pat.name, tuple(sorted(assignment.items())),
                                                  tuple(word), A, B)
            else:
                full = False
                if (i, j, k) in uncovered and not covered:
                    # cheap rejection: this candidate misses the first open obligation
                    break
        for triple, w in covered.items():
            if triple in uncovered:
                report.split[triple] = w
                uncovered.discard(triple)
        if full and symbolic:
            sym = symbolic_split(t, pat, assignment, T)
            report.symbolic.append(sym)
            if sym.holds:
                report.uniformly_certified = True
    report.candidates_tried += search_budget - max(budget, 0)
    if uncovered:
        i, j, k = min(uncovered, key=lambda x: (x[2], x[0], x[1]))
        report.failure = (3, f"no block pattern separates the {i}-splits from the "
                             f"{j}-splits at arity {k}")
        report.uniformly_certified = False
        return report
    if not (symbolic and all(s.all_lengths for s in list(report.left.values())
                             + list(report.right.values()))):
        report.uniformly_certified = False
    return report


# -- the worked witness families ------------------------------------------------------

@dataclass(frozen=True)
class WitnessFamily:
    """Explicit split words, target set and separating sets for one table."""

    name: str
    table: GroupoidTable
    T: frozenset
    pattern: str
    assignment: tuple
    A: frozenset
    B: frozenset
    left: str
    right: str


def _family(name, table, T, pattern, letters, A, B, left, right):
    pat = BlockPattern.parse(pattern)
    return WitnessFamily(name, table, frozenset(T), pattern,
                         tuple(zip(pat.symbols, letters)), frozenset(A), frozenset(B), left, right)


def witness_families() -> dict:
    three = "a^{p+1} b^{q+1} c^{r+1}"
    return {
        "B": _family("B", named_table("B"), range(4), "a^{p} b c a^{q} d a^{r}", (0, 1, 2, 3),
                     {1}, {3}, "(0)", "(0)"),
        "implication": _family("implication", decode(2, 13), {0, 1}, "a^{p} b a^{q+r+1} b",
                               (1, 0), {1}, {0}, "(1)", "a^{p} b:1,0"),
        "D": _family("D", named_table("D"), {0, 1}, three, (1, 0, 2), {1}, {0}, "(0)", "(0)"),
        "CI3_3": _family("CI3_3", ci3_decode(3), range(3), three, (0, 1, 2), {0}, {1},
                         "(2)", "(2)"),
        "CI3_5": _family("CI3_5", ci3_decode(5), range(3), "a b^{p+q} c^{r+2}", (0, 1, 2),
                         {1}, {2}, "(1)", "(1)"),
        "CI3_7": _family("CI3_7", ci3_decode(7), {0, 2}, three, (0, 1, 2), {0}, {2},
                         "(0)", "(0)"),
    }


def d_variants() -> list[WitnessFamily]:
    """𝒟 and the sixteen tables that change entries the two split arguments never read.

    The first argument uses 1^i 0^(j-i) 2^(k-j+1) and never reads 2⋄0, 2⋄1;
    the mirrored one uses 2^i 0^(j-i) 1^(k-j+1) and never reads 0⋄2, 1⋄2.
    """
    base = named_table("D").entries
    three = "a^{p+1} b^{q+1} c^{r+1}"
    out = [witness_families()["D"]]
    for cells, letters, A, B, tag in [(((2, 0), (2, 1)), (1, 0, 2), {1}, {0}, "row2"),
                                      (((0, 2), (1, 2)), (2, 0, 1), {0}, {1}, "col2")]:
        (r0, c0), (r1, c1) = cells
        for u, v in product(range(3), repeat=2):
            if (u, v) == (int(base[r0, c0]), int(base[r1, c1])):
                continue
            e = base.copy()
            e[r0, c0], e[r1, c1] = u, v
            table = GroupoidTable(e, f"D[{tag}:{u}{v}]")
            out.append(_family(table.name, table, {0, 1}, three, letters, A, B, "(0)", "(0)"))
    return out


def _source_from_text(t: GroupoidTable, text: str) -> YieldSource:
    if ":" in text:
        pat_text, letters = text.split(":")
        pat = BlockPattern.parse(pat_text, params=("p",))
        values = [int(x) for x in letters.split(",")]
        return family_source(t, pat, dict(zip(pat.symbols, values)))
    return sequence_source(t, EventuallyPeriodicSeq.parse(text))


@dataclass
class WitnessReport:
    name: str
    K: int
    T: frozenset
    triples_checked: int = 0
    counterexamples: list = field(default_factory=list)
    separation_failures: list = field(default_factory=list)
    symbolic: SymbolicSplit | None = None
    left_values: frozenset = frozenset()
    right_values: frozenset = frozenset()

    @property
    def certified(self) -> bool:
        return not self.counterexamples and not self.separation_failures

    @property
    def uniformly_certified(self) -> bool:
        return self.certified and self.symbolic is not None and self.symbolic.holds

    @property
    def verdict(self) -> str:
        if not self.certified:
            first = (self.separation_failures + self.counterexamples)[0]
            return f"failed({first})"
        return f"certified-to-{self.K}"

    def to_record(self) -> dict:
        return {"schema": "witness-report/1", "name": self.name, "K": self.K,
                "T": sorted(self.T), "verdict": self.verdict,
                "uniformly_certified": self.uniformly_certified,
                "triples_checked": self.triples_checked,
                "counterexamples": [str(c) for c in self.counterexamples[:20]],
                "separation_failures": self.separation_failures}


def verify_family(fam: WitnessFamily, K: int) -> WitnessReport:
    """Instantiate the family for every 1 <= i < j < k <= K and check each word."""
    t = fam.table
    rep = WitnessReport(fam.name, K, fam.T)
    pat = BlockPattern.parse(fam.pattern)
    assignment = dict(fam.assignment)
    for i, j, k in split_triples(K):
        word = pat.instantiate(assignment, triple_params(i, j, k))
        A, B = split_pair(word, i, j, t)
        rep.triples_checked += 1
        if not (A <= fam.A and B <= fam.B):
            rep.counterexamples.append(((i, j, k), "".join(map(str, word)),
                                        fmt_set(A), fmt_set(B)))
    if fam.A & fam.B or not (fam.A | fam.B) <= fam.T:
        rep.separation_failures.append("A and B must be disjoint subsets of T")
    for side, text, sep in (("left", fam.left, left_separates),
                            ("right", fam.right, right_separates)):
        src = _source_from_text(t, text)
        if side == "left":
            rep.left_values = src.values
        else:
            rep.right_values = src.values
        if not src.check_bounded(t, K):
            rep.separation_failures.append(f"{side} witness {text} leaves its set within {K}")
        for x, y in combinations(sorted(fam.T), 2):
            if not sep(t, src.values, x, y, fam.T):
                rep.separation_failures.append(
                    f"{side} set {fmt_set(src.values)} does not separate {x},{y}")
    sym = symbolic_split(t, pat, assignment, fam.T)
    rep.symbolic = SymbolicSplit(sym.pattern, sym.assignment, sym.A, sym.B,
                                 sym.holds and sym.A <= fam.A and sym.B <= fam.B)
    return rep


def verify_witness_family(name: str, K: int = 10) -> WitnessReport:
    families = witness_families()
    if name not in families:
        raise KeyError(f"unknown witness family {name!r}; known: {', '.join(families)}")
    return verify_family(families[name], K)
