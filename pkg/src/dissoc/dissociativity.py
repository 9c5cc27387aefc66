"""Agreement partitions of formal products under a table.

Two formal k-products agree under a table when they induce the same k-ary
operation.  :class:`LevelDP` finds the distinct induced vectors arity by
arity without listing products: the classes at arity m are the distinct
``compose_vectors(A, B)`` over splits i and class pairs (A at arity i, B at
arity m - i), and a class's size is the sum of size(A) * size(B) over the
pairs producing it.  Sizes are Python integers, so they stay exact at
Catalan scale.

The census helpers at the bottom evaluate every product under a whole
stack of tables at once, which is how M(n, k) and the pigeonhole bound are
checked over all 3**9 tables of order three.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .backend import kernels
from .errors import ResourceLimitError
from .evaluation import (
    OpVector, check_vector_size, index_tuple, induced_values, induced_vector, pack,
    unpack,
)
from .formal_products import (
    FormalProduct, count, enumerate_products, iter_products, split_offset, unrank,
)
from .groupoid import GroupoidCode, GroupoidTable, all_tables_array, decode, is_semigroup

DEFAULT_MEMORY_CAP = int(os.environ.get("DISSOC_MEMORY_CAP", 2 << 30))
DEFAULT_K_MAX = {2: 13, 3: 8}
CHUNK_BYTES = 1 << 25


def vector_bytes(n: int, m: int) -> int:
    if n == 2:
        return max(1, (1 << m) // 8)
    return n ** m


@dataclass
class Level:
    """Distinct induced vectors of one arity, with class sizes and min-rank representatives."""

    n: int
    m: int
    keys: list
    sizes: list
    reps: list
    _matrix: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.keys)

    @property
    def matrix(self) -> np.ndarray:
        """Unpacked vectors, one row per class."""
        if self._matrix is None:
            raw = np.frombuffer(b"".join(self.keys), dtype=np.uint8)
            raw = raw.reshape(len(self.keys), -1)
            if self.n == 2:
                raw = np.unpackbits(raw, axis=1, count=1 << self.m)
            self._matrix = np.ascontiguousarray(raw)
        return self._matrix


class LevelDP:
    """Arity-by-arity class construction for a single table."""

    def __init__(self, table: GroupoidTable, memory_cap: int = DEFAULT_MEMORY_CAP):
        self.table = table
        self.n = table.n
        self.memory_cap = memory_cap
        one = np.arange(self.n, dtype=np.uint8)
        self.levels = {1: Level(self.n, 1, [pack(one, self.n)], [1], [0], one[None, :])}

    def level(self, m: int) -> Level:
        if m < 1:
            raise ValueError("arity must be positive")
        for j in range(2, m + 1):
            if j not in self.levels:
                self.levels[j] = self._build(j)
        return self.levels[m]

    def distinct_at(self, m: int) -> bool:
        """True iff all formal m-products induce distinct vectors; may stop early."""
        if m <= 2:
            return True
        if m in self.levels:
            return len(self.levels[m]) == count(m)
        self.level(m - 1)
        return self._build(m, stop_on_duplicate=True) is not None

    def _estimate(self, m: int) -> int:
        bound = sum(len(self.levels[i]) * len(self.levels[m - i]) for i in range(1, m))
        bound = min(bound, count(m))
        n = self.n
        return bound * (vector_bytes(n, m) + 120) + bound * n ** (m - 1)

    def _check_budget(self, m: int) -> None:
        check_vector_size(self.n, m)
        if self._estimate(m) > self.memory_cap:
            raise ResourceLimitError(
                f"arity {m} over n={self.n} needs about {self._estimate(m) >> 20} MiB, "
                f"cap is {self.memory_cap >> 20} MiB", m - 1)

    def _batches(self, left: Level, right: Level):
        """Yield (packed rows, left positions, right positions) covering all class pairs."""
        n, entries = self.n, self.table.entries
        la, lb = n ** left.m, n ** right.m
        out_bytes = max(1, la * lb)
        chunk = max(1, CHUNK_BYTES // out_bytes)
        packed_blocks = n == 2 and lb % 8 == 0
        if len(left) >= len(right):
            lm = left.matrix
            rm = right.matrix
            for b in range(len(right)):
                blocks = entries[:, rm[b]]
                if packed_blocks:
                    blocks = np.packbits(blocks, axis=1)
                for s in range(0, len(left), chunk):
                    e = min(len(left), s + chunk)
                    out = kernels.fanout(lm[s:e], blocks)
                    if n == 2 and not packed_blocks:
                        out = np.packbits(out, axis=1)
                    yield out, range(s, e), None, b
        else:
            lm = left.matrix
            rm = right.matrix
            for a in range(len(left)):
                rows = entries[lm[a]]
                for s in range(0, len(right), chunk):
                    e = min(len(right), s + chunk)
                    out = rows[:, rm[s:e]].transpose(1, 0, 2).reshape(e - s, la * lb)
                    if n == 2:
                        out = np.packbits(out, axis=1)
                    yield np.ascontiguousarray(out), None, range(s, e), a

    def _build(self, m: int, stop_on_duplicate: bool = False) -> Level | None:
        self._check_budget(m)
        index: dict = {}
        keys, sizes, reps = [], [], []
        for i in range(1, m):
            left, right = self.levels[i], self.levels[m - i]
            offset, c_right = split_offset(m, i), count(m - i)
            for out, lpos, rpos, fixed in self._batches(left, right):
                width = out.shape[1]
                buf = out.tobytes()
                if lpos is not None:
                    pairs = ((a, fixed) for a in lpos)
                else:
                    pairs = ((fixed, b) for b in rpos)
                for r, (a, b) in enumerate(pairs):
                    key = buf[r * width:(r + 1) * width]
                    size = left.sizes[a] * right.sizes[b]
                    rep = offset + left.reps[a] * c_right + right.reps[b]
                    pos = index.get(key)
                    if pos is None:
                        index[key] = len(keys)
                        keys.append(key)
                        sizes.append(size)
                        reps.append(rep)
                    else:
                        if stop_on_duplicate:
                            return None
                        sizes[pos] += size
                        if rep < reps[pos]:
                            reps[pos] = rep
        return Level(self.n, m, keys, sizes, reps)


@lru_cache(maxsize=8)
def level_dp(table: GroupoidTable) -> LevelDP:
    """Shared DP for small arities; deep threshold runs use a private LevelDP."""
    return LevelDP(table)


# -- partitions ----------------------------------------------------------------

@dataclass(frozen=True)
class AgreementPartition:
    n: int
    k: int
    classes: dict

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def total(self) -> int:
        return sum(size for size, _ in self.classes.values())

    def representatives(self) -> list[FormalProduct]:
        return [unrank(self.k, rep) for _, rep in sorted(self.classes.values(), key=lambda x: x[1])]

    def sizes(self) -> list[int]:
        return sorted(size for size, _ in self.classes.values())

    def canonical(self) -> tuple:
        """Hashable form (rep rank, size) sorted by rep; vectors are implied."""
        return tuple(sorted((rep, size) for size, rep in self.classes.values()))


def partition(t: GroupoidTable, k: int, dp: LevelDP | None = None) -> AgreementPartition:
    dp = dp or level_dp(t)
    lvl = dp.level(k)
    classes = {OpVector(t.n, k, key): (size, rep)
               for key, size, rep in zip(lvl.keys, lvl.sizes, lvl.reps)}
    return AgreementPartition(t.n, k, classes)


def partition_naive(t: GroupoidTable, k: int) -> AgreementPartition:
    """Oracle: hash the induced vector of every product."""
    classes: dict = {}
    for r, w in enumerate(enumerate_products(k)):
        v = induced_vector(w, t)
        size, rep = classes.get(v, (0, r))
        classes[v] = (size + 1, min(rep, r))
    return AgreementPartition(t.n, k, classes)


@dataclass(frozen=True)
class Sizing:
    k: int
    pairs: tuple

    def __str__(self):
        return ",".join(f"<{nu},{i}>" for nu, i in self.pairs)


def sizing(t: GroupoidTable, k: int, dp: LevelDP | None = None) -> Sizing:
    hist: dict = {}
    for size, _ in partition(t, k, dp).classes.values():
        hist[size] = hist.get(size, 0) + 1
    return Sizing(k, tuple((hist[i], i) for i in sorted(hist)))


@dataclass(frozen=True)
class SatSequence:
    label: str
    counts: tuple

    def as_dict(self) -> dict:
        return {k: c for k, c in self.counts}


def sat_sequence(t: GroupoidTable, k_max: int, dp: LevelDP | None = None) -> SatSequence:
    dp = dp or level_dp(t)
    return SatSequence(t.label, tuple((k, len(dp.level(k))) for k in range(2, k_max + 1)))


def is_k_dissociative(t: GroupoidTable, k: int, dp: LevelDP | None = None) -> bool:
    if k < 1:
        raise ValueError("arity must be positive")
    dp = dp or level_dp(t)
    return dp.distinct_at(k)


@dataclass(frozen=True)
class Threshold:
    label: str
    k_max: int
    first_failure: int | None

    @property
    def verdict(self) -> str:
        if self.first_failure is None:
            return f"k-dissociative for all 3 <= k <= {self.k_max} (bounded verification)"
        return f"not {self.first_failure}-dissociative"


def dissociativity_threshold(t: GroupoidTable, k_max: int | None = None,
                             memory_cap: int = DEFAULT_MEMORY_CAP) -> Threshold:
    """First arity whose products do not all separate.

    Failure at one arity implies failure at every larger arity, so the scan
    stops at the first failure.
    """
    if k_max is None:
        k_max = DEFAULT_K_MAX.get(t.n, 6)
    dp = LevelDP(t, memory_cap)
    for m in range(3, k_max + 1):
        if m < k_max:
            distinct = len(dp.level(m)) == count(m)
        else:
            distinct = dp.distinct_at(m)
        if not distinct:
            return Threshold(t.label, k_max, m)
    return Threshold(t.label, k_max, None)


# -- separation and agreement --------------------------------------------------

def _same_arity(u: FormalProduct, v: FormalProduct) -> int:
    if u.arity != v.arity:
        raise ValueError("products must have equal arity")
    return u.arity


def separating_tuple(u: FormalProduct, v: FormalProduct, t: GroupoidTable) -> tuple | None:
    k = _same_arity(u, v)
    diff = np.nonzero(induced_values(u, t) != induced_values(v, t))[0]
    if diff.size == 0:
        return None
    return index_tuple(int(diff[0]), t.n, k)


def agreement_count(u: FormalProduct, v: FormalProduct, t: GroupoidTable) -> int:
    _same_arity(u, v)
    return int(np.count_nonzero(induced_values(u, t) == induced_values(v, t)))


@dataclass(frozen=True)
class MaxAgreement:
    k: int
    value: int
    pair: tuple | None


def _colliding_pair(t: GroupoidTable, k: int) -> tuple:
    seen: dict = {}
    for r, w in enumerate(iter_products(k)):
        key = induced_vector(w, t).data
        if key in seen:
            return seen[key], r
        seen[key] = r
    raise AssertionError("no collision although classes merged")


def max_agreement(t: GroupoidTable, k: int, dp: LevelDP | None = None) -> MaxAgreement:
    """Largest number of tuples in G**k on which two distinct k-products agree."""
    if k < 3:
        raise ValueError("need k >= 3 for two distinct products")
    dp = dp or level_dp(t)
    lvl = dp.level(k)
    if len(lvl) < count(k):
        return MaxAgreement(k, t.n ** k, _colliding_pair(t, k))
    best, i, j = kernels.max_pair_agreement(lvl.matrix)
    ra, rb = sorted((lvl.reps[i], lvl.reps[j]))
    return MaxAgreement(k, int(best), (ra, rb))


# -- batched censuses over many tables -----------------------------------------

def batch_level_vectors(tables: np.ndarray, k: int) -> dict:
    """Vectors of every product of arity <= k under each table of a stack.

    levels[m][r] has shape (tables, n**m) and belongs to the product of rank r.
    """
    tables = np.ascontiguousarray(tables, dtype=np.uint8)
    num, n = tables.shape[0], tables.shape[1]
    check_vector_size(n, k)
    one = np.ascontiguousarray(np.broadcast_to(np.arange(n, dtype=np.uint8), (num, n)))
    levels = {1: [one]}
    for m in range(2, k + 1):
        levels[m] = [kernels.batch_compose(tables, a, b)
                     for i in range(1, m) for a in levels[i] for b in levels[m - i]]
    return levels


def batch_max_agreement(tables: np.ndarray, k: int, chunk: int = 2048) -> np.ndarray:
    """Per-table max agreement over all pairs of distinct formal k-products."""
    if k < 3:
        raise ValueError("need k >= 3 for two distinct products")
    out = []
    for s in range(0, tables.shape[0], chunk):
        levels = batch_level_vectors(tables[s:s + chunk], k)
        out.append(kernels.batch_max_agreement(np.stack(levels[k], axis=1)))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def _table_stack(n: int, codes: Sequence[int] | None) -> tuple[np.ndarray, np.ndarray]:
    if codes is None:
        arr = all_tables_array(n)
        return arr, np.arange(arr.shape[0])
    codes = np.asarray(list(codes), dtype=np.int64)
    arr = np.stack([decode(n, int(j)).entries for j in codes]) if len(codes) else \
        np.zeros((0, n, n), dtype=np.uint8)
    return arr, codes


@dataclass(frozen=True)
class MnkResult:
    n: int
    k: int
    value: int
    witnesses: tuple
    tables_checked: int
    sampled: bool


def minimal_k_associativity(n: int, k: int, sample: int | None = None,
                            seed: int = 0) -> MnkResult:
    """M(n, k): the least max agreement over tables on n elements, with its witnesses.

    The full census runs for n <= 3; larger n needs ``sample`` random tables
    and then yields only an upper bound on M(n, k).
    """
    codes = None
    if n > 3 or sample is not None:
        if sample is None:
            raise ResourceLimitError(f"full census for n={n} is too large; pass a sample size", 3)
        rng = np.random.default_rng(seed)
        total = n ** (n * n)
        codes = sorted({int(x) for x in rng.integers(0, total, size=sample)}) if total > 2**62 \
            else sorted(set(rng.choice(total, size=min(sample, total), replace=False).tolist()))
    tables, code_list = _table_stack(n, codes)
    per_table = batch_max_agreement(tables, k)
    value = int(per_table.min())
    witnesses = tuple(int(code_list[x]) for x in np.nonzero(per_table == value)[0])
    return MnkResult(n, k, value, witnesses, len(code_list), codes is not None)


@dataclass(frozen=True)
class PigeonholeCheck:
    n: int
    k: int
    applies: bool
    tables_checked: int
    violations: tuple

    @property
    def holds(self) -> bool:
        return not self.violations


def pigeonhole_check(n: int, k: int) -> PigeonholeCheck:
    """When C(k-1) > n, every table has two k-products agreeing somewhere."""
    tables, codes = _table_stack(n, None)
    applies = count(k) > n
    per_table = batch_max_agreement(tables, k)
    bad = tuple(int(codes[x]) for x in np.nonzero(per_table < 1)[0]) if applies else ()
    return PigeonholeCheck(n, k, applies, len(codes), bad)


@dataclass(frozen=True)
class CensusRow:
    code: str
    semigroup: bool
    classes: int
    max_agreement: int
    first_failure: int | None
    k_max: int


def census(n: int, k: int, k_max: int | None = None,
           codes: Iterable[int] | None = None) -> list[CensusRow]:
    """Per-table metrics at arity k, with the dissociativity threshold up to k_max.

    Thresholds up to k come from the batched vectors (an arity m fails iff
    some two m-products agree on all n**m tuples); beyond k each surviving
    table gets its own level DP.
    """
    k_max = k if k_max is None else max(k, k_max)
    tables, code_list = _table_stack(n, None if codes is None else list(codes))
    rows = []
    chunk = 2048
    for s in range(0, tables.shape[0], chunk):
        part = tables[s:s + chunk]
        levels = batch_level_vectors(part, k)
        fail = np.zeros(part.shape[0], dtype=np.int64)
        for m in range(3, k + 1):
            agree = kernels.batch_max_agreement(np.stack(levels[m], axis=1))
            fresh = (fail == 0) & (agree == n ** m)
            fail[fresh] = m
        top = np.stack(levels[k], axis=1)
        agree_k = kernels.batch_max_agreement(top) if k >= 3 else np.zeros(part.shape[0])
        for x in range(part.shape[0]):
            t = GroupoidTable(part[x])
            classes = len({row.tobytes() for row in top[x]})
            first = int(fail[x]) or None
            if first is None and k_max > k:
                first = dissociativity_threshold(t, k_max).first_failure
            rows.append(CensusRow(str(GroupoidCode(n, int(code_list[s + x]))), is_semigroup(t),
                                  classes, int(agree_k[x]), first, k_max))
    return rows
