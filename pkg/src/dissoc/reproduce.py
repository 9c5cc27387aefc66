"""The acceptance checks, shared by ``dissoc paper-check`` and the test suite.

Each check returns a :class:`CheckResult`; a check passes when every exact
comparison holds and it finishes inside its time limit.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable

from .boolean_nand import (
    WORKED_EXAMPLE, WORKED_NAMES, Cube, NormalFormula, claim1_check, claim2_check,
    claim3_check, complete_sum, nand_injectivity, parse_formula, reduce_to_complete_sum,
)
from .dissociativity import (
    dissociativity_threshold, is_k_dissociative, max_agreement, minimal_k_associativity,
    partition, partition_naive, pigeonhole_check, sat_sequence, sizing,
)
from .evaluation import beta_identity, eval_term, identity_holds
from .formal_products import (
    compose, count, enumerate_products, factorize, parse, rank, render, unrank,
)
from .groupoid import (
    asymp_classes, automorphisms, ci3_decode, decode, is_semigroup, isomorphism_classes,
    named_table,
)
from .representability import (
    unrepresentable_phi, phi_count, r_exceeds_one, ratio_R, search_representation,
)
from .yield_certify import (
    allvals, certify_separation, d_variants, verify_family, verify_witness_family,
)

CI3_ISOMORPHISM_LISTS = [
    [0, 13, 26], [1, 2, 8, 10, 16, 17], [3, 12, 18, 22, 23, 24], [4, 6, 9, 14, 20, 25],
    [5, 15, 19], [7, 11], [21],
]
N2_SEMIGROUPS = {0, 1, 3, 5, 6, 7, 9, 15}
N2_DISSOCIATIVE = {2, 4, 8, 11, 13, 14}


@dataclass(frozen=True)
class CheckResult:
    number: int
    title: str
    ok: bool
    seconds: float
    limit: float
    detail: str

    @property
    def passed(self) -> bool:
        return self.ok and self.seconds <= self.limit

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        late = "" if self.seconds <= self.limit else " (over time limit)"
        return (f"[{status}] {self.number:2d} {self.title}: {self.detail} "
                f"({self.seconds:.2f}s / {self.limit:g}s){late}")

    def to_record(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "ok": self.ok, "seconds": round(self.seconds, 3), "limit": self.limit,
                "detail": self.detail}


class _Check:
    def __init__(self):
        self.failures: list[str] = []
        self.notes: list[str] = []

    def expect(self, cond, what: str):
        if not cond:
            self.failures.append(what)
        return cond

    def note(self, text: str):
        self.notes.append(text)

    def detail(self) -> str:
        if self.failures:
            return "; ".join(self.failures[:4])
        return "; ".join(self.notes) or "ok"


def c01_catalan(c: _Check):
    got = [len(enumerate_products(k)) for k in range(3, 7)]
    c.expect(got == [2, 5, 14, 42], f"counts {got}")
    c.expect([count(k) for k in range(3, 7)] == got, "closed form differs from enumeration")
    c.note(f"|F(k)| = {got} for k = 3..6")


def c02_semigroups(c: _Check):
    got = {j for j in range(16) if is_semigroup(decode(2, j))}
    c.expect(got == N2_SEMIGROUPS, f"semigroups {sorted(got)}")
    c.note(f"semigroups 2:j for j in {sorted(got)}")


def _classify(k_max: int) -> tuple:
    free, at4 = set(), set()
    for j in range(16):
        th = dissociativity_threshold(decode(2, j), k_max)
        if th.first_failure is None:
            free.add(j)
        elif th.first_failure == 4:
            at4.add(j)
    return free, at4


def c03_classification(c: _Check, k_max: int = 13, quick_k: int = 10, quick_limit: float = 10):
    t0 = time.perf_counter()
    quick = _classify(quick_k)
    quick_s = time.perf_counter() - t0
    c.expect(quick_s <= quick_limit, f"k_max={quick_k} took {quick_s:.1f}s")
    for km, (free, at4) in ((quick_k, quick), (k_max, _classify(k_max))):
        c.expect(free == N2_DISSOCIATIVE, f"no failure to {km} for {sorted(free)}")
        c.expect({10, 12} <= at4, f"first failure at 4 for {sorted(at4)}")
    for j in (10, 12):
        c.expect(max_agreement(decode(2, j), 3).value == 0, f"2:{j} has an associating triple")
    c.note(f"no failure to k={k_max} exactly for {sorted(N2_DISSOCIATIVE)}; 2:10, 2:12 fail "
           f"at k=4 with max agreement 0 at k=3; k_max={quick_k} pass in {quick_s:.1f}s")


def c04_asymp(c: _Check):
    tables = [decode(2, j) for j in range(16) if j not in N2_SEMIGROUPS]
    got = sorted(sorted(t.code.j for t in cls) for cls in asymp_classes(tables))
    want = [[2, 4, 11, 13], [8, 14], [10, 12]]
    c.expect(got == want, f"classes {got}")
    c.note(f"classes {got}")


def c05_e_numbers(c: _Check):
    e = named_table("E")
    sat = [cnt for k, cnt in sat_sequence(e, 6).counts if k >= 3]
    c.expect(sat == [2, 5, 10, 21], f"SaT {sat}")
    s5, s6 = sizing(e, 5).pairs, sizing(e, 6).pairs
    c.expect(s5 == ((6, 1), (4, 2)), f"5-sizing {s5}")
    c.expect(s6 == ((7, 1), (7, 2), (7, 3)), f"6-sizing {s6}")
    th = dissociativity_threshold(e, 8).first_failure
    c.expect(th == 5, f"threshold {th}")
    aut = len(automorphisms(e))
    c.expect(aut == 6, f"|Aut| = {aut}")
    c.note(f"SaT {sat}, sizings {sizing(e, 5)} / {sizing(e, 6)}, threshold {th}, |Aut| {aut}")


def c06_ci3(c: _Check):
    classes = isomorphism_classes([ci3_decode(a) for a in range(27)])
    got = sorted(sorted(int(t.name.split("_")[1]) for t in cls) for cls in classes)
    c.expect(got == sorted(CI3_ISOMORPHISM_LISTS), f"classes {got}")
    c.note(f"{len(got)} classes match")


def c07_beta(c: _Check):
    beta = beta_identity()
    chk = identity_holds(beta, named_table("B"))
    c.expect(chk.holds, f"fails in B at {chk.countermodel}")
    cases = [("CI3_3", (0, 2, 1), 1, 0), ("D", (1, 2, 0), 0, 1),
             ("CI3_5", (2, 0, 1), 1, 2), ("CI3_7", (2, 1, 0), 0, None)]
    for name, (x, y, z), lhs, rhs in cases:
        t = named_table(name)
        env = {"x": x, "y": y, "z": z}
        lv, rv = eval_term(beta.lhs, t, env), eval_term(beta.rhs, t, env)
        c.expect(lv == lhs and lv != rv and (rhs is None or rv == rhs),
                 f"{name} at {x}{y}{z}: {lv} vs {rv}")
    c.note("holds in B on 64 assignments; four stated failures reproduced")


def c08_certify(c: _Check, K: int = 10):
    for name in ("B", "implication", "D", "CI3_3", "CI3_5", "CI3_7"):
        rep = verify_witness_family(name, K)
        c.expect(rep.verdict == f"certified-to-{K}", f"{name}: {rep.verdict}")
    nand = decode(2, 14)
    rep = certify_separation(nand, None, K)
    c.expect(not rep.certified, "2:14 unexpectedly certified")
    c.expect(dissociativity_threshold(nand, K).first_failure is None, "2:14 not dissociative")
    for k in range(3, K + 1):
        c.expect(nand_injectivity(k).injective, f"NAND complete sums collide at k={k}")
    c.note(f"six families certified-to-{K}; 2:14 {rep.verdict}, dissociative and "
           f"injective to {K}")


def c09_implication(c: _Check):
    t = decode(2, 13)
    bad = 0
    for k in range(1, 13):
        bad += allvals([1] * (k - 1) + [0], t) != {0}
        for j in range(0, k - 1):
            bad += allvals([1] * j + [0] + [1] * (k - j - 1), t) != {1}
    c.expect(bad == 0, f"{bad} words off")
    c.note("both families to k = 12")


def _random_formula(rng: random.Random, k: int) -> NormalFormula:
    while True:
        cubes = []
        for _ in range(rng.randint(1, 8)):
            pos = neg = 0
            for v in range(k):
                r = rng.random()
                if r < 0.3:
                    pos |= 1 << v
                elif r < 0.6:
                    neg |= 1 << v
            if pos | neg:
                cubes.append(Cube(k, pos, neg))
        if cubes:
            nf = NormalFormula.of(k, cubes)
            if not nf.truth_table().is_constant:
                return nf


def c10_nand(c: _Check, seed: int = 0):
    nf = parse_formula(WORKED_EXAMPLE, WORKED_NAMES)
    red = reduce_to_complete_sum(nf).format(WORKED_NAMES)
    cs = complete_sum(nf.truth_table()).format(WORKED_NAMES)
    c.expect(red == cs == "x | z", f"worked example gives {red} / {cs}")
    for k in range(1, 8):
        for u in enumerate_products(k):
            c.expect(claim1_check(u), f"claim 1 fails for {u}")
            if k >= 2:
                c.expect(claim2_check(u), f"claim 2 fails for {u}")
                c.expect(claim3_check(u), f"claim 3 fails for {u}")
    rng = random.Random(seed)
    mism = 0
    for _ in range(500):
        f = _random_formula(rng, 6)
        mism += reduce_to_complete_sum(f) != complete_sum(f.truth_table())
    c.expect(mism == 0, f"{mism} random formulas disagree")
    c.note("x | z; claims 1-3 to arity 7; 500 random formulas agree")


def c11_unrepresentable(c: _Check):
    phi = unrepresentable_phi()
    ex = search_representation(phi, "exhaustive")
    pr = search_representation(phi, "propagate")
    c.expect(ex.witness is None and ex.explored == 512, f"exhaustive {ex.explored}")
    c.expect(pr.witness is None, "propagating search found a witness")
    walls = sum(1 for e in pr.trace if e[0] == "wall")
    c.note(f"no witness among {ex.explored} candidates; propagation hit {walls} walls")


def c12_counts(c: _Check):
    c.expect(phi_count(2, 3) == 512, "Phi(2,3)")
    c.expect(ratio_R(2, 3) == Fraction(1, 2), "R(2,3)")
    for n in range(2, 7):
        for k in range(3, 11):
            c.expect(r_exceeds_one(n, k) == (n >= 3 or k >= 4), f"R({n},{k})")
    c.note("Phi(2,3) = 512, R(2,3) = 1/2, R > 1 pattern for n <= 6, k <= 10")


def c13_d_variants(c: _Check, K: int = 10):
    fams = d_variants()
    c.expect(len(fams) == 17, f"{len(fams)} tables")
    for f in fams:
        c.expect(dissociativity_threshold(f.table, K).first_failure is None,
                 f"{f.name} not dissociative to {K}")
        c.expect(verify_family(f, K).certified, f"{f.name} not certified")
    c.note(f"17 tables dissociative to {K} and certified-to-{K}")


def c14_mnk(c: _Check):
    m23 = minimal_k_associativity(2, 3)
    c.expect(m23.value == 0 and set(m23.witnesses) == {10, 12}, f"M(2,3) {m23}")
    for n in (2, 3):
        for k in (4, 5):
            pc = pigeonhole_check(n, k)
            c.expect(pc.applies and pc.holds, f"pigeonhole n={n} k={k}")
    m34 = minimal_k_associativity(3, 4)
    c.expect(m34.tables_checked == 19683, "n=3 census incomplete")
    c.note(f"M(2,3) = 0 at 2:10, 2:12; pigeonhole holds; M(3,4) = {m34.value} over "
           f"{m34.tables_checked} tables")


def c15_properties(c: _Check):
    for k in range(1, 8):
        for r, w in enumerate(enumerate_products(k)):
            c.expect(parse(render(w)) == w and rank(w) == r and unrank(k, r) == w,
                     f"round trip {w}")
            if k >= 2:
                f = factorize(w)
                c.expect(compose(f.left, f.right) == w, f"factorize {w}")
    tables = [decode(2, j) for j in range(16)] + [ci3_decode(a) for a in range(27)]
    for t in tables:
        for k in range(2, 7):
            c.expect(partition(t, k).canonical() == partition_naive(t, k).canonical(),
                     f"partition {t.label} k={k}")
    from .evaluation import eval_rpn
    for t in tables[:16] + [named_table("B")]:
        for m in range(1, 8):
            prods = enumerate_products(m)
            for word in product(range(t.n), repeat=m) if t.n == 2 or m <= 5 else ():
                want = {eval_rpn(u, t, word) for u in prods}
                if allvals(word, t) != want:
                    c.expect(False, f"allvals {t.label} {word}")
    for t in tables:
        flags = [is_k_dissociative(t, k) for k in range(3, 9)]
        c.expect(all(a or not b for a, b in zip(flags, flags[1:])), f"monotonicity {t.label}")
    c.note("round trips to 7, partitions to 6, allvals to 7, monotonicity to 8")


CHECKS: list[tuple[int, str, float, Callable]] = [
    (1, "Catalan counts", 1, c01_catalan),
    (2, "n=2 semigroups", 1, c02_semigroups),
    (3, "n=2 classification", 300, c03_classification),
    (4, "asymp classes", 1, c04_asymp),
    (5, "table E", 5, c05_e_numbers),
    (6, "CI3 isomorphism classes", 5, c06_ci3),
    (7, "identity beta", 1, c07_beta),
    (8, "separation certificates", 120, c08_certify),
    (9, "implication families", 5, c09_implication),
    (10, "NAND machinery", 60, c10_nand),
    (11, "unrepresentable ternary op", 1, c11_unrepresentable),
    (12, "counting ratio", 1, c12_counts),
    (13, "D and its variants", 120, c13_d_variants),
    (14, "agreement census", 300, c14_mnk),
    (15, "property suites", 120, c15_properties),
]


def run_check(number: int, **kwargs) -> CheckResult:
    for num, title, limit, fn in CHECKS:
        if num == number:
            c = _Check()
            t0 = time.perf_counter()
            try:
                fn(c, **kwargs)
            except Exception as exc:        # a crash is a failed check, not a crashed run
                c.failures.append(f"{type(exc).__name__}: {exc}")
            return CheckResult(num, title, not c.failures, time.perf_counter() - t0, limit,
                               c.detail())
    raise KeyError(f"no check number {number}")


def run_all(numbers=None, echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    out = []
    for num, *_ in CHECKS:
        if numbers is not None and num not in numbers:
            continue
        res = run_check(num)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
