from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from dissoc.dissociativity import is_k_dissociative
from dissoc.evaluation import eval_rpn
from dissoc.formal_products import enumerate_products
from dissoc.groupoid import GroupoidTable, ci3_decode, decode, named_table
from dissoc.yield_certify import (
    BlockPattern, CertificateNotFound, EventuallyPeriodicSeq, TemplateError, allvals,
    automaton_values, block_automaton, certify_separation, certify_yield, cut_blocks,
    d_variants, delete_identity, load_patterns, pattern_values, prefix_allvals,
    prefix_automaton, seq_yield, split_values, verify_witness_family, witness_families,
)

N2 = [decode(2, j) for j in range(16)]
CI3 = [ci3_decode(a) for a in range(27)]
NAMED = [named_table(x) for x in ("B", "D", "E")]


def brute_allvals(word, t):
    k = len(word)
    return {eval_rpn(u, t, word) for u in enumerate_products(k)}


@st.composite
def table_and_word(draw, max_len=7):
    t = draw(st.sampled_from(N2 + CI3 + NAMED))
    word = draw(st.lists(st.integers(0, t.n - 1), min_size=1, max_size=max_len))
    return t, word


@given(table_and_word())
@settings(max_examples=300)
def test_allvals_matches_enumeration(tw):
    t, word = tw
    assert allvals(word, t) == brute_allvals(word, t)


def test_allvals_exhaustive_short_words():
    for t in N2 + [named_table("B")]:
        for m in range(1, 6):
            for word in product(range(t.n), repeat=m):
                assert allvals(word, t) == brute_allvals(word, t)


def test_single_letter_and_pair():
    b = named_table("B")
    for g in range(4):
        assert allvals([g], b) == {g}
    assert split_values([2, 3], 1, b) == {b(2, 3)}
    with pytest.raises(ValueError):
        split_values([2, 3], 2, b)
    with pytest.raises(ValueError):
        allvals([], b)


def test_implication_families():
    t = decode(2, 13)
    for k in range(1, 13):
        assert allvals([1] * (k - 1) + [0], t) == {0}
        for j in range(0, k - 1):
            assert allvals([1] * j + [0] + [1] * (k - j - 1), t) == {1}


def test_b_split_word():
    b = named_table("B")
    for k in range(3, 10):
        for i in range(1, k - 1):
            for j in range(i + 1, k):
                w = [0] * (i - 1) + [1, 2] + [0] * (j - i - 1) + [3] + [0] * (k - j - 1)
                assert split_values(w, i, b) == {1}
                assert split_values(w, j, b) == {3}


def test_seq_parse_and_take():
    s = EventuallyPeriodicSeq.parse("10(0)")
    assert s.prefix == (1, 0) and s.period == (0,)
    assert s.take(5) == [1, 0, 0, 0, 0]
    assert str(s) == "10(0)"
    assert EventuallyPeriodicSeq.parse("1,0,(2,1)").take(6) == [1, 0, 2, 1, 2, 1]
    with pytest.raises(ValueError):
        EventuallyPeriodicSeq.parse("101")


def test_seq_yield_examples():
    d = named_table("D")
    assert seq_yield(EventuallyPeriodicSeq.constant(0), d, 20) == ({0}, 1)
    vals, _ = seq_yield(EventuallyPeriodicSeq.parse("1(0)"), d, 20)
    assert vals == {1}
    vals, stab = seq_yield(EventuallyPeriodicSeq.constant(1), decode(2, 13), 20)
    assert vals == {1} and stab == 1


@given(st.sampled_from(N2 + CI3), st.lists(st.integers(0, 1), max_size=3),
       st.lists(st.integers(0, 1), min_size=1, max_size=3))
@settings(max_examples=100)
def test_seq_yield_monotone(t, prefix, period):
    seq = EventuallyPeriodicSeq(tuple(prefix), tuple(period))
    prev = frozenset()
    for L in range(1, 16):
        cur, _ = seq_yield(seq, t, L)
        assert prev <= cur
        prev = cur


def test_prefix_automaton_matches_long_window():
    # the fixpoint over all prefixes equals the window union once the window is long enough
    for t in N2 + CI3[:9]:
        for prefix in product(range(t.n), repeat=2):
            for period in ([0], [1], [0, 1], [1, 0, 0]):
                seq = EventuallyPeriodicSeq(prefix, tuple(period))
                exact = automaton_values(prefix_automaton(seq), t)
                assert exact == seq_yield(seq, t, 30)[0]


def test_certificate_kinds():
    b, d = named_table("B"), named_table("D")
    cert = certify_yield(EventuallyPeriodicSeq.parse("123(321)"), {1, 2, 3}, b)
    assert cert.kind == "subgroupoid" and cert.claimed == {1, 2, 3}
    cert = certify_yield(EventuallyPeriodicSeq.constant(0), {0}, d)
    assert cert.kind == "constant-idempotent" and cert.claimed == {0}
    cert = certify_yield(EventuallyPeriodicSeq.parse("1(0)"), {1}, d)
    assert cert.kind == "semilattice-absorb" and cert.claimed == {1}
    cert = certify_yield(EventuallyPeriodicSeq.parse("2003(0)"), range(4), b)
    assert cert.kind == "identity-deletion" and cert.inner.claimed == {1, 2}
    with pytest.raises(CertificateNotFound):
        certify_yield(EventuallyPeriodicSeq.parse("1(0)"), {0}, d)


def test_identity_deletion_against_allvals():
    b = named_table("B")
    assert b(2, 3) == 1
    for p in range(0, 7):
        for q in range(0, 7):
            if 2 + p + q > 8:
                continue
            word = [2] + [0] * p + [3] + [0] * q
            assert delete_identity(word, 0) == (2, 3)
            assert allvals(word, b) == allvals([2, 3], b) == {1}


def test_certificates_agree_with_window():
    for t in N2 + CI3 + NAMED:
        for prefix in product(range(min(t.n, 3)), repeat=1):
            for period in product(range(t.n), repeat=2):
                seq = EventuallyPeriodicSeq(prefix, period)
                cert = certify_yield(seq, range(t.n), t)
                window, _ = seq_yield(seq, t, 30)
                if cert.exact:
                    assert cert.claimed == window, (t.label, seq, cert.kind)
                else:
                    assert window <= cert.claimed


def test_block_pattern_parse_and_cut():
    pat = BlockPattern.parse("x: a^{p} b a^{q+r+1} b")
    assert pat.name == "x" and pat.symbols == ("a", "b")
    assert pat.length() == (3, 1, 1, 1)
    assert pat.instantiate({"a": 1, "b": 0}, (1, 0, 2)) == [1, 0, 1, 1, 1, 0]
    left, right = cut_blocks(pat.bind({"a": 1, "b": 0}), (2, 1, 1, 0))
    assert left == [(1, (0, 1, 0, 0)), (0, (1, 0, 0, 0)), (1, (1, 0, 1, 0))]
    assert right == [(1, (0, 0, 0, 1)), (0, (1, 0, 0, 0))]
    with pytest.raises(TemplateError):
        BlockPattern.parse("a^{s}")
    with pytest.raises(TemplateError):
        cut_blocks(BlockPattern.parse("a^{2p} b c").bind({"a": 0, "b": 1, "c": 2}),
                   (1, 1, 0, 0))


def test_templates_load():
    names = [p.name for p in load_patterns(kind="split")]
    assert "three-block" in names and "marker-pair" in names
    assert [p.name for p in load_patterns(kind="yield")] == ["staircase"]


def test_block_automaton_covers_family():
    t = named_table("D")
    items = [(1, 1, True), (0, 1, True), (2, 1, False)]
    over = automaton_values(block_automaton(items), t)
    for a in range(1, 5):
        for b in range(1, 5):
            assert allvals([1] * a + [0] * b + [2], t) <= over
    assert pattern_values([(1, (1, 1, 0, 0))], t) == {1}


def test_witness_families_certify():
    for name in witness_families():
        rep = verify_witness_family(name, 10)
        assert rep.verdict == "certified-to-10", (name, rep.counterexamples[:3])
        assert rep.uniformly_certified
    with pytest.raises(KeyError):
        verify_witness_family("nope", 5)


def test_witness_split_values():
    fams = witness_families()
    assert (fams["CI3_3"].A, fams["CI3_3"].B) == ({0}, {1})
    assert (fams["CI3_7"].A, fams["CI3_7"].B) == ({0}, {2})
    assert (fams["CI3_5"].A, fams["CI3_5"].B) == ({1}, {2})


def test_d_variants():
    fams = d_variants()
    assert len(fams) == 17
    assert len({f.table.entries.tobytes() for f in fams}) == 17
    from dissoc.yield_certify import verify_family
    for f in fams:
        assert f.T == {0, 1}
        rep = verify_family(f, 8)
        assert rep.certified, f.name


def test_certify_separation_examples():
    rep = certify_separation(named_table("B"), range(4), 10)
    assert rep.verdict == "certified-to-10" and rep.uniformly_certified
    rep = certify_separation(decode(2, 13), {0, 1}, 10)
    assert rep.certified
    rep = certify_separation(decode(2, 14), None, 6)
    assert not rep.certified and rep.failure[0] == 1
    assert rep.verdict.startswith("failed(condition 1")
    rec = certify_separation(named_table("D"), {0, 1}, 6).to_record()
    assert rec["schema"] == "separation-report/1" and rec["verdict"] == "certified-to-6"
    with pytest.raises(ValueError):
        certify_separation(named_table("D"), {0}, 6)


def test_certified_tables_are_dissociative():
    for t in N2 + CI3:
        rep = certify_separation(t, None, 6)
        if rep.certified:
            for k in range(3, 7):
                assert is_k_dissociative(t, k), (t.label, k)


def test_non_separable_split():
    # a semigroup can never meet the split condition
    rep = certify_separation(decode(2, 6), {0, 1}, 5)
    assert not rep.certified
