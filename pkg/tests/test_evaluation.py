import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dissoc.errors import ResourceLimitError
from dissoc.evaluation import (
    App, OpVector, TermError, UnboundVariable, Var, associative_law, beta_identity,
    compose_values, compose_vectors, eval_rpn, eval_term, identity_holds,
    induced_vector, induced_vector_naive, interpret, op_count, parse_identity,
    parse_term, tuple_index,
)
from dissoc.formal_products import X0, compose, count, enumerate_products, parse, unrank
from dissoc.groupoid import ci3_decode, decode, is_semigroup, named_table, resolve_table

TEST_TABLES = [decode(2, j) for j in range(16)] + [named_table(x) for x in "EBD"]


def recursive_eval(w, t, g):
    """Tree-recursive evaluator, independent of the stack machine."""
    from dissoc.formal_products import factorize
    if w.arity == 1:
        return g[0]
    f = factorize(w)
    return t(recursive_eval(f.left, t, g[:f.split]), recursive_eval(f.right, t, g[f.split:]))


def test_eval_e_one_split():
    assert eval_rpn(parse("x0 x1 x2 • •"), named_table("E"), (0, 1, 2)) == 0


def test_implication_all_ones():
    t = decode(2, 13)
    for k in range(1, 7):
        for w in enumerate_products(k):
            assert eval_rpn(w, t, (1,) * k) == 1


def test_arity_one():
    for t in TEST_TABLES:
        assert eval_rpn(X0, t, (1, 0)) == 1
        assert induced_vector(X0, t).values.tolist() == list(range(t.n))


def test_eval_uses_prefix():
    w = parse("x0 x1 •")
    t = named_table("E")
    assert eval_rpn(w, t, (1, 2, 0, 0)) == t(1, 2)


@given(st.integers(2, 6).flatmap(lambda k: st.tuples(
    st.integers(0, count(k) - 1).map(lambda r: unrank(k, r)),
    st.sampled_from(TEST_TABLES),
    st.lists(st.integers(0, 3), min_size=k, max_size=k))))
def test_stack_matches_recursive(case):
    w, t, g = case
    g = [x % t.n for x in g]
    assert eval_rpn(w, t, g) == recursive_eval(w, t, g)


@pytest.mark.parametrize("t", TEST_TABLES, ids=lambda t: t.label)
def test_compositional_equals_naive(t):
    for k in range(1, 7):
        for w in enumerate_products(k):
            assert induced_vector(w, t) == induced_vector_naive(w, t)


def test_semigroup_vectors_identical():
    t = decode(2, 7)
    a, b = enumerate_products(3)
    assert induced_vector(a, t) == induced_vector(b, t)


def test_compose_vectors_projection():
    for t in TEST_TABLES:
        p = induced_vector(X0, t)
        assert compose_vectors(p, p, t).values.tolist() == t.entries.ravel().tolist()


def test_compose_vectors_agrees_with_composition():
    t = named_table("E")
    for a in enumerate_products(3):
        for b in enumerate_products(2):
            va, vb = induced_vector(a, t), induced_vector(b, t)
            assert compose_vectors(va, vb, t) == induced_vector(compose(a, b), t)


def test_b_identity_row_lookup():
    t = named_table("B")
    v = induced_vector(parse("x0 x1 • x2 •"), t)
    for g1, g2 in [(1, 2), (3, 3), (2, 1)]:
        assert v[(0, g1, g2)] == t(g1, g2)


def test_suffix_law():
    rng = random.Random(11)
    for _ in range(500):
        t = rng.choice(TEST_TABLES)
        k = rng.randint(1, 5)
        m = rng.randint(0, 4)
        w = unrank(k, rng.randrange(count(k)))
        g = [rng.randrange(t.n) for _ in range(m + k)]
        shifted = type(w)(w.shifted(m), w.arity + m)
        # the shifted word evaluates the suffix of g starting at m
        stack = []
        for s in shifted.word:
            if s < 0:
                b = stack.pop()
                stack.append(t(stack.pop(), b))
            else:
                stack.append(g[s])
        assert stack[0] == eval_rpn(w, t, g[m:])


def test_interpret_constant_tuple():
    for t in [named_table("E"), decode(2, 13), named_table("B")]:
        for k in range(2, 6):
            for w in enumerate_products(k):
                assert interpret(w, [t] * (k - 1)) == induced_vector(w, t)


def test_interpret_mixed():
    u = parse("x0 x1 • x2 •")
    v = interpret(u, [decode(2, 13), decode(2, 14)])
    assert v[(1, 0, 0)] == 1
    ops = [decode(3, j) for j in (5, 700, 12000, 19000)]
    w = parse("x0 x1 • x2 x3 • • x4 •")
    v = interpret(w, ops)
    rng = random.Random(3)
    for _ in range(30):
        g = [rng.randrange(3) for _ in range(5)]
        h0 = ops[0](g[0], g[1])
        h1 = ops[1](g[2], g[3])
        assert v[g] == ops[3](ops[2](h0, h1), g[4])


def test_interpret_length_mismatch():
    with pytest.raises(ValueError):
        interpret(parse("x0 x1 x2 • •"), [decode(2, 1)])


def test_vector_cap():
    with pytest.raises(ResourceLimitError):
        induced_vector(unrank(30, 0), decode(2, 1))


def test_opvector_codecs():
    v = induced_vector(parse("x0 x1 •"), decode(2, 14))
    assert v.values.tolist() == [1, 1, 1, 0]
    assert v.to_hex() == "7"
    assert OpVector.from_hex("7", 2) == v
    w = OpVector.from_digits("012120201", 3)
    assert w.k == 2 and w[(1, 2)] == 0
    assert tuple_index((1, 0, 1), 2) == 5


def test_compose_values_kernel():
    e = named_table("E").entries
    va = np.array([0, 1, 2, 2], dtype=np.uint8)
    vb = np.array([1, 0], dtype=np.uint8)
    out = compose_values(va, vb, e)
    assert out.tolist() == [e[a, b] for a in va for b in vb]


def test_term_parsing():
    beta = beta_identity()
    assert op_count(beta.lhs) == 3
    assert op_count(beta.rhs) == 5
    assert parse_term("x*y") == App(Var("x"), Var("y"))
    assert parse_identity(str(beta)) == beta
    with pytest.raises(TermError):
        parse_term("x*y*z")
    with pytest.raises(TermError):
        parse_term("(x*y")


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        eval_term(parse_term("x*y"), decode(2, 1), {"x": 0})


def test_beta_holds_in_b():
    assert identity_holds(beta_identity(), named_table("B")).holds


def test_beta_stated_failures():
    beta = beta_identity()
    cases = [
        (ci3_decode(3), (0, 2, 1), 1, 0),
        (named_table("D"), (1, 2, 0), 0, 1),
        (ci3_decode(5), (2, 0, 1), 1, 2),
    ]
    for t, (x, y, z), lhs, rhs in cases:
        env = {"x": x, "y": y, "z": z}
        assert eval_term(beta.lhs, t, env) == lhs
        assert eval_term(beta.rhs, t, env) == rhs
        assert not identity_holds(beta, t).holds


def test_beta_in_meet_semilattice():
    assert identity_holds(beta_identity(), decode(2, 7)).holds


def test_identity_countermodel_is_first():
    check = identity_holds(beta_identity(), named_table("D"))
    assert check.countermodel == {"x": 0, "y": 1, "z": 2}
    assert (check.lhs_value, check.rhs_value) == (0, 1)


def test_associative_law_matches_semigroup():
    for j in range(16):
        t = decode(2, j)
        assert identity_holds(associative_law(), t).holds == is_semigroup(t)


def test_resolve_in_terms():
    assert identity_holds(parse_identity("x*x = x"), resolve_table("E")).holds
