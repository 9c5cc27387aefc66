import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from dissoc.boolean_nand import (
    WORKED_EXAMPLE, WORKED_NAMES, Cube, FormulaError, NormalFormula, TrivialFormula,
    TruthTable, claim1_check, claim2_check, claim3_check, complete_sum, implies,
    nand_injectivity, nand_truth_table, parse_formula, prime_implicants,
    reduce_to_complete_sum, rho_classes, run_suite,
)
from dissoc.dissociativity import is_k_dissociative
from dissoc.formal_products import enumerate_products, parse
from dissoc.groupoid import decode


def worked():
    return parse_formula(WORKED_EXAMPLE, WORKED_NAMES)


def test_worked_example():
    nf = worked()
    phi = nf.truth_table()
    assert reduce_to_complete_sum(nf).format(WORKED_NAMES) == "x | z"
    assert complete_sum(phi).format(WORKED_NAMES) == "x | z"
    xz = parse_formula("x & z", WORKED_NAMES).cubes[0]
    y = parse_formula("y", WORKED_NAMES).cubes[0]
    assert implies(xz, phi)
    assert not implies(y, phi)
    assert phi((0, 1, 0)) == 0


def test_truth_table_layout():
    # x0 is the most significant digit; bit 0 is the all-zero assignment
    x0 = parse_formula("x0 | x0 & x1").truth_table()
    assert x0.k == 2 and x0.values.tolist() == [0, 0, 1, 1]
    assert x0.to_hex() == "c"
    assert TruthTable.from_hex("c", 2) == x0
    assert TruthTable.from_values([0, 0, 1, 1]) == x0
    assert x0.complement().bits == 0b0011


def test_nand_table():
    u = parse("x0x1•")
    tt = nand_truth_table(u)
    assert tt.values.tolist() == [1, 1, 1, 0]
    assert complete_sum(tt).format() == "x0' | x1'"
    assert rho_classes(tt) == [{0}, {1}]
    assert nand_truth_table(parse("x0")).values.tolist() == [0, 1]


def test_prime_implicants_examples():
    p = parse_formula("x0' | x1'").truth_table()
    assert [c.format() for c in prime_implicants(p)] == ["x0'", "x1'"]
    minterm = TruthTable(3, 1 << 5)
    (c,) = prime_implicants(minterm)
    assert c.format() == "x0 & x1' & x2"
    for bits in (0, 0xff):
        with pytest.raises(TrivialFormula):
            prime_implicants(TruthTable(3, bits))
    with pytest.raises(TrivialFormula):
        reduce_to_complete_sum(parse_formula("x0 | x0'"))


def brute_primes(phi):
    out = set()
    for states in product((0, 1, 2), repeat=phi.k):
        pos = sum(1 << v for v, s in enumerate(states) if s == 1)
        neg = sum(1 << v for v, s in enumerate(states) if s == 0)
        if not pos | neg:
            continue
        c = Cube(phi.k, pos, neg)
        if implies(c, phi) and all(
                (d := c.drop(v)) is None or not implies(d, phi)
                for v, _ in c.literals()):
            out.add(c)
    return out


def test_prime_implicant_definition_small():
    for k in (1, 2, 3):
        for bits in range(1, (1 << (1 << k)) - 1):
            phi = TruthTable(k, bits)
            assert set(prime_implicants(phi)) == brute_primes(phi)


@given(st.integers(1, 6), st.data())
@settings(max_examples=150)
def test_prime_implicant_properties(k, data):
    bits = data.draw(st.integers(1, (1 << (1 << k)) - 2))
    phi = TruthTable(k, bits)
    primes = prime_implicants(phi)
    for c in primes:
        assert implies(c, phi)
        for v, _ in c.literals():
            d = c.drop(v)
            assert d is None or not implies(d, phi)
    assert complete_sum(phi).truth_table() == phi


def test_complete_sum_canonical_and_injective():
    seen = {}
    for bits in range(1, 255):
        cs = complete_sum(TruthTable(3, bits))
        assert cs == complete_sum(TruthTable(3, bits))
        assert cs not in seen
        seen[cs] = bits


def random_formula(rng, k):
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
        if not cubes:
            continue
        nf = NormalFormula.of(k, cubes)
        if not nf.truth_table().is_constant:
            return nf


def test_reduce_matches_sweep_random():
    rng = random.Random(20261014)
    for _ in range(500):
        nf = random_formula(rng, 6)
        assert reduce_to_complete_sum(nf) == complete_sum(nf.truth_table())


def test_reduce_fixpoint():
    cs = complete_sum(worked().truth_table())
    assert reduce_to_complete_sum(cs) == cs


def test_parse_errors():
    with pytest.raises(FormulaError):
        parse_formula("x0 & ")
    with pytest.raises(FormulaError):
        parse_formula("y", ("x",))
    with pytest.raises(FormulaError):
        Cube(2, 1, 1)


def test_claims_exhaustive_to_seven():
    for k in range(1, 8):
        for u in enumerate_products(k):
            assert claim1_check(u)
            if k >= 2:
                assert claim2_check(u)
                assert claim3_check(u)


def test_injectivity_agrees_with_dp():
    nand = decode(2, 14)
    for k in range(1, 9):
        res = nand_injectivity(k)
        assert res.injective
        if k >= 3:
            assert res.injective == is_k_dissociative(nand, k)
    assert nand_injectivity(5).products == 14


def test_k3_split_structures():
    a, b = enumerate_products(3)
    ca, cb = (rho_classes(nand_truth_table(u)) for u in (a, b))
    assert ca != cb


def test_suite():
    assert run_suite(5, 5).ok
