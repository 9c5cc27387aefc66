import random
from fractions import Fraction
from itertools import product

import pytest

from dissoc.errors import ResourceLimitError
from dissoc.evaluation import OpVector, interpret
from dissoc.formal_products import enumerate_products, parse
from dissoc.groupoid import decode
from dissoc.representability import (
    unrepresentable_phi, phi_count, r_exceeds_one, ratio_R, representable_census,
    representable_vectors, search_representation,
)


def oracle_vectors(n, k):
    tables = [decode(n, j) for j in range(n ** (n * n))]
    out = set()
    for u in enumerate_products(k):
        for beta in product(tables, repeat=k - 1):
            out.add(interpret(u, beta).data)
    return out


def test_unrepresentable_phi_values():
    phi = unrepresentable_phi()
    assert phi[(0, 0, 1)] == 1 and phi[(1, 1, 1)] == 0
    assert phi.values.tolist() == [0, 1, 0, 0, 1, 1, 0, 0]
    assert int(phi.values.sum()) == 3


def test_ternary_unrepresentable():
    ex = search_representation(unrepresentable_phi(), "exhaustive")
    assert ex.witness is None and ex.explored == 512
    pr = search_representation(unrepresentable_phi(), "propagate")
    assert pr.witness is None
    assert any(e[0] == "wall" for e in pr.trace)


def test_ternary_case_trace():
    # the branch with 00β0 = 1 on x0 x1 • x2 • ends at the tuple 101
    pr = search_representation(unrepresentable_phi(), "propagate")
    u = parse("x0x1•x2•")
    walls = [e for e in pr.trace if e[0] == "wall" and e[1] == u]
    assert walls


def test_projection_representable():
    proj = OpVector.from_values(2, 3, [g[0] for g in product((0, 1), repeat=3)])
    for mode in ("exhaustive", "propagate"):
        res = search_representation(proj, mode)
        assert res.representable and res.witness.verify(proj)


def test_modes_agree_on_all_ternary_ops():
    reps = oracle_vectors(2, 3)
    for code in range(256):
        phi = OpVector.from_values(2, 3, [(code >> (7 - i)) & 1 for i in range(8)])
        ex = search_representation(phi, "exhaustive")
        pr = search_representation(phi, "propagate")
        assert ex.representable == pr.representable == (phi.data in reps)
        for res in (ex, pr):
            if res.witness is not None:
                assert res.witness.verify(phi)


def test_modes_agree_random_quaternary():
    rng = random.Random(7)
    reps = representable_vectors(2, 4)
    for _ in range(100):
        phi = OpVector.from_values(2, 4, [rng.randint(0, 1) for _ in range(16)])
        pr = search_representation(phi, "propagate")
        assert pr.representable == (phi.data in reps)
        if pr.witness is not None:
            assert pr.witness.verify(phi)
    # take some representable targets too, since random ones rarely are
    for data in sorted(reps)[:40]:
        phi = OpVector(2, 4, data)
        assert search_representation(phi, "propagate").witness.verify(phi)
        assert search_representation(phi, "exhaustive").witness.verify(phi)


def test_census_matches_oracle():
    c = representable_census(2, 3)
    assert c.total == 256 and c.phi_count == 512
    assert c.representable == len(oracle_vectors(2, 3)) == 120
    assert c.unrepresentable >= 1
    assert representable_census(1, 4).representable == 1


def test_census_24():
    c = representable_census(2, 4)
    assert c.total == 65536
    assert c.representable <= c.phi_count
    assert c.unrepresentable > 0


def test_counts():
    assert phi_count(2, 3) == 512
    assert ratio_R(2, 3) == Fraction(1, 2)
    assert ratio_R(2, 4) == Fraction(16, 5)
    for n in range(2, 7):
        for k in range(3, 11):
            expect = n >= 3 or k >= 4
            assert r_exceeds_one(n, k) == expect, (n, k)
            if n ** k < 5000:
                assert (ratio_R(n, k) > 1) == expect
    assert ratio_R(3, 3) == Fraction(3 ** 27, 3 ** 18 * 2)


def test_limits():
    with pytest.raises(ResourceLimitError):
        search_representation(OpVector.from_values(3, 3, [0] * 27), "exhaustive", budget=1000)
    with pytest.raises(ResourceLimitError):
        representable_vectors(3, 3)
    with pytest.raises(ValueError):
        search_representation(unrepresentable_phi(), "guess")
