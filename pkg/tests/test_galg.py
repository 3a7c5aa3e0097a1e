from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from k2forge.galg import NotAUnit, algebra, quotient_algebra_hom


def naive_mul(alg, x, y):
    """Convolution straight from the group table, one basis pair at a time."""
    g = alg.group
    out = 0
    for i in range(g.order):
        if x >> i & 1:
            for j in range(g.order):
                if y >> j & 1:
                    out ^= 1 << g.mul(i, j)
    return out


elements = st.integers(0, 255)


@pytest.mark.parametrize("ring", ["z2", "z4", "v4"])
def test_table_matches_convolution_exhaustive(ring):
    alg = algebra(ring)
    for x, y in product(range(alg.size), repeat=2):
        assert alg.mul(x, y) == naive_mul(alg, x, y)


@given(elements, elements)
def test_d4_table_matches_convolution(x, y):
    d4 = algebra("d4")
    assert d4.mul(x, y) == naive_mul(d4, x, y)


@given(elements, elements, elements)
def test_d4_associative_and_distributive(x, y, z):
    d4 = algebra("d4")
    m = d4.mul
    assert m(m(x, y), z) == m(x, m(y, z))
    assert m(x, y ^ z) == m(x, y) ^ m(x, z)
    assert m(x ^ y, z) == m(x, z) ^ m(y, z)


def test_d4_associative_on_special_triples(d4):
    g = [1 << i for i in range(8)]
    special = g + [d4.one ^ x for x in g[1:]] + [d4.parse("1+s2")]
    t = d4.table
    a = np.array(special)
    lhs = t[t[a[:, None, None], a[None, :, None]], a[None, None, :]]
    rhs = t[a[:, None, None], t[a[None, :, None], a[None, None, :]]]
    assert (lhs == rhs).all()


@pytest.mark.parametrize("ring", ["z2", "v4"])
def test_ring_axioms_exhaustive_small(ring):
    alg = algebra(ring)
    t = alg.table
    x = np.arange(alg.size)
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    assert (t[t[X, Y], Z] == t[X, t[Y, Z]]).all()
    assert (t[X, Y ^ Z] == t[X, Y] ^ t[X, Z]).all()


def test_one_plus_s_squared(d4):
    assert d4.format(d4.mul(d4.parse("1+s"), d4.parse("1+s"))) == "1+s2"


def test_one_plus_s2_squares_to_zero(d4):
    e = d4.parse("1+s2")
    assert d4.mul(e, e) == 0


def test_t_s_is_s3t(d4):
    assert d4.format(d4.mul(d4.parse("t"), d4.parse("s"))) == "s3t"


class TestAugmentation:
    def test_zero(self, d4):
        assert d4.augmentation(0) == 0

    def test_three_terms(self, d4):
        assert d4.augmentation(d4.parse("1+s+t")) == 1

    def test_multiplicative_exhaustive(self, d4):
        aug = np.array([d4.augmentation(x) for x in range(256)])
        assert (aug[d4.table] == np.multiply.outer(aug, aug)).all()


class TestUnits:
    def test_s_inverse(self, d4):
        assert d4.is_unit(d4.parse("s"))
        assert d4.format(d4.inverse(d4.parse("s"))) == "s3"

    def test_unit_count(self, d4):
        assert len(d4.units) == 128

    def test_inverse_by_search(self, d4):
        x = d4.parse("1+s+s2")
        hits = [y for y in range(256) if d4.mul(x, y) == d4.one == d4.mul(y, x)]
        assert hits == [d4.inverse(x)]

    @pytest.mark.parametrize("ring", ["z2", "z4", "v4", "d4"])
    def test_units_are_augmentation_one(self, ring):
        alg = algebra(ring)
        assert all(alg.is_unit(x) == (alg.augmentation(x) == 1) for x in range(alg.size))

    def test_non_unit_inverse_raises(self, d4):
        with pytest.raises(NotAUnit):
            d4.inverse(d4.parse("1+s"))

    def test_unit_orders(self, d4):
        orders = {d4.unit_order(int(u)) for u in d4.units}
        assert orders == {1, 2, 4}
        assert d4.unit_order(d4.parse("s")) == 4
        for u in d4.units:
            assert d4.power(int(u), d4.unit_order(int(u))) == d4.one


@pytest.mark.parametrize("ring", ["z2", "z4", "v4", "d4"])
def test_all_local(ring):
    assert algebra(ring).is_local()


def test_z2_local_by_enumeration():
    alg = algebra("z2")
    nonunits = [x for x in range(4) if not any(alg.mul(x, y) == alg.one for y in range(4))]
    assert nonunits == [0, 3]


class TestIdeal:
    def test_size_and_square_zero(self, d4):
        ideal = d4.ideal_of(d4.parse("1+s2"))
        assert len(ideal) == 16 and ideal.is_two_sided()
        el = list(ideal.elements)
        assert all(d4.mul(x, y) == 0 for x in el for y in el)

    def test_zero_ideal(self, d4):
        assert d4.ideal_of(0).elements == frozenset({0})

    def test_ideal_is_central(self, d4):
        assert all(d4.is_central(x) for x in d4.ideal_of(d4.parse("1+s2")).elements)


@pytest.fixture(scope="module")
def fq():
    return quotient_algebra_hom()


class TestQuotientAlgebra:
    def test_s2_to_one(self, fq, d4):
        v4, f = fq
        assert f(d4.parse("s2")) == v4.one

    def test_kernel_is_ideal(self, fq, d4):
        _, f = fq
        assert f.kernel() == d4.ideal_of(d4.parse("1+s2")).elements

    def test_multiplicative_exhaustive(self, fq, d4):
        v4, f = fq
        img = np.array([f(x) for x in range(256)])
        assert (img[d4.table] == v4.table[img[:, None], img[None, :]]).all()

    def test_units_onto_units(self, fq, d4):
        v4, f = fq
        assert {f(int(u)) for u in d4.units} == {int(u) for u in v4.units}


def test_center_contains_ideal_generator(d4):
    assert d4.parse("1+s2") in set(d4.center.tolist())


def test_parse_format_round_trip(d4):
    for x in range(256):
        assert d4.parse(d4.format(x)) == x


def test_elem_operators(d4):
    s = d4.elem("s")
    assert (s + 1) * (s + 1) == d4.elem("1+s2")
    assert ~s == d4.elem("s3")
    assert s ** 4 == d4.elem("1")
