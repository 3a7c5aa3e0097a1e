from itertools import product

import numpy as np
import pytest

from k2forge.grp import (GroupAxiomError, FiniteGroup, GroupHom, build_cyclic, build_dihedral_4, build_klein,
                         direct_product, quotient_hom_d4_to_klein)

GROUPS = [build_dihedral_4, lambda: build_cyclic(2), lambda: build_cyclic(4), build_klein,
          lambda: direct_product(build_cyclic(2), build_cyclic(2))]


@pytest.fixture(scope="module")
def D():
    return build_dihedral_4()


def test_basis_order(D):
    assert D.labels == ("1", "s", "s2", "s3", "t", "st", "s2t", "s3t")


def test_s_times_t_is_st(D):
    assert D.mul(D.index("s"), D.index("t")) == D.index("st")


def test_t_times_s_is_s3t(D):
    assert D.mul(D.index("t"), D.index("s")) == D.index("s3t")


def test_st_squared_is_identity(D):
    st = D.index("st")
    assert D.mul(st, st) == D.identity


@pytest.mark.parametrize("build", GROUPS)
def test_group_axioms_exhaustive(build):
    g = build()
    g.check_axioms()
    n = g.order
    m = g.mult
    for x, y, z in product(range(n), repeat=3):
        assert m[m[x, y], z] == m[x, m[y, z]]
    for x in range(n):
        assert m[x, g.inv[x]] == g.identity == m[g.inv[x], x]
        assert sorted(m[x]) == list(range(n)) and sorted(m[:, x]) == list(range(n))


def test_dihedral_order_multiset(D):
    assert sorted(D.element_order(x) for x in range(8)) == [1, 2, 2, 2, 2, 2, 4, 4]
    assert D.element_order(D.index("s")) == D.element_order(D.index("s3")) == 4


def test_cyclic_two_squares_to_one():
    g = build_cyclic(2)
    assert g.mul(1, 1) == g.identity


def test_klein_exponent_two():
    k = build_klein()
    assert all(k.element_order(x) == 2 for x in range(4) if x != k.identity)


def test_direct_product_matches_klein():
    a, k = direct_product(build_cyclic(2), build_cyclic(2)), build_klein()
    # (x, y) -> 2x + y relabels the product onto the bitwise-xor table of V4
    relabel = {i: 2 * (i // 2) + (i % 2) for i in range(4)}
    assert all(relabel[a.mul(i, j)] == k.mul(relabel[i], relabel[j]) for i in range(4) for j in range(4))


def test_unsupported_cyclic_order():
    with pytest.raises(ValueError):
        build_cyclic(3)


def test_bad_table_rejected():
    with pytest.raises(GroupAxiomError):
        FiniteGroup("bad", ("a", "b"), np.array([[0, 0], [0, 0]]))


@pytest.fixture(scope="module")
def f():
    return quotient_hom_d4_to_klein()


class TestQuotient:
    def test_s2_maps_to_identity(self, f, D):
        assert f(D.index("s2")) == f.target.identity

    def test_s3t_maps_to_s1t(self, f, D):
        assert f.target.labels[f(D.index("s3t"))] == "s1t"

    def test_surjective(self, f):
        assert len(f.image_set()) == 4

    def test_kernel(self, f, D):
        assert sorted(D.labels[x] for x in f.kernel()) == ["1", "s2"]

    def test_multiplicative_on_all_pairs(self, f, D):
        for x, y in product(range(8), repeat=2):
            assert f(D.mul(x, y)) == f.target.mul(f(x), f(y))

    def test_non_homomorphism_rejected(self, D):
        k = build_klein()
        with pytest.raises(GroupAxiomError):
            GroupHom(D, k, (0, 1, 0, 1, 2, 3, 2, 1))
