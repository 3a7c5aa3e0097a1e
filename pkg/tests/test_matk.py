import numpy as np
import pytest
from hypothesis import given, strategies as st

from k2forge.galg import NotAUnit, algebra
from k2forge.matk import (PVector, commutator, commutator_law_check, elementary, identity, iterated_suffixes,
                          literal_final_step_check, p_value, right_ideal_sum_is_whole, stable_range_one_check, suffix,
                          w_group, whitehead_chain, whitehead_chain_all)
from k2forge.units import UnitGroup

elems = st.integers(0, 255)


class TestElementary:
    def test_inverse(self, d4):
        r = d4.parse("1+s+st")
        assert elementary(d4, 1, 2, r) @ elementary(d4, 1, 2, r) == identity(d4)

    def test_additive(self, d4):
        r, s = d4.parse("s"), d4.parse("t+s2")
        assert elementary(d4, 2, 1, r) @ elementary(d4, 2, 1, s) == elementary(d4, 2, 1, r ^ s)

    def test_diagonal_rejected(self, d4):
        with pytest.raises(ValueError):
            elementary(d4, 1, 1, 1)

    @pytest.mark.parametrize("ring", ["v4", "d4"])
    def test_commutator_laws(self, ring):
        assert commutator_law_check(algebra(ring), n=3, samples=30)

    def test_commutator_of_distant_indices(self, d4):
        assert commutator(d4, (1, 2, 5), (3, 4, 9), 4) == identity(d4, 4)


class TestWhiteheadChain:
    @given(elems, elems)
    def test_single_pair(self, a, b):
        d4 = algebra("d4")
        if not d4.is_unit(d4.one ^ d4.mul(a, b)):
            with pytest.raises(NotAUnit):
                whitehead_chain(d4, a, b)
            return
        res = whitehead_chain(d4, a, b)
        assert res.first.is_diagonal() and res.second.is_diagonal()
        assert res.second[0, 0] == d4.one

    def test_all_pairs_and_values_in_commutator(self, d4, d4_comm):
        out = whitehead_chain_all(d4, d4_comm)
        assert out["pairs"] == 49152
        assert out["first_chain_failures"] == 0 and out["second_chain_failures"] == 0
        assert out["values_outside_commutator"] == []

    def test_values_fill_commutator(self, d4, d4_comm):
        assert set(whitehead_chain_all(d4)["values"]) == set(d4_comm.encodings())

    def test_commutative_values_trivial(self):
        assert whitehead_chain_all(algebra("v4"))["values"] == [algebra("v4").one]

    def test_literal_final_factors_rarely_diagonalise(self, d4):
        assert literal_final_step_check(d4) == {"pairs": 49152, "diagonal": 2688}


class TestPVectors:
    @given(elems, elems, elems)
    def test_small_lengths(self, t1, t2, t3):
        d4 = algebra("d4")
        m = d4.mul
        assert p_value(PVector(d4, (t1,))) == t1
        assert p_value(PVector(d4, (t1, t2))) == d4.one ^ m(t1, t2)
        assert p_value(PVector(d4, (t1, t2, t3))) == t1 ^ t3 ^ d4.prod(t1, t2, t3)

    @given(st.lists(elems, min_size=1, max_size=4))
    def test_suffix_kills_extended_vector(self, ts):
        d4 = algebra("d4")
        v = PVector(d4, tuple(ts))
        if not v.is_unimodular():
            return
        assert p_value(PVector(d4, v.coords + (suffix(v),))) == 0

    def test_iterated_suffixes_length(self, d4):
        v = PVector(d4, (d4.parse("s+t"), d4.parse("t")))
        assert v.is_unimodular()
        assert len(iterated_suffixes(v, 3)) == 3

    def test_reverse_commutative(self, v4):
        for a in range(16):
            for b in range(16):
                v = PVector(v4, (a, b, a ^ b))
                assert p_value(v) == p_value(v.reversed())


class TestWGroup:
    @pytest.mark.parametrize("n", [2, 3])
    def test_d4_is_commutator(self, d4, d4_units, d4_comm, n):
        w = w_group(d4, n, d4_units)
        assert w.members == d4_comm.members

    def test_commutative_trivial(self, v4):
        assert len(w_group(v4, 2).members) == 1

    def test_rejects_large_n(self, d4):
        with pytest.raises(ValueError):
            w_group(d4, 4)


class TestStableRange:
    @pytest.mark.parametrize("ring", ["z2", "z4", "v4", "d4"])
    def test_holds_for_local_rings(self, ring):
        ok, ev = stable_range_one_check(algebra(ring))
        assert ok and "counterexample" not in ev

    def test_comaximal_with_unit(self, d4):
        assert right_ideal_sum_is_whole(d4, d4.one, 0)
        assert not right_ideal_sum_is_whole(d4, d4.parse("1+s"), d4.parse("1+t"))
