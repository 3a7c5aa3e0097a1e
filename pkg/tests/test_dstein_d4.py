"""Facts about D_1(F_2[D4]); these share the session-wide cached computation."""

import numpy as np
import pytest

from k2forge.abst import AbelianGroup
from k2forge.dstein import FormalSum, RelationError, induced_map, instance, k2_structure
from k2forge.galg import quotient_algebra_hom

pytestmark = pytest.mark.slow


def test_structure(d1_d4):
    assert d1_d4.mods == [2, 2, 2, 2, 4]
    c = d1_d4.certificates
    assert c["mod_2^3"]["group"] == c["mod_2^4"]["group"] == "Z_2 + Z_2 + Z_2 + Z_2 + Z_4"
    assert c["mod_3"]["group"] == c["mod_5"]["group"] == "0"
    assert c["rows_not_killed"] == 0 and c["r4_skipped"] == 0


def test_row_counts(d4, d1_d4):
    # oracle: count parameter triples straight from the unit mask and multiplication table
    valid = d4.unit_mask[d4.one ^ d4.table]
    per_a = valid.sum(axis=1).astype(np.int64)
    r1 = (int(valid.sum()) + int(np.trace(valid))) // 2
    r2 = sum(int(valid[a][d4.table].sum()) for a in range(d4.size))
    r4 = int((per_a ** 2).sum())
    assert d1_d4.certificates["rows"] == {"R1": r1, "R2": r2, "R4": r4}
    assert r1 + r2 + r4 == 25190464


def test_k2(d1_d4, d4_comm):
    k2 = k2_structure(d1_d4, d4_comm)
    assert k2.k2 == AbelianGroup((2, 2, 2)) and k2.second_route == k2.k2
    assert k2.image_order == 8 and k2.phi_rows["violations"] == 0
    assert k2.k2.order * k2.image_order == d1_d4.group.order


def test_rows_vanish_on_samples(d4, d1_d4):
    rng = np.random.default_rng(3)
    seen = 0
    while seen < 300:
        kind = ("R1", "R2", "R4", "DS2")[seen % 4]
        params = [int(x) for x in rng.integers(0, 256, 3 if kind != "R1" else 2)]
        try:
            row = instance(d4, kind, *params).row
        except RelationError:
            continue
        seen += 1
        assert d1_d4.is_zero(row), (kind, params)


@pytest.mark.parametrize("a,b,coords", [("(s+1)^2", "t+1", (0, 1, 0, 1, 0)), ("s+1", "st+s3t", (0, 1, 0, 1, 0)),
                                        ("(s+1)^2", "s+1", (0, 0, 0, 0, 0))])
def test_symbol_coordinates(d4, d1_d4, a, b, coords):
    assert d1_d4.evaluate(FormalSum.symbol(d4, d4.parse(a), d4.parse(b))) == coords


def test_cube_relation_fails(d4, d1_d4):
    u, v = d4.parse("s+1"), d4.parse("t+1")
    lhs = FormalSum.symbol(d4, d4.prod(u, u, u), v)
    rhs = FormalSum.symbol(d4, d4.prod(u, u, v), u)
    assert d1_d4.evaluate(lhs) != d1_d4.evaluate(rhs)


def test_generator_not_in_twice_d1(d4, d1_d4):
    x = d1_d4.evaluate(FormalSum.symbol(d4, d4.parse("(s+1)^2"), d4.parse("t+1")))
    assert not d1_d4.is_multiple(x, 2)


def test_quotient_map_onto_v4(d1_d4, d1_v4):
    _, hom = quotient_algebra_hom()
    f = induced_map(d1_d4, d1_v4, hom, check_rows=False)
    span = {tuple((i * a + j * b + k * c) % 2 for a, b, c in zip(*f.basis_images[:3]))
            for i in (0, 1) for j in (0, 1) for k in (0, 1)}
    images = {f(x) for x in d1_d4.elements()}
    assert len(images) == 8 and span <= images
