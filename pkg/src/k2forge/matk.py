"""Matrices over F_2[G]: elementary matrices, the two E_2 chains that place
(1+ab)(1+ba)^3 in E_2(R) cap GL_1(R), commutator laws, p-vectors and
suffixes, the group W(R) and the stable-range-1 check.

All arithmetic is characteristic 2, so negation is the identity; the code
still writes ``neg`` where a sign belongs to keep formulas recognisable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .galg import GroupAlgebra, NotAUnit
from .units import Subgroup, UnitGroup

__all__ = [
    "RingMatrix",
    "elementary",
    "identity",
    "mat_mul",
    "mat_eq",
    "commutator",
    "commutator_law_check",
    "ChainResult",
    "whitehead_chain",
    "whitehead_chain_all",
    "literal_final_step_check",
    "PVector",
    "p_value",
    "suffix",
    "iterated_suffixes",
    "w_group",
    "stable_range_one_check",
    "right_ideal_sum_is_whole",
]


def neg(x: int) -> int:
    return x


@dataclass(frozen=True)
class RingMatrix:
    algebra: GroupAlgebra
    entries: np.ndarray  # n x n int64 encodings

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        return mat_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, RingMatrix) and mat_eq(self, other)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __getitem__(self, ij):
        return int(self.entries[ij])

    def is_diagonal(self) -> bool:
        off = self.entries.copy()
        np.fill_diagonal(off, 0)
        return not off.any()

    def format(self) -> str:
        f = self.algebra.format
        return "[" + "; ".join(", ".join(f(int(x)) for x in row) for row in self.entries) + "]"

    __repr__ = format


def identity(alg: GroupAlgebra, n: int = 2) -> RingMatrix:
    e = np.zeros((n, n), dtype=np.int64)
    np.fill_diagonal(e, alg.one)
    return RingMatrix(alg, e)


def diag(alg: GroupAlgebra, *entries: int) -> RingMatrix:
    e = np.zeros((len(entries), len(entries)), dtype=np.int64)
    np.fill_diagonal(e, entries)
    return RingMatrix(alg, e)


def elementary(alg: GroupAlgebra, i: int, j: int, r: int, n: int = 2) -> RingMatrix:
    """Identity plus ``r`` in position (i, j); indices are 1-based."""
    if i == j:
        raise ValueError("elementary matrix needs i != j")
    m = identity(alg, n).entries.copy()
    m[i - 1, j - 1] = r
    return RingMatrix(alg, m)


def mat_mul(x: RingMatrix, y: RingMatrix) -> RingMatrix:
    if x.algebra is not y.algebra or x.n != y.n:
        raise ValueError("matrices over different rings or of different size")
    prods = x.algebra.table[x.entries[:, :, None], y.entries[None, :, :]]
    return RingMatrix(x.algebra, np.bitwise_xor.reduce(prods, axis=1))


def mat_eq(x: RingMatrix, y: RingMatrix) -> bool:
    return x.algebra is y.algebra and np.array_equal(x.entries, y.entries)


def _elem_inverse(m: RingMatrix, i: int, j: int) -> RingMatrix:
    return elementary(m.algebra, i, j, neg(m[i - 1, j - 1]), m.n)


def commutator(alg: GroupAlgebra, a: tuple[int, int, int], b: tuple[int, int, int], n: int) -> RingMatrix:
    """[e_a, e_b] = e_a e_b e_a^-1 e_b^-1 for elementary (i, j, r) triples."""
    x = elementary(alg, *a[:2], a[2], n)
    y = elementary(alg, *b[:2], b[2], n)
    return x @ y @ _elem_inverse(x, *a[:2]) @ _elem_inverse(y, *b[:2])


def commutator_law_check(alg: GroupAlgebra, n: int = 3, samples: int = 200, seed: int = 0) -> bool:
    """All index patterns of [e_ij(r), e_kl(s)] over ``samples`` random (r, s)."""
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    ident = identity(alg, n)
    rs = rng.integers(0, alg.size, size=(samples, 2))
    for (i, j), (k, l) in product(pairs, pairs):
        if j == k and i == l:
            continue
        for r, s in rs.tolist():
            got = commutator(alg, (i, j, r), (k, l, s), n)
            if j != k and i != l:
                want = ident
            elif j == k:
                want = elementary(alg, i, l, alg.mul(r, s), n)
            else:
                want = elementary(alg, k, j, neg(alg.mul(s, r)), n)
            if got != want:
                return False
    return True


@dataclass(frozen=True)
class ChainResult:
    first: RingMatrix   # diag(1+ab, 1+b(1+ab)^-1 a)
    second: RingMatrix  # diag(1, (1+ab)(1+ba)^3)
    value: int          # (1+ab)(1+ba)^3


def whitehead_chain(alg: GroupAlgebra, a: int, b: int) -> ChainResult:
    """Both elementary-matrix chains for one pair, each equality-checked."""
    one = alg.one
    u = one ^ alg.mul(a, b)
    if not alg.is_unit(u):
        raise NotAUnit(f"1 + ab = {alg.format(u)} is not a unit")
    ui = alg.inverse(u)
    e = lambda i, j, r: elementary(alg, i, j, r)
    d = one ^ alg.prod(b, ui, a)
    first = e(2, 1, neg(alg.mul(b, ui))) @ e(1, 2, a) @ e(2, 1, b) @ e(1, 2, neg(alg.mul(ui, a)))
    if first != diag(alg, u, d):
        raise AssertionError(f"first chain fails: {first.format()}")
    ab = alg.mul(a, b)
    m = e(1, 2, ab) @ e(2, 1, one ^ ab ^ alg.mul(ab, ab)) @ first
    top, tr, bl = m[0, 0], m[0, 1], m[1, 0]
    if top != one:
        raise AssertionError(f"(1+ab)^4 = {alg.format(top)} is not 1")
    second = e(2, 1, neg(bl)) @ m @ e(1, 2, neg(tr))
    v = one ^ alg.mul(b, a)
    value = alg.prod(u, v, v, v)
    if second != diag(alg, one, value):
        raise AssertionError(f"second chain fails: {second.format()}")
    return ChainResult(first, second, value)


def _vmul(alg, x, y):
    return alg.table[x, y]


def _vmm(alg, x, y):
    t = alg.table
    return [[t[x[i][0], y[0][k]] ^ t[x[i][1], y[1][k]] for k in range(2)] for i in range(2)]


def whitehead_chain_all(alg: GroupAlgebra, comm: Subgroup | None = None) -> dict:
    """Vectorised run of both chains over every pair with 1+ab a unit.

    Returns counts of pairs and failures, plus the first failing pair if any.
    """
    one, t, inv = alg.one, alg.table, alg.inverse_table
    a, b = (x.ravel() for x in np.meshgrid(np.arange(alg.size), np.arange(alg.size), indexing="ij"))
    u = one ^ t[a, b]
    ok = alg.unit_mask[u]
    a, b, u = a[ok], b[ok], u[ok]
    ui = inv[u]
    zero = np.zeros_like(a)
    ones = np.full_like(a, one)
    e12 = lambda r: [[ones, r], [zero, ones]]
    e21 = lambda r: [[ones, zero], [r, ones]]
    d = one ^ t[t[b, ui], a]
    first = _vmm(alg, _vmm(alg, e21(t[b, ui]), _vmm(alg, e12(a), e21(b))), e12(t[ui, a]))
    bad1 = (first[0][0] != u) | (first[0][1] != 0) | (first[1][0] != 0) | (first[1][1] != d)
    ab = t[a, b]
    m = _vmm(alg, _vmm(alg, e12(ab), e21(one ^ ab ^ t[ab, ab])), first)
    second = _vmm(alg, _vmm(alg, e21(m[1][0]), m), e12(m[0][1]))
    v = one ^ t[b, a]
    value = t[t[t[u, v], v], v]
    bad2 = (second[0][0] != one) | (second[0][1] != 0) | (second[1][0] != 0) | (second[1][1] != value)
    out = {
        "pairs": int(len(a)),
        "first_chain_failures": int(bad1.sum()),
        "second_chain_failures": int(bad2.sum()),
        "values": sorted(set(value.tolist())),
    }
    if comm is not None:
        out["values_outside_commutator"] = [int(x) for x in out["values"] if not comm.contains_element(int(x))]
    bad = np.flatnonzero(bad1 | bad2)
    out["first_failure"] = (int(a[bad[0]]), int(b[bad[0]])) if bad.size else None
    return out


def literal_final_step_check(alg: GroupAlgebra) -> dict:
    """Fraction of pairs for which clearing [[1, u], [v, d]] with the factors
    e_21(v(1+uv)^-1) and e_12((1+uv)^-1 u) yields a diagonal matrix."""
    one, t, inv = alg.one, alg.table, alg.inverse_table
    a, b = (x.ravel() for x in np.meshgrid(np.arange(alg.size), np.arange(alg.size), indexing="ij"))
    u1 = one ^ t[a, b]
    ok = alg.unit_mask[u1]
    a, b, u1 = a[ok], b[ok], u1[ok]
    ui = inv[u1]
    zero, ones = np.zeros_like(a), np.full_like(a, one)
    ab = t[a, b]
    uu = ab ^ t[t[ab, b], t[ui, a]]
    vv = one ^ t[t[ab, ab], ab]
    d = one ^ t[t[b, ui], a]
    w = one ^ t[uu, vv]
    wi = inv[w]
    fin = _vmm(alg, _vmm(alg, [[ones, zero], [t[vv, wi], ones]], [[ones, uu], [vv, d]]), [[ones, t[wi, uu]], [zero, ones]])
    diagonal = (fin[0][1] == 0) & (fin[1][0] == 0)
    return {"pairs": int(len(a)), "diagonal": int(diagonal.sum())}


@dataclass(frozen=True)
class PVector:
    algebra: GroupAlgebra
    coords: tuple[int, ...]

    def reversed(self) -> "PVector":
        return PVector(self.algebra, self.coords[::-1])

    def is_unimodular(self) -> bool:
        return self.algebra.is_unit(p_value(self))


def _p(alg: GroupAlgebra, ts: Sequence[int]) -> tuple[int, int]:
    """(p(t_1..t_n), p(t_1..t_{n-1}))."""
    prev, cur = 0, alg.one  # p of length -1 is taken as 0 so the recursion starts cleanly
    for k, x in enumerate(ts):
        nxt = x if k == 0 else alg.mul(cur, x) ^ prev
        prev, cur = cur, nxt
    return cur, prev


def p_value(v: PVector) -> int:
    return _p(v.algebra, v.coords)[0]


def suffix(v: PVector) -> int:
    """-u^-1 p(t_1..t_{n-1}) with u = p(t_1..t_n)."""
    alg = v.algebra
    u, before = _p(alg, v.coords)
    if not v.coords:
        before = 0
    return neg(alg.mul(alg.inverse(u), before))


def iterated_suffixes(v: PVector, k: int) -> list[int]:
    """First ``k`` suffixes: each new one is the suffix of the shifted vector."""
    out = []
    cur = v
    for _ in range(k):
        s = suffix(cur)
        out.append(s)
        cur = PVector(cur.algebra, cur.coords[1:] + (s,))
    return out


def w_group(alg: GroupAlgebra, n: int = 2, ug: UnitGroup | None = None,
            samples: int | None = None, seed: int = 0) -> Subgroup:
    """Subgroup of R* generated by p(r) p(r*)^-1 over r in U_n(R).

    ``n`` is 2 or 3; all vectors are used unless ``samples`` is given.
    """
    ug = ug or UnitGroup(alg)
    t, inv, one, size = alg.table, alg.inverse_table, alg.one, alg.size
    vals: set[int] = set()
    if n == 2:
        t1, t2 = (x.ravel() for x in np.meshgrid(np.arange(size), np.arange(size), indexing="ij"))
        chunks = [(t1, t2, None)]
    elif n == 3:
        if samples:
            rng = np.random.default_rng(seed)
            x = rng.integers(0, size, size=(3, samples))
            chunks = [(x[0], x[1], x[2])]
        else:
            g2, g3 = (y.ravel() for y in np.meshgrid(np.arange(size), np.arange(size), indexing="ij"))
            chunks = ((np.full_like(g2, a), g2, g3) for a in range(size))
    else:
        raise ValueError("w_group is implemented for n = 2 and n = 3")
    for t1, t2, t3 in chunks:
        if t3 is None:
            p, ps = one ^ t[t1, t2], one ^ t[t2, t1]
        else:
            # p(t1,t2,t3) = t1 + t3 + t1 t2 t3
            p = t1 ^ t3 ^ t[t[t1, t2], t3]
            ps = t3 ^ t1 ^ t[t[t3, t2], t1]
        ok = alg.unit_mask[p]
        vals.update(np.unique(t[p[ok], inv[ps[ok]]]).tolist())
    gens = sorted(ug.idx(x) for x in vals)
    return Subgroup(ug, ug.closure(gens), tuple(gens))


def right_ideal_sum_is_whole(alg: GroupAlgebra, a: int, b: int) -> bool:
    """aR + bR = R, decided by the F_2-rank of {a g, b g : g in G}."""
    return _rank([int(alg.table[a, 1 << g]) for g in range(alg.n)] +
                 [int(alg.table[b, 1 << g]) for g in range(alg.n)]) == alg.n


def _rank(vectors: list[int]) -> int:
    basis: list[int] = []
    for v in vectors:
        for x in basis:
            v = min(v, v ^ x)
        if v:
            basis.append(v)
    return len(basis)


def stable_range_one_check(alg: GroupAlgebra) -> tuple[bool, dict]:
    """For every (a, b) with aR + bR = R, search y with a + by a unit.

    Returns (holds, evidence) with the number of comaximal pairs and a
    counterexample when one exists.
    """
    size = alg.size
    ranks = {}
    comax = np.zeros((size, size), dtype=bool)
    gens = [1 << g for g in range(alg.n)]
    spans = [[int(alg.table[x, g]) for g in gens] for x in range(size)]
    for x in range(size):
        for y in range(size):
            comax[x, y] = _rank(spans[x] + spans[y]) == alg.n
    a, b = np.nonzero(comax)
    found = np.zeros(len(a), dtype=bool)
    for y in range(size):
        found |= alg.unit_mask[a ^ alg.table[b, y]]
    ranks["comaximal_pairs"] = int(len(a))
    if not found.all():
        i = int(np.flatnonzero(~found)[0])
        ranks["counterexample"] = (int(a[i]), int(b[i]))
        return False, ranks
    return True, ranks
