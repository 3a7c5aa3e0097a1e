"""The unit group R* as a concrete finite group and the facts about it that
the K_2 computation leans on: the commutator subgroup, the central coset
(s-1)^2 R + 1, the witness values (1+ab)(1+ba)^3, and centrality of
theta = (1+ab)(1+ba)^-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .abst import AbelianGroup
from .galg import GroupAlgebra

__all__ = [
    "UnitGroup",
    "Subgroup",
    "COMMUTATOR_ELEMENTS",
    "COMMUTATOR_WITNESSES",
    "abelian_structure",
    "central_subset_check",
    "verify_commutator_witnesses",
    "commutator_equation_system",
    "theta_centrality_check",
    "theta_table",
    "WitnessMismatch",
    "WitnessResult",
    "witness_report",
    "witness_value",
]

# the eight elements of [R*, R*] for R = F_2[D4]
COMMUTATOR_ELEMENTS = (
    "1", "s2", "s2+t+st+s2t+s3t", "1+t+st+s2t+s3t", "s+s2+s3+st+s3t",
    "1+s+s3+st+s3t", "1+s+s3+t+s2t", "s+s2+s3+t+s2t",
)

# (a, b, expected (1+ab)(1+ba)^3)
COMMUTATOR_WITNESSES = (
    ("s+1", "s", "s+s2+s3+st+s3t"),
    ("s+t", "s", "s2"),
    ("s2+t", "st", "s+s2+s3+t+s2t"),
    ("s2+st", "st", "s2+t+st+s2t+s3t"),
    ("s+t", "st", "1+s+s3+t+s2t"),
    ("s+st", "s2t", "1+s+s3+st+s3t"),
)


class WitnessMismatch(AssertionError):
    pass


class UnitGroup:
    """R* with units indexed 0..|R*|-1 in increasing encoding order."""

    def __init__(self, alg: GroupAlgebra):
        self.algebra = alg
        self.elements = alg.units.copy()
        self.index = np.full(alg.size, -1, dtype=np.int64)
        self.index[self.elements] = np.arange(len(self.elements))
        self.mult = self.index[alg.table[np.ix_(self.elements, self.elements)]]
        self.inv = self.index[alg.inverse_table[self.elements]]
        self.identity = int(self.index[alg.one])

    @property
    def order(self) -> int:
        return len(self.elements)

    def encode(self, i: int) -> int:
        return int(self.elements[i])

    def idx(self, x: int) -> int:
        i = int(self.index[x])
        if i < 0:
            raise ValueError(f"{self.algebra.format(x)} is not a unit")
        return i

    def commutator(self, i: int, j: int) -> int:
        m, inv = self.mult, self.inv
        return int(m[m[m[i, j], inv[i]], inv[j]])

    @cached_property
    def all_commutators(self) -> np.ndarray:
        m, inv = self.mult, self.inv
        ab = m
        return m[m[ab, inv[:, None]], inv[None, :]]

    def closure(self, gens) -> frozenset[int]:
        members = {self.identity}
        frontier = [self.identity]
        gens = list(dict.fromkeys(int(g) for g in gens))
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = int(self.mult[x, g])
                if y not in members:
                    members.add(y)
                    frontier.append(y)
        return frozenset(members)

    def check_axioms(self) -> bool:
        n = self.order
        m = self.mult
        ident = self.identity
        if not ((m[ident] == np.arange(n)).all() and (m[:, ident] == np.arange(n)).all()):
            return False
        if not ((m[np.arange(n), self.inv] == ident).all() and (m[self.inv, np.arange(n)] == ident).all()):
            return False
        return all(np.array_equal(m[m[x]], m[x][m]) for x in range(n))

    @cached_property
    def center(self) -> "Subgroup":
        m = self.mult
        members = frozenset(np.flatnonzero((m == m.T).all(axis=1)).tolist())
        return Subgroup(self, members, tuple(sorted(members)))

    def element_order(self, i: int) -> int:
        k, y = 1, i
        while y != self.identity:
            y = int(self.mult[y, i])
            k += 1
        return k

    def order_multiset(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for i in range(self.order):
            k = self.element_order(i)
            out[k] = out.get(k, 0) + 1
        return out

    def generating_set(self) -> list[int]:
        """A small generating set picked greedily in index order."""
        gens: list[int] = []
        span = frozenset({self.identity})
        for i in range(self.order):
            if i not in span:
                gens.append(i)
                span = self.closure(gens)
                if len(span) == self.order:
                    break
        return gens

    def commutator_subgroup(self) -> "Subgroup":
        """Closure of all |R*|^2 commutators, cross-checked against the normal
        closure of commutators of a generating set."""
        comms = np.unique(self.all_commutators)
        members = self.closure(comms)
        gens = self.generating_set()
        seed = {self.commutator(a, b) for a in gens for b in gens}
        # normal closure of the generator commutators
        normal = self.closure(seed)
        while True:
            conj = {int(self.mult[self.mult[g, x], self.inv[g]]) for g in range(self.order) for x in normal}
            bigger = self.closure(normal | conj)
            if bigger == normal:
                break
            normal = bigger
        if normal != members:
            raise AssertionError("commutator subgroup paths disagree")
        return Subgroup(self, members, tuple(int(c) for c in comms))


@dataclass(frozen=True)
class Subgroup:
    parent: UnitGroup
    members: frozenset[int]
    generators: tuple[int, ...]

    def __len__(self):
        return len(self.members)

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def encodings(self) -> list[int]:
        return sorted(self.parent.encode(i) for i in self.members)

    def labels(self) -> list[str]:
        return [self.parent.algebra.format(x) for x in self.encodings()]

    def contains_element(self, x: int) -> bool:
        i = int(self.parent.index[x])
        return i >= 0 and i in self.members

    def is_subgroup(self) -> bool:
        m, inv = self.parent.mult, self.parent.inv
        mem = np.fromiter(self.members, dtype=np.int64)
        return (self.parent.identity in self.members and set(m[np.ix_(mem, mem)].ravel().tolist()) <= self.members
                and set(inv[mem].tolist()) <= self.members)

    def is_abelian(self) -> bool:
        m = self.parent.mult
        mem = np.fromiter(self.members, dtype=np.int64)
        sub = m[np.ix_(mem, mem)]
        return bool((sub == sub.T).all())

    def is_normal(self) -> bool:
        m, inv = self.parent.mult, self.parent.inv
        mem = np.fromiter(self.members, dtype=np.int64)
        g = np.arange(self.parent.order)
        conj = m[m[g[:, None], mem[None, :]], inv[g][:, None]]
        return set(conj.ravel().tolist()) <= self.members

    def is_central(self) -> bool:
        m = self.parent.mult
        mem = np.fromiter(self.members, dtype=np.int64)
        return bool((m[mem, :] == m[:, mem].T).all())

    def structure(self) -> AbelianGroup:
        return abelian_structure(self.parent, self.members)


def abelian_structure(group: UnitGroup, members) -> AbelianGroup:
    """Invariant factors of an abelian subgroup from counts of p^j-torsion."""
    members = list(members)
    n = len(members)
    if n == 1:
        return AbelianGroup(())
    orders = [group.element_order(i) for i in members]
    factors: list[int] = []
    for p in _primes_of(n):
        k = 0
        while n % p ** (k + 1) == 0:
            k += 1
        logs = []
        for j in range(k + 1):
            cnt = sum(1 for o in orders if (p ** j) % _p_part(o, p) == 0)
            logs.append(round(np.log(cnt) / np.log(p)))
        ge = [logs[j] - logs[j - 1] for j in range(1, k + 1)] + [0]
        for j in range(1, k + 1):
            factors += [p ** j] * (ge[j - 1] - ge[j])
    return AbelianGroup.from_factors(factors)


def _p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def _primes_of(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def central_subset_check(alg: GroupAlgebra, ug: UnitGroup | None = None) -> tuple[Subgroup, bool]:
    """The set (s-1)^2 R + 1 and whether it is central in R*."""
    ug = ug or UnitGroup(alg)
    g = alg.parse("(s+1)^2")
    elems = {alg.one ^ int(alg.table[g, r]) for r in range(alg.size)}
    members = frozenset(ug.idx(x) for x in elems)
    sub = Subgroup(ug, members, tuple(sorted(members)))
    return sub, sub.is_central()


def witness_value(alg: GroupAlgebra, a: int, b: int) -> int:
    one = alg.one
    u = one ^ alg.mul(a, b)
    v = one ^ alg.mul(b, a)
    return alg.prod(u, v, v, v)


@dataclass(frozen=True)
class WitnessResult:
    a: str
    b: str
    expected: str
    value: str
    in_commutator: bool

    @property
    def matches(self) -> bool:
        return self.value == self.expected


def witness_report(alg: GroupAlgebra, comm: Subgroup | None = None) -> list[WitnessResult]:
    """(1+ab)(1+ba)^3 for each listed pair next to its listed value."""
    comm = comm or UnitGroup(alg).commutator_subgroup()
    out = []
    for a_s, b_s, want in COMMUTATOR_WITNESSES:
        got = witness_value(alg, alg.parse(a_s), alg.parse(b_s))
        out.append(WitnessResult(a_s, b_s, alg.format(alg.parse(want)), alg.format(got), comm.contains_element(got)))
    return out


def verify_commutator_witnesses(alg: GroupAlgebra, comm: Subgroup | None = None) -> list[tuple[str, str, str]]:
    """Evaluate (1+ab)(1+ba)^3 for the six listed pairs.

    Raises :class:`WitnessMismatch` naming every pair whose value differs
    from the listed one or falls outside [R*, R*].
    """
    report = witness_report(alg, comm)
    bad = [r for r in report if not (r.matches and r.in_commutator)]
    if bad:
        raise WitnessMismatch("; ".join(f"pair ({r.a}, {r.b}) gives {r.value}, expected {r.expected}" for r in bad))
    return [(r.a, r.b, r.value) for r in report]


def commutator_equation_system(alg: GroupAlgebra, comm: Subgroup | None = None) -> bool:
    """True iff no a, b in 1 + span(s-1, t-1, st-1) satisfy ab + ba = (s2t + t) ba.

    Also checks that 1 + t + s2t lies in (s-1)^2 R + 1 but outside [R*, R*].
    """
    s, t, st, one = alg.parse("s"), alg.parse("t"), alg.parse("st"), alg.one
    dirs = [s ^ one, t ^ one, st ^ one]
    rhs_factor = alg.parse("s2t+t")

    def make(bits):
        x = one
        for on, d in zip(bits, dirs):
            if on:
                x ^= d
        return x

    solvable = False
    for abits in product((0, 1), repeat=3):
        for bbits in product((0, 1), repeat=3):
            a, b = make(abits), make(bbits)
            ba = alg.mul(b, a)
            if alg.mul(a, b) ^ ba == alg.mul(rhs_factor, ba):
                solvable = True
    target = alg.parse("1+t+s2t")
    ug = comm.parent if comm is not None else UnitGroup(alg)
    comm = comm or ug.commutator_subgroup()
    coset, _ = central_subset_check(alg, ug)
    if not coset.contains_element(target) or comm.contains_element(target):
        return False
    return not solvable


def theta_table(alg: GroupAlgebra) -> np.ndarray:
    """theta(a, b) = (1+ab)(1+ba)^-1 for every pair with 1+ab a unit, else -1."""
    t, inv, one = alg.table, alg.inverse_table, alg.one
    u = one ^ t
    v = one ^ t.T
    valid = alg.unit_mask[u]
    theta = np.full(t.shape, -1, dtype=np.int64)
    theta[valid] = t[u[valid], inv[v[valid]]]
    return theta


def theta_centrality_check(alg: GroupAlgebra, comm: Subgroup | None = None):
    """(ok, counterexample): every theta commutes with every unit, and lies in
    [R*, R*] when ``comm`` is given."""
    theta = theta_table(alg)
    units = alg.units
    t = alg.table
    for val in np.unique(theta[theta >= 0]):
        if not (t[val, units] == t[units, val]).all():
            a, b = np.argwhere(theta == val)[0]
            return False, (int(a), int(b), int(val))
        if comm is not None and not comm.contains_element(int(val)):
            a, b = np.argwhere(theta == val)[0]
            return False, (int(a), int(b), int(val))
    return True, None
