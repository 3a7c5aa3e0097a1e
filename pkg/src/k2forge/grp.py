"""Small finite groups as explicit multiplication tables.

Every group is built from a normal form, never from a presentation.  The
dihedral group of order 8 uses the basis order

    [1, s, s2, s3, t, st, s2t, s3t]

(``s`` = rotation sigma, ``t`` = reflection tau) everywhere in the package;
bit ``i`` of an algebra element always refers to position ``i`` of this list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

__all__ = [
    "FiniteGroup",
    "GroupHom",
    "build_dihedral_4",
    "build_cyclic",
    "build_klein",
    "direct_product",
    "quotient_hom_d4_to_klein",
    "GroupAxiomError",
]


class GroupAxiomError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    name: str
    labels: tuple[str, ...]
    mult: np.ndarray
    inv: np.ndarray = field(init=False)
    identity: int = field(init=False)

    def __post_init__(self):
        mult = np.asarray(self.mult, dtype=np.int64)
        n = len(self.labels)
        if mult.shape != (n, n):
            raise GroupAxiomError(f"table shape {mult.shape} does not match {n} labels")
        mult.setflags(write=False)
        object.__setattr__(self, "mult", mult)
        ids = [e for e in range(n) if all(mult[e, x] == x and mult[x, e] == x for x in range(n))]
        if len(ids) != 1:
            raise GroupAxiomError("no unique two-sided identity")
        e = ids[0]
        inv = np.empty(n, dtype=np.int64)
        for x in range(n):
            hits = np.flatnonzero(mult[x] == e)
            if len(hits) != 1 or mult[hits[0], x] != e:
                raise GroupAxiomError(f"element {self.labels[x]} has no two-sided inverse")
            inv[x] = hits[0]
        inv.setflags(write=False)
        object.__setattr__(self, "inv", inv)
        object.__setattr__(self, "identity", e)

    @property
    def order(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def mul(self, x: int, y: int) -> int:
        return int(self.mult[x, y])

    def power(self, x: int, n: int) -> int:
        r = self.identity
        for _ in range(n % self.element_order(x)):
            r = self.mul(r, x)
        return r

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul(y, x)
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.T))

    def check_axioms(self) -> None:
        """Exhaustive associativity and Latin-square check; raises on failure."""
        n = self.order
        m = self.mult
        perm = np.arange(n)
        for x in range(n):
            if not (np.array_equal(np.sort(m[x]), perm) and np.array_equal(np.sort(m[:, x]), perm)):
                raise GroupAxiomError(f"row/column {x} is not a permutation")
        # (xy)z == x(yz) for all triples, vectorised over z
        for x, y in product(range(n), repeat=2):
            if not np.array_equal(m[m[x, y]], m[x][m[y]]):
                raise GroupAxiomError(f"associativity fails at ({self.labels[x]}, {self.labels[y]})")

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


@dataclass(frozen=True, eq=False)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    image: tuple[int, ...]

    def __post_init__(self):
        if len(self.image) != self.source.order:
            raise GroupAxiomError("image table has wrong length")
        s, t = self.source, self.target
        if self.image[s.identity] != t.identity:
            raise GroupAxiomError("identity not preserved")
        for x, y in product(range(s.order), repeat=2):
            if self.image[s.mul(x, y)] != t.mul(self.image[x], self.image[y]):
                raise GroupAxiomError(f"not multiplicative at ({s.labels[x]}, {s.labels[y]})")

    def __call__(self, x: int) -> int:
        return self.image[x]

    def kernel(self) -> list[int]:
        return [x for x in range(self.source.order) if self.image[x] == self.target.identity]

    def image_set(self) -> set[int]:
        return set(self.image)


def _rot_label(a: int, b: int, rot: str, ref: str) -> str:
    parts = []
    if a == 1:
        parts.append(rot)
    elif a > 1:
        parts.append(f"{rot}{a}")
    if b:
        parts.append(ref)
    return "".join(parts) or "1"


def build_dihedral_4() -> FiniteGroup:
    # s^a t^b * s^c t^d = s^(a + (-1)^b c) t^(b + d)
    normal = [(a, b) for b in range(2) for a in range(4)]
    labels = tuple(_rot_label(a, b, "s", "t") for a, b in normal)
    pos = {ab: i for i, ab in enumerate(normal)}
    mult = np.empty((8, 8), dtype=np.int64)
    for i, (a, b) in enumerate(normal):
        for j, (c, d) in enumerate(normal):
            mult[i, j] = pos[((a + (-1) ** b * c) % 4, (b + d) % 2)]
    return FiniteGroup("D4", labels, mult)


def build_cyclic(n: int) -> FiniteGroup:
    if n not in (2, 4):
        raise ValueError(f"only cyclic groups of order 2 or 4 are supported, got {n}")
    labels = tuple(_rot_label(a, 0, "s", "") for a in range(n))
    mult = np.add.outer(np.arange(n), np.arange(n)) % n
    return FiniteGroup(f"Z{n}", labels, mult)


def build_klein() -> FiniteGroup:
    """Z2 + Z2 with generators labelled ``s1`` and ``t``; order [1, s1, t, s1t]."""
    labels = ("1", "s1", "t", "s1t")
    mult = np.bitwise_xor.outer(np.arange(4), np.arange(4))
    return FiniteGroup("V4", labels, mult)


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    pairs = list(product(range(a.order), range(b.order)))
    pos = {p: i for i, p in enumerate(pairs)}
    mult = np.empty((len(pairs), len(pairs)), dtype=np.int64)
    for i, (x1, y1) in enumerate(pairs):
        for j, (x2, y2) in enumerate(pairs):
            mult[i, j] = pos[(a.mul(x1, x2), b.mul(y1, y2))]
    labels = tuple(f"({a.labels[x]},{b.labels[y]})" for x, y in pairs)
    return FiniteGroup(f"{a.name}x{b.name}", labels, mult)


def quotient_hom_d4_to_klein(d4: FiniteGroup | None = None, klein: FiniteGroup | None = None) -> GroupHom:
    """The surjection sigma -> s1, tau -> t with kernel {1, s2}."""
    d4 = d4 or build_dihedral_4()
    klein = klein or build_klein()
    s1, t = klein.index("s1"), klein.index("t")
    image = []
    for a, b in [(a, b) for b in range(2) for a in range(4)]:
        x = klein.identity
        if a % 2:
            x = klein.mul(x, s1)
        if b:
            x = klein.mul(x, t)
        image.append(x)
    return GroupHom(d4, klein, tuple(image))
