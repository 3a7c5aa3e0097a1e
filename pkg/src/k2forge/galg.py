"""The group algebra F_2[G] with elements packed into machine integers.

An element is an ``int`` whose bit ``i`` is the coefficient of group element
``i``.  Addition is XOR.  Multiplication goes through a full product table
(``2^|G| x 2^|G|``), which is tiny for |G| <= 8 and makes exhaustive scans
over all pairs a numpy one-liner.

:class:`Elem` wraps an encoding together with its algebra for readable
formulas; the hot paths work on raw integers and numpy arrays.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .grp import FiniteGroup, GroupHom, build_cyclic, build_dihedral_4, build_klein, quotient_hom_d4_to_klein

__all__ = [
    "GroupAlgebra",
    "Elem",
    "Ideal",
    "NotAUnit",
    "AlgebraMismatch",
    "algebra",
    "quotient_algebra_hom",
    "AlgebraHom",
]

CACHE_SCHEMA_VERSION = 1


class NotAUnit(ArithmeticError):
    pass


class AlgebraMismatch(TypeError):
    pass


class GroupAlgebra:
    """F_2[G] for a finite group of order at most 8."""

    def __init__(self, group: FiniteGroup, table: np.ndarray | None = None):
        if group.order > 8:
            raise ValueError("product tables are only built for groups of order <= 8")
        self.group = group
        self.n = group.order
        self.size = 1 << self.n
        self.one = 1 << group.identity
        self.table = self._build_table() if table is None else np.asarray(table, dtype=np.int64)
        self.table.setflags(write=False)

    @property
    def name(self) -> str:
        return self.group.name

    def _build_table(self) -> np.ndarray:
        size, n, gm = self.size, self.n, self.group.mult
        # left[i][y] = g_i * y
        left = np.zeros((n, size), dtype=np.int64)
        ys = np.arange(size)
        for i in range(n):
            for j in range(n):
                left[i] ^= ((ys >> j) & 1) << gm[i, j]
        table = np.zeros((size, size), dtype=np.int64)
        for x in range(1, size):
            low = (x & -x).bit_length() - 1
            table[x] = table[x & (x - 1)] ^ left[low]
        return table

    # --- arithmetic on encodings -------------------------------------------------

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def prod(self, *xs: int) -> int:
        r = self.one
        for x in xs:
            r = int(self.table[r, x])
        return r

    def power(self, x: int, k: int) -> int:
        r = self.one
        for _ in range(k):
            r = int(self.table[r, x])
        return r

    def basis(self, label: str) -> int:
        return 1 << self.group.index(label)

    @staticmethod
    def augmentation(x: int) -> int:
        return bin(x).count("1") & 1

    @cached_property
    def inverse_table(self) -> np.ndarray:
        """``inv[x]`` is the two-sided inverse of ``x`` or -1; found by exhaustive search."""
        t = self.table
        inv = np.full(self.size, -1, dtype=np.int64)
        right = t == self.one
        for x in range(self.size):
            cand = np.flatnonzero(right[x])
            for y in cand:
                if t[y, x] == self.one:
                    inv[x] = y
                    break
        inv.setflags(write=False)
        return inv

    @cached_property
    def unit_mask(self) -> np.ndarray:
        m = self.inverse_table >= 0
        m.setflags(write=False)
        return m

    @cached_property
    def units(self) -> np.ndarray:
        return np.flatnonzero(self.unit_mask)

    @cached_property
    def nonunits(self) -> np.ndarray:
        return np.flatnonzero(~self.unit_mask)

    def is_unit(self, x: int) -> bool:
        return bool(self.unit_mask[x])

    def inverse(self, x: int) -> int:
        y = int(self.inverse_table[x])
        if y < 0:
            raise NotAUnit(f"{self.format(x)} is not a unit")
        return y

    def unit_order(self, x: int) -> int:
        if not self.is_unit(x):
            raise NotAUnit(f"{self.format(x)} is not a unit")
        k, y = 1, x
        while y != self.one:
            y = int(self.table[y, x])
            k += 1
        return k

    def is_local(self) -> bool:
        """Non-units closed under + and under two-sided multiplication."""
        m = self.nonunits
        if m.size == 0:
            return False
        if self.unit_mask[np.bitwise_xor.outer(m, m)].any():
            return False
        t = self.table
        return not (self.unit_mask[t[m, :]].any() or self.unit_mask[t[:, m]].any())

    @cached_property
    def center(self) -> np.ndarray:
        return np.flatnonzero((self.table == self.table.T).all(axis=1))

    def is_central(self, x: int) -> bool:
        return bool(np.array_equal(self.table[x], self.table[:, x]))

    def ideal_of(self, g: int) -> "Ideal":
        """Additive span of all a*g*b."""
        gens = np.unique(self.table[self.table[:, g]].ravel())
        return Ideal(self, g, _f2_span(int(v) for v in gens))

    # --- parsing / printing ------------------------------------------------------

    def format(self, x: int) -> str:
        terms = [self.group.labels[i] for i in range(self.n) if x >> i & 1]
        return "+".join(terms) if terms else "0"

    def parse(self, text: str) -> int:
        return _Parser(self, text).parse()

    def elem(self, x: int | str) -> "Elem":
        return Elem(self, self.parse(x) if isinstance(x, str) else int(x))

    # --- cache -------------------------------------------------------------------

    def save_table(self, path: str | Path) -> None:
        header = {"schema_version": CACHE_SCHEMA_VERSION, "group_label": self.name, "order": self.n}
        payload = {"header": header, "labels": list(self.group.labels), "table": self.table.ravel().tolist()}
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load_table(cls, group: FiniteGroup, path: str | Path) -> "GroupAlgebra":
        payload = json.loads(Path(path).read_text())
        header = payload.get("header", {})
        if (header.get("schema_version") != CACHE_SCHEMA_VERSION or header.get("group_label") != group.name
                or header.get("order") != group.order or payload.get("labels") != list(group.labels)):
            raise ValueError(f"cache file {path} does not match group {group.name}")
        size = 1 << group.order
        table = np.asarray(payload["table"], dtype=np.int64)
        if table.size != size * size:
            raise ValueError(f"cache file {path} is truncated")
        alg = cls(group, table.reshape(size, size))
        # spot-check against the group table so a corrupt cache cannot slip through
        for i in range(group.order):
            for j in range(group.order):
                if alg.table[1 << i, 1 << j] != 1 << group.mult[i, j]:
                    raise ValueError(f"cache file {path} disagrees with the group table")
        return alg

    def __repr__(self):
        return f"F2[{self.name}]"


def _f2_span(vectors) -> frozenset[int]:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    span = {0}
    for b in basis:
        span |= {s ^ b for s in span}
    return frozenset(span)


@dataclass(frozen=True)
class Ideal:
    algebra: GroupAlgebra
    generator: int
    elements: frozenset[int]

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self.elements

    def is_two_sided(self) -> bool:
        t = self.algebra.table
        el = np.fromiter(self.elements, dtype=np.int64)
        closed = set(np.bitwise_xor.outer(el, el).ravel().tolist()) <= self.elements
        absorbs = set(t[el, :].ravel().tolist()) | set(t[:, el].ravel().tolist())
        return closed and absorbs <= self.elements


@dataclass(frozen=True)
class Elem:
    """An algebra element bound to its algebra; supports ``+ - * **`` and ``~`` (inverse)."""

    algebra: GroupAlgebra
    bits: int

    def _coerce(self, other) -> int:
        if isinstance(other, Elem):
            if other.algebra is not self.algebra:
                raise AlgebraMismatch(f"cannot combine elements of {self.algebra} and {other.algebra}")
            return other.bits
        if isinstance(other, int):
            return self.algebra.one if other & 1 else 0
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Elem(self.algebra, self.bits ^ o)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Elem(self.algebra, self.algebra.mul(self.bits, o))

    def __rmul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Elem(self.algebra, self.algebra.mul(o, self.bits))

    def __pow__(self, k: int):
        if k < 0:
            return Elem(self.algebra, self.algebra.power(self.algebra.inverse(self.bits), -k))
        return Elem(self.algebra, self.algebra.power(self.bits, k))

    def __invert__(self):
        return Elem(self.algebra, self.algebra.inverse(self.bits))

    def __int__(self):
        return self.bits

    def __index__(self):
        return self.bits

    def __eq__(self, other):
        if isinstance(other, Elem):
            return self.algebra is other.algebra and self.bits == other.bits
        if isinstance(other, int):
            return self.bits == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.algebra), self.bits))

    def __repr__(self):
        return self.algebra.format(self.bits)


class _Parser:
    """Recursive-descent parser for ring expressions.

    Grammar: sum := prod (('+'|'-') prod)*; prod := power (['*'] power)*;
    power := atom ('^' int)*; atom := label | 0 | 1 | '(' sum ')'.
    A negative exponent means the inverse.
    """

    TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*^()]))")

    def __init__(self, alg: GroupAlgebra, text: str):
        self.alg = alg
        self.text = text
        self.toks: list[tuple[str, str]] = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = self.TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse {text!r} at position {pos}")
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind)))
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> int:
        v = self.sum()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input in {self.text!r}")
        return v

    def sum(self) -> int:
        v = self.prod()
        while self.peek() in (("op", "+"), ("op", "-")):
            self.take()
            v ^= self.prod()
        return v

    def prod(self) -> int:
        v = self.power()
        while True:
            kind, val = self.peek()
            if (kind, val) == ("op", "*"):
                self.take()
            elif not (kind in ("num", "name") or (kind, val) == ("op", "(")):
                return v
            v = self.alg.mul(v, self.power())

    def power(self) -> int:
        v = self.atom()
        while self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ValueError(f"exponent expected in {self.text!r}")
            k = int(val)
            v = self.alg.power(self.alg.inverse(v), -k) if k < 0 else self.alg.power(v, k)
        return v

    def atom(self) -> int:
        kind, val = self.take()
        if kind == "num":
            return self.alg.one if int(val) & 1 else 0
        if kind == "name":
            if val not in self.alg.group.labels:
                raise ValueError(f"unknown basis element {val!r} in {self.text!r}")
            return self.alg.basis(val)
        if (kind, val) == ("op", "("):
            v = self.sum()
            if self.take() != ("op", ")"):
                raise ValueError(f"unbalanced parentheses in {self.text!r}")
            return v
        raise ValueError(f"unexpected token {val!r} in {self.text!r}")


@dataclass(frozen=True)
class AlgebraHom:
    """A ring map between group algebras given elementwise as a lookup array."""

    source: GroupAlgebra
    target: GroupAlgebra
    image: np.ndarray

    def __call__(self, x: int) -> int:
        return int(self.image[x])

    def kernel(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.image == 0).tolist())

    def is_multiplicative(self) -> bool:
        lhs = self.image[self.source.table]
        rhs = self.target.table[self.image[:, None], self.image[None, :]]
        return bool(np.array_equal(lhs, rhs)) and int(self.image[self.source.one]) == self.target.one

    @classmethod
    def from_group_hom(cls, src: GroupAlgebra, dst: GroupAlgebra, hom: GroupHom) -> "AlgebraHom":
        image = np.zeros(src.size, dtype=np.int64)
        for i in range(src.n):
            bit = 1 << hom(i)
            sel = (np.arange(src.size) >> i) & 1
            image ^= sel * bit
        return cls(src, dst, image)


_ALGEBRAS: dict[str, GroupAlgebra] = {}

_BUILDERS = {
    "z2": lambda: build_cyclic(2),
    "z4": lambda: build_cyclic(4),
    "v4": build_klein,
    "d4": build_dihedral_4,
}


def algebra(name: str) -> GroupAlgebra:
    """Shared instance of F_2[G] for ``name`` in {z2, z4, v4, d4}."""
    name = name.lower()
    if name not in _BUILDERS:
        raise KeyError(f"unknown ring {name!r}; expected one of {sorted(_BUILDERS)}")
    if name not in _ALGEBRAS:
        _ALGEBRAS[name] = GroupAlgebra(_BUILDERS[name]())
    return _ALGEBRAS[name]


def quotient_algebra_hom() -> tuple[GroupAlgebra, AlgebraHom]:
    """F_2[D4] -> F_2[Z2+Z2] induced by sigma -> s1, tau -> t."""
    src, dst = algebra("d4"), algebra("v4")
    hom = quotient_hom_d4_to_klein(src.group, dst.group)
    return dst, AlgebraHom.from_group_hom(src, dst, hom)
