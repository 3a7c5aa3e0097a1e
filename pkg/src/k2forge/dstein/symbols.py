"""Dennis-Stein symbols <a, b> (1 + ab a unit) and formal integer sums of them."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from ..galg import GroupAlgebra

__all__ = ["SymbolIndex", "SymbolTable", "FormalSum", "enumerate_symbols", "InvalidSymbol"]


class InvalidSymbol(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SymbolIndex:
    a: int
    b: int
    id: int


class SymbolTable:
    """All pairs (a, b) with 1 + ab a unit, indexed lexicographically."""

    def __init__(self, alg: GroupAlgebra):
        self.algebra = alg
        self.valid = alg.unit_mask[alg.one ^ alg.table]
        self.ids = np.full(self.valid.shape, -1, dtype=np.int64)
        self.ids[self.valid] = np.arange(int(self.valid.sum()))
        a, b = np.nonzero(self.valid)
        self.pairs = np.stack([a, b], axis=1)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        for i, (a, b) in enumerate(self.pairs.tolist()):
            yield SymbolIndex(a, b, i)

    def id(self, a: int, b: int) -> int:
        i = int(self.ids[a, b])
        if i < 0:
            raise InvalidSymbol(f"<{self.algebra.format(a)}, {self.algebra.format(b)}>: 1+ab is not a unit")
        return i

    def is_valid(self, a: int, b: int) -> bool:
        return bool(self.valid[a, b])

    def pair(self, i: int) -> tuple[int, int]:
        a, b = self.pairs[i]
        return int(a), int(b)


def enumerate_symbols(alg: GroupAlgebra) -> list[SymbolIndex]:
    return list(SymbolTable(alg))


_SYMBOL = re.compile(r"<([^<>]*)>")


@dataclass(frozen=True)
class FormalSum:
    """An integer combination of symbols, keyed by (a, b) encodings.

    Zero coefficients are never stored; two sums are equal when their terms
    agree after the ring arguments have been evaluated.
    """

    algebra: GroupAlgebra
    terms: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: int(v) for k, v in self.terms.items() if v}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def symbol(cls, alg: GroupAlgebra, a: int, b: int, coef: int = 1) -> "FormalSum":
        return cls(alg, {(int(a), int(b)): coef})

    @classmethod
    def zero(cls, alg: GroupAlgebra) -> "FormalSum":
        return cls(alg, {})

    @classmethod
    def parse(cls, alg: GroupAlgebra, text: str) -> "FormalSum":
        """Parse e.g. ``<s+1, t> - 2<s2, st> + <0, 1>``; ``0`` is the empty sum."""
        text = text.strip()
        if text == "0":
            return cls.zero(alg)
        terms: dict[tuple[int, int], int] = {}
        pos = 0
        sign = 1
        first = True
        while pos < len(text):
            m = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*<").match(text, pos)
            if not m or (not first and not m.group(1)):
                raise ValueError(f"cannot parse formal sum {text!r} at {pos}")
            sign = -1 if m.group(1) == "-" else 1
            coef = int(m.group(2)) if m.group(2) else 1
            end = text.index(">", m.end())
            inner = text[m.end():end]
            parts = _split_top(inner)
            if len(parts) != 2:
                raise ValueError(f"symbol needs two arguments: <{inner}>")
            key = (alg.parse(parts[0]), alg.parse(parts[1]))
            terms[key] = terms.get(key, 0) + sign * coef
            pos = end + 1
            first = False
            while pos < len(text) and text[pos].isspace():
                pos += 1
        return cls(alg, terms)

    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return FormalSum(self.algebra, out)

    def __neg__(self) -> "FormalSum":
        return FormalSum(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def __mul__(self, k: int) -> "FormalSum":
        return FormalSum(self.algebra, {key: k * v for key, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, FormalSum) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def symbols(self) -> Iterable[tuple[int, int]]:
        return self.terms.keys()

    def invalid_symbols(self) -> list[tuple[int, int]]:
        um, t, one = self.algebra.unit_mask, self.algebra.table, self.algebra.one
        return [(a, b) for a, b in self.terms if not um[one ^ t[a, b]]]

    def format(self) -> str:
        if not self.terms:
            return "0"
        f = self.algebra.format
        parts = []
        for (a, b), c in sorted(self.terms.items()):
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else str(abs(c))
            parts.append(f"{sign} {mag}<{f(a)}, {f(b)}>")
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    __str__ = format

    def __repr__(self):
        return f"FormalSum({self.format()})"


def _split_top(text: str) -> list[str]:
    depth, start, out = 0, 0, []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append(text[start:i])
            start = i + 1
    out.append(text[start:])
    return [p.strip() for p in out]
