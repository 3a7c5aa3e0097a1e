"""Steinberg symbols as Dennis-Stein symbols, maps induced by ring
homomorphisms, and coinvariants under automorphisms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..abst import AbelianGroup, quotient_by
from ..abst.groups import structure_of_subgroup
from ..galg import AlgebraHom, GroupAlgebra, NotAUnit
from ..grp import FiniteGroup, GroupHom
from .relations import stream_relations
from .structure import D1Result
from .symbols import FormalSum

__all__ = [
    "steinberg_symbol",
    "InducedMap",
    "induced_map",
    "automorphism_from_images",
    "coinvariants",
    "Coinvariants",
    "v1_vacuous",
]


def steinberg_symbol(alg: GroupAlgebra, u: int, v: int) -> FormalSum:
    """{u, v} encoded as <u, u^-1 (v - 1)>; 1 + u u^-1 (v-1) = v is a unit."""
    if not (alg.is_unit(u) and alg.is_unit(v)):
        raise NotAUnit("Steinberg symbols need two units")
    return FormalSum.symbol(alg, u, alg.mul(alg.inverse(u), v ^ alg.one))


def v1_vacuous(alg: GroupAlgebra) -> bool:
    """True when no unit u has 1 - u a unit, so {u, 1-u} never occurs."""
    units = alg.units
    return not alg.unit_mask[units ^ alg.one].any()


@dataclass
class InducedMap:
    source: D1Result
    target: D1Result
    hom: AlgebraHom
    basis_images: list[tuple[int, ...]]
    rows_checked: int

    def __call__(self, vec: Sequence[int]) -> tuple[int, ...]:
        out = np.zeros(len(self.target.mods), dtype=np.int64)
        for x, img in zip(vec, self.basis_images):
            out += int(x) * np.array(img, dtype=np.int64)
        return tuple(int(v) for v in out % np.array(self.target.mods, dtype=np.int64)) if self.target.mods else ()

    def apply_sum(self, s: FormalSum) -> FormalSum:
        return FormalSum(self.target.algebra, {(self.hom(a), self.hom(b)): c for (a, b), c in s.terms.items()})


def induced_map(source: D1Result, target: D1Result, hom: AlgebraHom, check_rows: bool = True) -> InducedMap:
    """The map <a, b> -> <hom(a), hom(b)> on D_1 coordinates.

    Every relation row of the source is pushed to the target and must vanish
    there; the images of the cyclic generators of the source are then read
    off from the graph of the map.
    """
    if not hom.is_multiplicative():
        raise ValueError("ring map is not multiplicative")
    img = hom.image
    src_pairs = source.symbols.pairs
    tgt_ids = target.symbols.ids[img[src_pairs[:, 0]], img[src_pairs[:, 1]]]
    if (tgt_ids < 0).any():
        raise ValueError("a symbol maps outside the target symbol set")
    image_coords = target.coords[tgt_ids]
    mods = np.array(target.mods, dtype=np.int64)
    rows = 0
    if check_rows and target.mods:
        for cols, coefs in stream_relations(source.algebra, symbols=source.symbols)():
            v = np.einsum("rk,rkm->rm", coefs, image_coords[cols]) % mods
            if v.any():
                raise ValueError("induced map does not respect a relation row")
            rows += len(cols)
    graph: dict[tuple, tuple] = {}
    gens = {(tuple(source.coords[j].tolist()), tuple(image_coords[j].tolist())) for j in range(len(src_pairs))}
    smods = source.mods
    zero = (tuple([0] * len(smods)), tuple([0] * len(target.mods)))
    graph[zero[0]] = zero[1]
    frontier = [zero]
    while frontier:
        x, y = frontier.pop()
        for gx, gy in gens:
            nx = tuple((a + b) % m for a, b, m in zip(x, gx, smods))
            ny = tuple((a + b) % m for a, b, m in zip(y, gy, target.mods))
            if nx in graph:
                if graph[nx] != ny:
                    raise ValueError("induced map is not well defined on D_1")
                continue
            graph[nx] = ny
            frontier.append((nx, ny))
    basis = [graph[tuple(1 if j == i else 0 for j in range(len(smods)))] for i in range(len(smods))]
    return InducedMap(source, target, hom, basis, rows)


def automorphism_from_images(alg: GroupAlgebra, images: dict[str, str]) -> AlgebraHom:
    """Algebra automorphism induced by a group automorphism given on generators,
    e.g. ``{"s1": "t", "t": "s1t"}``; images of the other labels follow by
    multiplicativity."""
    g: FiniteGroup = alg.group
    lab = {l: i for i, l in enumerate(g.labels)}
    table = {g.identity: g.identity}
    for k, v in images.items():
        table[lab[k]] = lab[v]
    changed = True
    while changed:
        changed = False
        for x, fx in list(table.items()):
            for y, fy in list(table.items()):
                z = g.mul(x, y)
                if z not in table:
                    table[z] = g.mul(fx, fy)
                    changed = True
    if len(table) != g.order:
        raise ValueError("images do not determine the whole group")
    hom = GroupHom(g, g, tuple(table[i] for i in range(g.order)))
    if len(set(hom.image)) != g.order:
        raise ValueError("map is not bijective")
    return AlgebraHom.from_group_hom(alg, alg, hom)


@dataclass
class Coinvariants:
    group: AbelianGroup
    differences: list[tuple[int, ...]]
    generated: frozenset

    @property
    def difference_subgroup_order(self) -> int:
        return len(self.generated)


def coinvariants(d1: D1Result, maps: Sequence[InducedMap]) -> Coinvariants:
    """D_1 modulo the subgroup generated by f(x) - x over the cyclic generators
    and the given induced automorphisms."""
    mods = d1.mods
    diffs = []
    for f in maps:
        for i in range(len(mods)):
            e = tuple(1 if j == i else 0 for j in range(len(mods)))
            diffs.append(tuple((a - b) % m for a, b, m in zip(f(e), e, mods)))
    span = {tuple([0] * len(mods))}
    frontier = list(span)
    while frontier:
        x = frontier.pop()
        for g in diffs:
            y = tuple((a + b) % m for a, b, m in zip(x, g, mods))
            if y not in span:
                span.add(y)
                frontier.append(y)
    q = quotient_by(AbelianGroup(tuple(mods)), diffs)
    return Coinvariants(q, diffs, frozenset(span))
