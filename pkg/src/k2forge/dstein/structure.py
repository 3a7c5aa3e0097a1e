"""D_1(R) from the symbol presentation, the map phi: D_1 -> [R*, R*] and
K_2(R) = ker phi.

The presented group is computed modulo 2^e and 2^(e+1) by structured
elimination followed by a dense Howell/Smith step; the two answers must
agree.  Elimination modulo odd primes certifies that the group is a finite
2-group.  Finally the computed coordinates are pushed through every row of
the stream, which proves that they define a homomorphism on the presented
group; together with the elimination (an upper bound) this pins the group
down exactly.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from ..abst import AbelianGroup, HowellBasis, StructuredReducer, kernel_of_map, smith_form, smith_invariants
from ..abst.groups import structure_of_subgroup
from ..galg import GroupAlgebra
from ..units import Subgroup, UnitGroup, theta_table
from .relations import RelationStream, stream_relations
from .symbols import FormalSum, InvalidSymbol, SymbolTable

__all__ = [
    "D1Result",
    "K2Result",
    "UnstableExponent",
    "FreeOrOddTorsion",
    "PhiIllDefined",
    "d1_structure",
    "dense_d1_structure",
    "phi",
    "phi_check",
    "k2_structure",
    "abelian_coordinates",
]

log = logging.getLogger(__name__)


class UnstableExponent(ArithmeticError):
    pass


class FreeOrOddTorsion(ArithmeticError):
    pass


class PhiIllDefined(ArithmeticError):
    pass


@dataclass
class D1Result:
    """The computed D_1 with a coordinate vector for every symbol.

    ``mods[i]`` is the order of the i-th cyclic coordinate (ascending);
    ``coords[j]`` are the coordinates of symbol ``j``.
    """

    algebra: GroupAlgebra
    symbols: SymbolTable
    mods: list[int]
    coords: np.ndarray
    certificates: dict = field(default_factory=dict)

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup(tuple(self.mods))

    def evaluate(self, s: FormalSum) -> tuple[int, ...]:
        """Coordinates of a formal sum in D_1."""
        if s.algebra is not self.algebra:
            raise ValueError("formal sum over a different ring")
        v = np.zeros(len(self.mods), dtype=np.int64)
        for (a, b), c in s.terms.items():
            v += c * self.coords[self.symbols.id(a, b)]
        return tuple(int(x) for x in v % np.array(self.mods, dtype=np.int64)) if self.mods else ()

    def is_zero(self, s: FormalSum) -> bool:
        return not any(self.evaluate(s))

    def order_of(self, vec: Sequence[int]) -> int:
        from math import gcd

        order = 1
        for x, m in zip(vec, self.mods):
            k = m // gcd(int(x), m)
            order = order * k // gcd(order, k)
        return order

    def is_multiple(self, vec: Sequence[int], k: int) -> bool:
        """Whether ``vec`` lies in k * D_1."""
        from math import gcd

        return all(int(x) % gcd(k, m) == 0 for x, m in zip(vec, self.mods))

    def elements(self):
        return product(*(range(m) for m in self.mods))


def _sorted_result(alg, symbols, exps, coords, p, certificates) -> D1Result:
    order = sorted(range(len(exps)), key=lambda i: exps[i])
    mods = [p ** exps[i] for i in order]
    c = coords[:, order] if len(order) else np.zeros((len(symbols), 0), dtype=np.int64)
    return D1Result(alg, symbols, mods, c % np.array(mods, dtype=np.int64) if mods else c, certificates)


def _kills_all_rows(stream: RelationStream, coords: np.ndarray, mods: list[int]) -> int:
    """Number of rows not sent to zero by the coordinate map."""
    if not mods:
        return 0
    m = np.array(mods, dtype=np.int64)
    bad = 0
    for cols, coefs in stream():
        v = np.einsum("rk,rkm->rm", coefs, coords[cols]) % m
        bad += int(v.any(axis=1).sum())
    return bad


def d1_structure(alg: GroupAlgebra, e: int = 3, odd_primes: Sequence[int] = (3, 5), seed: int | None = None,
                 dense: bool | None = None, verify: bool = True, dense_limit: int = 2048) -> D1Result:
    """Invariant factors of D_1(alg) with per-symbol coordinates.

    ``dense`` additionally runs the plain Howell and integer Smith paths
    without pre-elimination (default: only for rings with < 1000 symbols)
    and requires all paths to agree.
    """
    symbols = SymbolTable(alg)
    stream = stream_relations(alg, seed=seed, symbols=symbols)
    cert: dict = {"symbols": len(symbols)}
    results = {}
    for ee in (e, e + 1):
        t0 = time.perf_counter()
        res = StructuredReducer(len(symbols), 2, ee, dense_limit=dense_limit).run(stream)
        results[ee] = res
        cert[f"mod_2^{ee}"] = {
            "group": str(res.group), "passes": res.passes, "surviving": res.surviving,
            "residual_rows": res.residual_rows, "seconds": round(time.perf_counter() - t0, 2),
        }
        log.info("mod 2^%d: %s after %d passes", ee, res.group, res.passes)
    cert["rows"] = dict(stream.stats.rows)
    cert["r4_skipped"] = stream.stats.r4_skipped
    lo, hi = results[e], results[e + 1]
    if lo.group != hi.group or hi.cokernel.saturated:
        raise UnstableExponent(f"exponent bound unstable, raise e (2^{e}: {lo.group}, 2^{e + 1}: {hi.group})")
    for p in odd_primes:
        res = StructuredReducer(len(symbols), p, 1, dense_limit=dense_limit).run(stream)
        cert[f"mod_{p}"] = {"group": str(res.group), "passes": res.passes}
        if not res.group.is_trivial():
            raise FreeOrOddTorsion(f"free or odd-torsion part detected (mod {p}: {res.group})")
    out = _sorted_result(alg, symbols, hi.exps, hi.coords, 2, cert)
    if verify:
        bad = _kills_all_rows(stream, out.coords, out.mods)
        cert["rows_not_killed"] = bad
        if bad:
            raise ArithmeticError(f"computed coordinates fail on {bad} relation rows")
    if dense is None:
        dense = len(symbols) < 1000
    if dense:
        d = dense_d1_structure(alg, e, stream)
        cert["dense"] = {k: str(v) for k, v in d.items()}
        if any(g != out.group for g in d.values()):
            raise ArithmeticError(f"dense paths disagree with structured elimination: {d} vs {out.group}")
    return out


def dense_d1_structure(alg: GroupAlgebra, e: int = 3, stream: RelationStream | None = None) -> dict[str, AbelianGroup]:
    """Plain Howell forms at 2^e, 2^(e+1) and an integer Smith form over all rows."""
    stream = stream or stream_relations(alg)
    n = len(stream.symbols)
    howell = {ee: HowellBasis(n, 2, ee) for ee in (e, e + 1)}
    rows = []
    for cols, coefs in stream():
        dense_rows = np.zeros((len(cols), n), dtype=np.int64)
        np.add.at(dense_rows, (np.repeat(np.arange(len(cols)), cols.shape[1]), cols.ravel()), coefs.ravel())
        dense_rows = np.unique(dense_rows, axis=0)
        rows.append(dense_rows)
        for hb in howell.values():
            for r in dense_rows:
                hb.insert(r)
    out = {f"howell_2^{ee}": hb.cokernel().group for ee, hb in howell.items()}
    allrows = np.unique(np.concatenate(rows), axis=0)
    out["integer_smith"] = smith_invariants(allrows, n)
    return out


def abelian_coordinates(sub: Subgroup) -> tuple[list[int], dict[int, tuple[int, ...]]]:
    """Cyclic decomposition of an abelian unit subgroup with coordinates of
    each member (keyed by unit encoding)."""
    ug = sub.parent
    members = sorted(sub.members)
    pos = {x: i for i, x in enumerate(members)}
    rows = []
    for x in members:
        for y in members:
            r = [0] * len(members)
            r[pos[x]] += 1
            r[pos[y]] += 1
            r[pos[int(ug.mult[x, y])]] -= 1
            rows.append(r)
    sf = smith_form(np.array(rows, dtype=np.int64))
    diag = sf.diag + [0] * (len(members) - len(sf.diag))
    keep = [i for i, d in enumerate(diag) if d != 1]
    if any(diag[i] == 0 for i in keep):
        raise ValueError("subgroup presentation is not finite")
    order = sorted(keep, key=lambda i: diag[i])
    mods = [diag[i] for i in order]
    coords = {}
    for x in members:
        v = [int(sf.Q[pos[x], i]) % diag[i] for i in order]
        coords[ug.encode(x)] = tuple(v)
    return mods, coords


def phi(alg: GroupAlgebra, a: int, b: int) -> int:
    """phi(<a, b>) = (1+ab)(1+ba)^-1."""
    one = alg.one
    return alg.mul(one ^ alg.mul(a, b), alg.inverse(one ^ alg.mul(b, a)))


def phi_check(alg: GroupAlgebra, stream: RelationStream) -> dict:
    """Multiply out the phi-images along every row; all products must be 1."""
    th = theta_table(alg)
    pairs = stream.symbols.pairs
    theta = th[pairs[:, 0], pairs[:, 1]]
    t, inv, one = alg.table, alg.inverse_table, alg.one
    checked = bad = 0
    for cols, coefs in stream():
        val = np.full(len(cols), one, dtype=np.int64)
        for k in range(cols.shape[1]):
            x = theta[cols[:, k]]
            c = coefs[:, k]
            for _ in range(int(np.abs(c).max(initial=0))):
                step = np.where(c > 0, x, inv[x])
                step = np.where(c == 0, one, step)
                val = t[val, step]
                c = c - np.sign(c)
        checked += len(cols)
        bad += int((val != one).sum())
    return {"rows": checked, "violations": bad, "values": sorted(set(theta.tolist()))}


@dataclass
class K2Result:
    k2: AbelianGroup
    d1: AbelianGroup
    commutator: AbelianGroup
    image_order: int
    kernel_elements: list[tuple[int, ...]]
    phi_rows: dict
    second_route: AbelianGroup
    basis_images: list[tuple[int, ...]]


def k2_structure(d1: D1Result, comm: Subgroup | None = None, check_rows: bool = True) -> K2Result:
    """ker(phi: D_1 -> [R*, R*]) computed twice: by enumerating the graph of
    phi inside D_1 x [R*, R*], and by a Smith-form kernel of the induced
    homomorphism on the cyclic generators of D_1."""
    alg, symbols = d1.algebra, d1.symbols
    ug = comm.parent if comm is not None else UnitGroup(alg)
    comm = comm or ug.commutator_subgroup()
    phi_rows = phi_check(alg, stream_relations(alg, symbols=symbols)) if check_rows else {}
    if phi_rows.get("violations"):
        raise PhiIllDefined(f"phi ill-defined on {phi_rows['violations']} rows")
    cmods, ccoords = abelian_coordinates(comm)
    th = theta_table(alg)
    pairs = symbols.pairs
    theta = th[pairs[:, 0], pairs[:, 1]]
    outside = sorted({int(x) for x in theta if int(x) not in ccoords})
    if outside:
        raise PhiIllDefined(f"phi leaves [R*,R*]: {[alg.format(x) for x in outside]}")
    dm, cm = d1.mods, cmods
    gens = {tuple(d1.coords[j].tolist()) + ccoords[int(theta[j])] for j in range(len(symbols))}
    allm = dm + cm
    graph = {tuple([0] * len(allm))}
    frontier = list(graph)
    gens = list(gens)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = tuple((u + v) % m for u, v, m in zip(x, g, allm))
            if y not in graph:
                graph.add(y)
                frontier.append(y)
    nd = len(dm)
    d_parts = {}
    for x in graph:
        d_parts.setdefault(x[:nd], set()).add(x[nd:])
    if any(len(v) != 1 for v in d_parts.values()):
        raise PhiIllDefined("phi does not descend to D_1: one class has several images")
    d1_order = int(np.prod(dm)) if dm else 1
    if len(d_parts) != d1_order:
        raise ArithmeticError("symbol coordinates do not generate D_1")
    image = {next(iter(v)) for v in d_parts.values()}
    zero_c = tuple([0] * len(cm))
    kernel = sorted(d for d, v in d_parts.items() if next(iter(v)) == zero_c)
    k2 = structure_of_subgroup(tuple(dm), kernel)
    basis_images = []
    for i in range(nd):
        e = tuple(1 if j == i else 0 for j in range(nd))
        basis_images.append(next(iter(d_parts[e])))
    second = kernel_of_map(AbelianGroup(tuple(dm)), basis_images, AbelianGroup(tuple(cm)))
    if second != k2:
        raise ArithmeticError(f"kernel routes disagree: {k2} vs {second}")
    return K2Result(k2, d1.group, AbelianGroup(tuple(cm)), len(image), kernel, phi_rows, second, basis_images)
