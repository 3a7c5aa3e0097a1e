"""Relation instances R1, R2, R4 of the symbol presentation, one at a time
or streamed as numpy chunks for the structure computation.

Rows (each must vanish):

* R1 ``<a,b> + <b,a>``
* R2 ``<a,cb> - <ac,b> - <ba,c>``
* R4 ``<a,b> + <e a e^-1, (c+b) e^-1> - <a,c>`` with ``e = 1 + ba``

R3 is not streamed: once every theta = (1+ab)(1+ba)^-1 is central it only
says the presented group is abelian, which the abelian presentation already
encodes.  The derived relation DS2 ``<r,s> + <r,t> - <r, s+t+rst>`` is
available for proof replay only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ..galg import GroupAlgebra
from ..units import theta_centrality_check
from .symbols import FormalSum, SymbolTable

__all__ = [
    "RelationInstance",
    "RelationError",
    "PresentationNotAbelian",
    "StreamStats",
    "RelationStream",
    "stream_relations",
    "instance",
    "BASE_KINDS",
    "DERIVED_KINDS",
]

BASE_KINDS = ("R1", "R2", "R4")
DERIVED_KINDS = ("DS2", "ZERO")


class RelationError(ValueError):
    pass


class PresentationNotAbelian(RuntimeError):
    pass


@dataclass(frozen=True)
class RelationInstance:
    kind: str
    params: tuple[int, ...]
    row: FormalSum

    @property
    def derived(self) -> bool:
        return self.kind in DERIVED_KINDS


def instance(alg: GroupAlgebra, kind: str, *params: int) -> RelationInstance:
    """Build one relation row, checking every side condition.

    Parameters: R1(a, b); R2(a, c, b); R4(a, b, c); DS2(r, s, t), which also
    requires rs = sr and rt = tr; ZERO(a, b) with a = 0 or b = 0.
    """
    m, one = alg.mul, alg.one
    used: list[tuple[int, int]] = []

    def sym(a, b, k=1):
        # validity is checked per symbol, before terms get a chance to cancel
        used.append((a, b))
        return FormalSum.symbol(alg, a, b, k)

    kind = kind.upper()
    if kind == "R1":
        a, b = params
        row = sym(a, b) + sym(b, a)
    elif kind == "R2":
        a, c, b = params
        row = sym(a, m(c, b)) - sym(m(a, c), b) - sym(m(b, a), c)
    elif kind == "R4":
        a, b, c = params
        eps = one ^ m(b, a)
        if not alg.is_unit(eps):
            raise RelationError("R4: 1 + ba is not a unit")
        ei = alg.inverse(eps)
        row = sym(a, b) + sym(alg.prod(eps, a, ei), m(c ^ b, ei)) - sym(a, c)
    elif kind == "DS2":
        r, s, t = params
        if m(r, s) != m(s, r) or m(r, t) != m(t, r):
            raise RelationError("DS2: r must commute with s and t")
        row = sym(r, s) + sym(r, t) - sym(r, s ^ t ^ alg.prod(r, s, t))
    elif kind == "ZERO":
        a, b = params
        if a and b:
            raise RelationError("ZERO: one argument must vanish")
        row = sym(a, b)
    else:
        raise RelationError(f"unknown relation kind {kind!r}")
    bad = [(a, b) for a, b in dict.fromkeys(used) if not alg.is_unit(one ^ m(a, b))]
    if bad:
        f = alg.format
        raise RelationError(f"{kind}: side condition fails for " + ", ".join(f"<{f(a)}, {f(b)}>" for a, b in bad))
    return RelationInstance(kind, tuple(int(p) for p in params), row)


@dataclass
class StreamStats:
    rows: dict[str, int] = field(default_factory=lambda: {k: 0 for k in BASE_KINDS})
    r4_skipped: int = 0

    @property
    def total(self) -> int:
        return sum(self.rows.values())


class RelationStream:
    """Re-iterable producer of ``(cols, coefs)`` chunks over symbol ids.

    Each call yields every instance of the selected kinds exactly once.
    ``seed`` shuffles the chunk order and the rows inside each chunk; the
    row set does not depend on it.
    """

    def __init__(self, symbols: SymbolTable, kinds: Sequence[str] = BASE_KINDS, seed: int | None = None):
        unknown = set(kinds) - set(BASE_KINDS)
        if unknown:
            raise RelationError(f"cannot stream kinds {sorted(unknown)}")
        self.symbols = symbols
        self.alg = symbols.algebra
        self.kinds = tuple(kinds)
        self.seed = seed
        self.stats = StreamStats()

    def __call__(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        return self.chunks()

    def chunks(self, with_kind: bool = False):
        alg, ids, valid = self.alg, self.symbols.ids, self.symbols.valid
        t, inv, one, size = alg.table, alg.inverse_table, alg.one, alg.size
        rng = np.random.default_rng(self.seed) if self.seed is not None else None
        stats = StreamStats()
        x, y = (g.ravel() for g in np.meshgrid(np.arange(size), np.arange(size), indexing="ij"))
        jobs = [("R1", None)] if "R1" in self.kinds else []
        jobs += [(k, a) for a in range(size) for k in ("R2", "R4") if k in self.kinds]
        if rng is not None:
            jobs = [jobs[i] for i in rng.permutation(len(jobs))]
        for kind, a in jobs:
            if kind == "R1":
                pa, pb = np.nonzero(valid)
                keep = pa <= pb
                pa, pb = pa[keep], pb[keep]
                cols = np.stack([ids[pa, pb], ids[pb, pa]], axis=1)
                coefs = np.ones_like(cols)
            elif kind == "R2":
                c, b = x, y
                cb = t[c, b]
                ok = valid[a, cb]
                c, b, cb = c[ok], b[ok], cb[ok]
                cols = np.stack([ids[a, cb], ids[t[a, c], b], ids[t[b, a], c]], axis=1)
                coefs = np.tile(np.array([1, -1, -1], dtype=np.int64), (len(cols), 1))
            else:
                b, c = x, y
                ok = valid[a, b] & valid[a, c]
                b, c = b[ok], c[ok]
                eps = one ^ t[b, a]
                ei = inv[eps]
                if (ei < 0).any():
                    raise RelationError("R4: 1 + ba fails to be a unit although 1 + ab is one")
                mid_a, mid_b = t[t[eps, a], ei], t[c ^ b, ei]
                mid_ok = valid[mid_a, mid_b]
                stats.r4_skipped += int((~mid_ok).sum())
                b, c, mid_a, mid_b = b[mid_ok], c[mid_ok], mid_a[mid_ok], mid_b[mid_ok]
                cols = np.stack([ids[a, b], ids[mid_a, mid_b], ids[a, c]], axis=1)
                coefs = np.tile(np.array([1, 1, -1], dtype=np.int64), (len(cols), 1))
            if (cols < 0).any():
                raise RelationError(f"{kind}: a row refers to an invalid symbol")
            stats.rows[kind] += len(cols)
            if rng is not None:
                perm = rng.permutation(len(cols))
                cols, coefs = cols[perm], coefs[perm]
            yield (kind, cols, coefs) if with_kind else (cols, coefs)
        self.stats = stats


def stream_relations(alg: GroupAlgebra, kinds: Sequence[str] = BASE_KINDS, seed: int | None = None,
                     symbols: SymbolTable | None = None, check_theta: bool = True) -> RelationStream:
    """Relation stream for ``alg``; refuses to run unless every theta is central."""
    if check_theta:
        ok, bad = theta_centrality_check(alg)
        if not ok:
            raise PresentationNotAbelian(f"presentation not abelian; R3 cannot be reduced (pair {bad})")
    return RelationStream(symbols or SymbolTable(alg), kinds, seed)
