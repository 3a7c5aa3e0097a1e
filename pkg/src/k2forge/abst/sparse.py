"""Structured elimination of huge, very sparse relation streams over Z/p^e.

Relation rows here have at most a handful of entries and arrive by the
tens of millions, so dense or even generic sparse elimination is out of
reach in Python.  The reducer instead runs repeated passes over the stream:

* every column is mapped to ``weight * root`` through a weighted union-find;
* rows that collapse to a single term with unit coefficient kill their root;
* rows that collapse to two terms with a unit coefficient on one side
  substitute that root away (a unimodular pivot);
* anything else that collapses to one or two terms is kept as a residual row.

Passes repeat until nothing changes.  The surviving roots are few, and the
full stream, mapped onto them, is then folded into a dense
:class:`HowellBasis`.  Every step is a row operation by a relation with unit
pivot, so the final cokernel equals the cokernel of the whole stream.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from .howell import Cokernel, HowellBasis

__all__ = ["StructuredReducer", "ReductionResult", "RowChunk"]

log = logging.getLogger(__name__)

RowChunk = tuple[np.ndarray, np.ndarray]  # (cols, coefs), both (n, w) int64


@dataclass
class ReductionResult:
    p: int
    e: int
    num_cols: int
    cokernel: Cokernel
    coords: np.ndarray  # num_cols x k
    passes: int
    surviving: int
    residual_rows: int
    rows_seen: int
    history: list[int] = field(default_factory=list)

    @property
    def exps(self) -> list[int]:
        return self.cokernel.exps

    @property
    def group(self):
        return self.cokernel.group


class StructuredReducer:
    def __init__(self, num_cols: int, p: int = 2, e: int = 3, dense_limit: int = 2048):
        self.n = num_cols
        self.p, self.e = p, e
        self.M = p ** e
        self.dense_limit = dense_limit
        self.parent = list(range(num_cols))
        self.weight = [1] * num_cols
        self.zero = [False] * num_cols
        self.residual: set[tuple] = set()

    # --- union-find ---------------------------------------------------------------

    def _unit(self, c: int) -> bool:
        return c % self.p != 0

    def find(self, j: int) -> tuple[int, int]:
        path = []
        parent, weight, M = self.parent, self.weight, self.M
        while parent[j] != j:
            path.append(j)
            j = parent[j]
        w = 1
        for q in reversed(path):
            w = w * weight[q] % M
            parent[q] = j
            weight[q] = w
        return j, (weight[path[0]] if path else 1)

    def flatten(self) -> tuple[np.ndarray, np.ndarray]:
        roots = np.empty(self.n, dtype=np.int64)
        ws = np.empty(self.n, dtype=np.int64)
        for j in range(self.n):
            r, w = self.find(j)
            roots[j] = r
            ws[j] = 0 if self.zero[r] else w
        return roots, ws

    def surviving(self) -> list[int]:
        return [j for j in range(self.n) if self.parent[j] == j and not self.zero[j]]

    # --- row normalisation ----------------------------------------------------------

    def _map(self, chunk: RowChunk, roots, ws):
        cols, coefs = chunk
        r = roots[cols]
        c = coefs * ws[cols] % self.M
        r = np.where(c == 0, -1, r)
        order = np.argsort(r, axis=1, kind="stable")
        r = np.take_along_axis(r, order, 1)
        c = np.take_along_axis(c, order, 1)
        for k in range(r.shape[1] - 1, 0, -1):
            same = (r[:, k] == r[:, k - 1]) & (r[:, k] >= 0)
            c[same, k - 1] += c[same, k]
            c[same, k] = 0
        c %= self.M
        r = np.where(c == 0, -1, r)
        return r, c

    @staticmethod
    def _compact(r: np.ndarray, c: np.ndarray, k: int) -> np.ndarray:
        key = np.where(r >= 0, 0, 1)
        order = np.argsort(key, axis=1, kind="stable")
        rr = np.take_along_axis(r, order, 1)[:, :k]
        cc = np.take_along_axis(c, order, 1)[:, :k]
        return np.unique(np.concatenate([rr, cc], axis=1), axis=0)

    # --- passes -----------------------------------------------------------------------

    def _apply_small(self, ones: np.ndarray, twos: np.ndarray) -> bool:
        changed = False
        M, zero = self.M, self.zero
        for r, c in ones.tolist():
            root, w = self.find(r)
            if zero[root]:
                continue
            cc = c * w % M
            if cc == 0:
                continue
            if self._unit(cc):
                zero[root] = True
                changed = True
            else:
                self.residual.add(((root, cc),))
        for u, v, cu, cv in twos.tolist():
            ru, wu = self.find(u)
            rv, wv = self.find(v)
            pu = 0 if zero[ru] else cu * wu % M
            qv = 0 if zero[rv] else cv * wv % M
            if ru == rv:
                pu, qv, rv = (pu + qv) % M, 0, -1
            if pu == 0 or qv == 0:
                root, s = (ru, pu) if qv == 0 else (rv, qv)
                if s == 0:
                    continue
                if self._unit(s):
                    zero[root] = True
                    changed = True
                else:
                    self.residual.add(((root, s),))
            elif self._unit(qv):
                self.parent[rv] = ru
                self.weight[rv] = (-pu * pow(qv, -1, M)) % M
                changed = True
            elif self._unit(pu):
                self.parent[ru] = rv
                self.weight[ru] = (-qv * pow(pu, -1, M)) % M
                changed = True
            else:
                self.residual.add(tuple(sorted(((ru, pu), (rv, qv)))))
        return changed

    def run(self, stream: Callable[[], Iterable[RowChunk]], max_passes: int = 50) -> ReductionResult:
        """Reduce the stream; ``stream()`` must yield the same rows on every call
        (chunk order may differ)."""
        history = []
        passes = 0
        collected: set[tuple] | None = None
        rows_seen = 0
        while True:
            passes += 1
            if passes > max_passes:
                raise RuntimeError("structured elimination did not reach a fixpoint")
            roots, ws = self.flatten()
            nfree = len(self.surviving())
            history.append(nfree)
            collect = nfree <= self.dense_limit
            gathered: set[tuple] = set()
            ones, twos = [], []
            rows_seen = 0
            for chunk in stream():
                rows_seen += len(chunk[0])
                r, c = self._map(chunk, roots, ws)
                nz = (r >= 0).sum(axis=1)
                if (nz == 1).any():
                    ones.append(self._compact(r[nz == 1], c[nz == 1], 1))
                if (nz == 2).any():
                    twos.append(self._compact(r[nz == 2], c[nz == 2], 2))
                if collect and (nz >= 3).any():
                    w = r.shape[1]
                    for row in self._compact(r[nz >= 3], c[nz >= 3], w).tolist():
                        gathered.add(tuple(sorted((a, b) for a, b in zip(row[:w], row[w:]) if a >= 0)))
            ones_a = np.unique(np.concatenate(ones), axis=0) if ones else np.zeros((0, 2), np.int64)
            twos_a = np.unique(np.concatenate(twos), axis=0) if twos else np.zeros((0, 4), np.int64)
            log.info("pass %d: %d surviving, %d/%d short rows", passes, nfree, len(ones_a), len(twos_a))
            changed = self._apply_small(ones_a, twos_a)
            if not changed:
                collected = gathered if collect else None
                break
        if collected is None:
            # fixpoint reached with too many survivors to have gathered the long rows
            raise RuntimeError(f"{nfree} columns survive structured elimination; dense stage refused")
        return self._finish(collected, passes, rows_seen, history)

    def _finish(self, long_rows: set[tuple], passes: int, rows_seen: int, history: list[int]) -> ReductionResult:
        free = self.surviving()
        pos = {j: i for i, j in enumerate(free)}
        hb = HowellBasis(len(free), self.p, self.e)
        M = self.M
        residual = 0
        for entries in list(self.residual) + list(long_rows):
            v = np.zeros(len(free), dtype=np.int64)
            for col, coef in entries:
                root, w = self.find(col)
                if self.zero[root]:
                    continue
                v[pos[root]] = (v[pos[root]] + coef * w) % M
            if v.any():
                residual += 1
                hb.insert(v)
        cok = hb.cokernel()
        k = len(cok.exps)
        coords = np.zeros((self.n, k), dtype=np.int64)
        mods = np.array([self.p ** x for x in cok.exps], dtype=np.int64)
        roots, ws = self.flatten()
        live = ws != 0
        if k:
            base = np.zeros((self.n, k), dtype=np.int64)
            idx = np.array([pos.get(int(r), -1) for r in roots[live]], dtype=np.int64)
            base[live] = cok.coords[idx] * ws[live][:, None]
            coords = base % mods
        return ReductionResult(self.p, self.e, self.n, cok, coords, passes, len(free), residual, rows_seen, history)
