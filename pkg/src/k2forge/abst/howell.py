"""Incremental Howell-form row reduction over Z/p^e.

Rows arrive one at a time and are folded into a basis holding at most one
row per pivot column.  Each basis row is normalised so its pivot is exactly
p^k, and whenever a row with a non-unit pivot enters, its annihilator
multiple p^(e-k) * row is fed back in.  That keeps the Howell property:
membership in the row span is decided by plain reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .groups import AbelianGroup
from .smith import smith_mod_prime_power

__all__ = ["HowellBasis", "howell_reduce_stream", "Cokernel", "UnstableModulus"]


class UnstableModulus(ArithmeticError):
    pass


def _valuation(x: int, p: int, e: int) -> int:
    if x == 0:
        return e
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


@dataclass
class Cokernel:
    """Cokernel of a Howell basis: Z/p^k summands and per-column coordinates.

    ``exps[i] == e`` marks a summand that is all of Z/p^e at this modulus, i.e.
    the modulus was not large enough to see its true order.
    """

    p: int
    e: int
    exps: list[int]
    coords: np.ndarray  # num_cols x len(exps), entries mod p^exps[i]

    @property
    def saturated(self) -> bool:
        return any(k == self.e for k in self.exps)

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup.from_factors([self.p ** k for k in self.exps])


@dataclass
class HowellBasis:
    num_cols: int
    p: int = 2
    e: int = 3
    rows: dict[int, np.ndarray] = field(default_factory=dict)
    inserted: int = 0

    @property
    def modulus(self) -> int:
        return self.p ** self.e

    def _pivot(self, v: np.ndarray) -> int:
        nz = np.flatnonzero(v)
        return int(nz[0]) if nz.size else -1

    def reduce(self, v) -> np.ndarray:
        """Reduce ``v`` against the basis; zero iff ``v`` lies in the row span."""
        M, p, e = self.modulus, self.p, self.e
        v = np.asarray(v, dtype=np.int64) % M
        while True:
            c = self._pivot(v)
            if c < 0:
                return v
            b = self.rows.get(c)
            if b is None:
                return v
            kb = _valuation(int(b[c]), p, e)
            x = int(v[c])
            if _valuation(x, p, e) < kb:
                return v
            v = (v - (x // p ** kb) * b) % M

    def insert(self, v) -> bool:
        """Fold one row into the basis; returns True if the span grew."""
        M, p, e = self.modulus, self.p, self.e
        self.inserted += 1
        grew = False
        queue = [np.asarray(v, dtype=np.int64) % M]
        while queue:
            v = queue.pop()
            while True:
                c = self._pivot(v)
                if c < 0:
                    break
                x = int(v[c])
                k = _valuation(x, p, e)
                b = self.rows.get(c)
                if b is not None:
                    kb = _valuation(int(b[c]), p, e)
                    if k >= kb:
                        v = (v - (x // p ** kb) * b) % M
                        continue
                v = v * pow(x // p ** k, -1, M) % M
                self.rows[c] = v
                grew = True
                if k:
                    queue.append(v * p ** (e - k) % M)
                if b is None:
                    break
                v = b
        return grew

    def extend(self, rows: Iterable) -> "HowellBasis":
        for r in rows:
            self.insert(r)
        return self

    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.num_cols), dtype=np.int64)
        return np.array([self.rows[c] for c in sorted(self.rows)], dtype=np.int64)

    def reduced_form(self) -> np.ndarray:
        """Howell normal form: entries above each pivot reduced modulo that pivot."""
        M, p, e = self.modulus, self.p, self.e
        piv = sorted(self.rows)
        rows = {c: self.rows[c].copy() for c in piv}
        for c in reversed(piv):
            kb = _valuation(int(rows[c][c]), p, e)
            for c2 in piv:
                if c2 >= c:
                    break
                q = int(rows[c2][c]) // p ** kb
                if q:
                    rows[c2] = (rows[c2] - q * rows[c]) % M
        return np.array([rows[c] for c in piv], dtype=np.int64) if piv else np.zeros((0, self.num_cols), np.int64)

    def cokernel(self) -> Cokernel:
        exps, Q = smith_mod_prime_power(self.matrix(), self.p, self.e)
        keep = [i for i, k in enumerate(exps) if k > 0]
        coords = Q[:, keep].copy()
        for j, i in enumerate(keep):
            coords[:, j] %= self.p ** exps[i]
        return Cokernel(self.p, self.e, [exps[i] for i in keep], coords)


def howell_reduce_stream(rows: Iterable, num_cols: int, modulus: int) -> HowellBasis:
    """Consume a row stream into a Howell basis modulo a prime power."""
    p = _smallest_prime(modulus)
    e = 0
    m = modulus
    while m % p == 0:
        m //= p
        e += 1
    if m != 1:
        raise ValueError(f"modulus {modulus} is not a prime power")
    return HowellBasis(num_cols, p, e).extend(rows)


def _smallest_prime(n: int) -> int:
    p = 2
    while n % p:
        p += 1
    return p
