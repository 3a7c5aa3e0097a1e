"""Smith normal form over Z and over Z/p^e, plus kernels and quotients.

Integer work starts in int64 numpy arrays and is promoted to Python-int
object arrays as soon as an entry leaves a safe range, so results are exact
whatever the coefficient growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SmithForm",
    "smith_form",
    "smith_invariants",
    "integer_echelon",
    "smith_mod_prime_power",
    "kernel_of_map",
    "quotient_by",
    "MapError",
]

_SAFE = 1 << 40


class MapError(ValueError):
    pass


def _guard(a: np.ndarray) -> np.ndarray:
    if a.dtype != object and a.size and int(np.abs(a).max()) >= _SAFE:
        return a.astype(object)
    return a


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def integer_echelon(rows: Iterable[Sequence[int]], num_cols: int) -> np.ndarray:
    """Row-reduce a stream of integer rows into an echelon basis of their span.

    Keeps at most one row per pivot column, so memory stays O(num_cols^2)
    whatever the number of input rows.
    """
    basis: dict[int, np.ndarray] = {}
    for r in rows:
        v = _guard(np.asarray(r, dtype=np.int64) if not isinstance(r, np.ndarray) else r.astype(np.int64))
        while True:
            nz = np.flatnonzero(v)
            if nz.size == 0:
                break
            c = int(nz[0])
            b = basis.get(c)
            if b is None:
                basis[c] = -v if v[c] < 0 else v
                break
            bc, vc = int(b[c]), int(v[c])
            if vc % bc == 0:
                v = _guard(v - (vc // bc) * b)
                continue
            g, s, t = _xgcd(bc, vc)
            if b.dtype == object or v.dtype == object:
                b, v = b.astype(object), v.astype(object)
            new = _guard(s * b + t * v)
            v = _guard((bc // g) * v - (vc // g) * b)
            basis[c] = new
    if not basis:
        return np.zeros((0, num_cols), dtype=np.int64)
    out = [basis[c] for c in sorted(basis)]
    dtype = object if any(r.dtype == object for r in out) else np.int64
    return np.array(out, dtype=dtype)


@dataclass
class SmithForm:
    """``P @ A @ Q == diag(d)`` with ``P``, ``Q`` unimodular.

    ``diag`` holds the nonnegative diagonal, padded with zeros up to
    ``min(rows, cols)``; ``Qinv`` is the inverse of ``Q``.
    """

    diag: list[int]
    P: np.ndarray
    Q: np.ndarray
    Qinv: np.ndarray


def smith_form(A, track: bool = True) -> SmithForm:
    A = np.array(A, dtype=object) if not isinstance(A, np.ndarray) else A.copy()
    A = _guard(A.astype(np.int64)) if A.dtype != object and A.size else A
    if A.ndim != 2:
        raise ValueError("matrix expected")
    m, n = A.shape
    dt = object if A.dtype == object else np.int64
    P = np.eye(m, dtype=dt) if track else None
    Q = np.eye(n, dtype=dt) if track else None
    Qi = np.eye(n, dtype=dt) if track else None

    def promote():
        nonlocal A, P, Q, Qi
        A = A.astype(object)
        if track:
            P, Q, Qi = P.astype(object), Q.astype(object), Qi.astype(object)

    def check():
        if A.dtype != object and (A.size and int(np.abs(A).max()) >= _SAFE or
                                  track and any(X.size and int(np.abs(X).max()) >= _SAFE for X in (P, Q, Qi))):
            promote()

    t = 0
    while t < min(m, n):
        sub = A[t:, t:]
        nz = np.argwhere(sub != 0)
        if nz.size == 0:
            break
        absvals = np.abs(sub[nz[:, 0], nz[:, 1]].astype(object))
        k = int(np.argmin(absvals))
        i, j = int(nz[k, 0]) + t, int(nz[k, 1]) + t
        if i != t:
            A[[t, i]] = A[[i, t]]
            if track:
                P[[t, i]] = P[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            if track:
                Q[:, [t, j]] = Q[:, [j, t]]
                Qi[[t, j]] = Qi[[j, t]]
        while True:
            done = True
            piv = A[t, t]
            # clear column t
            for r in range(t + 1, m):
                if A[r, t] != 0:
                    q = A[r, t] // piv
                    A[r] = A[r] - q * A[t]
                    if track:
                        P[r] = P[r] - q * P[t]
                    if A[r, t] != 0:
                        done = False
            # clear row t
            for c in range(t + 1, n):
                if A[t, c] != 0:
                    q = A[t, c] // piv
                    A[:, c] = A[:, c] - q * A[:, t]
                    if track:
                        Q[:, c] = Q[:, c] - q * Q[:, t]
                        Qi[t] = Qi[t] + q * Qi[c]
                    if A[t, c] != 0:
                        done = False
            check()
            if done:
                # divisibility: pivot must divide the rest of the block
                rest = A[t + 1:, t + 1:]
                bad = np.argwhere(rest % piv != 0) if rest.size else np.zeros((0, 2), dtype=int)
                if bad.size == 0:
                    break
                r = int(bad[0, 0]) + t + 1
                A[t] = A[t] + A[r]
                if track:
                    P[t] = P[t] + P[r]
                continue
            # move the smallest nonzero in row/column t to the pivot
            cand = [(abs(int(A[r, t])), r, t) for r in range(t, m) if A[r, t] != 0]
            cand += [(abs(int(A[t, c])), t, c) for c in range(t, n) if A[t, c] != 0]
            _, r, c = min(cand)
            if r != t:
                A[[t, r]] = A[[r, t]]
                if track:
                    P[[t, r]] = P[[r, t]]
            if c != t:
                A[:, [t, c]] = A[:, [c, t]]
                if track:
                    Q[:, [t, c]] = Q[:, [c, t]]
                    Qi[[t, c]] = Qi[[c, t]]
        if A[t, t] < 0:
            A[t] = -A[t]
            if track:
                P[t] = -P[t]
        t += 1
    diag = [int(A[i, i]) for i in range(min(m, n))]
    return SmithForm(diag, P, Q, Qi)


def smith_invariants(rows, num_cols: int):
    """Invariant factors of Z^num_cols / span(rows), as an AbelianGroup."""
    from .groups import AbelianGroup

    basis = integer_echelon(rows, num_cols)
    if basis.shape[0] == 0:
        return AbelianGroup((0,) * num_cols)
    d = smith_form(basis, track=False).diag
    d += [0] * (num_cols - len(d))
    return AbelianGroup.from_factors(d)


def smith_mod_prime_power(rows: np.ndarray, p: int, e: int):
    """Smith form of a dense matrix over Z/p^e.

    Returns ``(exps, Q)``: the cokernel of ``rows`` is the direct sum of
    Z/p^k for k in ``exps`` (one entry per column; k == e means the column is
    unconstrained at this modulus), and row ``j`` of ``Q`` gives the
    coordinates of basis vector ``j`` in that decomposition.
    """
    M = p ** e
    A = np.array(rows, dtype=np.int64) % M
    if A.ndim != 2:
        raise ValueError("matrix expected")
    m, n = A.shape
    Q = np.eye(n, dtype=np.int64)

    def val(x: int) -> int:
        if x % M == 0:
            return e
        k = 0
        while x % p == 0:
            x //= p
            k += 1
        return k

    exps: list[int] = []
    t = 0
    vals = np.vectorize(val, otypes=[np.int64])
    while t < min(m, n):
        sub = A[t:, t:]
        if not sub.any():
            break
        v = vals(sub)
        i, j = np.unravel_index(int(np.argmin(v)), v.shape)
        i, j = int(i) + t, int(j) + t
        k = int(v[i - t, j - t])
        A[[t, i]] = A[[i, t]]
        A[:, [t, j]] = A[:, [j, t]]
        Q[:, [t, j]] = Q[:, [j, t]]
        unit = (int(A[t, t]) // p ** k) % M
        A[t] = A[t] * pow(unit, -1, M) % M
        pk = p ** k
        # every entry in row/column t is divisible by p^k
        f = (A[t + 1:, t] // pk)[:, None]
        A[t + 1:] = (A[t + 1:] - f * A[t]) % M
        g = A[t, t + 1:] // pk
        A[:, t + 1:] = (A[:, t + 1:] - A[:, [t]] * g) % M
        Q[:, t + 1:] = (Q[:, t + 1:] - Q[:, [t]] * g) % M
        exps.append(k)
        t += 1
    exps += [e] * (n - len(exps))
    return exps, Q


def _lattice_coords(G: np.ndarray):
    """Basis of the row lattice of G and a solver for coordinates in it."""
    sf = smith_form(G)
    r = sum(1 for d in sf.diag if d)
    basis = np.array([[sf.diag[i] * x for x in sf.Qinv[i]] for i in range(r)], dtype=object)

    def coords(w) -> list[int]:
        wq = np.asarray(w, dtype=object).dot(sf.Q)
        out = []
        for i in range(len(wq)):
            if i < r:
                if wq[i] % sf.diag[i]:
                    raise MapError("vector outside the lattice")
                out.append(wq[i] // sf.diag[i])
            elif wq[i] != 0:
                raise MapError("vector outside the lattice")
        return out

    return basis, coords


def kernel_of_map(source, images: Sequence[Sequence[int]], target):
    """Kernel of the homomorphism ``source -> target`` sending the i-th
    canonical generator of ``source`` to ``images[i]`` (coordinates in
    ``target``'s canonical generators).  Returns an AbelianGroup.
    """
    from .groups import AbelianGroup

    a = list(source.invariant_factors)
    b = list(target.invariant_factors)
    k, mdim = len(a), len(b)
    H = np.zeros((k, mdim), dtype=object)
    for i, img in enumerate(images):
        if len(img) != mdim:
            raise MapError(f"image {i} has {len(img)} coordinates, target has {mdim}")
        H[i] = list(img)
    for i in range(k):
        for j in range(mdim):
            if (a[i] * H[i, j]) % b[j] if b[j] else a[i] * H[i, j]:
                raise MapError(f"generator {i} of order {a[i]} maps to an element of larger order")
    if k == 0:
        return AbelianGroup(())
    S = np.vstack([H, np.diag(np.array(b, dtype=object))]) if mdim else H
    sf = smith_form(S)
    rank = sum(1 for d in sf.diag if d)
    left_kernel = sf.P[rank:, :k]
    gens = [list(r) for r in left_kernel if any(x != 0 for x in r)]
    if not gens:
        return AbelianGroup(())
    L, coords = _lattice_coords(np.array(gens, dtype=object))
    rel = [coords([a[i] if j == i else 0 for j in range(k)]) for i in range(k) if a[i]]
    return smith_invariants(rel, L.shape[0])


def quotient_by(group, generators: Sequence[Sequence[int]]):
    """``group`` modulo the subgroup generated by ``generators`` (canonical coordinates)."""
    a = list(group.invariant_factors)
    k = len(a)
    rows = [[a[i] if j == i else 0 for j in range(k)] for i in range(k) if a[i]]
    rows += [list(g) for g in generators]
    return smith_invariants(rows, k)
