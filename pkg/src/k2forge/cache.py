"""On-disk cache of computed D_1 structures.

One ``.npz`` per (ring, exponent) holding the invariant factors, the symbol
coordinates and a JSON certificate, plus a SHA-256 over the arrays so that a
damaged file is detected instead of silently reused.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
from pathlib import Path

import numpy as np

from .dstein.structure import D1Result, d1_structure
from .dstein.symbols import SymbolTable
from .galg import GroupAlgebra, algebra

__all__ = ["CacheCorrupted", "D1Cache", "default_cache_dir", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1


class CacheCorrupted(RuntimeError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get("K2FORGE_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "k2forge"


def _digest(mods: np.ndarray, coords: np.ndarray) -> str:
    h = hashlib.sha256()
    for arr in (mods, coords):
        a = np.ascontiguousarray(arr, dtype=np.int64)
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()


class D1Cache:
    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else default_cache_dir()

    def path(self, ring: str, e: int) -> Path:
        return self.directory / f"d1_{ring.lower()}_e{e}.npz"

    def load(self, ring: str, e: int) -> D1Result | None:
        """The cached result, ``None`` if absent; raises on a damaged file."""
        path = self.path(ring, e)
        if not path.exists():
            return None
        try:
            with np.load(path, allow_pickle=False) as z:
                meta = json.loads(str(z["meta"]))
                mods, coords = z["mods"], z["coords"]
        except Exception as exc:  # any read failure means the entry is unusable
            raise CacheCorrupted(f"cannot read {path}: {exc}") from exc
        if meta.get("schema") != SCHEMA_VERSION:
            raise CacheCorrupted(f"{path}: schema {meta.get('schema')} != {SCHEMA_VERSION}")
        if meta.get("sha256") != _digest(mods, coords):
            raise CacheCorrupted(f"{path}: checksum mismatch")
        alg = algebra(ring)
        symbols = SymbolTable(alg)
        if coords.shape != (len(symbols), len(mods)):
            raise CacheCorrupted(f"{path}: coordinate table has shape {coords.shape}")
        return D1Result(alg, symbols, [int(m) for m in mods], coords.astype(np.int64), meta["certificates"])

    def store(self, ring: str, e: int, d1: D1Result) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        mods = np.array(d1.mods, dtype=np.int64)
        coords = np.asarray(d1.coords, dtype=np.int64)
        meta = {"schema": SCHEMA_VERSION, "ring": ring, "e": e, "sha256": _digest(mods, coords),
                "certificates": d1.certificates}
        path = self.path(ring, e)
        tmp = path.with_suffix(".tmp.npz")
        np.savez_compressed(tmp, mods=mods, coords=coords, meta=np.array(json.dumps(meta, default=str)))
        tmp.replace(path)
        return path

    def get(self, alg: GroupAlgebra, e: int = 3, compute: bool = True) -> D1Result | None:
        """Cached D_1 for ``alg``, computing and storing it on a miss."""
        hit = self.load(alg.name, e)
        if hit is not None or not compute:
            return hit
        d1 = d1_structure(alg, e=e)
        self.store(alg.name, e, d1)
        return d1

    def clear(self) -> int:
        if not self.directory.exists():
            return 0
        n = len(list(self.directory.glob("*.npz")))
        shutil.rmtree(self.directory)
        return n
