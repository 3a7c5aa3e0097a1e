"""Module-level caches for hypothesis tests, which cannot take session fixtures."""

from functools import lru_cache

from k2forge.dstein import d1_structure
from k2forge.galg import algebra


@lru_cache(maxsize=None)
def d1_v4_cached():
    return d1_structure(algebra("v4"), dense=False)
