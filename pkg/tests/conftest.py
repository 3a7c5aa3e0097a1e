import os
from pathlib import Path

import pytest
from hypothesis import settings

from k2forge.cache import D1Cache
from k2forge.dstein import d1_structure
from k2forge.galg import algebra
from k2forge.units import UnitGroup

settings.register_profile("k2forge", max_examples=60, deadline=None)
settings.load_profile("k2forge")


@pytest.fixture(scope="session")
def d4():
    return algebra("d4")


@pytest.fixture(scope="session")
def v4():
    return algebra("v4")


@pytest.fixture(scope="session")
def d4_units(d4):
    return UnitGroup(d4)


@pytest.fixture(scope="session")
def d4_comm(d4_units):
    return d4_units.commutator_subgroup()


@pytest.fixture(scope="session")
def d1_v4(v4):
    return d1_structure(v4, dense=True)


@pytest.fixture(scope="session")
def d1_cache(tmp_path_factory):
    """Shared D_1 cache: $K2FORGE_CACHE_DIR when set, else a session temp dir."""
    env = os.environ.get("K2FORGE_CACHE_DIR")
    return D1Cache(Path(env) if env else tmp_path_factory.mktemp("k2forge-cache"))


@pytest.fixture(scope="session")
def d1_d4(d4, d1_cache):
    """D_1(F_2[D4]); computed once per session (several minutes) unless cached."""
    return d1_cache.get(d4, 3)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
