import json
import shutil

import numpy as np
import pytest
from click.testing import CliRunner

from k2forge import __version__
from k2forge.cache import CacheCorrupted, D1Cache
from k2forge.claims import REGISTRY, Context, render_json, run, select
from k2forge.cli import main
from k2forge.galg import algebra


@pytest.fixture
def runner():
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:  # click >= 8.2 always keeps stderr apart
        return CliRunner()


@pytest.fixture
def small_cache(tmp_path):
    return tmp_path / "cache"


def invoke(runner, *args):
    return runner.invoke(main, list(args), catch_exceptions=False)


def test_version(runner):
    res = invoke(runner, "--version")
    assert res.exit_code == 0 and __version__ in res.output


def test_no_claims_selected(runner):
    res = invoke(runner, "verify", "--claims", "C-NOPE-*")
    assert res.exit_code == 2 and "no claims selected" in res.stderr


def test_unknown_claim(runner):
    res = invoke(runner, "verify", "--claims", "C-9.9")
    assert res.exit_code == 2 and "unknown claim" in res.stderr


@pytest.mark.parametrize("pattern,code", [("C-2.*", 0), ("C-L2-commutator,C-L2-system", 0), ("C-L2-*", 1)])
def test_exit_codes(runner, small_cache, pattern, code):
    res = invoke(runner, "verify", "--ring", "d4", "--claims", pattern, "--cache-dir", str(small_cache))
    assert res.exit_code == code


def test_json_schema(runner, small_cache):
    res = invoke(runner, "verify", "--ring", "v4", "--claims", "all", "--cache-dir", str(small_cache))
    doc = json.loads(res.stdout)
    assert set(doc) == {"tool_version", "ring", "claims", "summary"}
    assert doc["ring"] == "v4" and len(doc["claims"]) == len(REGISTRY)
    for c in doc["claims"]:
        assert set(c) == {"id", "paper_ref", "ring", "status", "evidence", "runtime_ms"}
        assert c["status"] in {"pass", "fail", "skip", "error"}
    s = doc["summary"]
    assert s["total"] == s["pass"] + s["fail"] + s["skip"] + s["error"] and s["fail"] == 0
    assert res.exit_code == 0


def test_deep_claims_skip_without_flag(runner, small_cache):
    res = invoke(runner, "verify", "--ring", "d4", "--claims", "C-3.1,C-X", "--cache-dir", str(small_cache))
    doc = json.loads(res.stdout)
    assert [c["status"] for c in doc["claims"]] == ["skip", "skip"] and res.exit_code == 0


def test_json_deterministic_apart_from_runtime(small_cache):
    def doc():
        recs = run(select("C-2.*,C-D1-small,C-1.18"), Context("v4", cache=D1Cache(small_cache)))
        d = json.loads(render_json(recs, "v4"))
        for c in d["claims"]:
            c.pop("runtime_ms")
        return d
    assert doc() == doc()


def test_markdown_report(runner, tmp_path, small_cache):
    out = tmp_path / "r.md"
    res = invoke(runner, "verify", "--ring", "z2", "--claims", "C-2.*", "--format", "md", "--report", str(out),
                 "--cache-dir", str(small_cache))
    text = out.read_text()
    assert res.exit_code == 0
    assert "| C-2.2 | pass |" in text and "| C-2.10 | pass |" in text
    assert "C-2.2" in res.stderr


def test_parallel_matches_sequential(small_cache):
    claims = select("C-2.*,C-L2-*,C-H2")
    a = run(claims, Context("d4", cache=D1Cache(small_cache)))
    b = run(claims, Context("d4", cache=D1Cache(small_cache)), jobs=4)
    assert [(r.id, r.status, r.evidence) for r in a] == [(r.id, r.status, r.evidence) for r in b]


class TestCache:
    def test_build_and_clear(self, runner, small_cache):
        res = invoke(runner, "cache", "build", "--dir", str(small_cache), "--ring", "z2")
        assert res.exit_code == 0 and "z2: D_1 = 0" in res.output
        assert (small_cache / "d1_z2_e3.npz").exists()
        res = invoke(runner, "cache", "clear", "--dir", str(small_cache))
        assert "removed 1" in res.output and not small_cache.exists()

    def test_round_trip(self, small_cache, d1_v4):
        store = D1Cache(small_cache)
        store.store("v4", 3, d1_v4)
        back = store.load("v4", 3)
        assert back.mods == d1_v4.mods and np.array_equal(back.coords, d1_v4.coords)

    def test_corruption_detected(self, runner, small_cache, d1_v4):
        store = D1Cache(small_cache)
        path = store.store("v4", 3, d1_v4)
        with np.load(path) as z:
            data = dict(z)
        data["coords"] = data["coords"].copy()
        data["coords"][0, 0] ^= 1
        np.savez_compressed(path, **data)
        with pytest.raises(CacheCorrupted, match="checksum"):
            store.load("v4", 3)
        res = invoke(runner, "cache", "build", "--dir", str(small_cache), "--ring", "v4")
        assert res.exit_code == 2 and "cache clear" in res.stderr

    def test_truncated_file(self, small_cache):
        small_cache.mkdir()
        (small_cache / "d1_z2_e3.npz").write_bytes(b"not a zip")
        with pytest.raises(CacheCorrupted):
            D1Cache(small_cache).load("z2", 3)

    def test_corrupt_cache_is_claim_error(self, runner, small_cache):
        small_cache.mkdir()
        (small_cache / "d1_v4_e3.npz").write_bytes(b"junk")
        res = invoke(runner, "verify", "--ring", "v4", "--claims", "C-1.18", "--cache-dir", str(small_cache))
        doc = json.loads(res.stdout)
        assert doc["claims"][0]["status"] == "error" and res.exit_code == 2
