"""Claims registry, runner and report rendering behind ``k2forge verify``.

A claim is a named check with a fixed expected outcome.  Each returns a
status and a JSON-serialisable evidence payload; failures always carry the
offending values.  Claims that do not apply to the selected ring are
reported as ``skip``.
"""

from __future__ import annotations

import fnmatch
import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .abst import AbelianGroup, case_table, homology, tensor
from .cache import D1Cache
from .dstein import (automorphism_from_images, coinvariants, d1_structure, induced_map, k2_structure,
                     replay_corpus, steinberg_symbol)
from .dstein.corpus import load_corpus
from .dstein.relations import RelationError, instance
from .dstein.symbols import FormalSum
from .galg import GroupAlgebra, algebra
from .matk import stable_range_one_check, w_group, whitehead_chain_all
from .units import (COMMUTATOR_ELEMENTS, UnitGroup, central_subset_check, commutator_equation_system,
                    theta_centrality_check, witness_report)

__all__ = ["Claim", "ClaimRecord", "Context", "REGISTRY", "select", "run", "render_json", "render_markdown",
           "NoClaimsSelected", "UnknownClaim", "RINGS"]

RINGS = ("z2", "z4", "v4", "d4")
STAGES = ("algebra", "units", "matk", "dstein", "abst")


class NoClaimsSelected(ValueError):
    pass


class UnknownClaim(KeyError):
    pass


@dataclass
class Context:
    ring: str
    seed: int = 0
    deep: bool = False
    mod_exp: int = 3
    cache: D1Cache | None = None
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def alg(self) -> GroupAlgebra:
        return algebra(self.ring)

    def memo(self, key: str, fn: Callable):
        with self._lock:
            if key not in self._memo:
                self._memo[key] = fn()
            return self._memo[key]

    def units(self, ring: str | None = None) -> UnitGroup:
        ring = ring or self.ring
        return self.memo(f"units:{ring}", lambda: UnitGroup(algebra(ring)))

    def commutator(self, ring: str | None = None):
        ring = ring or self.ring
        return self.memo(f"comm:{ring}", lambda: self.units(ring).commutator_subgroup())

    def d1(self, ring: str | None = None):
        ring = ring or self.ring

        def compute():
            alg = algebra(ring)
            if self.cache is not None:
                return self.cache.get(alg, self.mod_exp)
            return d1_structure(alg, e=self.mod_exp)

        return self.memo(f"d1:{ring}", compute)


@dataclass
class ClaimRecord:
    id: str
    paper_ref: str
    ring: str
    status: str
    evidence: dict
    runtime_ms: int


@dataclass(frozen=True)
class Claim:
    id: str
    statement: str
    stage: str
    rings: tuple[str, ...]
    check: Callable[[Context], tuple[bool, dict]]
    deep: bool = False


def _g(group: AbelianGroup) -> list[int]:
    return list(group.invariant_factors)


def _labels(alg: GroupAlgebra, xs) -> list[str]:
    return sorted(alg.format(int(x)) for x in xs)


# --- algebra / units ------------------------------------------------------

_UNIT_COUNT = {"z2": 2, "z4": 8, "v4": 8, "d4": 128}


def _local(ctx: Context):
    alg = ctx.alg
    nonunits = alg.nonunits
    aug_zero = [x for x in range(alg.size) if alg.augmentation(x) == 0]
    return alg.is_local(), {"is_local": alg.is_local(), "nonunits": int(len(nonunits)),
                            "nonunits_are_augmentation_kernel": sorted(map(int, nonunits)) == aug_zero}


def _unit_count(ctx: Context):
    n = int(len(ctx.alg.units))
    return n == _UNIT_COUNT[ctx.ring], {"units": n, "expected": _UNIT_COUNT[ctx.ring]}


def _unit_orders(ctx: Context):
    ms = ctx.units().order_multiset()
    ok = set(ms) <= {1, 2, 4} and (ctx.ring != "d4" or set(ms) == {1, 2, 4})
    return ok, {"order_multiset": {str(k): v for k, v in sorted(ms.items())}}


def _l2_commutator(ctx: Context):
    alg, comm = ctx.alg, ctx.commutator()
    got = _labels(alg, comm.encodings())
    want = _labels(alg, (alg.parse(x) for x in COMMUTATOR_ELEMENTS))
    struct = _g(comm.structure())
    ok = got == want and struct == [2, 2, 2]
    ev = {"elements": got, "structure": struct}
    if not ok:
        ev["expected"] = want
    return ok, ev


def _l2_central(ctx: Context):
    sub, central = central_subset_check(ctx.alg, ctx.units())
    ok = central and len(sub.members) == 16
    return ok, {"size": len(sub.members), "central": central}


def _l2_witnesses(ctx: Context):
    rep = witness_report(ctx.alg, ctx.commutator())
    bad = [asdict(r) for r in rep if not (r.matches and r.in_commutator)]
    ev = {"pairs": len(rep), "mismatches": bad}
    return not bad, ev


def _l2_system(ctx: Context):
    alg = ctx.alg
    ok = commutator_equation_system(alg, ctx.commutator())
    target = alg.parse("1+t+s2t")
    return ok, {"assignments": 64, "no_solution_and_excluded": ok,
                "target": alg.format(target), "target_in_commutator": ctx.commutator().contains_element(target)}


def _l2_theta(ctx: Context):
    ok, bad = theta_centrality_check(ctx.alg, ctx.commutator())
    return ok, {"theta_central_and_in_commutator": ok, "counterexample": bad}


# --- matrices ---------------------------------------------------------------

def _matrix_chains(ctx: Context):
    alg = ctx.alg
    out = whitehead_chain_all(alg, ctx.commutator())
    ok = (out["pairs"] == 49152 and not out["first_chain_failures"] and not out["second_chain_failures"]
          and not out["values_outside_commutator"])
    ev = dict(out)
    ev["values"] = _labels(alg, out["values"])
    ev["values_outside_commutator"] = _labels(alg, out["values_outside_commutator"])
    if out["first_failure"]:
        ev["first_failure"] = [alg.format(x) for x in out["first_failure"]]
    return ok, ev


# --- D_1 and K_2 ----------------------------------------------------------------

_D1_SMALL = {"z2": [], "z4": [], "v4": [2, 2, 2]}


def _stable_certificates(cert: dict) -> dict:
    """Certificate payload without wall-clock fields."""
    if isinstance(cert, dict):
        return {k: _stable_certificates(v) for k, v in sorted(cert.items()) if k != "seconds"}
    return cert


def _d1_small(ctx: Context):
    d1 = d1_structure(ctx.alg, e=ctx.mod_exp, dense=True)
    cert = _stable_certificates(d1.certificates)
    dense = cert.get("dense", {})
    got = _g(d1.group)
    ok = got == _D1_SMALL[ctx.ring] and all(v == str(d1.group) for v in dense.values())
    return ok, {"d1": got, "expected": _D1_SMALL[ctx.ring], "certificates": cert}


def _headline(ctx: Context):
    d1 = ctx.d1()
    k2 = k2_structure(d1, ctx.commutator())
    cert = _stable_certificates(d1.certificates)
    ok = (_g(d1.group) == [2, 2, 4] and _g(k2.k2) == [2] and not k2.phi_rows.get("violations")
          and cert.get("rows_not_killed") == 0)
    return ok, {"d1": _g(d1.group), "expected_d1": [2, 2, 4], "k2": _g(k2.k2), "expected_k2": [2],
                "phi_image_order": k2.image_order, "phi_rows": k2.phi_rows.get("rows"),
                "phi_violations": k2.phi_rows.get("violations"), "certificates": cert}


# --- proof replay -------------------------------------------------------------

def _replay(ctx: Context):
    corpus = load_corpus()
    results, failing, total, derived = {}, [], 0, 0
    for name, chains in replay_corpus().items():
        mine = [r for r, c in zip(chains, corpus[name]) if c.ring == ctx.ring]
        if not mine:
            continue
        total += len(mine)
        derived += sum(r.derived_steps for r in mine)
        results[name] = {"chains": len(mine), "failed": sum(not r.ok for r in mine)}
        failing += [{"file": name, "chain": r.chain, "step": r.failing_step, "message": r.message}
                    for r in mine if not r.ok]
    if not total:
        return None, {"reason": "no chains for this ring"}
    return not failing, {"chains": total, "derived_steps": derived, "files": results, "failing": failing}


# --- homology -------------------------------------------------------------------

_H_VALUES = [
    ((2, 2), 1, (2, 2)), ((2, 2), 2, (2,)),
    ((2, 2, 2), 1, (2, 2, 2)), ((2, 2, 2), 2, (2, 2, 2)),
    ((4, 4), 1, (4, 4)), ((4, 4), 2, (4,)),
    ((2, 2, 2, 2), 2, (2,) * 6), ((2, 2, 4), 2, (2, 2, 2)), ((2, 2, 2, 2, 2), 2, (2,) * 10),
    ((2, 2, 2, 4), 2, (2,) * 6), ((2, 4, 4), 2, (2, 2, 4)),
]


def _homology(ctx: Context):
    rows, bad = [], []
    for group, n, want in _H_VALUES:
        got = homology(AbelianGroup.from_factors(group), n)
        rows.append({"group": list(group), "n": n, "value": _g(got)})
        if got != AbelianGroup.from_factors(want):
            bad.append({"group": list(group), "n": n, "value": _g(got), "expected": list(want)})
    if tensor(AbelianGroup((4,)), AbelianGroup((4,))) != AbelianGroup((4,)):
        bad.append({"tensor": "Z4 x Z4"})
    table = [{"case": r.case, "k2": _g(r.k2), "d1": _g(r.d1), "h2": _g(r.h2), "verdict": r.recorded_verdict}
             for r in case_table()]
    return not bad, {"values": rows, "mismatches": bad, "case_table": table}


# --- V4 coinvariants --------------------------------------------------------------

def _coinvariants(ctx: Context):
    alg = algebra("v4")
    d1 = ctx.d1("v4")
    P = alg.parse
    x = d1.evaluate(steinberg_symbol(alg, P("s1"), P("1+(1+s1)*t")))
    y = d1.evaluate(steinberg_symbol(alg, P("s1"), P("t")))
    z = d1.evaluate(steinberg_symbol(alg, P("1+(1+s1)*t"), P("t")))
    span = {tuple((i * a + j * b + k * c) % 2 for a, b, c in zip(x, y, z))
            for i in (0, 1) for j in (0, 1) for k in (0, 1)}
    basis = len(span) == 8 and _g(d1.group) == [2, 2, 2]
    alpha = automorphism_from_images(alg, {"s1": "t", "t": "s1t"})
    f = induced_map(d1, d1, alpha)
    yz = tuple((a + b) % 2 for a, b in zip(y, z))
    image_x = f(x)
    co = coinvariants(d1, [f])
    ok = basis and image_x == yz and co.difference_subgroup_order == 4 and _g(co.group) == [2]
    return ok, {"x": list(x), "y": list(y), "z": list(z), "basis": basis, "image_of_x": list(image_x),
                "y_plus_z": list(yz), "difference_subgroup_order": co.difference_subgroup_order,
                "coinvariants": _g(co.group)}


# --- cross checks ---------------------------------------------------------------

def _cross(ctx: Context):
    alg = ctx.alg
    comm = ctx.commutator()
    w2 = w_group(alg, 2, ctx.units())
    w_ok = w2.members == comm.members
    sr_ok, sr = stable_range_one_check(alg)
    d1 = ctx.d1()
    rng = np.random.default_rng(ctx.seed)
    m = alg.mul
    checked, failures = 0, []
    while checked < 10_000:
        r, s, t = (int(v) for v in rng.integers(0, alg.size, 3))
        if m(r, s) != m(s, r) or m(r, t) != m(t, r):
            continue
        try:
            row = instance(alg, "DS2", r, s, t).row
        except RelationError:
            continue
        checked += 1
        if not d1.is_zero(row):
            failures.append([alg.format(v) for v in (r, s, t)])
    P = alg.parse
    gen = d1.evaluate(FormalSum.symbol(alg, P("(s+1)^2"), P("t+1")))
    twice = d1.is_multiple(gen, 2)
    ok = w_ok and sr_ok and not failures and twice
    return ok, {"w2_equals_commutator": w_ok, "stable_range_one": sr_ok, "comaximal_pairs": sr.get("comaximal_pairs"),
                "ds2_samples": checked, "ds2_failures": failures[:5], "ds2_failure_count": len(failures),
                "generator": "<(s+1)^2, t+1>", "generator_coords": list(gen), "generator_order": d1.order_of(gen),
                "generator_in_2D1": twice, "d1": _g(d1.group)}


REGISTRY: tuple[Claim, ...] = (
    Claim("C-2.2", "the group algebra is local", "algebra", RINGS, _local),
    Claim("C-2.10", "number of units", "algebra", RINGS, _unit_count),
    Claim("C-2.11", "unit orders lie in {1, 2, 4}", "units", RINGS, _unit_orders),
    Claim("C-L2-commutator", "[R*, R*] is the listed Z2^3", "units", ("d4",), _l2_commutator),
    Claim("C-L2-central", "(s+1)^2 R + 1 is central of size 16", "units", ("d4",), _l2_central),
    Claim("C-L2-witnesses", "listed values of (1+ab)(1+ba)^3", "units", ("d4",), _l2_witnesses),
    Claim("C-L2-system", "ab + ba = (s2t + t) ba has no solution; 1+t+s2t outside [R*, R*]", "units",
          ("d4",), _l2_system),
    Claim("C-L2-theta", "(1+ab)(1+ba)^-1 is central and lies in [R*, R*]", "units", ("d4",), _l2_theta),
    Claim("C-M1", "elementary-matrix chains give diag(1, (1+ab)(1+ba)^3)", "matk", ("d4",), _matrix_chains),
    Claim("C-D1-small", "D_1 of the small algebras", "dstein", ("z2", "z4", "v4"), _d1_small),
    Claim("C-3.1", "D_1 = Z4+Z2+Z2 and K_2 = Z2 for F_2[D4]", "dstein", ("d4",), _headline, deep=True),
    Claim("C-PR", "symbol rewriting chains replay", "dstein", ("d4", "v4"), _replay),
    Claim("C-1.18", "coinvariants of D_1(F_2[V4]) under the 3-cycle", "dstein", ("v4",), _coinvariants),
    Claim("C-X", "cross-consistency of W(R), DS2, 2 D_1 and stable range", "dstein", ("d4",), _cross, deep=True),
    Claim("C-H2", "Kunneth homology values and the case table", "abst", RINGS, _homology),
)


def select(pattern: str) -> list[Claim]:
    """Claims whose id matches any comma-separated glob; ``all`` selects all."""
    pats = [p.strip() for p in pattern.split(",") if p.strip()]
    if not pats:
        raise NoClaimsSelected("no claims selected")
    if "all" in pats:
        return list(REGISTRY)
    chosen = [c for c in REGISTRY if any(fnmatch.fnmatchcase(c.id, p) for p in pats)]
    for p in pats:
        if not any(ch in p for ch in "*?[") and not any(c.id == p for c in REGISTRY):
            raise UnknownClaim(f"unknown claim id {p!r}")
    if not chosen:
        raise NoClaimsSelected("no claims selected")
    return chosen


def _execute(claim: Claim, ctx: Context) -> ClaimRecord:
    t0 = time.perf_counter()
    if ctx.ring not in claim.rings:
        status, ev = "skip", {"reason": f"not applicable to {ctx.ring}"}
    elif claim.deep and not ctx.deep:
        status, ev = "skip", {"reason": "needs --deep"}
    else:
        try:
            ok, ev = claim.check(ctx)
            status = "skip" if ok is None else ("pass" if ok else "fail")
        except Exception as exc:  # reported as a claim error, never swallowed silently
            status, ev = "error", {"exception": type(exc).__name__, "message": str(exc)}
    ms = int(round((time.perf_counter() - t0) * 1000))
    return ClaimRecord(claim.id, claim.statement, ctx.ring, status, json.loads(json.dumps(ev, default=str)), ms)


def run(claims: list[Claim], ctx: Context, jobs: int = 1) -> list[ClaimRecord]:
    """Execute claims stage by stage; claims within a stage may run in parallel."""
    records: dict[str, ClaimRecord] = {}
    for stage in STAGES:
        batch = [c for c in claims if c.stage == stage]
        if jobs > 1 and len(batch) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                for rec in pool.map(lambda c: _execute(c, ctx), batch):
                    records[rec.id] = rec
        else:
            for c in batch:
                records[c.id] = _execute(c, ctx)
    return [records[c.id] for c in claims]


def summary(records: list[ClaimRecord]) -> dict:
    out = {"total": len(records)}
    for s in ("pass", "fail", "skip", "error"):
        out[s] = sum(r.status == s for r in records)
    return out


def exit_code(records: list[ClaimRecord]) -> int:
    s = summary(records)
    if s["error"]:
        return 2
    return 1 if s["fail"] else 0


def render_json(records: list[ClaimRecord], ring: str) -> str:
    doc = {"tool_version": __version__, "ring": ring, "claims": [asdict(r) for r in records],
           "summary": summary(records)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_markdown(records: list[ClaimRecord], ring: str) -> str:
    lines = [f"# k2forge {__version__} report for {ring}", "",
             "| claim | status | statement | runtime (ms) | evidence |", "|---|---|---|---|---|"]
    for r in records:
        ev = json.dumps(r.evidence, sort_keys=True)
        if len(ev) > 160:
            ev = ev[:157] + "..."
        lines.append(f"| {r.id} | {r.status} | {r.paper_ref} | {r.runtime_ms} | `{ev.replace('|', '/')}` |")
    s = summary(records)
    lines += ["", f"total {s['total']}: {s['pass']} pass, {s['fail']} fail, {s['skip']} skip, {s['error']} error", ""]
    return "\n".join(lines)
