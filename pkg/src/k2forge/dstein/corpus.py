"""Builder for the shipped chain corpus (``chains/*.chain``).

Each chain rewrites symbol sums step by step.  Where a step holds, its
justification is the integer combination found by :func:`solve_step` among
the instances named at that step.  Where no combination exists, the cited
instance (or ``eval``) is written verbatim so that replay reports the step.

Run ``python -m k2forge.dstein.corpus`` to regenerate the files.
"""

from __future__ import annotations

from importlib import resources
from itertools import product
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..galg import GroupAlgebra, algebra
from .proofs import (Justification, NoDerivation, ProofChain, ProofStep, ReplayResult, format_chain,
                     parse_chains, replay, solve_step)
from .symbols import FormalSum

__all__ = ["build_corpus", "write_corpus", "load_corpus", "replay_corpus", "CHAIN_FILES"]

CHAIN_FILES = ("zero_symbols", "ideal_symbols", "square_symbols", "absorption", "conjugation",
               "generator_reduction", "quotient_v4")

Cand = tuple[str, Sequence]


class _Builder:
    def __init__(self, ring: str, name: str, start: str | FormalSum):
        self.alg = algebra(ring)
        self.chain = ProofChain(ring, name)
        self.current = self._sum(start)

    def _sum(self, s: str | FormalSum) -> FormalSum:
        return s if isinstance(s, FormalSum) else FormalSum.parse(self.alg, s)

    def _params(self, params: Sequence) -> tuple[int, ...]:
        return tuple(self.alg.parse(p) if isinstance(p, str) else int(p) for p in params)

    def to(self, rhs: str | FormalSum, *cands: Cand, cite: str | None = None) -> "_Builder":
        """Append ``current => rhs``; ``cite`` is the fallback justification."""
        rhs = self._sum(rhs)
        try:
            just = solve_step(self.alg, self.current, rhs, [(k, self._params(p)) for k, p in cands])
        except NoDerivation:
            if cite is None:
                raise
            just = Justification.parse(self.alg, cite)
        self.chain.steps.append(ProofStep(self.current, rhs, just))
        self.current = rhs
        return self

    def done(self) -> ProofChain:
        return self.chain


def _sym(alg: GroupAlgebra, a: int, b: int, k: int = 1) -> FormalSum:
    return FormalSum.symbol(alg, a, b, k)


def _zero_symbols() -> list[ProofChain]:
    alg = algebra("d4")
    out = []
    for x in range(alg.size):
        fx = alg.format(x)
        out.append(_Builder("d4", f"<0, {fx}> vanishes", f"<0, {fx}>")
                   .to("0", ("R2", (0, 0, x)), ("R2", (0, 0, 0))).done())
        out.append(_Builder("d4", f"<{fx}, 0> vanishes", f"<{fx}, 0>")
                   .to("0", ("R2", (x, 0, 0)), ("R2", (0, 0, 0))).done())
    return out


def _ideal_symbols() -> list[ProofChain]:
    """<i, j> = 0 for all i, j in I = (1 + s2)R.

    With e = 1 + s2 = u^2 (u = s + 1) every symbol is moved to 2<u, v> where
    v = u^3 (k1 + k2 s) + u^3 (l1 + l2 s) t; each nonzero half h of v is then
    removed by 2<u, h> = <u, u h^2> = <u, 0>.
    """
    alg = algebra("d4")
    m, P = alg.mul, alg.parse
    e, u = P("1+s2"), P("s+1")
    rotations = P("1+s+s2+s3")
    reps = [P(f"{k1}+{k2}*s+({l1}+{l2}*s)*t") for k1 in (0, 1) for k2 in (0, 1) for l1 in (0, 1) for l2 in (0, 1)]
    out = []
    for a in reps:
        for b in reps:
            i, j = m(e, a), m(e, b)
            bld = _Builder("d4", f"<{alg.format(i)}, {alg.format(j)}> vanishes", _sym(alg, i, j))
            w = m(a, j)
            bld.to(_sym(alg, e, w) - _sym(alg, m(j, e), a), ("R2", (e, a, j)))
            bld.to(_sym(alg, e, w), ("ZERO", (0, a)))
            bld.to(_sym(alg, w, e, -1), ("R1", (e, w)))
            v = m(u, w)
            bld.to(_sym(alg, v, u, -2), ("R2", (w, u, u)))
            bld.to(_sym(alg, u, v, 2), ("R1", (v, u)))
            halves = [h for h in (v & rotations, v & ~rotations) if h]
            if len(halves) == 2:
                bld.to(sum((_sym(alg, u, h, 2) for h in halves), FormalSum.zero(alg)),
                       ("DS2", (u, halves[0], halves[1])))
            for h in halves:
                rest = bld.current - _sym(alg, u, h, 2)
                bld.to(rest + _sym(alg, u, m(u, m(h, h))), ("DS2", (u, h, h)))
                bld.to(rest, ("ZERO", (u, 0)))
            if bld.current:
                bld.to("0", ("ZERO", (u, 0)))
            out.append(bld.done())
    return out


def _square_symbols() -> list[ProofChain]:
    """<x, 1+x> = <x, x> for the three non-central elements x with x^4 = 0."""
    alg = algebra("d4")
    m = alg.mul
    out = []
    for label in ("s+t", "s+st", "t+st"):
        x = alg.parse(label)
        x2, x3 = alg.power(x, 2), alg.power(x, 3)
        one = alg.one
        s = lambda a, b, k=1: _sym(alg, a, b, k)
        bld = _Builder("d4", f"<x, 1+x> = <x, x> for x = {label}", s(x, one ^ x))
        # <x, x^2> = 0 from 3<x^2, x> = 0 and 2<x^2, x> = <x^2, x^4> = 0
        bld.to(s(x, one ^ x) + s(x, x2), ("R1", (x, x2)), ("R2", (x, x, x)), ("DS2", (x2, x, x)),
               ("ZERO", (x2, 0)))
        bld.to(s(x, one ^ x ^ x2 ^ m(m(x, one ^ x), x2)), ("DS2", (x, one ^ x, x2)))
        bld.to(s(x, one ^ x ^ x2) + s(x, x3), ("DS2", (x, one ^ x ^ x2, x3)), ("ZERO", (x, 0)))
        # <x, x^3> = 2<x, x> - ... and 2<x, x> = 0
        bld.to(s(x, one ^ x ^ x2), ("DS2", (x, x, x)), ("R1", (x, x)), ("ZERO", (x, 0)))
        bld.to(s(x, one) + s(x, x), ("DS2", (x, one, x)))
        bld.to(s(x, x), ("R2", (x, one, one)))
        out.append(bld.done())
    return out


def _absorption(samples: int = 48, seed: int = 0) -> list[ProofChain]:
    """<r1, r2 + i> = <r1, r2> + <r1, i (1 + r1 r2)^-1> for commuting r1, r2
    with 1 + r1 r2 a unit and i in I, on seeded samples."""
    alg = algebra("d4")
    m, P = alg.mul, alg.parse
    ideal = sorted({m(P("1+s2"), r) for r in range(alg.size)})
    rng = np.random.default_rng(seed)
    out: list[ProofChain] = []
    while len(out) < samples:
        r1, r2 = (int(v) for v in rng.integers(0, alg.size, 2))
        i = ideal[int(rng.integers(1, len(ideal)))]
        if m(r1, r2) != m(r2, r1) or not alg.is_unit(alg.one ^ m(r1, r2)):
            continue
        ii = m(i, alg.inverse(alg.one ^ m(r1, r2)))
        f = alg.format
        bld = _Builder("d4", f"absorb {f(i)} into <{f(r1)}, {f(r2)}>",
                       _sym(alg, r1, r2) + _sym(alg, r1, ii))
        bld.to(_sym(alg, r1, r2 ^ i), ("DS2", (r1, r2, ii)))
        out.append(bld.done())
    return out


def _ideal_candidates(alg: GroupAlgebra, i: int, j: int) -> list[Cand]:
    chain = next(c for c in _ideal_symbols() if c.steps[0].lhs == _sym(alg, i, j))
    return [(kind, params) for step in chain.steps for _, kind, params in step.justification.terms]


def _conjugation() -> list[ProofChain]:
    """<u, u t> = <u, t u> for u = s + 1, read through one R4 instance.

    With e = 1 + (u t) u, the middle symbol of R4(u, u t, t u) is
    <e u e^-1, (u t + t u) e^-1>.  The chain evaluates it to
    <1+s+s2+s3, st+s3t> and then uses that both arguments lie in I.
    """
    alg = algebra("d4")
    P = alg.parse
    u, ut, tu = P("s+1"), P("(s+1)*t"), P("t*(s+1)")
    eps = alg.one ^ alg.mul(ut, u)
    ei = alg.inverse(eps)
    mid = _sym(alg, alg.prod(eps, u, ei), alg.mul(ut ^ tu, ei))
    wrong = _sym(alg, P("1+s+s2+s3"), P("st+s3t"))
    bld = _Builder("d4", "<s+1, (s+1)t> = <s+1, t(s+1)>", _sym(alg, u, ut) - _sym(alg, u, tu))
    bld.to(-mid, ("R4", (u, ut, tu)))
    bld.to(-wrong, cite="eval")
    bld.to("0", *_ideal_candidates(alg, P("1+s+s2+s3"), P("st+s3t")))
    return [bld.done()]


def _generator_reduction() -> list[ProofChain]:
    """The relative generators <u^3, v> and <u^2, u> (u = s+1, v = t+1)."""
    alg = algebra("d4")
    m, P = alg.mul, alg.parse
    u, v = P("s+1"), P("t+1")
    u2, u3 = alg.power(u, 2), alg.power(u, 3)
    s = lambda a, b, k=1: _sym(alg, a, b, k)
    u2v, uv = m(u2, v), m(u, v)
    a = _Builder("d4", "<u^3, v> = <u^2 v, u>", s(u3, v))
    a.to(s(v, u3, -1), ("R1", (u3, v)))
    a.to(s(m(v, u2), u, -1) - s(uv, u2), ("R2", (v, u2, u)))
    a.to(s(u2v, u, -1) + s(u2, uv), ("R1", (uv, u2)))
    a.to(s(u2v, u, -1), cite="eval")
    a.to(s(u2v, u), ("DS2", (u2v, u, u)), ("ZERO", (u2v, 0)))
    b = _Builder("d4", "<u^2, u> vanishes", s(u2, u))
    b.to(s(u, u2, -1), ("R1", (u2, u)))
    b.to("0", ("R2", (u, u, u)), ("R1", (u2, u)), ("DS2", (u2, u, u)), ("ZERO", (u2, 0)))
    return [a.done(), b.done()]


def _quotient_v4() -> list[ProofChain]:
    """Images of <x, x> for x in {s+t, s+st, t+st} in D_1(F_2[V_4]) under
    s -> s1, t -> t."""
    alg = algebra("v4")
    P = alg.parse
    s = lambda a, b, k=1: _sym(alg, P(a), P(b), k)
    x = "s1+t"
    a = _Builder("v4", "<s1+t, s1+t> vanishes", s(x, x))
    a.to(s(x, "t") - s(x, "s1"), ("DS2", (x, x, "s1")))
    a.to(s(x, "t", 2), ("DS2", (x, "s1", "t")), ("ZERO", (x, 0)))
    # no short derivation avoids the undefined <t, s1>; search every instance touching x or t
    xs, ts = P(x), P("t")
    pool = [("R1", (p, q)) for p, q in product(range(alg.size), repeat=2)]
    pool += [(k, trip) for k in ("R2", "R4") for trip in product(range(alg.size), repeat=3)
             if xs in trip or ts in trip]
    a.to("0", *pool)

    def unipotent_square(bld: _Builder, y: str) -> None:
        # <y, y> = <y, y> + 2<y, 1> = <y, y+1> + <y, 1> = <y, 0> = 0
        bld.to(s(y, y) + s(y, "1", 2), ("R2", (y, "1", "1")))
        bld.to(s(y, f"{y}+1") + s(y, "1"), ("DS2", (y, y, "1")))
        bld.to(s(y, "0"), ("DS2", (y, f"{y}+1", "1")))
        bld.to("0", ("ZERO", (y, 0)))

    b = _Builder("v4", "<s1+s1t, s1+s1t> vanishes", s("s1+s1t", "s1+s1t"))
    b.to(s("t+1", "t+1") + s("0", "s1"), ("R2", ("s1*(t+1)", "s1", "t+1")))
    b.to(s("t+1", "t+1"), ("ZERO", (0, "s1")))
    unipotent_square(b, "t+1")
    c = _Builder("v4", "<t+s1t, t+s1t> vanishes", s("t+s1t", "t+s1t"))
    c.to(s("s1+1", "s1+1"), ("R2", (0, 0, "t")), ("R2", ("1+s1", "t", "t+s1t")))
    unipotent_square(c, "s1+1")
    return [a.done(), b.done(), c.done()]


_BUILDERS = {
    "zero_symbols": _zero_symbols,
    "ideal_symbols": _ideal_symbols,
    "square_symbols": _square_symbols,
    "absorption": _absorption,
    "conjugation": _conjugation,
    "generator_reduction": _generator_reduction,
    "quotient_v4": _quotient_v4,
}


def build_corpus() -> dict[str, list[ProofChain]]:
    return {name: _BUILDERS[name]() for name in CHAIN_FILES}


def _render(chains: Iterable[ProofChain]) -> str:
    chains = list(chains)
    body = "\n\n".join(format_chain(c) for c in chains)
    return f"# generated by k2forge.dstein.corpus\n@ring {chains[0].ring}\n\n{body}\n"


def write_corpus(directory: str | Path | None = None) -> list[Path]:
    directory = Path(directory) if directory else Path(__file__).with_name("chains")
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, chains in build_corpus().items():
        path = directory / f"{name}.chain"
        path.write_text(_render(chains))
        paths.append(path)
    return paths


def load_corpus(names: Sequence[str] = CHAIN_FILES) -> dict[str, list[ProofChain]]:
    """Parse the shipped chain files."""
    base = resources.files("k2forge.dstein") / "chains"
    return {name: parse_chains((base / f"{name}.chain").read_text()) for name in names}


def replay_corpus(names: Sequence[str] = CHAIN_FILES) -> dict[str, list[ReplayResult]]:
    return {name: [replay(c) for c in chains] for name, chains in load_corpus(names).items()}


if __name__ == "__main__":
    for p in write_corpus():
        print(p)
