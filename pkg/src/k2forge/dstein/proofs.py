"""Replay of symbol-rewriting chains.

A chain is a list of steps ``lhs => rhs ; justification``.  A justification
is either ``eval`` (both sides are the same formal sum once the ring
arguments are evaluated) or an integer combination of relation instances,
e.g. ``R2(s+1, s, t) - 2*R1(s, t)``.  A step is accepted when every cited
instance meets its side conditions and ``lhs - rhs`` equals the combination
exactly.  Consecutive steps must share their middle sum.

Text format, one step per line::

    @ring d4
    @chain name of the chain
    <s+1, s> => <s, s+1> ; R1(s+1, s)   # trailing comments allowed

DS2 and ZERO instances are accepted but flagged as derived; the
presentation used for D_1 never contains them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..abst import smith_form
from ..galg import GroupAlgebra, algebra
from .relations import DERIVED_KINDS, RelationError, instance
from .symbols import FormalSum, _split_top

__all__ = [
    "Justification",
    "ProofStep",
    "ProofChain",
    "ReplayResult",
    "replay",
    "parse_chains",
    "format_chain",
    "solve_step",
    "NoDerivation",
]


class NoDerivation(ValueError):
    pass


@dataclass(frozen=True)
class Justification:
    """``eval`` when ``terms`` is empty, else a sum of coef * kind(params)."""

    terms: tuple[tuple[int, str, tuple[int, ...]], ...] = ()

    @property
    def is_eval(self) -> bool:
        return not self.terms

    @property
    def derived(self) -> bool:
        return any(kind in DERIVED_KINDS for _, kind, _ in self.terms)

    def row(self, alg: GroupAlgebra) -> FormalSum:
        out = FormalSum.zero(alg)
        for coef, kind, params in self.terms:
            out = out + coef * instance(alg, kind, *params).row
        return out

    def format(self, alg: GroupAlgebra) -> str:
        if self.is_eval:
            return "eval"
        parts = []
        for coef, kind, params in self.terms:
            sign = "-" if coef < 0 else "+"
            mag = "" if abs(coef) == 1 else f"{abs(coef)}*"
            parts.append(f"{sign} {mag}{kind}({', '.join(alg.format(p) for p in params)})")
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    @classmethod
    def parse(cls, alg: GroupAlgebra, text: str) -> "Justification":
        text = text.strip()
        if text.lower() == "eval":
            return cls()
        terms = []
        pat = re.compile(r"\s*([+-])?\s*(?:(\d+)\s*\*)?\s*([A-Za-z][A-Za-z0-9]*)\s*\(")
        pos, first = 0, True
        while pos < len(text):
            m = pat.match(text, pos)
            if not m or (not first and not m.group(1)):
                raise ValueError(f"cannot parse justification {text!r} at {pos}")
            depth, i = 1, m.end()
            while depth:
                if i >= len(text):
                    raise ValueError(f"unbalanced parentheses in {text!r}")
                depth += {"(": 1, ")": -1}.get(text[i], 0)
                i += 1
            params = tuple(alg.parse(p) for p in _split_top(text[m.end():i - 1]))
            coef = (-1 if m.group(1) == "-" else 1) * int(m.group(2) or 1)
            terms.append((coef, m.group(3).upper(), params))
            pos, first = i, False
            while pos < len(text) and text[pos].isspace():
                pos += 1
        return cls(tuple(terms))


@dataclass(frozen=True)
class ProofStep:
    lhs: FormalSum
    rhs: FormalSum
    justification: Justification


@dataclass
class ProofChain:
    ring: str
    name: str
    steps: list[ProofStep] = field(default_factory=list)

    @property
    def algebra(self) -> GroupAlgebra:
        return algebra(self.ring)

    @property
    def conclusion(self) -> tuple[FormalSum, FormalSum]:
        return self.steps[0].lhs, self.steps[-1].rhs

    def add(self, rhs: FormalSum | str, justification: Justification | str = "eval",
            lhs: FormalSum | str | None = None) -> "ProofChain":
        """Append a step; ``lhs`` defaults to the previous right-hand side."""
        alg = self.algebra
        if isinstance(rhs, str):
            rhs = FormalSum.parse(alg, rhs)
        if isinstance(justification, str):
            justification = Justification.parse(alg, justification)
        if lhs is None:
            if not self.steps:
                raise ValueError("first step needs an explicit left-hand side")
            lhs = self.steps[-1].rhs
        elif isinstance(lhs, str):
            lhs = FormalSum.parse(alg, lhs)
        self.steps.append(ProofStep(lhs, rhs, justification))
        return self


@dataclass
class ReplayResult:
    chain: str
    ok: bool
    steps: int
    derived_steps: int
    failing_step: int | None = None
    message: str = ""


def replay(chain: ProofChain) -> ReplayResult:
    """Check every step of ``chain``; stops at the first failure."""
    alg = chain.algebra
    derived = 0
    if not chain.steps:
        return ReplayResult(chain.name, False, 0, 0, None, "empty chain")
    for i, step in enumerate(chain.steps):
        fail = lambda msg: ReplayResult(chain.name, False, len(chain.steps), derived, i, msg)
        if i and step.lhs != chain.steps[i - 1].rhs:
            return fail("step does not start where the previous one ended")
        for side in (step.lhs, step.rhs):
            bad = side.invalid_symbols()
            if bad:
                a, b = bad[0]
                return fail(f"<{alg.format(a)}, {alg.format(b)}> is not a symbol (1+ab not a unit)")
        diff = step.lhs - step.rhs
        just = step.justification
        if just.is_eval:
            if diff:
                return fail(f"sides differ by {diff.format()}")
            continue
        try:
            row = just.row(alg)
        except RelationError as exc:
            return fail(str(exc))
        if diff != row:
            return fail(f"lhs - rhs = {diff.format()} but the justification gives {row.format()}")
        derived += just.derived
    return ReplayResult(chain.name, True, len(chain.steps), derived)


def parse_chains(text: str, ring: str | None = None) -> list[ProofChain]:
    """Read chains in the text format (see module docstring)."""
    chains: list[ProofChain] = []
    current: ProofChain | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@ring"):
            ring = line.split(None, 1)[1].strip()
            continue
        if line.startswith("@chain"):
            if ring is None:
                raise ValueError(f"line {lineno}: @chain before @ring")
            current = ProofChain(ring, line.split(None, 1)[1].strip() if " " in line else f"chain{len(chains)}")
            chains.append(current)
            continue
        if current is None:
            raise ValueError(f"line {lineno}: step outside a chain")
        try:
            sides, just = line.rsplit(";", 1)
            lhs, rhs = sides.split("=>")
        except ValueError:
            raise ValueError(f"line {lineno}: expected '<sum> => <sum> ; <justification>'") from None
        alg = current.algebra
        current.steps.append(ProofStep(FormalSum.parse(alg, lhs), FormalSum.parse(alg, rhs),
                                       Justification.parse(alg, just)))
    return chains


def format_chain(chain: ProofChain) -> str:
    alg = chain.algebra
    lines = [f"@chain {chain.name}"]
    for s in chain.steps:
        lines.append(f"{s.lhs.format()} => {s.rhs.format()} ; {s.justification.format(alg)}")
    return "\n".join(lines)


def load_chain_file(path: str | Path) -> list[ProofChain]:
    return parse_chains(Path(path).read_text())


def solve_step(alg: GroupAlgebra, lhs: FormalSum, rhs: FormalSum,
               candidates: Iterable[tuple[str, Sequence[int]]]) -> Justification:
    """Find integers k_i with lhs - rhs = sum k_i * row_i over the candidate
    instances (an authoring aid; replay re-checks the result)."""
    target = lhs - rhs
    if not target:
        return Justification()
    inst = []
    for kind, params in candidates:
        try:
            inst.append((kind, tuple(int(p) for p in params), instance(alg, kind, *params).row))
        except RelationError:
            continue
    keys = sorted(set(target.terms) | {k for _, _, r in inst for k in r.terms})
    pos = {k: i for i, k in enumerate(keys)}
    if not inst:
        raise NoDerivation("no admissible candidate instances")
    A = np.zeros((len(inst), len(keys)), dtype=np.int64)
    for i, (_, _, r) in enumerate(inst):
        for k, v in r.terms.items():
            A[i, pos[k]] = v
    t = np.zeros(len(keys), dtype=object)
    for k, v in target.terms.items():
        t[pos[k]] = v
    sf = smith_form(A)
    tq = t.dot(sf.Q)
    y = [0] * len(inst)
    for i in range(len(keys)):
        d = sf.diag[i] if i < len(sf.diag) else 0
        if d == 0:
            if tq[i] != 0:
                raise NoDerivation("difference is not in the span of the candidates")
        else:
            if tq[i] % d:
                raise NoDerivation("difference is only a rational combination of the candidates")
            y[i] = tq[i] // d
    x = np.array(y, dtype=object).dot(sf.P)
    terms = tuple((int(c), kind, params) for c, (kind, params, _) in zip(x, inst) if c)
    just = Justification(terms)
    if just.row(alg) != target:
        raise AssertionError("solver produced a wrong combination")
    return just
