from importlib import resources

import pytest

from k2forge.dstein import (CHAIN_FILES, FormalSum, Justification, NoDerivation, ProofChain, format_chain,
                            load_corpus, parse_chains, replay, replay_corpus, solve_step, write_corpus)
from k2forge.galg import algebra

SAMPLE = """
@ring d4
@chain swap
<s+1, s> => -<s, s+1> ; R1(s+1, s)   # antisymmetry
-<s, s+1> => -<s, s+1> ; eval
"""


def test_parse_and_replay_sample():
    (chain,) = parse_chains(SAMPLE)
    assert chain.name == "swap" and len(chain.steps) == 2
    assert replay(chain).ok


def test_format_round_trip():
    chains = load_corpus(["square_symbols", "conjugation"])
    for cs in chains.values():
        for c in cs:
            again = parse_chains(format_chain(c), ring=c.ring)[0]
            assert again.steps == c.steps


@pytest.mark.parametrize("text", ["eval", "R1(s, t)", "-2*R2(s+1, s, t) + R4(0, s, t)", "- R1(1, 0)"])
def test_justification_round_trip(d4, text):
    j = Justification.parse(d4, text)
    assert Justification.parse(d4, j.format(d4)) == j


@pytest.mark.parametrize("text", ["R1(s, t", "R1(s) R2(t)", "3"])
def test_justification_parse_errors(d4, text):
    with pytest.raises(ValueError):
        Justification.parse(d4, text)


class TestReplayFailures:
    def test_broken_link(self, d4):
        c = ProofChain("d4", "gap")
        c.add("-<s, s+1>", "R1(s+1, s)", lhs="<s+1, s>")
        c.steps.append(c.steps[0])
        res = replay(c)
        assert not res.ok and res.failing_step == 1

    def test_wrong_eval(self):
        c = ProofChain("d4", "bad").add("<s+t, t>", "eval", lhs="<t, s+t>")
        assert "sides differ" in replay(c).message

    def test_invalid_symbol(self):
        c = ProofChain("d4", "bad").add("0", "eval", lhs="<1, 1>")
        assert "not a symbol" in replay(c).message

    def test_side_condition(self):
        c = ProofChain("d4", "bad").add("0", "ZERO(s, s+t)", lhs="<s, s+t>")
        assert "ZERO" in replay(c).message

    def test_wrong_combination(self):
        c = ProofChain("d4", "bad").add("0", "R1(s, s+t)", lhs="<s, s+t>")
        assert "justification gives" in replay(c).message

    def test_empty(self):
        assert not replay(ProofChain("d4", "empty")).ok

    def test_derived_steps_counted(self):
        c = ProofChain("d4", "z").add("0", "ZERO(0, s)", lhs="<0, s>")
        res = replay(c)
        assert res.ok and res.derived_steps == 1


class TestSolver:
    def test_finds_r1(self, d4):
        a, b = d4.parse("s"), d4.parse("s+t")
        j = solve_step(d4, FormalSum.symbol(d4, a, b), -FormalSum.symbol(d4, b, a), [("R1", (a, b))])
        assert j.terms == ((1, "R1", (a, b)),)

    def test_no_derivation(self, d4):
        a, b = d4.parse("s"), d4.parse("s+t")
        with pytest.raises(NoDerivation):
            solve_step(d4, FormalSum.symbol(d4, a, b), FormalSum.zero(d4), [("R1", (a, b))])

    def test_only_rational(self, d4):
        a = d4.parse("s+t")
        with pytest.raises(NoDerivation, match="rational"):
            solve_step(d4, FormalSum.symbol(d4, a, a), FormalSum.zero(d4), [("R1", (a, a))])

    def test_cancelled_invalid_symbol_rejected(self, v4):
        # DS2(r, s, 1) cancels <r, 1>, but that symbol is undefined when 1 + r is not a unit
        r, s = v4.parse("1+s1+t"), v4.parse("1+s1t")
        with pytest.raises(NoDerivation):
            solve_step(v4, FormalSum.symbol(v4, r, s), FormalSum.zero(v4), [("DS2", (r, s, v4.one))])


class TestCorpus:
    def test_shipped_files_match_builder(self, tmp_path):
        write_corpus(tmp_path)
        base = resources.files("k2forge.dstein") / "chains"
        for name in CHAIN_FILES:
            assert (tmp_path / f"{name}.chain").read_text() == (base / f"{name}.chain").read_text()

    def test_replay_outcomes(self):
        results = replay_corpus()
        failing = {(name, r.chain, r.failing_step) for name, rs in results.items() for r in rs if not r.ok}
        assert failing == {("conjugation", "<s+1, (s+1)t> = <s+1, t(s+1)>", 1),
                           ("generator_reduction", "<u^3, v> = <u^2 v, u>", 3)}
        assert sum(len(rs) for rs in results.values()) == 825

    def test_conjugation_discrepancy_is_an_evaluation(self, d4):
        # e a e^-1 with e = 1 + st + s3t and a = 1 + s is 1 + s again
        a, e = d4.parse("1+s"), d4.parse("1+st+s3t")
        assert d4.prod(e, a, d4.inverse(e)) == a

    def test_counts(self):
        chains = load_corpus()
        assert len(chains["zero_symbols"]) == 512 and len(chains["ideal_symbols"]) == 256
