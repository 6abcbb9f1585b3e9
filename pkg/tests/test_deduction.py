"""Tests for proof checking and root axiom rewrites."""
import os

import pytest

from src.deduction import (
    Equation,
    axiom_rewrites,
    check_proof,
    check_proof_text,
    parse_proof,
    render_proof,
)
from src.errors import ProofError
from src.terms import LANG_M, decide_equal, parse_cterm, parse_mterm, render_term

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


def read(name: str) -> str:
    with open(os.path.join(FIXTURES, name), 'r', encoding='utf-8') as f:
        return f.read()


class TestCheckProof:
    """Checking proof files."""

    def test_associativity(self, f1):
        eq = check_proof_text(read('assoc.prf'), f1)
        assert isinstance(eq, Equation)
        assert str(eq) == '((x *0 y) *0 x) = (x *0 (y *0 x))'
        assert eq.dim == 1

    def test_exchange_with_symmetry(self, f2):
        eq = check_proof_text(read('exchange.prf'), f2)
        assert str(eq) == '((Y *0 X) *1 (Y1 *0 X1)) = ((Y *1 Y1) *0 (X *1 X1))'

    def test_wrong_rule(self, f1):
        text = read('assoc.prf').replace('associativity', 'exchange')
        with pytest.raises(ProofError, match=r'step 1 \(line 2\): not an instance of exchange'):
            check_proof_text(text, f1)

    def test_rule_of_the_other_language(self, f1):
        with pytest.raises(ProofError, match="unknown rule 'commutativity'"):
            check_proof_text('1. commutativity: x = x\n', f1)

    def test_failing_premise_path(self, f2):
        text = read('exchange.prf').replace(
            '= ((Y *0 X) *1 (Y1 *0 X1))', '= ((Y *0 X1) *1 (Y1 *0 X))', 1
        )
        with pytest.raises(ProofError) as info:
            check_proof_text(text, f2)
        assert info.value.step == 1
        assert info.value.path == (0,)

    def test_premise_must_come_first(self, f1):
        with pytest.raises(ProofError, match='premise 2 is not an earlier step'):
            check_proof_text('1. symmetry [2]: x = x\n2. reflexivity: x = x\n', f1)

    def test_empty_proof(self, f1):
        with pytest.raises(ProofError, match='empty proof'):
            check_proof_text('', f1)

    def test_transitivity_must_chain(self, f1):
        text = (
            '1. reflexivity: x = x\n'
            '2. reflexivity: y = y\n'
            '3. transitivity [1, 2]: x = y\n'
        )
        with pytest.raises(ProofError, match='premises do not chain'):
            check_proof_text(text, f1)

    def test_identity_axiom(self, f1):
        eq = check_proof_text('1. identity-right: (x *0 1_a) = x\n', f1)
        assert decide_equal(eq.left, eq.right, f1)

    def test_congruence(self, f1):
        text = (
            '1. associativity: ((x *0 y) *0 x) = (x *0 (y *0 x))\n'
            '2. congruence-left [1]: (((x *0 y) *0 x) *0 y) = ((x *0 (y *0 x)) *0 y)\n'
        )
        assert check_proof_text(text, f1).dim == 1

    def test_m_associativity(self, f1):
        text = '1. associativity: ((x o[0] y) o[0] x) = (x o[0] (y o[0] x))\n'
        eq = check_proof_text(text, f1, LANG_M)
        assert eq.language == LANG_M

    def test_m_commutativity(self, binary):
        text = '1. commutativity: ((M o[0] G) o[1] F) = ((M o[1] F) o[0] G)\n'
        eq = check_proof_text(text, binary, LANG_M)
        assert decide_equal(eq.left, eq.right, binary)

    def test_render_round_trip(self, f2):
        pf = parse_proof(read('exchange.prf'), f2)
        again = parse_proof(render_proof(pf), f2)
        assert str(check_proof(again, f2)) == str(check_proof(pf, f2))


class TestRewrites:
    """Root axiom rewrites."""

    def test_associativity_both_orientations(self, f1):
        found = axiom_rewrites(parse_cterm('((x *0 y) *0 x)', f1), f1)
        assert ('associativity', parse_cterm('(x *0 (y *0 x))', f1)) in found

    def test_exchange(self, f2):
        found = axiom_rewrites(parse_cterm('((Y *1 Y1) *0 (X *1 X1))', f2), f2)
        rendered = [(rule, render_term(t)) for rule, t in found]
        assert ('exchange', '((Y *0 X) *1 (Y1 *0 X1))') in rendered

    def test_rewrites_preserve_value(self, binary):
        t = parse_mterm('((M o[0] G) o[1] F)', binary)
        for _, rewritten in axiom_rewrites(t, binary, LANG_M):
            assert decide_equal(t, rewritten, binary)
