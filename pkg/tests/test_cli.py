"""Tests for the mltc command line."""
import io
import json
import os

import pytest

from main import run

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')
F1 = os.path.join(FIXTURES, 'f1.cmp')
F2 = os.path.join(FIXTURES, 'f2.cmp')


@pytest.fixture
def mltc(test_config):
    """Run one invocation; returns (exit status, stdout lines)."""
    def invoke(*argv, stdin=''):
        out = io.StringIO()
        status = run(list(argv), config=test_config, stdin=io.StringIO(stdin), stdout=out)
        return status, out.getvalue().splitlines()
    return invoke


class TestBasicVerbs:
    """check, eval, eq, compose, boundary, occurrences."""

    def test_check(self, mltc):
        assert mltc('check', '-p', F1) == (0, ['valid: F1 (2 levels, 2+2 indets)'])

    def test_check_invalid(self, mltc, tmp_path):
        path = tmp_path / 'bad.cmp'
        path.write_text(
            'dim 0: a b c\ndim 1: f : a -> b\ndim 1: g : b -> c\ndim 2: X : f => g\n',
            encoding='utf-8',
        )
        status, lines = mltc('check', '-p', str(path))
        assert status == 1
        assert 'parallelism violated' in lines[0]

    def test_check_json(self, mltc):
        status, lines = mltc('check', '-p', F2, '--json')
        data = json.loads('\n'.join(lines))
        assert status == 0
        assert data['valid'] is True
        assert data['levels'] == [3, 6, 4]

    def test_eval_exchange(self, mltc):
        status, lines = mltc('eval', '-p', F2, '((Y *1 Y1) *0 (X *1 X1))')
        assert status == 0
        assert lines == ['e{g1(f1(#a))}(Y(Y1(#g3)), X(X1(#f3)))']

    def test_eval_stdin(self, mltc):
        assert mltc('eval', '-p', F1, '-', stdin='x\n\ny\n') == (0, ['x(#a)', 'y(#b)'])

    def test_eq(self, mltc):
        assert mltc('eq', '-p', F1, '((x *0 y) *0 x)', '(x *0 (y *0 x))') == (0, ['equal'])
        assert mltc('eq', '-p', F1, 'x', 'y') == (1, ['not equal'])

    def test_eq_m_terms(self, mltc):
        assert mltc('eq', '-p', F1, '--lang', 'm', '(x o[0] y)', '(x o[0] y)') == (0, ['equal'])

    def test_eq_json(self, mltc):
        status, lines = mltc('eq', '-p', F2, '--json', '(X *1 X1)', '(X *1 X1)')
        assert status == 0
        assert json.loads('\n'.join(lines)) == {'equal': True}

    def test_compose_cells(self, mltc):
        assert mltc('compose', '-p', F1, '--lang', 'cell', 'x(#a)', 'y(#b)') == (0, ['x(y(#b))'])

    def test_compose_whisker(self, mltc):
        status, lines = mltc('compose', '-p', F2, '-k', '0', 'Y', 'f1')
        assert (status, lines) == (0, ['e{g1(f1(#a))}(Y(#g2), #f1)'])

    def test_boundary(self, mltc):
        assert mltc('boundary', '-p', F2, 'X') == (0, ['domain: f2(#a)', 'codomain: f1(#a)'])

    def test_iterated_boundary(self, mltc):
        assert mltc('boundary', '-p', F2, '-k', '0', 'X') == (0, ['domain: a', 'codomain: b'])

    def test_occurrences(self, mltc):
        assert mltc('occurrences', '-p', F1, '((x *0 y) *0 x)') == (0, ['(x, y, x)'])
        assert mltc('occurrences', '-p', F1, '--kind', 'objects', '((x *0 y) *0 x)') == (0, ['(a)'])


class TestEnumerationVerbs:
    """enumerate, oracle, export, morphism-apply."""

    def test_enumerate(self, mltc):
        status, lines = mltc('enumerate', '-p', F1, '-n', '1', '--max-indets', '2', '--many-to-one-only')
        assert status == 0
        assert lines == ['#a', '#b', 'x(#a)', 'y(#b)', 'x(y(#b))', 'y(x(#a))']

    def test_enumerate_json(self, mltc):
        status, lines = mltc('enumerate', '-p', F2, '-n', '2', '--max-indets', '1', '--json')
        data = json.loads('\n'.join(lines))
        assert data['dim'] == 2
        assert len(data['cells']) >= 10

    def test_oracle(self, mltc):
        status, lines = mltc('oracle', '-p', F1, '-n', '1', '--size-bound', '3')
        assert status == 0
        assert any(line.startswith('x = ') and '(x *0 1_a)' in line for line in lines)

    def test_export(self, mltc):
        status, lines = mltc('export', '-p', F1, '--max-indets', '1')
        data = json.loads('\n'.join(lines))
        assert status == 0
        assert data['presentation'] == 'F1'
        assert data['dims'] == 1

    def test_morphism_apply(self, mltc):
        status, lines = mltc(
            'morphism-apply', '-p', F1, '--target', F1,
            '--map-file', os.path.join(FIXTURES, 'swap.map'),
            '--lang', 'cell', 'x(y(#b))', 'a',
        )
        assert (status, lines) == (0, ['y(x(#a))', 'b'])

    def test_morphism_rejected(self, mltc, capsys):
        status, _ = mltc('morphism-apply', '-p', F1, '--target', F1, '--map', 'y=x', 'x')
        assert status == 2
        assert 'error:' in capsys.readouterr().err


class TestProofsAndVerify:
    """check-proof and verify."""

    def test_check_proof(self, mltc):
        status, lines = mltc('check-proof', '-p', F1, os.path.join(FIXTURES, 'assoc.prf'))
        assert (status, lines) == (0, ['proved: ((x *0 y) *0 x) = (x *0 (y *0 x))'])

    def test_check_proof_from_stdin(self, mltc):
        text = '1. exchange: ((x *0 y) *0 x) = (x *0 (y *0 x))\n'
        status, lines = mltc('check-proof', '-p', F1, '-', stdin=text)
        assert status == 1
        assert lines[0].startswith('invalid proof: step 1 (line 1)')

    def test_verify(self, mltc):
        status, lines = mltc('verify', '-p', F1, '--seed', '5')
        assert status == 0
        assert 'multicategory: ok' in lines
        assert 'proofs: ok' in lines

    def test_verify_dimension_three(self, mltc):
        status, lines = mltc('verify', '-p', os.path.join(FIXTURES, 'deep.cmp'))
        assert status == 0, lines
        assert 'omega: ok' in lines

    def test_deterministic(self, mltc):
        first = mltc('verify', '-p', F2, '--seed', '3', '--json')
        second = mltc('verify', '-p', F2, '--seed', '3', '--json')
        assert first == second
        assert json.loads('\n'.join(first[1]))['ok'] is True


class TestErrors:
    """Exit statuses and usage."""

    def test_help(self, mltc):
        status, lines = mltc('help')
        assert status == 0
        assert 'mltc - Usage' in lines

    def test_no_verb(self, mltc):
        assert mltc()[0] == 2

    def test_unknown_verb(self, mltc):
        assert mltc('frobnicate')[0] == 2

    def test_missing_presentation(self, mltc, capsys):
        assert mltc('eval', 'x')[0] == 2
        assert 'needs -p' in capsys.readouterr().err

    def test_unknown_name(self, mltc, capsys):
        assert mltc('eval', '-p', F1, 'z')[0] == 2
        assert "unknown name 'z'" in capsys.readouterr().err

    def test_not_composable(self, mltc):
        assert mltc('eval', '-p', F1, '(x *0 x)')[0] == 2

    def test_syntax_error(self, mltc):
        assert mltc('eval', '-p', F1, '(x *0')[0] == 2

    def test_missing_file(self, mltc):
        assert mltc('check', '-p', os.path.join(FIXTURES, 'missing.cmp'))[0] == 2

    def test_wrong_operand_count(self, mltc):
        assert mltc('eq', '-p', F1, 'x')[0] == 2

    def test_presentation_not_utf8(self, mltc, tmp_path, capsys):
        path = tmp_path / 'bad.cmp'
        path.write_bytes(b'dim 0: a \xff b\n')
        assert mltc('check', '-p', str(path))[0] == 2
        assert 'not UTF-8' in capsys.readouterr().err

    def test_proof_not_utf8(self, mltc, tmp_path, capsys):
        path = tmp_path / 'bad.prf'
        path.write_bytes(b'1. reflexivity: x = \xfe\n')
        assert mltc('check-proof', '-p', F1, str(path))[0] == 2
        assert 'not UTF-8' in capsys.readouterr().err
