"""Shared fixtures: the F1/F2 presentations and a small test configuration."""
import os

import pytest

from src.presentation import load_presentation

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


@pytest.fixture(scope='session')
def f1():
    """a --x--> b --y--> a"""
    return load_presentation(fixture_path('f1.cmp'))


@pytest.fixture(scope='session')
def f2():
    """Chains f1..f3: a -> b and g1..g3: b -> c with X, X1, Y, Y1 between them."""
    return load_presentation(fixture_path('f2.cmp'))


@pytest.fixture(scope='session')
def loop():
    """One 1-indet e: a -> a and a nullary 2-indet U: 1_a => e."""
    return load_presentation(fixture_path('loop.cmp'))


@pytest.fixture(scope='session')
def binary():
    """A 2-indet M : g.f => h with two inputs, plus F : f2 => f and G : g2 => g."""
    return load_presentation(fixture_path('binary.cmp'))


@pytest.fixture(scope='session')
def deep():
    """Binary plus M2 : g2.f2 => h and two parallel 3-indets T, T2 : M.(G *0 F) => M2."""
    return load_presentation(fixture_path('deep.cmp'))


@pytest.fixture
def test_config():
    """Small bounds so that the law suites finish quickly."""
    return {
        'logging': {'level': 'WARNING', 'file': ''},
        'enumeration': {'max_indets': 3, 'payload_max_indets': 2},
        'oracle': {'size_bound': 5, 'identity_max_indets': 1, 'escape_raise': 2},
        'verify': {
            'seed': 11,
            'max_indets': 2,
            'samples': 20,
            'sample_max_indets': 5,
            'proofs': 10,
            'mutations': 10,
            'proof_steps': 2,
            'proof_term_size': 3,
        },
        'output': {'json_indent': 2},
    }
