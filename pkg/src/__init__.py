"""mltc - A symbolic kernel for many-to-one computads and multitopic sets."""

__version__ = '0.3.0'
__description__ = 'Cells, terms, proofs and multitopic sets of many-to-one computads'

from .errors import KernelError
from .cells import Cell, ProvenancePair, compose, multicompose, occurrences, render
from .presentation import Presentation, load_presentation, parse_presentation, validate_presentation
from .terms import decide_equal, eval_term, parse_term, readback
from .deduction import Proof, check_proof, check_proof_text
from .multitopic import MltMorphism, MultitopicSet
from .oracle import ClosureOracle
from .laws import LawChecker

__all__ = [
    'KernelError',
    'Cell',
    'ProvenancePair',
    'compose',
    'multicompose',
    'occurrences',
    'render',
    'Presentation',
    'load_presentation',
    'parse_presentation',
    'validate_presentation',
    'decide_equal',
    'eval_term',
    'parse_term',
    'readback',
    'Proof',
    'check_proof',
    'check_proof_text',
    'MltMorphism',
    'MultitopicSet',
    'ClosureOracle',
    'LawChecker',
]
