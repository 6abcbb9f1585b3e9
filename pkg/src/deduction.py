"""Derivations in the C and M equational systems.

Proofs are explicit trees of steps. Axiom steps are checked by matching the
conclusion against the root rewrites of ``axiom_rewrites`` in either
orientation; structural steps (reflexivity, symmetry, transitivity,
congruence) are checked syntactically. Identity subterms compare by the cell
they denote, everything else compares structurally.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .cells import (
    CODOMAIN,
    DOMAIN,
    OBJECTS,
    Cell,
    ObjId,
    compose,
    identity_over,
    indet_cell,
    iterated_boundary,
    iterated_identity,
    multicompose,
    occurrences,
)
from .errors import DimensionError, KernelError, ProofError, TermSyntaxError
from .presentation import Presentation
from .terms import (
    LANG_C,
    LANG_M,
    Comp,
    Id,
    IndetRef,
    MComp,
    MId,
    Term,
    make_comp,
    parse_source,
    render_term,
    resolve_cterm,
    resolve_mterm,
)

logger = logging.getLogger(__name__)

C_RULES = (
    'reflexivity', 'associativity', 'exchange', 'identity-left', 'identity-right',
    'identity-merge', 'symmetry', 'transitivity', 'congruence-left', 'congruence-right',
)
M_RULES = (
    'reflexivity', 'identity-left', 'identity-right', 'commutativity', 'associativity',
    'symmetry', 'transitivity', 'congruence-left', 'congruence-right',
)
_ARITY = {'symmetry': 1, 'congruence-left': 1, 'congruence-right': 1, 'transitivity': 2}


def rules_for(language: str) -> Tuple[str, ...]:
    return M_RULES if language == LANG_M else C_RULES


@dataclass(frozen=True)
class Equation:
    left: Term
    right: Term
    language: str
    dim: int

    def __str__(self) -> str:
        return f"{render_term(self.left)} = {render_term(self.right)}"


@dataclass(frozen=True)
class ProofStep:
    number: int
    rule: str
    premises: Tuple['ProofStep', ...]
    left: Term
    right: Term
    line: Optional[int] = None


@dataclass(frozen=True)
class Proof:
    root: ProofStep
    language: str = LANG_C


class TermEvaluator:
    """Memoised evaluation of C- and M-terms over one presentation."""

    def __init__(self, p: Presentation):
        self.p = p
        self._memo: Dict[Term, Cell] = {}

    def __call__(self, t: Term) -> Cell:
        hit = self._memo.get(t)
        if hit is not None:
            return hit
        if isinstance(t, IndetRef):
            value = indet_cell(self.p, t.name)
        elif isinstance(t, Id):
            value = identity_over(self(t.inner))
        elif isinstance(t, MId):
            value = ObjId(t.name, t.dim)
        elif isinstance(t, Comp):
            value = compose(self.p, self(t.left), t.k, self(t.right))[0]
        else:
            value = multicompose(self.p, self(t.left), t.r, self(t.right))[0]
        self._memo[t] = value
        return value

    def seed(self, t: Term, value: Cell) -> None:
        self._memo[t] = value


# ---------------------------------------------------------------------------
# Axiom rewrites
# ---------------------------------------------------------------------------

def _is_unit(value: TermEvaluator, unit: Term, other: Term, k: int, side: str, n: int) -> bool:
    end = iterated_boundary(value.p, value(other), k, side)
    return iterated_identity(value(unit), n) == iterated_identity(end, n)


def _c_rewrites(t: Term, value: TermEvaluator) -> List[Tuple[str, Term]]:
    if not isinstance(t, Comp):
        return []
    k, L, R, n = t.k, t.left, t.right, t.dim
    found: List[Tuple[str, Term]] = []

    def add(rule: str, build: Callable[[], Term]) -> None:
        try:
            found.append((rule, build()))
        except DimensionError:
            pass

    if isinstance(L, Comp) and L.k == k:
        add('associativity', lambda: make_comp(k, L.left, make_comp(k, L.right, R)))
    if isinstance(R, Comp) and R.k == k:
        add('associativity', lambda: make_comp(k, make_comp(k, L, R.left), R.right))
    if isinstance(L, Comp) and isinstance(R, Comp) and L.k == R.k != k:
        j = L.k
        add('exchange', lambda: make_comp(
            j, make_comp(k, L.left, R.left), make_comp(k, L.right, R.right)
        ))
    if isinstance(L, Id) and R.dim == n and _is_unit(value, L, R, k, CODOMAIN, n):
        found.append(('identity-left', R))
    if isinstance(R, Id) and L.dim == n and _is_unit(value, R, L, k, DOMAIN, n):
        found.append(('identity-right', L))
    if isinstance(L, Id) and isinstance(R, Id) and k < n - 1:
        add('identity-merge', lambda: Id(make_comp(k, L.inner, R.inner), n))
    return found


def _m_rewrites(t: Term, value: TermEvaluator) -> List[Tuple[str, Term]]:
    if not isinstance(t, MComp):
        return []
    q, L, R, n = t.r, t.left, t.right, t.dim
    found: List[Tuple[str, Term]] = []
    if isinstance(L, MId) and q == 0:
        found.append(('identity-left', R))
    if isinstance(R, MId):
        found.append(('identity-right', L))
    if isinstance(L, MComp):
        r, a, b = L.r, L.left, L.right
        width = len(occurrences(value(b), OBJECTS))
        if r <= q < r + width:
            found.append(('associativity', MComp(r, a, MComp(q - r, b, R, n), n)))
        else:
            qa = q if q < r else q - width + 1
            moved = r if qa > r else r + len(occurrences(value(R), OBJECTS)) - 1
            found.append(('commutativity', MComp(moved, MComp(qa, a, R, n), b, n)))
    if isinstance(R, MComp):
        found.append(('associativity', MComp(q + R.r, MComp(q, L, R.left, n), R.right, n)))
    return found


def axiom_rewrites(
    t: Term,
    p: Presentation,
    language: str = LANG_C,
    value: Optional[TermEvaluator] = None,
) -> List[Tuple[str, Term]]:
    """Every axiom instance whose left side is t, applied at the root.

    Associativity and exchange are matched in both orientations, the identity
    axioms in the direction that removes the identity. Results that do not
    evaluate are dropped.

    Args:
        t: Term to rewrite
        p: Presentation
        language: ``'c'`` or ``'m'``
        value: Shared evaluator, created when omitted

    Returns:
        List of (rule name, rewritten term)
    """
    value = value or TermEvaluator(p)
    try:
        raw = _m_rewrites(t, value) if language == LANG_M else _c_rewrites(t, value)
    except KernelError:
        return []
    result = []
    for rule, rewritten in raw:
        try:
            value(rewritten)
        except KernelError:
            continue
        result.append((rule, rewritten))
    return result


def same_term(value: TermEvaluator, t: Term, s: Term) -> bool:
    """Structural equality, except that identity nodes compare by value."""
    if type(t) is not type(s) or t.dim != s.dim:
        return False
    if isinstance(t, Id):
        return value(t) == value(s)
    if isinstance(t, Comp):
        return t.k == s.k and same_term(value, t.left, s.left) and same_term(value, t.right, s.right)
    if isinstance(t, MComp):
        return t.r == s.r and same_term(value, t.left, s.left) and same_term(value, t.right, s.right)
    return t == s


# ---------------------------------------------------------------------------
# Proof files
# ---------------------------------------------------------------------------

def parse_proof(text: str, p: Presentation, language: str = LANG_C) -> Proof:
    """Read a ``.prf`` file; the last step is the root.

    Args:
        text: Proof source, one ``n. rule [premises]: t = s`` step per line
        p: Presentation resolving the names
        language: Term language of the steps

    Returns:
        Proof
    """
    items = parse_source(text, 'proof')
    if not items:
        raise ProofError("empty proof")
    resolve = resolve_mterm if language == LANG_M else resolve_cterm
    steps: Dict[int, ProofStep] = {}
    last = None
    for _, number, rule, premises, left_raw, right_raw, line in items:
        if number in steps:
            raise ProofError("duplicate step number", number, line)
        for n in premises:
            if n not in steps:
                raise ProofError(f"premise {n} is not an earlier step", number, line)
        try:
            left = resolve(left_raw, p)
            right = resolve(right_raw, p)
        except TermSyntaxError:
            raise
        except KernelError as e:
            raise ProofError(str(e), number, line) from e
        last = ProofStep(number, rule, tuple(steps[n] for n in premises), left, right, line)
        steps[number] = last
    return Proof(last, language)


def render_proof(pf: Proof) -> str:
    """Proof file text, steps renumbered 1.. in dependency order."""
    order: List[ProofStep] = []
    numbers: Dict[int, int] = {}

    def visit(step: ProofStep) -> None:
        if id(step) in numbers:
            return
        for premise in step.premises:
            visit(premise)
        numbers[id(step)] = len(order) + 1
        order.append(step)

    visit(pf.root)
    lines = []
    for step in order:
        refs = ''
        if step.premises:
            refs = ' [' + ', '.join(str(numbers[id(q)]) for q in step.premises) + ']'
        lines.append(
            f"{numbers[id(step)]}. {step.rule}{refs}: "
            f"{render_term(step.left)} = {render_term(step.right)}"
        )
    return '\n'.join(lines) + '\n'


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------

def _congruent(value: TermEvaluator, step: ProofStep, premise: ProofStep, side: str) -> bool:
    L, R = step.left, step.right
    if not (isinstance(L, (Comp, MComp)) and type(L) is type(R)):
        return False
    if (L.k if isinstance(L, Comp) else L.r) != (R.k if isinstance(R, Comp) else R.r):
        return False
    if side == 'left':
        return (
            same_term(value, L.right, R.right)
            and same_term(value, L.left, premise.left)
            and same_term(value, R.left, premise.right)
        )
    return (
        same_term(value, L.left, R.left)
        and same_term(value, L.right, premise.left)
        and same_term(value, R.right, premise.right)
    )


def _check_step(
    step: ProofStep,
    p: Presentation,
    language: str,
    value: TermEvaluator,
    path: Tuple[int, ...],
) -> None:
    def fail(message: str) -> None:
        raise ProofError(message, step.number, step.line, path)

    if step.rule not in rules_for(language):
        fail(f"unknown rule '{step.rule}' for {language.upper()}-proofs")
    if step.left.dim != step.right.dim:
        fail(f"sides have dimensions {step.left.dim} and {step.right.dim}")
    for side in (step.left, step.right):
        try:
            value(side)
        except KernelError as e:
            fail(str(e))
    arity = _ARITY.get(step.rule, 0)
    if len(step.premises) != arity:
        fail(f"{step.rule} takes {arity} premises, got {len(step.premises)}")

    def same(a: Term, b: Term) -> bool:
        return same_term(value, a, b)

    L, R = step.left, step.right
    if step.rule == 'reflexivity':
        ok = same(L, R)
    elif step.rule == 'symmetry':
        premise = step.premises[0]
        ok = same(L, premise.right) and same(R, premise.left)
    elif step.rule == 'transitivity':
        first, second = step.premises
        if not same(first.right, second.left):
            fail("premises do not chain: "
                 f"{render_term(first.right)} vs {render_term(second.left)}")
        ok = same(L, first.left) and same(R, second.right)
    elif step.rule in ('congruence-left', 'congruence-right'):
        ok = _congruent(value, step, step.premises[0], step.rule.split('-')[1])
    else:
        ok = any(
            rule == step.rule and same(rewritten, R)
            for rule, rewritten in axiom_rewrites(L, p, language, value)
        ) or any(
            rule == step.rule and same(rewritten, L)
            for rule, rewritten in axiom_rewrites(R, p, language, value)
        )
    if not ok:
        fail(f"not an instance of {step.rule}: {render_term(L)} = {render_term(R)}")


def check_proof(pf: Proof, p: Presentation, value: Optional[TermEvaluator] = None) -> Equation:
    """Validate every step and return the root equation.

    Args:
        pf: Proof tree
        p: Presentation
        value: Shared evaluator, created when omitted

    Returns:
        The certified equation

    Raises:
        ProofError: First invalid step, premises before conclusions
    """
    value = value or TermEvaluator(p)
    checked = set()

    def check(step: ProofStep, path: Tuple[int, ...]) -> None:
        if id(step) in checked:
            return
        for i, premise in enumerate(step.premises):
            check(premise, path + (i,))
        _check_step(step, p, pf.language, value, path)
        checked.add(id(step))

    check(pf.root, ())
    root = pf.root
    return Equation(root.left, root.right, pf.language, root.left.dim)


def check_proof_text(text: str, p: Presentation, language: str = LANG_C) -> Equation:
    return check_proof(parse_proof(text, p, language), p)
