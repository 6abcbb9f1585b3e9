"""Term enumeration, the closure oracle and seeded proof generation.

The oracle saturates a bounded term space under the root axiom rewrites and
congruence with a union-find, so that its partition can be compared with the
kernel of evaluation. Random proofs and token mutations feed the soundness
checks of the proof checker.
"""
import itertools
import logging
import random
import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from networkx.utils import UnionFind

from .cells import (
    CODOMAIN,
    DOMAIN,
    OBJECTS,
    Cell,
    ObjId,
    compose,
    indet_cell,
    iterated_boundary,
    iterated_identity,
    multicompose,
    occurrences,
    target,
)
from .deduction import Proof, ProofStep, TermEvaluator, axiom_rewrites, rules_for
from .errors import DimensionError, EnumerationBudgetError
from .multitopic import MultitopicSet
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
    readback_cterm,
    render_term,
    term_size,
)

logger = logging.getLogger(__name__)


class TermSpace:
    """Every well-formed term of one dimension up to a node count.

    C-term leaves are the n-indets plus one identity term per distinct
    n-dimensional identity over a lower cell with few indets. M-term leaves
    are the n-indets and ``1_x`` for the (n-1)-indets.
    """

    def __init__(
        self,
        p: Presentation,
        dim: int,
        size_bound: int,
        language: str = LANG_C,
        config: Optional[dict] = None,
        value: Optional[TermEvaluator] = None,
    ):
        if not 1 <= dim <= p.top_dim:
            raise DimensionError(f"no terms of dimension {dim} to enumerate in {p.name}")
        self.p = p
        self.dim = dim
        self.size_bound = size_bound
        self.language = language
        self.config = config or {}
        oracle = self.config.get('oracle', {})
        self.identity_max_indets = oracle.get('identity_max_indets', 2)
        self.max_terms = oracle.get('max_terms', 500000)
        self.value = value or TermEvaluator(p)

        self.terms: List[Term] = []
        self.values: List[Cell] = []
        self.index: Dict[Term, int] = {}
        self.children: Dict[int, Tuple[int, int, int]] = {}
        self.by_size: Dict[int, List[int]] = {}
        self.unit_by_value: Dict[Cell, int] = {}
        self._ends: Dict[Tuple[int, int, object], List[int]] = {}
        self._composites: Dict[Tuple[int, Cell, Cell], Cell] = {}

        if language == LANG_M:
            self._enumerate_m()
        else:
            self._enumerate_c()
        logger.debug(
            f"{p.name}: {len(self.terms)} {language.upper()}-terms of dimension {dim} "
            f"up to {size_bound} nodes"
        )

    def __len__(self) -> int:
        return len(self.terms)

    def lookup(self, t: Term) -> Optional[int]:
        i = self.index.get(t)
        if i is None and isinstance(t, Id):
            i = self.unit_by_value.get(self.value(t))
        return i

    def _add(self, t: Term, cell: Cell, size: int, children: Optional[Tuple[int, int, int]] = None) -> int:
        if len(self.terms) >= self.max_terms:
            raise EnumerationBudgetError(
                f"more than {self.max_terms} terms of dimension {self.dim} up to "
                f"{self.size_bound} nodes"
            )
        i = len(self.terms)
        self.terms.append(t)
        self.values.append(cell)
        self.index[t] = i
        self.by_size.setdefault(size, []).append(i)
        if children is not None:
            self.children[i] = children
        self.value.seed(t, cell)
        self._register(i, size)
        return i

    def _register(self, i: int, size: int) -> None:
        cell = self.values[i]
        if self.language == LANG_M:
            self._ends.setdefault((size, 0, target(self.p, cell)), []).append(i)
            return
        for k in range(self.dim):
            end = iterated_boundary(self.p, cell, k, CODOMAIN)
            self._ends.setdefault((size, k, end), []).append(i)

    def _splits(self) -> Iterator[Tuple[int, int, int]]:
        for size in range(3, self.size_bound + 1, 2):
            for left in range(1, size - 1, 2):
                yield size, left, size - 1 - left

    def _enumerate_c(self) -> None:
        p, n = self.p, self.dim
        for f in p.names(n):
            self._add(IndetRef(f, n), indet_cell(p, f), 1)
        lower = MultitopicSet(p, self.config)
        bound = self.identity_max_indets
        for m in range(n):
            for a in lower.all_cells(m, bound, bound):
                unit = iterated_identity(a, n)
                if unit in self.unit_by_value:
                    continue
                term = readback_cterm(a, p)
                while term.dim < n:
                    term = Id(term, term.dim + 1)
                self.unit_by_value[unit] = self._add(term, unit, 1)

        for size, left_size, right_size in self._splits():
            for i in list(self.by_size.get(left_size, ())):
                for k in range(n):
                    start = iterated_boundary(p, self.values[i], k, DOMAIN)
                    for j in list(self._ends.get((right_size, k, start), ())):
                        cell = self._compose(k, self.values[i], self.values[j])
                        self._add(Comp(k, self.terms[i], self.terms[j], n), cell, size, (k, i, j))

    def _compose(self, k: int, u: Cell, v: Cell) -> Cell:
        key = (k, u, v)
        hit = self._composites.get(key)
        if hit is None:
            hit = compose(self.p, u, k, v)[0]
            self._composites[key] = hit
        return hit

    def _enumerate_m(self) -> None:
        p, n = self.p, self.dim
        for f in p.names(n):
            self._add(IndetRef(f, n), indet_cell(p, f), 1)
        for x in p.names(n - 1):
            self._add(MId(x, n), ObjId(x, n), 1)

        for size, left_size, right_size in self._splits():
            for i in list(self.by_size.get(left_size, ())):
                for r, x in enumerate(occurrences(self.values[i], OBJECTS)):
                    for j in list(self._ends.get((right_size, 0, x), ())):
                        cell = multicompose(p, self.values[i], r, self.values[j])[0]
                        self._add(MComp(r, self.terms[i], self.terms[j], n), cell, size, (r, i, j))


@dataclass
class Partition:
    """Blocks of term renderings, smallest term first in every block."""

    language: str
    dim: int
    size_bound: int
    blocks: List[List[str]] = field(default_factory=list)

    def block_of(self, rendering: str) -> List[str]:
        for block in self.blocks:
            if rendering in block:
                return block
        raise KeyError(rendering)

    def same_block(self, a: str, b: str) -> bool:
        return b in self.block_of(a)


@dataclass
class AgreementReport:
    """Comparison of the oracle partition with the kernel of evaluation.

    ``unsound`` lists oracle-equal pairs with different cells; ``unproved``
    lists eval-equal pairs the oracle could not join even at the raised bound.
    """

    language: str
    dim: int
    size_bound: int
    terms: int
    blocks: int
    kernel_blocks: int
    retested: int = 0
    unsound: List[Tuple[str, str]] = field(default_factory=list)
    unproved: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unsound and not self.unproved


class ClosureOracle:
    """Least congruence containing the root axiom rewrites over a term space."""

    def __init__(self, p: Presentation, config: Optional[dict] = None):
        """Initialize the oracle.

        Args:
            p: Presentation
            config: Application configuration dictionary
        """
        self.p = p
        self.config = config or {}
        self.escape_raise = self.config.get('oracle', {}).get('escape_raise', 2)
        self.value = TermEvaluator(p)

    def space(self, dim: int, size_bound: int, language: str = LANG_C) -> TermSpace:
        return TermSpace(self.p, dim, size_bound, language, self.config, self.value)

    def saturate(self, space: TermSpace) -> UnionFind:
        """Union axiom-related terms, then close under congruence."""
        uf = UnionFind(range(len(space)))
        axioms = 0
        for i, t in enumerate(space.terms):
            for _, rewritten in axiom_rewrites(t, self.p, space.language, self.value):
                j = space.lookup(rewritten)
                if j is not None and uf[i] != uf[j]:
                    uf.union(i, j)
                    axioms += 1

        rounds = 0
        changed = True
        while changed:
            rounds += 1
            changed = False
            table: Dict[Tuple[int, int, int], int] = {}
            for i, (op, left, right) in space.children.items():
                j = table.setdefault((op, uf[left], uf[right]), i)
                if uf[i] != uf[j]:
                    uf.union(i, j)
                    changed = True
        logger.debug(
            f"Saturated {len(space)} terms: {axioms} axiom merges, {rounds} congruence rounds"
        )
        return uf

    def partition(self, dim: int, size_bound: int, language: str = LANG_C) -> Partition:
        space = self.space(dim, size_bound, language)
        uf = self.saturate(space)
        groups: Dict[int, List[Term]] = {}
        for i, t in enumerate(space.terms):
            groups.setdefault(uf[i], []).append(t)
        blocks = [
            [render_term(t) for t in sorted(group, key=lambda t: (term_size(t), render_term(t)))]
            for group in groups.values()
        ]
        blocks.sort()
        return Partition(language, dim, size_bound, blocks)

    def agreement(self, dim: int, size_bound: int, language: str = LANG_C) -> AgreementReport:
        """Check oracle-equal ⟹ eval-equal, and the converse with one retest."""
        space = self.space(dim, size_bound, language)
        uf = self.saturate(space)

        first: Dict[int, int] = {}
        by_value: Dict[Cell, Dict[int, int]] = {}
        unsound = []
        for i in range(len(space)):
            root = uf[i]
            head = first.setdefault(root, i)
            if space.values[head] != space.values[i]:
                unsound.append((render_term(space.terms[head]), render_term(space.terms[i])))
            by_value.setdefault(space.values[i], {}).setdefault(root, i)

        missing = []
        for reps in by_value.values():
            ids = list(reps.values())
            missing.extend((ids[0], other) for other in ids[1:])

        report = AgreementReport(
            language, dim, size_bound, len(space), len(first), len(by_value), unsound=unsound
        )
        if missing:
            report.retested = len(missing)
            report.unproved = self._retest(space, missing, dim, size_bound + self.escape_raise)

        status = '✅' if report.ok else '❌'
        logger.info(
            f"{status} Oracle agreement on {self.p.name} dim {dim} ({language.upper()}, "
            f"{size_bound} nodes): {report.terms} terms, {report.blocks} blocks, "
            f"{report.kernel_blocks} cells, {len(report.unsound)} unsound, "
            f"{len(report.unproved)} unproved after retest of {report.retested}"
        )
        return report

    def _retest(
        self,
        space: TermSpace,
        missing: List[Tuple[int, int]],
        dim: int,
        raised: int,
    ) -> List[Tuple[str, str]]:
        pairs = [(space.terms[a], space.terms[b]) for a, b in missing]
        try:
            big = self.space(dim, raised, space.language)
            uf = self.saturate(big)
        except EnumerationBudgetError as e:
            logger.warning(f"⚠️ Retest at {raised} nodes exceeded the budget: {e}")
            return [(render_term(a), render_term(b)) for a, b in pairs]
        return [
            (render_term(a), render_term(b))
            for a, b in pairs
            if uf[big.index[a]] != uf[big.index[b]]
        ]


def closure_oracle(
    p: Presentation,
    dim: int,
    size_bound: int,
    language: str = LANG_C,
    config: Optional[dict] = None,
) -> Partition:
    """Partition of all terms up to ``size_bound`` nodes by derivable equality.

    Args:
        p: Presentation
        dim: Term dimension (>= 1)
        size_bound: Node bound, identity terms count as one node
        language: ``'c'`` or ``'m'``
        config: Application configuration dictionary (``oracle`` section)

    Returns:
        Partition
    """
    return ClosureOracle(p, config).partition(dim, size_bound, language)


def oracle_agreement(
    p: Presentation,
    dim: int,
    size_bound: int,
    language: str = LANG_C,
    config: Optional[dict] = None,
) -> AgreementReport:
    return ClosureOracle(p, config).agreement(dim, size_bound, language)


# ---------------------------------------------------------------------------
# Random proofs and mutations
# ---------------------------------------------------------------------------

def subterms(t: Term, path: Tuple[str, ...] = ()) -> Iterator[Tuple[Tuple[str, ...], Term]]:
    """Every subterm with its path of 'L'/'R' steps from the root."""
    yield path, t
    if isinstance(t, (Comp, MComp)):
        yield from subterms(t.left, path + ('L',))
        yield from subterms(t.right, path + ('R',))


def _with_child(t: Term, side: str, child: Term) -> Term:
    left = child if side == 'L' else t.left
    right = child if side == 'R' else t.right
    if isinstance(t, Comp):
        return Comp(t.k, left, right, t.dim)
    return MComp(t.r, left, right, t.dim)


def replace_subterm(t: Term, path: Tuple[str, ...], new: Term) -> Term:
    if not path:
        return new
    child = t.left if path[0] == 'L' else t.right
    return _with_child(t, path[0], replace_subterm(child, path[1:], new))


def _lift(t: Term, path: Tuple[str, ...], step: ProofStep, numbers: Iterator[int]) -> ProofStep:
    if not path:
        return step
    side = path[0]
    inner = _lift(t.left if side == 'L' else t.right, path[1:], step, numbers)
    rule = 'congruence-left' if side == 'L' else 'congruence-right'
    return ProofStep(
        next(numbers), rule, (inner,),
        _with_child(t, side, inner.left), _with_child(t, side, inner.right),
    )


def random_proof(
    p: Presentation,
    dim: int,
    rng: random.Random,
    language: str = LANG_C,
    steps: int = 3,
    space: Optional[TermSpace] = None,
    size_bound: int = 5,
) -> Proof:
    """A valid proof built from random axiom instances.

    Starts from reflexivity on a random term and chains ``steps`` rewrites at
    random positions, each lifted through congruence steps and joined by
    transitivity; some axioms are stated backwards and turned by symmetry.

    Args:
        p: Presentation
        dim: Term dimension
        rng: Seeded random source
        language: ``'c'`` or ``'m'``
        steps: Number of rewrites to chain
        space: Term space to draw the start term from
        size_bound: Node bound for a space built on the fly

    Returns:
        Proof
    """
    space = space or TermSpace(p, dim, size_bound, language)
    value = space.value
    numbers = itertools.count(1)
    start = rng.choice(space.terms)
    proof = ProofStep(next(numbers), 'reflexivity', (), start, start)

    for _ in range(steps):
        current = proof.right
        candidates = [
            (path, rule, sub, rewritten)
            for path, sub in subterms(current)
            for rule, rewritten in axiom_rewrites(sub, p, language, value)
        ]
        if not candidates:
            break
        path, rule, sub, rewritten = rng.choice(candidates)
        if rng.random() < 0.3:
            backwards = ProofStep(next(numbers), rule, (), rewritten, sub)
            axiom = ProofStep(next(numbers), 'symmetry', (backwards,), sub, rewritten)
        else:
            axiom = ProofStep(next(numbers), rule, (), sub, rewritten)
        lifted = _lift(current, path, axiom, numbers)
        proof = ProofStep(next(numbers), 'transitivity', (proof, lifted), proof.left, lifted.right)

    if rng.random() < 0.2:
        proof = ProofStep(next(numbers), 'symmetry', (proof,), proof.right, proof.left)
    return Proof(proof, language)


_TOKEN = re.compile(r"o\[\d+\]|\*\d+|[a-z]+(?:-[a-z]+)+|[A-Za-z][A-Za-z0-9_']*|\d+")


def mutate_proof(text: str, p: Presentation, rng: random.Random, language: str = LANG_C) -> str:
    """Change one token of a proof file: a rule, a name, an index or a number."""
    tokens = list(_TOKEN.finditer(text))
    if not tokens:
        return text
    rules = rules_for(language)
    names = [e.name for level in p.levels for e in level]

    for _ in range(20):
        match = rng.choice(tokens)
        token = match.group()
        if token in rules:
            new = rng.choice([r for r in rules if r != token])
        elif p.has(token):
            pool = [x for x in names if x != token]
            if not pool:
                continue
            new = rng.choice(pool)
        elif token.startswith('*'):
            new = f"*{max(0, int(token[1:]) + rng.choice((-1, 1)))}"
        elif token.startswith('o['):
            new = f"o[{max(0, int(token[2:-1]) + rng.choice((-1, 1)))}]"
        elif token.isdigit():
            new = str(max(0, int(token) + rng.choice((-1, 1))))
        else:
            continue
        if new != token:
            return text[:match.start()] + new + text[match.end():]
    return text
