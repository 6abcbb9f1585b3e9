"""C-terms and M-terms: parsing, evaluation to canonical cells, readback."""
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple, TYPE_CHECKING, Union

from lark import Lark, Token, Transformer, UnexpectedInput, v_args

from .cells import (
    App,
    Cell,
    Indet,
    Name,
    ObjId,
    Predet,
    check_cell,
    compose,
    identity_over,
    indet_cell,
    is_indet_cell,
    multicompose,
)
from .errors import CompositionError, DimensionError, TermSyntaxError

if TYPE_CHECKING:
    from .presentation import Presentation

logger = logging.getLogger(__name__)

LANG_C = 'c'
LANG_M = 'm'

_PARSER = Lark.open(
    'grammar.lark',
    rel_to=__file__,
    parser='lalr',
    start=['term', 'cell', 'presentation', 'proof', 'mapping'],
    propagate_positions=True,
)


# ---------------------------------------------------------------------------
# Raw syntax
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RawRef:
    name: str
    line: int
    column: int


@dataclass(frozen=True)
class RawId:
    power: Optional[int]
    inner: Union['RawRef', 'RawId', 'RawComp']
    braced: bool


@dataclass(frozen=True)
class RawComp:
    op: str
    index: int
    left: 'RawTerm'
    right: 'RawTerm'
    line: int
    column: int


RawTerm = Union[RawRef, RawId, RawComp]


@v_args(inline=True)
class _RawBuilder(Transformer):
    """Turns lark trees into raw terms and plain records."""

    def ref(self, name):
        return RawRef(str(name), name.line, name.column)

    def _identity(self, items, braced):
        power = None
        if isinstance(items[0], Token) and items[0].type == 'POWER':
            power = int(items[0][1:])
        inner = items[-1]
        if isinstance(inner, Token):
            inner = RawRef(str(inner), inner.line, inner.column)
        return RawId(power, inner, braced)

    def id_name(self, *items):
        return self._identity(items, braced=False)

    def id_term(self, *items):
        return self._identity(items, braced=True)

    def ccomp(self, left, op, right):
        return RawComp(LANG_C, int(op[1:]), left, right, op.line, op.column)

    def mcomp(self, left, op, right):
        return RawComp(LANG_M, int(op[2:-1]), left, right, op.line, op.column)

    def cell_name(self, name):
        return ('name', str(name))

    def cell_obj(self, name):
        return ('obj', str(name))

    def cell_indet(self, name, *args):
        return ('indet', str(name), args)

    def cell_predet(self, payload, *args):
        return ('predet', payload, args)

    def header(self, name):
        return ('header', str(name))

    def names_decl(self, dim, *names):
        return ('names', int(dim), [str(n) for n in names], dim.line)

    def indet_decl(self, dim, name, domain, arrow, codomain):
        return ('indet', int(dim), str(name), domain, str(codomain), dim.line)

    def presentation(self, *items):
        return list(items)

    def premises(self, *numbers):
        return tuple(int(n) for n in numbers)

    def step(self, number, rule, *rest):
        premises = rest[0] if isinstance(rest[0], tuple) else ()
        left, right = rest[-2], rest[-1]
        return ('step', int(number), str(rule), premises, left, right, number.line)

    def proof(self, *steps):
        return list(steps)

    def map_line(self, source, arrow, image):
        return (str(source), str(image), source.line)

    def mapping(self, *lines):
        return list(lines)


def parse_source(text: str, start: str):
    """Parse text with one of the grammar's start rules.

    Args:
        text: Source text
        start: ``term``, ``cell``, ``presentation``, ``proof`` or ``mapping``

    Returns:
        Raw terms for ``term``, plain tuples/lists for the other rules
    """
    if start in ('presentation', 'proof', 'mapping') and not text.endswith('\n'):
        text += '\n'
    try:
        tree = _PARSER.parse(text, start=start)
    except UnexpectedInput as e:
        raise TermSyntaxError(f"syntax error near {_near(text, e)!r}", e.line, e.column) from e
    return _RawBuilder().transform(tree)


def _near(text: str, error: UnexpectedInput) -> str:
    pos = getattr(error, 'pos_in_stream', None)
    if pos is None or pos < 0:
        return text[-10:]
    return text[pos:pos + 10]


# ---------------------------------------------------------------------------
# Resolved terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndetRef:
    name: str
    dim: int


@dataclass(frozen=True)
class Id:
    inner: 'CTerm'
    dim: int


@dataclass(frozen=True)
class Comp:
    k: int
    left: 'CTerm'
    right: 'CTerm'
    dim: int


@dataclass(frozen=True)
class MId:
    name: str
    dim: int


@dataclass(frozen=True)
class MComp:
    r: int
    left: 'MTerm'
    right: 'MTerm'
    dim: int


CTerm = Union[IndetRef, Id, Comp]
MTerm = Union[IndetRef, MId, MComp]
Term = Union[IndetRef, Id, Comp, MId, MComp]


def make_comp(k: int, left: CTerm, right: CTerm) -> Comp:
    """Composite node with its dimension inferred from the operands."""
    dim = max(left.dim, right.dim)
    if k >= dim:
        raise DimensionError(f"k ≥ dimension: *{k} between terms of dimension {dim}")
    return Comp(k, left, right, dim)


def _ref(raw: RawRef, p: 'Presentation') -> IndetRef:
    return IndetRef(raw.name, p.dim_of(raw.name))


def resolve_cterm(raw: RawTerm, p: 'Presentation') -> CTerm:
    if isinstance(raw, RawRef):
        return _ref(raw, p)
    if isinstance(raw, RawId):
        inner = resolve_cterm(raw.inner, p)
        goal = raw.power if raw.power is not None else inner.dim + 1
        if goal <= inner.dim:
            raise DimensionError(f"1^{goal} over a term of dimension {inner.dim}")
        term = inner
        while term.dim < goal:
            term = Id(term, term.dim + 1)
        return term
    if raw.op != LANG_C:
        raise TermSyntaxError("o[r] is not a C-term operator", raw.line, raw.column)
    return make_comp(raw.index, resolve_cterm(raw.left, p), resolve_cterm(raw.right, p))


def resolve_mterm(raw: RawTerm, p: 'Presentation') -> MTerm:
    if isinstance(raw, RawRef):
        return _ref(raw, p)
    if isinstance(raw, RawId):
        if raw.power is not None or raw.braced:
            raise TermSyntaxError("M-term identities are written 1_name")
        return MId(raw.inner.name, p.dim_of(raw.inner.name) + 1)
    if raw.op != LANG_M:
        raise TermSyntaxError("*k is not an M-term operator", raw.line, raw.column)
    left = resolve_mterm(raw.left, p)
    right = resolve_mterm(raw.right, p)
    if left.dim != right.dim:
        raise DimensionError(
            f"o[{raw.index}] between terms of dimension {left.dim} and {right.dim}"
        )
    return MComp(raw.index, left, right, left.dim)


def uses_placed_operator(raw: RawTerm) -> bool:
    if isinstance(raw, RawComp):
        return raw.op == LANG_M or uses_placed_operator(raw.left) or uses_placed_operator(raw.right)
    if isinstance(raw, RawId):
        return uses_placed_operator(raw.inner)
    return False


def _check_dim(term: Term, dim: Optional[int]) -> None:
    if dim is not None and term.dim != dim:
        raise DimensionError(f"term has dimension {term.dim}, expected {dim}")


def parse_cterm(text: str, p: 'Presentation', dim: Optional[int] = None) -> CTerm:
    """Parse a C-term.

    Args:
        text: Term source, e.g. ``((x *0 y) *0 x)``
        p: Presentation resolving the names
        dim: Expected dimension, checked when given

    Returns:
        Resolved C-term
    """
    term = resolve_cterm(parse_source(text, 'term'), p)
    _check_dim(term, dim)
    return term


def parse_mterm(text: str, p: 'Presentation', dim: Optional[int] = None) -> MTerm:
    """Parse an M-term; positions are only checked on evaluation."""
    term = resolve_mterm(parse_source(text, 'term'), p)
    _check_dim(term, dim)
    return term


def parse_term(text: str, p: 'Presentation', language: str, dim: Optional[int] = None) -> Term:
    if language == LANG_M:
        return parse_mterm(text, p, dim)
    return parse_cterm(text, p, dim)


def render_term(t: Term) -> str:
    if isinstance(t, IndetRef):
        return t.name
    if isinstance(t, Id):
        if isinstance(t.inner, IndetRef):
            return f"1_{t.inner.name}"
        return f"1_{{{render_term(t.inner)}}}"
    if isinstance(t, MId):
        return f"1_{t.name}"
    if isinstance(t, Comp):
        return f"({render_term(t.left)} *{t.k} {render_term(t.right)})"
    return f"({render_term(t.left)} o[{t.r}] {render_term(t.right)})"


def term_size(t: Term) -> int:
    """Node count; an identity counts as a single leaf."""
    if isinstance(t, (Comp, MComp)):
        return 1 + term_size(t.left) + term_size(t.right)
    return 1


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_cterm(t: CTerm, p: 'Presentation') -> Cell:
    """Canonical cell denoted by a C-term.

    Args:
        t: C-term
        p: Presentation

    Returns:
        The cell; composability is checked at every composite
    """
    return eval_cterm_traced(t, p)[0]


def eval_cterm_traced(t: CTerm, p: 'Presentation') -> Tuple[Cell, List[int]]:
    """Evaluate and report where the top-dimensional indet leaves end up.

    Returns the cell and, for every indet leaf of t that has the dimension of
    t and is not under an identity, in left-to-right order, its indet
    occurrence position in the cell.
    """
    if isinstance(t, IndetRef):
        return indet_cell(p, t.name), [0]
    if isinstance(t, Id):
        return identity_over(eval_cterm(t.inner, p)), []
    left, left_pos = eval_cterm_traced(t.left, p)
    right, right_pos = eval_cterm_traced(t.right, p)
    try:
        cell, prov = compose(p, left, t.k, right)
    except CompositionError as e:
        raise CompositionError(f"in {render_term(t)}: {e}") from e
    positions = []
    if t.left.dim == t.dim:
        positions.extend(prov.left[i] for i in left_pos)
    if t.right.dim == t.dim:
        positions.extend(prov.right[j] for j in right_pos)
    return cell, positions


def eval_mterm(t: MTerm, p: 'Presentation') -> Cell:
    """Canonical cell denoted by an M-term."""
    if isinstance(t, IndetRef):
        return indet_cell(p, t.name)
    if isinstance(t, MId):
        return ObjId(t.name, t.dim)
    left = eval_mterm(t.left, p)
    right = eval_mterm(t.right, p)
    try:
        return multicompose(p, left, t.r, right)[0]
    except CompositionError as e:
        raise CompositionError(f"in {render_term(t)}: {e}") from e


def eval_term(t: Term, p: 'Presentation') -> Cell:
    if isinstance(t, (MId, MComp)):
        return eval_mterm(t, p)
    return eval_cterm(t, p)


def decide_equal(t1: Term, t2: Term, p: 'Presentation') -> bool:
    """Whether two terms denote the same cell (normalise and compare)."""
    return eval_term(t1, p) == eval_term(t2, p)


# ---------------------------------------------------------------------------
# Readback
# ---------------------------------------------------------------------------

def readback_mterm(u: Cell, p: 'Presentation') -> MTerm:
    """Nested-multicomposition normal form of a many-to-one cell.

    Arguments are plugged right to left so that the positions of the slots
    still to be filled never move.
    """
    if isinstance(u, Name):
        return IndetRef(u.name, 0)
    if isinstance(u, ObjId):
        return MId(u.name, u.dim)
    if isinstance(u.head, Predet):
        raise CompositionError(f"{u} is not many-to-one")
    term: MTerm = IndetRef(u.head.name, u.dim)
    for i in reversed(range(len(u.args))):
        arg = u.args[i]
        if not isinstance(arg, ObjId):
            term = MComp(i, term, readback_mterm(arg, p), u.dim)
    return term


def readback_cterm(u: Cell, p: 'Presentation') -> CTerm:
    """A C-term denoting u.

    An indet applied to arguments becomes ``(f *{m-1} rest)`` where rest is
    the cell over the domain of f carrying the same arguments. A predet
    ``e{w}(args)`` becomes a readback of w whose top-dimensional leaves are
    swapped for the readbacks of the arguments sitting over them.
    """
    if isinstance(u, Name):
        return IndetRef(u.name, 0)
    if isinstance(u, ObjId):
        return Id(IndetRef(u.name, u.dim - 1), u.dim)
    plain = all(isinstance(a, ObjId) for a in u.args)
    if isinstance(u.head, Indet):
        f = IndetRef(u.head.name, u.dim)
        if plain:
            return f
        base = p.domain_of(u.head.name)
        rest = u.args[0] if is_indet_cell(base) else App(Predet(base), u.args, u.dim)
        return Comp(u.dim - 1, f, readback_cterm(rest, p), u.dim)

    payload = u.head.payload
    inner = readback_cterm(payload, p)
    if plain:
        return Id(inner, u.dim)
    _, positions = eval_cterm_traced(inner, p)
    replacements = iter([readback_cterm(u.args[i], p) for i in positions])
    return _lift(inner, replacements, payload.dim)


def _lift(t: CTerm, replacements: Iterator[CTerm], top: int) -> CTerm:
    if isinstance(t, IndetRef):
        return next(replacements) if t.dim == top else t
    if isinstance(t, Id):
        return t
    left = _lift(t.left, replacements, top)
    right = _lift(t.right, replacements, top)
    return Comp(t.k, left, right, max(left.dim, right.dim))


def readback(u: Cell, p: 'Presentation', language: str = LANG_C) -> str:
    """Term text that evaluates back to u, in the requested language."""
    if language == LANG_M:
        return render_term(readback_mterm(u, p))
    return render_term(readback_cterm(u, p))


# ---------------------------------------------------------------------------
# Cell renderings
# ---------------------------------------------------------------------------

def _build_cell(raw, p: 'Presentation') -> Cell:
    kind = raw[0]
    if kind == 'name':
        return Name(raw[1])
    if kind == 'obj':
        return ObjId(raw[1], p.dim_of(raw[1]) + 1)
    if kind == 'indet':
        args = tuple(_build_cell(a, p) for a in raw[2])
        return App(Indet(raw[1]), args, p.dim_of(raw[1]))
    payload = _build_cell(raw[1], p)
    args = tuple(_build_cell(a, p) for a in raw[2])
    return App(Predet(payload), args, payload.dim + 1)


def parse_cell(text: str, p: 'Presentation') -> Cell:
    """Read a canonical cell rendering such as ``e{g1(f1(#a))}(#g1, X(#f2))``."""
    cell = _build_cell(parse_source(text, 'cell'), p)
    check_cell(p, cell)
    return cell
