"""Canonical cells and the composition, replacement and boundary operations.

A cell of dimension m >= 1 is a reduced Polish term: a head symbol applied to
argument cells of the same dimension, or the identity arrow ``#x`` over an
(m-1)-indet x. Heads are indets of the presentation or predets ``e{w}`` that
stand for the identity on a non-indet (m-1)-cell w. Arguments are always
many-to-one, so a predet can only sit at the top of a cell. Two cells denote
the same cell of the free structure iff they are structurally equal.

All functions that need indet boundary data take the presentation as their
first argument; everything else is a pure function of the cell.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, TYPE_CHECKING, Union

from .errors import (
    CompositionError,
    DimensionError,
    ParallelismError,
    PositionError,
)

if TYPE_CHECKING:
    from .presentation import Presentation

logger = logging.getLogger(__name__)

DOMAIN = 'domain'
CODOMAIN = 'codomain'
OBJECTS = 'objects'
INDETS = 'indets'


class Cell:
    """Base class of the three cell shapes."""

    dim: int

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Name(Cell):
    """A 0-cell, which is always a bare 0-indet."""

    name: str
    dim: int = 0


@dataclass(frozen=True)
class ObjId(Cell):
    """The identity arrow over an indet one dimension down."""

    name: str
    dim: int


@dataclass(frozen=True)
class Indet:
    name: str


@dataclass(frozen=True)
class Predet:
    payload: Cell


Head = Union[Indet, Predet]


@dataclass(frozen=True, eq=False)
class App(Cell):
    """A head symbol applied to its argument cells."""

    head: Head
    args: Tuple[Cell, ...]
    dim: int
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, '_hash', hash((self.dim, self.head, self.args)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (
            type(other) is App
            and self._hash == other._hash
            and self.dim == other.dim
            and self.head == other.head
            and self.args == other.args
        )


@dataclass(frozen=True)
class ProvenancePair:
    """Coprojections of a binary composite.

    ``left`` maps occurrence positions of the left operand into the
    composite, ``right`` those of the right operand. ``kind`` says whether the
    positions index object slots or indet occurrences.
    """

    kind: str
    left: Dict[int, int]
    right: Dict[int, int]


@dataclass(frozen=True)
class Classification:
    is_identity: bool
    is_indet: bool
    is_many_to_one: bool
    identity_depth: int


# ---------------------------------------------------------------------------
# Rendering and structured export
# ---------------------------------------------------------------------------

def render(u: Cell) -> str:
    """Canonical text of a cell: ``x(y(#b))``, ``#x``, ``e{w}(...)``."""
    if isinstance(u, Name):
        return u.name
    if isinstance(u, ObjId):
        return f"#{u.name}"
    args = ', '.join(render(a) for a in u.args)
    if isinstance(u.head, Indet):
        return f"{u.head.name}({args})"
    return f"e{{{render(u.head.payload)}}}({args})"


def cell_record(u: Cell) -> dict:
    """Nested record ``{dim, head: {kind, name | payload}, args}``."""
    if isinstance(u, Name):
        head = {'kind': 'name', 'name': u.name}
        args = []
    elif isinstance(u, ObjId):
        head = {'kind': 'identity', 'name': u.name}
        args = []
    else:
        if isinstance(u.head, Indet):
            head = {'kind': 'indet', 'name': u.head.name}
        else:
            head = {'kind': 'predet', 'payload': cell_record(u.head.payload)}
        args = [cell_record(a) for a in u.args]
    return {'dim': u.dim, 'head': head, 'args': args}


# ---------------------------------------------------------------------------
# Occurrences
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _indets(u: Cell) -> Tuple[str, ...]:
    if isinstance(u, Name):
        return (u.name,)
    if isinstance(u, ObjId):
        return ()
    found: Tuple[str, ...] = (u.head.name,) if isinstance(u.head, Indet) else ()
    for a in u.args:
        found += _indets(a)
    return found


@lru_cache(maxsize=1 << 16)
def _objects(u: Cell) -> Tuple[str, ...]:
    if isinstance(u, (Name, ObjId)):
        return (u.name,)
    found: Tuple[str, ...] = ()
    for a in u.args:
        found += _objects(a)
    return found


def occurrences(u: Cell, kind: str = INDETS) -> Tuple[str, ...]:
    """Occurrences of a cell in canonical left-to-right order.

    Args:
        u: Cell to inspect
        kind: ``'indets'`` for the indet head symbols (predets excluded),
            ``'objects'`` for the object slots, i.e. the source of u

    Returns:
        Tuple of names; the index of an entry is its occurrence position
    """
    if kind == INDETS:
        return _indets(u)
    if kind == OBJECTS:
        return _objects(u)
    raise ValueError(f"unknown occurrence kind: {kind}")


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def indet_cell(p: 'Presentation', f: str) -> Cell:
    """Default cell of an indet: the head applied to identity arguments.

    Args:
        p: Presentation declaring f
        f: Indet name

    Returns:
        ``Name(f)`` at dimension 0, otherwise ``f(#x0, ..., #xk)`` over the
        canonical source of f
    """
    dim = p.dim_of(f)
    if dim == 0:
        return Name(f)
    return App(Indet(f), tuple(ObjId(x, dim) for x in p.source_of(f)), dim)


def is_indet_cell(u: Cell) -> bool:
    """True for 0-cells and for indet heads applied to identities only."""
    if isinstance(u, Name):
        return True
    return (
        isinstance(u, App)
        and isinstance(u.head, Indet)
        and all(isinstance(a, ObjId) for a in u.args)
    )


def identity_over(w: Cell) -> Cell:
    """The identity on w, one dimension up.

    ``#x`` when w is (the default cell of) an indet x, otherwise the predet
    ``e{w}`` applied to the identity arrows of the indet occurrences of w.
    """
    dim = w.dim + 1
    if isinstance(w, Name):
        return ObjId(w.name, dim)
    if is_indet_cell(w):
        return ObjId(w.head.name, dim)
    return App(Predet(w), tuple(ObjId(x, dim) for x in _indets(w)), dim)


def iterated_identity(w: Cell, m: int) -> Cell:
    """Apply ``identity_over`` until the cell has dimension m."""
    if m < w.dim:
        raise DimensionError(f"cannot lift a {w.dim}-cell to dimension {m}")
    while w.dim < m:
        w = identity_over(w)
    return w


# ---------------------------------------------------------------------------
# Targets and boundaries
# ---------------------------------------------------------------------------

def target(p: 'Presentation', u: Cell) -> str:
    """Name of the target object of a many-to-one cell."""
    if isinstance(u, Name):
        raise DimensionError("0-cells have no target")
    if isinstance(u, ObjId):
        return u.name
    if isinstance(u.head, Predet):
        raise CompositionError(f"{render(u)} is not many-to-one")
    return p.codomain_of(u.head.name)


def boundary(p: 'Presentation', u: Cell) -> Tuple[Cell, Cell]:
    """Domain and codomain of a cell of dimension >= 1.

    The codomain is read off the head. The domain is the domain of the head
    with its i-th indet occurrence replaced by the domain of the i-th
    argument, for all i simultaneously. Results are memoised in
    ``p.boundary_cache``.

    Args:
        p: Presentation the cell lives over
        u: Cell of dimension >= 1

    Returns:
        Tuple of (domain, codomain)
    """
    if u.dim == 0:
        raise DimensionError("0-cells have no boundary")
    cache = p.boundary_cache
    hit = cache.get(u)
    if hit is not None:
        return hit

    if isinstance(u, ObjId):
        x = indet_cell(p, u.name)
        result = (x, x)
    else:
        if isinstance(u.head, Indet):
            base = p.domain_of(u.head.name)
            cod = indet_cell(p, p.codomain_of(u.head.name))
        else:
            base = u.head.payload
            cod = base
        subs = {i: boundary(p, a)[0] for i, a in enumerate(u.args)}
        result = (_substitute(base, subs), cod)

    cache[u] = result
    return result


def domain(p: 'Presentation', u: Cell) -> Cell:
    return boundary(p, u)[0]


def codomain(p: 'Presentation', u: Cell) -> Cell:
    return boundary(p, u)[1]


def iterated_boundary(p: 'Presentation', u: Cell, k: int, side: str) -> Cell:
    """The k-dimensional domain or codomain of u.

    Args:
        p: Presentation the cell lives over
        u: Cell of dimension > k
        k: Target dimension
        side: ``'domain'`` or ``'codomain'``

    Returns:
        The k-cell reached by applying the boundary dim(u) - k times
    """
    if not 0 <= k < u.dim:
        raise DimensionError(f"boundary dimension {k} out of range for a {u.dim}-cell")
    index = 0 if side == DOMAIN else 1
    while u.dim > k:
        u = boundary(p, u)[index]
    return u


def parallel(p: 'Presentation', u: Cell, v: Cell) -> bool:
    """Same dimension and same boundary (any two 0-cells are parallel)."""
    if u.dim != v.dim:
        return False
    return u.dim == 0 or boundary(p, u) == boundary(p, v)


# ---------------------------------------------------------------------------
# Substitution walkers
# ---------------------------------------------------------------------------

def _fill(v: Cell, fillers: Tuple[Cell, ...]) -> Cell:
    """Replace the object slots of v, left to right, by fillers."""
    slots = iter(fillers)

    def walk(t: Cell) -> Cell:
        if isinstance(t, ObjId):
            return next(slots)
        return App(t.head, tuple(walk(a) for a in t.args), t.dim)

    return walk(v)


def _substitute(u: Cell, subs: Dict[int, Cell]) -> Cell:
    """Replace indet occurrences of u by parallel cells, simultaneously."""
    if isinstance(u, Name):
        return subs.get(0, u)
    counter = [0]

    def walk(t: Cell) -> Cell:
        if isinstance(t, ObjId):
            return t
        if isinstance(t.head, Indet):
            i = counter[0]
            counter[0] += 1
            args = tuple(walk(a) for a in t.args)
            v = subs.get(i)
            if v is not None:
                return _fill(v, args)
            return t if args == t.args else App(t.head, args, t.dim)
        return App(t.head, tuple(walk(a) for a in t.args), t.dim)

    return walk(u)


def _substitute_tracked(u: Cell, r: int, v: Cell) -> Tuple[Cell, List[Tuple[str, int]]]:
    """Single replacement that also reports where every indet came from.

    Returns the new cell and, for each of its indet occurrences in order,
    ``('u', i)`` or ``('v', j)``.
    """
    counter = [0]

    def fill(args: Tuple[Tuple[Cell, list], ...]) -> Tuple[Cell, list]:
        slots = iter(args)
        seen = [0]

        def walk(t: Cell) -> Tuple[Cell, list]:
            if isinstance(t, ObjId):
                return next(slots)
            tags = []
            if isinstance(t.head, Indet):
                tags.append(('v', seen[0]))
                seen[0] += 1
            parts = [walk(a) for a in t.args]
            for _, sub in parts:
                tags.extend(sub)
            return App(t.head, tuple(c for c, _ in parts), t.dim), tags

        return walk(v)

    def walk(t: Cell) -> Tuple[Cell, list]:
        if isinstance(t, ObjId):
            return t, []
        if isinstance(t.head, Indet):
            i = counter[0]
            counter[0] += 1
            parts = tuple(walk(a) for a in t.args)
            if i == r:
                return fill(parts)
            tags = [('u', i)]
        else:
            parts = tuple(walk(a) for a in t.args)
            tags = []
        for _, sub in parts:
            tags.extend(sub)
        return App(t.head, tuple(c for c, _ in parts), t.dim), tags

    return walk(u)


def _graft(u: Cell, subs: Dict[int, Cell]) -> Tuple[Cell, List[int], Dict[int, int]]:
    """Replace object slots of u by cells.

    Returns the new cell, the result position of every indet of u, and for
    each substituted slot the position of the first indet it contributed.
    """
    leaf = [0]
    pos = [0]
    u_positions: List[int] = []
    starts: Dict[int, int] = {}

    def walk(t: Cell) -> Cell:
        if isinstance(t, ObjId):
            j = leaf[0]
            leaf[0] += 1
            v = subs.get(j)
            if v is None:
                return t
            starts[j] = pos[0]
            pos[0] += len(_indets(v))
            return v
        if isinstance(t.head, Indet):
            u_positions.append(pos[0])
            pos[0] += 1
        return App(t.head, tuple(walk(a) for a in t.args), t.dim)

    return walk(u), u_positions, starts


def _splice(u: Cell, r: int, v: Cell) -> Tuple[Cell, ProvenancePair, ProvenancePair]:
    cell, u_positions, starts = _graft(u, {r: v})
    n_v = len(_objects(v))
    objects = ProvenancePair(
        OBJECTS,
        {i: (i if i < r else i + n_v - 1) for i in range(len(_objects(u))) if i != r},
        {j: r + j for j in range(n_v)},
    )
    indets = ProvenancePair(
        INDETS,
        dict(enumerate(u_positions)),
        {j: starts[r] + j for j in range(len(_indets(v)))},
    )
    return cell, objects, indets


# ---------------------------------------------------------------------------
# Replacement, multicomposition, whiskering, placed composition
# ---------------------------------------------------------------------------

def _check_replacement(p: 'Presentation', u: Cell, r: int, v: Cell) -> None:
    occ = _indets(u)
    if not 0 <= r < len(occ):
        raise PositionError(r, len(occ), 'indet')
    if v.dim != u.dim:
        raise DimensionError(f"cannot replace inside a {u.dim}-cell by a {v.dim}-cell")
    if not parallel(p, v, indet_cell(p, occ[r])):
        raise ParallelismError(
            f"parallelism violated: {render(v)} is not parallel to {occ[r]}"
        )


def replace(p: 'Presentation', u: Cell, r: int, v: Cell) -> Cell:
    """Replace the r-th indet occurrence of u by a parallel cell v.

    Args:
        p: Presentation
        u: Cell to rewrite
        r: Indet occurrence position in u
        v: Cell parallel to the indet at position r

    Returns:
        The rewritten cell, parallel to u; at dimension 0 simply v
    """
    _check_replacement(p, u, r, v)
    if u.dim == 0:
        return v
    return _substitute(u, {r: v})


def replace_tracked(p: 'Presentation', u: Cell, r: int, v: Cell) -> Tuple[Cell, ProvenancePair]:
    """``replace`` plus the provenance of the indet occurrences of the result."""
    _check_replacement(p, u, r, v)
    if u.dim == 0:
        return v, ProvenancePair(INDETS, {}, {0: 0})
    cell, tags = _substitute_tracked(u, r, v)
    left = {i: pos for pos, (side, i) in enumerate(tags) if side == 'u'}
    right = {j: pos for pos, (side, j) in enumerate(tags) if side == 'v'}
    return cell, ProvenancePair(INDETS, left, right)


def multicompose(p: 'Presentation', u: Cell, r: int, v: Cell) -> Tuple[Cell, ProvenancePair]:
    """Plug the many-to-one cell v into the r-th object slot of u.

    Args:
        p: Presentation
        u: Cell of dimension >= 1
        r: Object slot of u
        v: Many-to-one cell of the same dimension whose target is the object
            at slot r

    Returns:
        Tuple of (composite, object-slot provenance of u minus r and of v)
    """
    if u.dim == 0 or v.dim != u.dim:
        raise DimensionError(f"cannot multicompose a {u.dim}-cell with a {v.dim}-cell")
    slots = _objects(u)
    if not 0 <= r < len(slots):
        raise PositionError(r, len(slots), 'object')
    if target(p, v) != slots[r]:
        raise CompositionError(
            f"target mismatch: {render(v)} targets {target(p, v)}, slot {r} is {slots[r]}"
        )
    cell, objects, _ = _splice(u, r, v)
    return cell, objects


def whisker(p: 'Presentation', w: Cell, r: int, v: Cell) -> Cell:
    """Substitute v into the r-th indet occurrence of w through identities."""
    if v.dim != w.dim + 1:
        raise DimensionError(f"cannot whisker a {w.dim}-cell by a {v.dim}-cell")
    occ = _indets(w)
    if not 0 <= r < len(occ):
        raise PositionError(r, len(occ), 'indet')
    if codomain(p, v) != indet_cell(p, occ[r]):
        raise CompositionError(f"{render(v)} does not end in {occ[r]}")
    return multicompose(p, identity_over(w), r, v)[0]


def placed_compose(p: 'Presentation', u: Cell, r: int, v: Cell) -> Cell:
    """Compose v into the r-th indet occurrence of the domain of u."""
    if u.dim == 0 or v.dim != u.dim:
        raise DimensionError(f"cannot place a {v.dim}-cell into a {u.dim}-cell")
    occ = _indets(domain(p, u))
    if not 0 <= r < len(occ):
        raise PositionError(r, len(occ), 'domain occurrence')
    if codomain(p, v) != indet_cell(p, occ[r]):
        raise CompositionError(
            f"{render(v)} does not end in occurrence {r} ({occ[r]}) of the domain"
        )
    return _splice(u, r, v)[0]


# ---------------------------------------------------------------------------
# omega-categorical composition
# ---------------------------------------------------------------------------

def _fillers(t: Cell) -> Tuple[Tuple[Cell, ...], List[int]]:
    """Cells sitting over the indet occurrences of the codomain of t.

    A many-to-one cell fills its single codomain occurrence with itself; a
    predet cell fills the occurrences of its payload with its arguments.
    Also returns the offset of each filler's indets inside t.
    """
    if isinstance(t, App) and isinstance(t.head, Predet):
        offsets = []
        seen = 0
        for a in t.args:
            offsets.append(seen)
            seen += len(_indets(a))
        return t.args, offsets
    return (t,), [0]


def _compose(p: 'Presentation', u: Cell, k: int, v: Cell) -> Tuple[Cell, ProvenancePair]:
    m = u.dim
    if k == m - 1:
        du = domain(p, u)
        if is_indet_cell(du):
            cell, _, indets = _splice(u, 0, v)
            return cell, indets
        if not (isinstance(v, App) and isinstance(v.head, Predet)):
            raise CompositionError(f"{render(v)} does not end in {render(du)}")
        cell, u_positions, starts = _graft(u, dict(enumerate(v.args)))
        right = {}
        seen = 0
        for j, b in enumerate(v.args):
            for t in range(len(_indets(b))):
                right[seen + t] = starts[j] + t
            seen += len(_indets(b))
        return cell, ProvenancePair(INDETS, dict(enumerate(u_positions)), right)

    base, inner = _compose(p, codomain(p, u), k, codomain(p, v))
    fill_u, offsets_u = _fillers(u)
    fill_v, offsets_v = _fillers(v)
    slots: List[Optional[Tuple[str, int]]] = [None] * (len(fill_u) + len(fill_v))
    for i in range(len(fill_u)):
        slots[inner.left[i]] = ('u', i)
    for j in range(len(fill_v)):
        slots[inner.right[j]] = ('v', j)

    args = []
    left: Dict[int, int] = {}
    right: Dict[int, int] = {}
    pos = 0
    for side, i in slots:
        filler = fill_u[i] if side == 'u' else fill_v[i]
        offset = offsets_u[i] if side == 'u' else offsets_v[i]
        target_map = left if side == 'u' else right
        count = len(_indets(filler))
        for t in range(count):
            target_map[offset + t] = pos + t
        pos += count
        args.append(filler)

    if is_indet_cell(base):
        cell = args[0]
    else:
        cell = App(Predet(base), tuple(args), m)
    return cell, ProvenancePair(INDETS, left, right)


def compose(p: 'Presentation', u: Cell, k: int, v: Cell) -> Tuple[Cell, ProvenancePair]:
    """The composite of u and v along their k-dimensional boundary.

    The operand of lower dimension is first lifted by identities to the
    dimension m of the other one.

    Args:
        p: Presentation
        u: Left operand
        k: Composition dimension, k < m
        v: Right operand, with c^(k) v = d^(k) u

    Returns:
        Tuple of (composite, indet-occurrence provenance of both operands)
    """
    m = max(u.dim, v.dim)
    if not 0 <= k < m:
        raise DimensionError(f"k ≥ dimension: cannot compose along {k} at dimension {m}")
    u = iterated_identity(u, m)
    v = iterated_identity(v, m)
    left_end = iterated_boundary(p, u, k, DOMAIN)
    right_end = iterated_boundary(p, v, k, CODOMAIN)
    if left_end != right_end:
        raise CompositionError(
            f"composite undefined: d^({k}) of {render(u)} is {render(left_end)}, "
            f"c^({k}) of {render(v)} is {render(right_end)}"
        )
    return _compose(p, u, k, v)


# ---------------------------------------------------------------------------
# Classification and well-formedness
# ---------------------------------------------------------------------------

def identity_depth(p: 'Presentation', u: Cell) -> int:
    """Largest j such that u is an iterated identity on a (dim - j)-cell."""
    depth = 0
    while u.dim > 0:
        below = domain(p, u)
        if identity_over(below) != u:
            break
        u = below
        depth += 1
    return depth


def classify(p: 'Presentation', u: Cell) -> Classification:
    many_to_one = not (isinstance(u, App) and isinstance(u.head, Predet))
    return Classification(
        is_identity=u.dim > 0 and not _indets(u),
        is_indet=is_indet_cell(u),
        is_many_to_one=many_to_one,
        identity_depth=identity_depth(p, u),
    )


def check_cell(p: 'Presentation', u: Cell, top: bool = True) -> None:
    """Raise unless u is a well-formed canonical cell over p.

    Args:
        p: Presentation
        u: Cell to check
        top: Whether u sits at the top of a cell (predets are only allowed there)
    """
    if isinstance(u, Name):
        if p.dim_of(u.name) != 0 or u.dim != 0:
            raise DimensionError(f"{u.name} is not a 0-indet")
        return
    if isinstance(u, ObjId):
        if u.dim < 1 or p.dim_of(u.name) != u.dim - 1:
            raise DimensionError(f"#{u.name} cannot have dimension {u.dim}")
        return

    if isinstance(u.head, Indet):
        f = u.head.name
        if p.dim_of(f) != u.dim:
            raise DimensionError(f"{f} is not a {u.dim}-indet")
        source = p.source_of(f)
    else:
        if not top:
            raise CompositionError(f"predet {render(u)} below the top of a cell")
        w = u.head.payload
        if w.dim != u.dim - 1:
            raise DimensionError(f"predet payload {render(w)} has the wrong dimension")
        check_cell(p, w)
        if is_indet_cell(w):
            raise CompositionError(f"predet over the indet cell {render(w)}")
        source = _indets(w)

    if len(u.args) != len(source):
        raise CompositionError(
            f"{render(u)}: expected {len(source)} arguments, got {len(u.args)}"
        )
    for expected, a in zip(source, u.args):
        if a.dim != u.dim:
            raise DimensionError(f"argument {render(a)} of {render(u)} has the wrong dimension")
        check_cell(p, a, top=False)
        if target(p, a) != expected:
            raise CompositionError(
                f"argument {render(a)} targets {target(p, a)}, expected {expected}"
            )
