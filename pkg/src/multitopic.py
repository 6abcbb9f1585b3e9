"""Multitopic-set view of a presentation, its morphisms and the way back."""
import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .cells import (
    INDETS,
    OBJECTS,
    App,
    Cell,
    Indet,
    Name,
    ObjId,
    Predet,
    boundary,
    cell_record,
    codomain,
    domain,
    indet_cell,
    is_indet_cell,
    multicompose,
    occurrences,
    render,
    replace,
    target,
)
from .errors import DimensionError, KernelError, MorphismError, PresentationError
from .presentation import (
    IndetEntry,
    Presentation,
    presentation_from_levels,
    truncate_presentation,
    validate_presentation,
)
from .terms import parse_source

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LawViolation:
    """A failed law instance."""

    law: str
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.law}] {self.subject}: {self.detail}"


def cell_order(u: Cell) -> Tuple[int, str]:
    """Enumeration order: indet count, then canonical rendering."""
    return len(occurrences(u, INDETS)), render(u)


class MultitopicSet:
    """Per-dimension multicategories C_n / P_n with d and c, over a presentation.

    Nothing is copied out of the presentation: objects are its indet names,
    arrows are the many-to-one cells, and d, c are the cell boundaries.
    """

    def __init__(self, presentation: Presentation, config: Optional[dict] = None):
        """Initialize the view.

        Args:
            presentation: A validated presentation
            config: Application configuration dictionary
        """
        self.presentation = presentation
        self.config = config or {}
        enumeration = self.config.get('enumeration', {})
        self.max_indets = enumeration.get('max_indets', 4)
        self.payload_max_indets = enumeration.get('payload_max_indets', 2)
        self._arrows: Dict[Tuple[int, str, int], Tuple[Cell, ...]] = {}
        self._cells: Dict[Tuple[int, int, int], Tuple[Cell, ...]] = {}

    def __eq__(self, other) -> bool:
        return isinstance(other, MultitopicSet) and self.presentation == other.presentation

    def __hash__(self) -> int:
        return hash(self.presentation)

    def __repr__(self) -> str:
        return f"<MultitopicSet(over={self.presentation.name}, top_dim={self.top_dim})>"

    @property
    def top_dim(self) -> int:
        return self.presentation.top_dim

    def C(self, n: int) -> List[str]:
        """Objects of the level-n multicategory: the n-indets."""
        return self.presentation.names(n)

    def P(self, n: int, max_indets: Optional[int] = None) -> List[Cell]:
        """Arrows of the level-n multicategory with a bounded indet count."""
        bound = self.max_indets if max_indets is None else max_indets
        return enumerate_pasting_diagrams(self, n, bound)

    def d(self, u: Cell) -> Cell:
        return domain(self.presentation, u)

    def c(self, u: Cell) -> Cell:
        return codomain(self.presentation, u)

    def source(self, u: Cell) -> Tuple[str, ...]:
        return occurrences(u, OBJECTS)

    def target(self, u: Cell) -> str:
        return target(self.presentation, u)

    # -----------------------------------------------------------------
    # Enumeration helpers
    # -----------------------------------------------------------------

    def arrows_into(self, n: int, x: str, budget: int) -> Tuple[Cell, ...]:
        """Many-to-one n-cells with target x and at most ``budget`` indets."""
        key = (n, x, budget)
        hit = self._arrows.get(key)
        if hit is not None:
            return hit

        p = self.presentation
        found: List[Cell] = [ObjId(x, n)]
        if budget > 0:
            for e in p.entries(n):
                if e.codomain != x:
                    continue
                for args in self.fill(n, p.source_of(e.name), budget - 1):
                    found.append(App(Indet(e.name), args, n))
        result = tuple(found)
        self._arrows[key] = result
        return result

    def fill(self, n: int, source: Sequence[str], budget: int) -> Iterator[Tuple[Cell, ...]]:
        """Argument tuples for a source, sharing one indet budget."""
        if not source:
            yield ()
            return
        for head in self.arrows_into(n, source[0], budget):
            used = len(occurrences(head, INDETS))
            for rest in self.fill(n, source[1:], budget - used):
                yield (head,) + rest

    def all_cells(self, n: int, max_indets: int, payload_max_indets: int) -> Tuple[Cell, ...]:
        """Every canonical n-cell in the bounds, predet-headed ones included."""
        key = (n, max_indets, payload_max_indets)
        hit = self._cells.get(key)
        if hit is not None:
            return hit

        found = list(enumerate_pasting_diagrams(self, n, max_indets))
        if n >= 2:
            payloads = self.all_cells(n - 1, payload_max_indets, payload_max_indets)
            for w in payloads:
                if is_indet_cell(w):
                    continue
                for args in self.fill(n, occurrences(w, INDETS), max_indets):
                    found.append(App(Predet(w), args, n))
        result = tuple(sorted(found, key=cell_order))
        self._cells[key] = result
        logger.debug(
            f"{self.presentation.name}: {len(result)} cells at dim {n} "
            f"(max_indets={max_indets}, payload={payload_max_indets})"
        )
        return result


def mlt_of_presentation(p: Presentation, config: Optional[dict] = None) -> MultitopicSet:
    """The multitopic set of a valid presentation."""
    report = validate_presentation(p)
    if report:
        raise PresentationError(f"invalid presentation {p.name}: {report[0]}")
    return MultitopicSet(p, config)


def truncate_mlt(S: MultitopicSet, n: int) -> MultitopicSet:
    return MultitopicSet(truncate_presentation(S.presentation, n), S.config)


def enumerate_pasting_diagrams(S: MultitopicSet, n: int, max_indets: int) -> List[Cell]:
    """All many-to-one n-cells with at most ``max_indets`` indet occurrences.

    Level 0 is the barren set of 0-indets. Cells come out once each, ordered by
    indet count and then by canonical rendering.

    Args:
        S: Multitopic set
        n: Dimension, at most the top dimension
        max_indets: Bound on indet occurrences

    Returns:
        List of cells
    """
    if not 0 <= n <= S.top_dim:
        raise DimensionError(f"no level {n} in {S.presentation.name}")
    if n == 0:
        return sorted((Name(x) for x in S.C(0)), key=cell_order)
    found = []
    for x in S.C(n - 1):
        found.extend(S.arrows_into(n, x, max_indets))
    return sorted(found, key=cell_order)


def enumerate_cells(
    S: MultitopicSet,
    n: int,
    max_indets: int,
    payload_max_indets: Optional[int] = None,
) -> List[Cell]:
    """All canonical n-cells in the bounds: pasting diagrams and predet cells.

    Args:
        S: Multitopic set
        n: Dimension
        max_indets: Bound on indet occurrences of the cell
        payload_max_indets: Bound on indet occurrences of predet payloads

    Returns:
        List of cells in enumeration order
    """
    if not 0 <= n <= S.top_dim:
        raise DimensionError(f"no level {n} in {S.presentation.name}")
    bound = S.payload_max_indets if payload_max_indets is None else payload_max_indets
    return list(S.all_cells(n, max_indets, bound))


def composable_pairs(S: MultitopicSet, n: int, bound: int) -> Iterator[Tuple[Cell, int, Cell]]:
    """Triples (u, r, v) with u ⊙_r v defined and at most ``bound`` indets in total."""
    for u in S.P(n, bound):
        used = len(occurrences(u, INDETS))
        for r, x in enumerate(occurrences(u, OBJECTS)):
            for v in S.arrows_into(n, x, bound - used):
                yield u, r, v


# ---------------------------------------------------------------------------
# Structural laws
# ---------------------------------------------------------------------------

def check_multitopic_laws(S: MultitopicSet, n: int, bound: int) -> List[LawViolation]:
    """Check the source, target, free-extension and globularity conditions.

    Args:
        S: Multitopic set
        n: Level to check (1..top)
        bound: Indet bound for the enumerated population

    Returns:
        List of violations, expected empty
    """
    p = S.presentation
    report: List[LawViolation] = []
    if n == 0:
        return report

    def check(law: str, subject: Cell, ok: bool, detail: str) -> None:
        if not ok:
            report.append(LawViolation(law, render(subject), detail))

    for x in S.C(n - 1):
        unit = ObjId(x, n)
        check('identity-boundary', unit, boundary(p, unit) == (indet_cell(p, x),) * 2,
              f"boundary {tuple(map(render, boundary(p, unit)))}")

    for u in S.P(n, bound):
        try:
            du, cu = boundary(p, u)
            check('source', u, occurrences(du, INDETS) == S.source(u),
                  f"S u = {S.source(u)} but <d u> = {occurrences(du, INDETS)}")
            check('target', u, cu == indet_cell(p, S.target(u)),
                  f"c u = {render(cu)} but T u = {S.target(u)}")
            if n >= 2:
                check('globularity', u, boundary(p, du) == boundary(p, cu),
                      "d d u, c d u differ from d c u, c c u")
        except KernelError as e:
            report.append(LawViolation('boundary', render(u), str(e)))

    for u, r, v in composable_pairs(S, n, bound):
        subject = f"{render(u)} o[{r}] {render(v)}"
        try:
            w, _ = multicompose(p, u, r, v)
            expected = replace(p, domain(p, u), r, domain(p, v))
            if domain(p, w) != expected:
                report.append(LawViolation(
                    'domain-of-composite', subject,
                    f"{render(domain(p, w))} != {render(expected)}",
                ))
            if codomain(p, w) != codomain(p, u):
                report.append(LawViolation('codomain-of-composite', subject, render(codomain(p, w))))
        except KernelError as e:
            report.append(LawViolation('composite', subject, str(e)))

    if report:
        logger.warning(f"❌ {p.name} dim {n}: {len(report)} multitopic law violations")
    else:
        logger.info(f"✅ {p.name} dim {n}: multitopic laws hold up to {bound} indets")
    return report


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MltMorphism:
    """A map of multitopic sets, determined by its values on indets."""

    source: MultitopicSet
    target: MultitopicSet
    images: Dict[str, str]

    def __hash__(self) -> int:
        return hash((self.source, self.target, tuple(sorted(self.images.items()))))


def _image(images: Dict[str, str], u: Cell) -> Cell:
    if isinstance(u, Name):
        return Name(images[u.name])
    if isinstance(u, ObjId):
        return ObjId(images[u.name], u.dim)
    args = tuple(_image(images, a) for a in u.args)
    if isinstance(u.head, Indet):
        return App(Indet(images[u.head.name]), args, u.dim)
    return App(Predet(_image(images, u.head.payload)), args, u.dim)


def build_morphism(S: MultitopicSet, T: MultitopicSet, indet_images: Dict[str, str]) -> MltMorphism:
    """Check an indet map dimension by dimension and return the morphism.

    Names left out of the map go to themselves when T declares the same name
    at the same dimension.

    Args:
        S: Source multitopic set
        T: Target multitopic set, of top dimension at least that of S
        indet_images: Map from indets of S to indets of T

    Returns:
        MltMorphism
    """
    p, q = S.presentation, T.presentation
    if S.top_dim > T.top_dim:
        raise MorphismError(
            f"source {p.name} has top dimension {S.top_dim} > {T.top_dim} of {q.name}"
        )
    for name in indet_images:
        if not p.has(name):
            raise MorphismError(f"'{name}' is not an indet of {p.name}")

    images: Dict[str, str] = {}
    for n in range(S.top_dim + 1):
        for e in p.entries(n):
            g = indet_images.get(e.name)
            if g is None:
                if not (q.has(e.name) and q.dim_of(e.name) == n):
                    raise MorphismError(f"no image for {e.name}")
                g = e.name
            if not q.has(g) or q.dim_of(g) != n:
                raise MorphismError(f"image {g} of {e.name} is not an indet of dimension {n} in {q.name}")
            images[e.name] = g
            if n == 0:
                continue
            expected_domain = _image(images, e.domain)
            if q.domain_of(g) != expected_domain:
                raise MorphismError(
                    f"{e.name} -> {g}: domain {render(q.domain_of(g))} != image of domain "
                    f"{render(expected_domain)}"
                )
            if q.codomain_of(g) != images[e.codomain]:
                raise MorphismError(
                    f"{e.name} -> {g}: codomain {q.codomain_of(g)} != image of codomain "
                    f"{images[e.codomain]}"
                )
    logger.debug(f"Built morphism {p.name} -> {q.name} on {len(images)} indets")
    return MltMorphism(S, T, images)


def apply_morphism(m: MltMorphism, u: Cell) -> Cell:
    """Image of a pasting diagram; heads are relabelled, structure kept."""
    if isinstance(u, App) and isinstance(u.head, Predet):
        raise MorphismError(f"{render(u)} is not many-to-one")
    try:
        return _image(m.images, u)
    except KeyError as e:
        raise MorphismError(f"{e.args[0]} is not in the domain of the morphism") from None


def identity_morphism(S: MultitopicSet) -> MltMorphism:
    p = S.presentation
    names = {e.name: e.name for n in range(S.top_dim + 1) for e in p.entries(n)}
    return MltMorphism(S, S, names)


def compose_morphisms(g: MltMorphism, f: MltMorphism) -> MltMorphism:
    """g after f."""
    if f.target != g.source:
        raise MorphismError("morphisms are not composable")
    return MltMorphism(f.source, g.target, {x: g.images[y] for x, y in f.images.items()})


def parse_map(text: str) -> Dict[str, str]:
    """Read a ``.map`` file of ``name -> name`` lines."""
    images: Dict[str, str] = {}
    for source, image, line in parse_source(text, 'mapping'):
        if source in images:
            raise MorphismError(f"line {line}: {source} mapped twice")
        images[source] = image
    return images


def parse_map_flags(flags: Sequence[str]) -> Dict[str, str]:
    """Read repeated ``f=g`` flags."""
    images: Dict[str, str] = {}
    for flag in flags:
        source, sep, image = flag.partition('=')
        source, image = source.strip(), image.strip()
        if not sep or not source or not image:
            raise MorphismError(f"malformed map entry '{flag}', expected f=g")
        if source in images:
            raise MorphismError(f"{source} mapped twice")
        images[source] = image
    return images


# ---------------------------------------------------------------------------
# Back to presentations, export
# ---------------------------------------------------------------------------

def computad_of_mlt(S: MultitopicSet) -> Presentation:
    """The presentation generated by the objects of every level of S.

    The n-indets are C_n; each gets the domain d f and the codomain name c f
    read off the multitopic structure.
    """
    p = S.presentation
    levels: List[List[IndetEntry]] = [[IndetEntry(x, 0) for x in S.C(0)]]
    for n in range(1, S.top_dim + 1):
        level = []
        for f in S.C(n):
            u = indet_cell(p, f)
            level.append(IndetEntry(f, n, S.d(u), S.target(u)))
        levels.append(level)
    return presentation_from_levels(p.name, levels)


def export_mlt(S: MultitopicSet, n: int, bound: int) -> dict:
    """Structured export of the truncation at n, cells bounded by indet count.

    Returns:
        ``{dims, cells: {k: [cell records]}, d: [...], c: [...]}`` where every
        d / c entry pairs a cell rendering with the rendering of its boundary
    """
    T = truncate_mlt(S, n)
    cells = {}
    d_entries = []
    c_entries = []
    for k in range(n + 1):
        population = T.P(k, bound)
        cells[str(k)] = [cell_record(u) for u in population]
        if k == 0:
            continue
        for u in population:
            d_entries.append({'dim': k, 'cell': render(u), 'image': render(T.d(u))})
            c_entries.append({'dim': k, 'cell': render(u), 'image': render(T.c(u))})
    return {'dims': n, 'cells': cells, 'd': d_entries, 'c': c_entries}
