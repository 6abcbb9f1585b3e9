"""Many-to-one computad presentations: data model, parsing, validation."""
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cells import (
    INDETS,
    Cell,
    check_cell,
    indet_cell,
    occurrences,
    parallel,
)
from .errors import (
    DimensionError,
    KernelError,
    PresentationError,
    TermSyntaxError,
    UnknownNameError,
)
from .terms import (
    eval_term,
    parse_source,
    readback,
    resolve_cterm,
    resolve_mterm,
    uses_placed_operator,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndetEntry:
    """One indet with its boundary data (none at dimension 0)."""

    name: str
    dim: int
    domain: Optional[Cell] = None
    codomain: Optional[str] = None


@dataclass(frozen=True)
class Violation:
    indet: str
    message: str

    def __str__(self) -> str:
        return f"{self.indet}: {self.message}"


@dataclass(frozen=True, repr=False)
class Presentation:
    """Indets per dimension 0..N with their domains and codomains.

    Equality compares the name and the levels. The boundary cache is a
    per-presentation memo table shared by every cell operation over it.
    """

    name: str
    levels: Tuple[Tuple[IndetEntry, ...], ...]
    boundary_cache: Dict[Cell, Tuple[Cell, Cell]] = field(
        default_factory=dict, compare=False, hash=False
    )
    _index: Dict[str, IndetEntry] = field(init=False, compare=False, hash=False)
    _sources: Dict[str, Tuple[str, ...]] = field(init=False, compare=False, hash=False)

    def __post_init__(self):
        index = {e.name: e for level in self.levels for e in level}
        object.__setattr__(self, '_index', index)
        object.__setattr__(self, '_sources', {})

    def __repr__(self) -> str:
        sizes = '+'.join(str(len(level)) for level in self.levels)
        return f"<Presentation(name='{self.name}', indets={sizes})>"

    @property
    def top_dim(self) -> int:
        return len(self.levels) - 1

    def names(self, n: int) -> List[str]:
        if not 0 <= n <= self.top_dim:
            return []
        return [e.name for e in self.levels[n]]

    def entries(self, n: int) -> Tuple[IndetEntry, ...]:
        if not 0 <= n <= self.top_dim:
            return ()
        return self.levels[n]

    def has(self, name: str) -> bool:
        return name in self._index

    def entry(self, name: str) -> IndetEntry:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownNameError(name, f"presentation {self.name}") from None

    def dim_of(self, name: str) -> int:
        return self.entry(name).dim

    def domain_of(self, name: str) -> Cell:
        e = self.entry(name)
        if e.domain is None:
            raise PresentationError(f"{name} has no domain")
        return e.domain

    def codomain_of(self, name: str) -> str:
        e = self.entry(name)
        if e.codomain is None:
            raise PresentationError(f"{name} has no codomain")
        return e.codomain

    def source_of(self, name: str) -> Tuple[str, ...]:
        """Indet occurrences of the domain of an indet, in canonical order."""
        source = self._sources.get(name)
        if source is None:
            source = occurrences(self.domain_of(name), INDETS)
            self._sources[name] = source
        return source


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _freeze(name: str, levels: Sequence[Sequence[IndetEntry]]) -> Presentation:
    return Presentation(name, tuple(tuple(level) for level in levels))


def presentation_from_levels(
    name: str,
    levels: Sequence[Sequence[IndetEntry]],
    check: bool = True,
) -> Presentation:
    """Build a presentation programmatically.

    Args:
        name: Presentation name
        levels: Indet entries per dimension
        check: Validate and raise on the first violation

    Returns:
        Presentation
    """
    p = _freeze(name, levels)
    if check:
        report = validate_presentation(p)
        if report:
            raise PresentationError(f"invalid presentation {name}: {report[0]}")
    return p


def parse_presentation(text: str, name: Optional[str] = None) -> Presentation:
    """Parse ``.cmp`` source into a presentation.

    Levels are built bottom-up: every domain expression is evaluated against
    the levels below it, then checked for the many-to-one condition and for
    parallelism with its codomain.

    Args:
        text: Presentation source
        name: Fallback name when the source has no ``name:`` header

    Returns:
        Presentation
    """
    items = parse_source(text, 'presentation')
    levels: List[List[IndetEntry]] = []
    seen: Dict[str, int] = {}
    below: Dict[int, Presentation] = {}
    title = name or 'presentation'

    for item in items:
        if item[0] == 'header':
            title = item[1]
            continue

        dim, line = item[1], item[-1]
        if dim > len(levels) or dim < len(levels) - 1:
            raise PresentationError(
                f"line {line}: dim {dim} declared after dim {len(levels) - 1}"
            )
        if dim == len(levels):
            levels.append([])

        if item[0] == 'names':
            if dim != 0:
                raise PresentationError(f"line {line}: {dim}-indets need a domain and a codomain")
            new = [IndetEntry(n, 0) for n in item[2]]
        else:
            _, _, indet, raw, cod, _ = item
            if dim == 0:
                raise PresentationError(f"line {line}: 0-indets carry no boundary data")
            lower = below.get(dim)
            if lower is None:
                lower = _freeze(title, levels[:dim])
                below[dim] = lower
            try:
                if uses_placed_operator(raw):
                    term = resolve_mterm(raw, lower)
                else:
                    term = resolve_cterm(raw, lower)
                if term.dim != dim - 1:
                    raise DimensionError(
                        f"domain of {indet} has dimension {term.dim}, expected {dim - 1}"
                    )
                dom = eval_term(term, lower)
            except TermSyntaxError:
                raise
            except PresentationError as e:
                raise PresentationError(f"line {line}: {e}") from e
            except KernelError as e:
                raise PresentationError(f"line {line}: {indet}: {e}") from e

            if not lower.has(cod) or lower.dim_of(cod) != dim - 1:
                raise PresentationError(
                    f"line {line}: codomain {cod} of {indet} is not an indet of dimension {dim - 1}"
                )
            if dim >= 2 and not parallel(lower, dom, indet_cell(lower, cod)):
                raise PresentationError(
                    f"line {line}: parallelism violated: domain {dom} of {indet} is not parallel to {cod}"
                )
            new = [IndetEntry(indet, dim, dom, cod)]

        for e in new:
            if e.name in seen:
                raise PresentationError(
                    f"line {line}: duplicate name '{e.name}' (first declared at dim {seen[e.name]})"
                )
            seen[e.name] = dim
        levels[dim].extend(new)

    p = _freeze(title, levels)
    logger.debug(f"Parsed presentation {p!r}")
    return p


def load_presentation(path: str) -> Presentation:
    """Read and parse a ``.cmp`` file; the file stem is the default name."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except UnicodeDecodeError as e:
        raise TermSyntaxError(f"{path}: not UTF-8 text (byte {e.start})") from e
    stem = os.path.splitext(os.path.basename(path))[0]
    p = parse_presentation(text, name=stem)
    logger.info(f"✅ Loaded presentation {p!r} from {path}")
    return p


# ---------------------------------------------------------------------------
# Validation, truncation, printing
# ---------------------------------------------------------------------------

def validate_presentation(p: Presentation) -> List[Violation]:
    """Every violated presentation invariant, with the offending indet.

    Args:
        p: Presentation to check

    Returns:
        List of violations, empty iff p is a valid many-to-one presentation
    """
    report: List[Violation] = []
    seen = set()

    for n, level in enumerate(p.levels):
        for e in level:
            if e.name in seen:
                report.append(Violation(e.name, "duplicate name"))
            seen.add(e.name)
            if e.dim != n:
                report.append(Violation(e.name, f"declared at level {n} with dimension {e.dim}"))
                continue
            if n == 0:
                if e.domain is not None or e.codomain is not None:
                    report.append(Violation(e.name, "0-indet with boundary data"))
                continue
            report.extend(_check_entry(p, e))

    if report:
        logger.debug(f"❌ {p.name}: {len(report)} violations")
    return report


def _check_entry(p: Presentation, e: IndetEntry) -> List[Violation]:
    n = e.dim
    found = []
    cod_ok = (
        e.codomain is not None
        and p.has(e.codomain)
        and p.dim_of(e.codomain) == n - 1
    )
    if not cod_ok:
        found.append(Violation(e.name, f"codomain not an indet of dimension {n - 1}"))

    if e.domain is None or e.domain.dim != n - 1:
        found.append(Violation(e.name, f"domain not a cell of dimension {n - 1}"))
        return found
    try:
        check_cell(truncate_presentation(p, n - 1), e.domain)
    except KernelError as err:
        found.append(Violation(e.name, f"domain not a valid cell: {err}"))
        return found

    if cod_ok and n >= 2:
        try:
            ok = parallel(p, e.domain, indet_cell(p, e.codomain))
        except KernelError:
            ok = False
        if not ok:
            found.append(Violation(e.name, "domain not parallel to codomain"))
    return found


def truncate_presentation(p: Presentation, n: int) -> Presentation:
    """The presentation made of levels 0..n of p."""
    if not 0 <= n <= p.top_dim:
        raise DimensionError(f"cannot truncate {p.name} (top dimension {p.top_dim}) at {n}")
    if n == p.top_dim:
        return p
    return Presentation(p.name, p.levels[:n + 1])


def render_presentation(p: Presentation) -> str:
    """Canonical ``.cmp`` text of p; domains are written as C-terms."""
    lines = [f"name: {p.name}"]
    for n, level in enumerate(p.levels):
        if n == 0:
            if level:
                lines.append(f"dim 0: {' '.join(e.name for e in level)}")
            continue
        arrow = '->' if n == 1 else '=>'
        for e in level:
            lines.append(f"dim {n}: {e.name} : {readback(e.domain, p)} {arrow} {e.codomain}")
    return '\n'.join(lines) + '\n'
