"""Executable law suites over enumerated and randomly sampled cells.

Every suite returns a list of ``LawViolation`` records; an empty list means
the laws held on the whole population. ``LawChecker.run`` drives them for the
``verify`` command and the acceptance tests.
"""
import logging
import random
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .cells import (
    CODOMAIN,
    DOMAIN,
    INDETS,
    OBJECTS,
    App,
    Cell,
    Indet,
    ObjId,
    boundary,
    codomain,
    compose,
    domain,
    identity_depth,
    indet_cell,
    is_indet_cell,
    iterated_boundary,
    iterated_identity,
    multicompose,
    occurrences,
    placed_compose,
    render,
    replace,
    replace_tracked,
    whisker,
)
from .deduction import axiom_rewrites, check_proof, check_proof_text, render_proof
from .errors import KernelError
from .multitopic import (
    LawViolation,
    MultitopicSet,
    check_multitopic_laws,
    composable_pairs,
    enumerate_cells,
)
from .oracle import TermSpace, mutate_proof, random_proof, replace_subterm, subterms
from .presentation import Presentation, parse_presentation, render_presentation
from .terms import (
    LANG_C,
    LANG_M,
    decide_equal,
    eval_cterm,
    eval_mterm,
    parse_cell,
    parse_cterm,
    parse_mterm,
    readback,
)

logger = logging.getLogger(__name__)

SUITES = (
    'multicategory',
    'omega',
    'placed',
    'replacement',
    'globularity',
    'well_behaved',
    'indet_characterization',
    'readback',
    'proofs',
)

MAX_VIOLATIONS = 100


def _count(u: Cell) -> int:
    return len(occurrences(u, INDETS))


class LawChecker:
    """Runs the law suites against one presentation."""

    def __init__(self, p: Presentation, config: Optional[dict] = None, seed: Optional[int] = None):
        """Initialize the checker.

        Args:
            p: Validated presentation
            config: Application configuration dictionary (``verify`` and
                ``enumeration`` sections)
            seed: Overrides ``verify.seed``
        """
        self.p = p
        self.config = config or {}
        verify = self.config.get('verify', {})
        self.seed = verify.get('seed', 7) if seed is None else seed
        self.bound = verify.get('max_indets', 3)
        self.samples = verify.get('samples', 200)
        self.sample_max_indets = verify.get('sample_max_indets', 8)
        self.proofs = verify.get('proofs', 100)
        self.mutations = verify.get('mutations', 100)
        self.proof_steps = verify.get('proof_steps', 3)
        self.proof_term_size = verify.get('proof_term_size', 5)
        self.payload_bound = self.config.get('enumeration', {}).get('payload_max_indets', 2)
        self.S = MultitopicSet(p, self.config)
        self.rng = random.Random(self.seed)
        self._pairs: Dict[Tuple[int, int, bool], List[Tuple[Cell, Cell, Cell]]] = {}

    @property
    def dims(self) -> range:
        return range(1, self.p.top_dim + 1)

    def run(self, suites: Optional[Sequence[str]] = None) -> Dict[str, List[LawViolation]]:
        """Run the named suites (all of them by default)."""
        results: Dict[str, List[LawViolation]] = {}
        for name in suites or SUITES:
            if name not in SUITES:
                raise ValueError(f"unknown law suite: {name}")
            self.rng = random.Random(f"{self.seed}:{name}")
            report = getattr(self, f"check_{name}")()
            results[name] = report
            status = '✅' if not report else '❌'
            logger.info(f"{status} {self.p.name} {name}: {len(report)} violations")
        return results

    # -----------------------------------------------------------------
    # Helpers
    # -----------------------------------------------------------------

    def _law(self, report: List[LawViolation], law: str, subject: str,
             check: Callable[[], bool], detail: str = 'sides differ') -> None:
        if len(report) >= MAX_VIOLATIONS:
            return
        try:
            ok = check()
        except KernelError as e:
            report.append(LawViolation(law, subject, f"undefined: {e}"))
            return
        if not ok:
            report.append(LawViolation(law, subject, detail))

    def arrows(self, n: int) -> List[Cell]:
        return self.S.P(n, self.bound)

    def cells(self, n: int) -> List[Cell]:
        return enumerate_cells(self.S, n, self.bound, self.payload_bound)

    def parallel_to(self, n: int, f: str, budget: int) -> List[Cell]:
        """Cells parallel to the indet f with at most ``budget`` indets."""
        fcell = indet_cell(self.p, f)
        if n == 0:
            return [c for c in self.cells(0)]
        key = boundary(self.p, fcell)
        return [c for c in self.cells(n) if _count(c) <= budget and boundary(self.p, c) == key]

    def pairs(self, n: int, k: int, mixed: bool = False) -> List[Tuple[Cell, Cell, Cell]]:
        """Composable pairs (u, v, u •k v) with at most ``bound`` indets together.

        With ``mixed`` the population also holds lower-dimensional cells,
        which compose after being lifted by identities.
        """
        key = (n, k, mixed)
        hit = self._pairs.get(key)
        if hit is not None:
            return hit

        population = list(self.cells(n))
        if mixed:
            for m in range(1, n):
                population.extend(self.cells(m))
        ends: Dict[Cell, List[Cell]] = {}
        for v in population:
            end = iterated_boundary(self.p, iterated_identity(v, n), k, CODOMAIN)
            ends.setdefault(end, []).append(v)

        found = []
        for u in population:
            start = iterated_boundary(self.p, iterated_identity(u, n), k, DOMAIN)
            for v in ends.get(start, ()):
                if _count(u) + _count(v) > self.bound:
                    continue
                try:
                    found.append((u, v, compose(self.p, u, k, v)[0]))
                except KernelError as e:
                    logger.debug(f"Composable pair rejected by compose: {e}")
        self._pairs[key] = found
        return found

    def random_arrow(self, n: int, x: str, budget: int) -> Cell:
        """A random many-to-one n-cell with target x."""
        options = [e for e in self.p.entries(n) if e.codomain == x] if budget > 0 else []
        if not options or self.rng.random() < 0.2:
            return ObjId(x, n)
        e = self.rng.choice(options)
        left = budget - 1
        args = []
        for y in self.p.source_of(e.name):
            a = self.random_arrow(n, y, left)
            left -= _count(a)
            args.append(a)
        return App(Indet(e.name), tuple(args), n)

    # -----------------------------------------------------------------
    # Multicategory laws
    # -----------------------------------------------------------------

    def check_multicategory(self) -> List[LawViolation]:
        """Identities, commutativity, associativity, bookkeeping, closure."""
        report: List[LawViolation] = []
        p = self.p
        for n in self.dims:
            population = self.arrows(n)
            members = set(population)
            for u in population:
                for r, x in enumerate(occurrences(u, OBJECTS)):
                    self._law(report, 'identity-right', f"{u} o[{r}] #{x}",
                              lambda: multicompose(p, u, r, ObjId(x, n))[0] == u)
                self._law(report, 'identity-left', f"#{self.S.target(u)} o[0] {u}",
                          lambda: multicompose(p, ObjId(self.S.target(u), n), 0, u)[0] == u)

            for u, r, v in composable_pairs(self.S, n, self.bound):
                self._composite_laws(report, n, u, r, v, members)
                self._multicategory_triples(report, n, u, r, v, self.bound)

            if not self.p.entries(n):
                continue
            for _ in range(self.samples):
                instance = self._random_instance(n)
                if instance is None:
                    continue
                u, r, v, q, w = instance
                self._composite_laws(report, n, u, r, v, None)
                self._random_triple(report, n, u, r, v, q, w)
        return report

    def _composite_laws(self, report, n: int, u: Cell, r: int, v: Cell, members) -> None:
        p = self.p
        subject = f"{u} o[{r}] {v}"
        try:
            uv, _ = multicompose(p, u, r, v)
        except KernelError as e:
            report.append(LawViolation('composite', subject, str(e)))
            return
        slots_u = occurrences(u, OBJECTS)
        expected = slots_u[:r] + occurrences(v, OBJECTS) + slots_u[r + 1:]
        self._law(report, 'source', subject, lambda: occurrences(uv, OBJECTS) == expected,
                  f"S = {occurrences(uv, OBJECTS)}, expected {expected}")
        self._law(report, 'domain', subject,
                  lambda: domain(p, uv) == replace(p, domain(p, u), r, domain(p, v)))
        self._law(report, 'codomain', subject, lambda: codomain(p, uv) == codomain(p, u))
        if members is not None and _count(uv) <= self.bound:
            self._law(report, 'closure', subject, lambda: uv in members,
                      f"{uv} missing from the enumerated arrows")

    def _multicategory_triples(self, report, n: int, u: Cell, r: int, v: Cell, budget: int) -> None:
        p = self.p
        uv, pp = multicompose(p, u, r, v)
        remaining = budget - _count(uv)
        for q, x in enumerate(occurrences(v, OBJECTS)):
            for w in self.S.arrows_into(n, x, remaining):
                self._law(
                    report, 'associativity', f"({u} o[{r}] {v}) o[{pp.right[q]}] {w}",
                    lambda: multicompose(p, uv, pp.right[q], w)[0]
                    == multicompose(p, u, r, multicompose(p, v, q, w)[0])[0],
                )
        for q, x in enumerate(occurrences(u, OBJECTS)):
            if q == r:
                continue
            for w in self.S.arrows_into(n, x, remaining):
                self._law(report, 'commutativity', f"({u} o[{r}] {v}) o[{pp.left[q]}] {w}",
                          lambda: self._commuted(u, r, v, q, w, pp))

    def _commuted(self, u: Cell, r: int, v: Cell, q: int, w: Cell, pp) -> bool:
        p = self.p
        lhs = multicompose(p, multicompose(p, u, r, v)[0], pp.left[q], w)[0]
        uw, pp2 = multicompose(p, u, q, w)
        return lhs == multicompose(p, uw, pp2.left[r], v)[0]

    def _random_instance(self, n: int):
        p = self.p
        objects = self.S.C(n - 1)
        u = self.random_arrow(n, self.rng.choice(objects), self.sample_max_indets)
        slots = occurrences(u, OBJECTS)
        if not slots:
            return None
        r = self.rng.randrange(len(slots))
        v = self.random_arrow(n, slots[r], self.sample_max_indets)
        width = len(slots) + len(occurrences(v, OBJECTS)) - 1
        if width == 0:
            return None
        q = self.rng.randrange(width)
        uv, _ = multicompose(p, u, r, v)
        w = self.random_arrow(n, occurrences(uv, OBJECTS)[q], self.sample_max_indets)
        return u, r, v, q, w

    def _random_triple(self, report, n: int, u: Cell, r: int, v: Cell, q: int, w: Cell) -> None:
        """q indexes the slots of u ⊙_r v."""
        p = self.p
        uv, pp = multicompose(p, u, r, v)
        inverse_left = {pos: i for i, pos in pp.left.items()}
        inverse_right = {pos: j for j, pos in pp.right.items()}
        if q in inverse_right:
            j = inverse_right[q]
            self._law(report, 'associativity', f"({u} o[{r}] {v}) o[{q}] {w}",
                      lambda: multicompose(p, uv, q, w)[0]
                      == multicompose(p, u, r, multicompose(p, v, j, w)[0])[0])
        else:
            i = inverse_left[q]
            self._law(report, 'commutativity', f"({u} o[{r}] {v}) o[{q}] {w}",
                      lambda: self._commuted(u, r, v, i, w, pp))

    # -----------------------------------------------------------------
    # omega-category laws
    # -----------------------------------------------------------------

    def check_omega(self) -> List[LawViolation]:
        """Identity, associativity, exchange and boundary laws for compose."""
        report: List[LawViolation] = []
        p = self.p
        for n in self.dims:
            for u in self.cells(n):
                for k in range(n):
                    start = iterated_boundary(p, u, k, DOMAIN)
                    end = iterated_boundary(p, u, k, CODOMAIN)
                    self._law(report, 'identity-right', f"{u} *{k} 1({start})",
                              lambda: compose(p, u, k, iterated_identity(start, n))[0] == u)
                    self._law(report, 'identity-left', f"1({end}) *{k} {u}",
                              lambda: compose(p, iterated_identity(end, n), k, u)[0] == u)
                    self._law(report, 'whisker-identity', f"{u} *{k} {start}",
                              lambda: compose(p, u, k, start)[0] == u)

            for k in range(n):
                self._compose_boundaries(report, n, k)
                self._associativity(report, n, k)
                for l in range(k):
                    self._exchange(report, n, k, l)
        return report

    def _compose_boundaries(self, report, n: int, k: int) -> None:
        p = self.p
        for u, v, uv in self.pairs(n, k):
            subject = f"{u} *{k} {v}"
            if k == n - 1:
                self._law(report, 'domain-of-compose', subject, lambda: domain(p, uv) == domain(p, v))
                self._law(report, 'codomain-of-compose', subject,
                          lambda: codomain(p, uv) == codomain(p, u))
            else:
                self._law(report, 'domain-of-compose', subject,
                          lambda: domain(p, uv) == compose(p, domain(p, u), k, domain(p, v))[0])
                self._law(report, 'codomain-of-compose', subject,
                          lambda: codomain(p, uv) == compose(p, codomain(p, u), k, codomain(p, v))[0])

    def _associativity(self, report, n: int, k: int) -> None:
        p = self.p
        by_left: Dict[Cell, List[Tuple[Cell, Cell]]] = {}
        for v, w, vw in self.pairs(n, k, mixed=True):
            by_left.setdefault(v, []).append((w, vw))
        for u, v, uv in self.pairs(n, k, mixed=True):
            for w, vw in by_left.get(v, ()):
                if _count(uv) + _count(w) > self.bound:
                    continue
                self._law(report, 'associativity', f"({u} *{k} {v}) *{k} {w}",
                          lambda: compose(p, uv, k, w)[0] == compose(p, u, k, vw)[0])

    def _exchange(self, report, n: int, k: int, l: int) -> None:
        p = self.p
        by_end: Dict[Cell, List[Tuple[Cell, Cell, Cell]]] = {}
        for triple in self.pairs(n, k, mixed=True):
            end = iterated_boundary(p, iterated_identity(triple[2], n), l, CODOMAIN)
            by_end.setdefault(end, []).append(triple)
        for a, a1, top in self.pairs(n, k, mixed=True):
            start = iterated_boundary(p, iterated_identity(top, n), l, DOMAIN)
            for b, b1, bottom in by_end.get(start, ()):
                if _count(top) + _count(bottom) > self.bound:
                    continue
                # Operands of the mixed population may sit at or below dimension l
                la, la1, lb, lb1 = (iterated_identity(c, n) for c in (a, a1, b, b1))
                self._law(
                    report, 'exchange', f"({a} *{k} {a1}) *{l} ({b} *{k} {b1})",
                    lambda: compose(p, top, l, bottom)[0] == compose(
                        p, compose(p, la, l, lb)[0], k, compose(p, la1, l, lb1)[0]
                    )[0],
                )

    # -----------------------------------------------------------------
    # Placed composition and replacement
    # -----------------------------------------------------------------

    def check_placed(self) -> List[LawViolation]:
        """Identity rules, agreement with compose, domain law, comm., assoc., interchange."""
        report: List[LawViolation] = []
        p = self.p
        for n in self.dims:
            for x in self.S.C(n - 1):
                for v in self.S.arrows_into(n, x, self.bound):
                    self._law(report, 'placed-identity-left', f"#{x} o0 {v}",
                              lambda: placed_compose(p, ObjId(x, n), 0, v) == v)

            for u in self.cells(n):
                du = domain(p, u)
                occ = occurrences(du, INDETS)
                for r, x in enumerate(occ):
                    self._law(report, 'placed-identity-right', f"{u} o{r} #{x}",
                              lambda: placed_compose(p, u, r, ObjId(x, n)) == u)
                    for v in self.S.arrows_into(n, x, self.bound - _count(u)):
                        self._placed_pair(report, n, u, r, v)

            for k in range(n):
                self._interchange(report, n, k)
        return report

    def _placed_pair(self, report, n: int, u: Cell, r: int, v: Cell) -> None:
        p = self.p
        subject = f"{u} o{r} {v}"
        du = domain(p, u)
        try:
            uv = placed_compose(p, u, r, v)
        except KernelError as e:
            report.append(LawViolation('placed', subject, str(e)))
            return
        self._law(report, 'placed-agreement', subject,
                  lambda: uv == compose(p, u, n - 1, whisker(p, du, r, v))[0])
        self._law(report, 'placed-domain', subject,
                  lambda: domain(p, uv) == replace(p, du, r, domain(p, v)))
        self._law(report, 'placed-codomain', subject, lambda: codomain(p, uv) == codomain(p, u))

        _, prov = replace_tracked(p, du, r, domain(p, v))
        remaining = self.bound - _count(uv)
        occ = occurrences(du, INDETS)
        for q, y in enumerate(occ):
            if q == r:
                continue
            for w in self.S.arrows_into(n, y, remaining):
                self._law(report, 'placed-commutativity', f"({subject}) o{prov.left[q]} {w}",
                          lambda: self._placed_commuted(u, r, v, q, w, prov))
        for q, y in enumerate(occurrences(domain(p, v), INDETS)):
            for w in self.S.arrows_into(n, y, remaining):
                self._law(report, 'placed-associativity', f"({subject}) o{prov.right[q]} {w}",
                          lambda: placed_compose(p, uv, prov.right[q], w)
                          == placed_compose(p, u, r, placed_compose(p, v, q, w)))

    def _placed_commuted(self, u: Cell, r: int, v: Cell, q: int, w: Cell, prov) -> bool:
        p = self.p
        du = domain(p, u)
        lhs = placed_compose(p, placed_compose(p, u, r, v), prov.left[q], w)
        _, prov2 = replace_tracked(p, du, q, domain(p, w))
        return lhs == placed_compose(p, placed_compose(p, u, q, w), prov2.left[r], v)

    def _interchange(self, report, n: int, k: int) -> None:
        p = self.p
        for u, v1, uv in self.pairs(n, k):
            dv = domain(p, v1)
            remaining = self.bound - _count(uv)
            for r, x in enumerate(occurrences(dv, INDETS)):
                for v2 in self.S.arrows_into(n, x, remaining):
                    self._law(report, 'interchange-right', f"{u} *{k} ({v1} o{r} {v2})",
                              lambda: compose(p, u, k, placed_compose(p, v1, r, v2))[0]
                              == placed_compose(p, uv, self._right_position(u, k, v1, r), v2))
            if k == n - 1:
                continue
            du = domain(p, u)
            for r, x in enumerate(occurrences(du, INDETS)):
                for u2 in self.S.arrows_into(n, x, remaining):
                    self._law(report, 'interchange-left', f"({u} o{r} {u2}) *{k} {v1}",
                              lambda: compose(p, placed_compose(p, u, r, u2), k, v1)[0]
                              == placed_compose(p, uv, compose(p, du, k, dv)[1].left[r], u2))

    def _right_position(self, u: Cell, k: int, v: Cell, r: int) -> int:
        if k == u.dim - 1:
            return r
        return compose(self.p, domain(self.p, u), k, domain(self.p, v))[1].right[r]

    def check_replacement(self) -> List[LawViolation]:
        """Replacement identity, commutativity, associativity and the mixed lemma."""
        report: List[LawViolation] = []
        p = self.p
        for n in range(0, self.p.top_dim + 1):
            for u in self.cells(n):
                occ = occurrences(u, INDETS)
                budget = self.bound - _count(u) + 1
                for r, f in enumerate(occ):
                    self._law(report, 'replace-identity', f"{u} [{r}] {f}",
                              lambda: replace(p, u, r, indet_cell(p, f)) == u)
                    for v in self.parallel_to(n, f, budget):
                        self._replacement_pair(report, n, u, r, v)
            if n >= 1:
                self._mixed_lemma(report, n)
        return report

    def _replacement_pair(self, report, n: int, u: Cell, r: int, v: Cell) -> None:
        p = self.p
        subject = f"{u} [{r}] {v}"
        try:
            uv, prov = replace_tracked(p, u, r, v)
        except KernelError as e:
            report.append(LawViolation('replace', subject, str(e)))
            return
        self._law(report, 'replace-parallel', subject,
                  lambda: n == 0 or boundary(p, uv) == boundary(p, u))
        occ = occurrences(u, INDETS)
        budget = self.bound - _count(uv) + 1
        for q, g in enumerate(occ):
            if q == r:
                continue
            for w in self.parallel_to(n, g, budget):
                self._law(report, 'replace-commutativity', f"({subject}) [{prov.left[q]}] {w}",
                          lambda: self._replaced_commuted(u, r, v, q, w, prov))
        for q, g in enumerate(occurrences(v, INDETS)):
            for w in self.parallel_to(n, g, budget):
                self._law(report, 'replace-associativity', f"({subject}) [{prov.right[q]}] {w}",
                          lambda: replace(p, uv, prov.right[q], w)
                          == replace(p, u, r, replace(p, v, q, w)))

    def _replaced_commuted(self, u: Cell, r: int, v: Cell, q: int, w: Cell, prov) -> bool:
        p = self.p
        lhs = replace(p, replace(p, u, r, v), prov.left[q], w)
        uw, prov2 = replace_tracked(p, u, q, w)
        return lhs == replace(p, uw, prov2.left[r], v)

    def _mixed_lemma(self, report, n: int) -> None:
        """Whiskering commutes with replacement inside the whiskered cell.

        The identity on w carries no indet occurrences, so the occurrences of
        the whiskered cell are those of u, in order.
        """
        p = self.p
        for w in self.cells(n - 1):
            for q, x in enumerate(occurrences(w, INDETS)):
                for u in self.S.arrows_into(n, x, self.bound):
                    occ = occurrences(u, INDETS)
                    for r, f in enumerate(occ):
                        for v in self.parallel_to(n, f, self.bound - _count(u) + 1):
                            self._law(report, 'mixed-lemma', f"{w} <{q}> {u} [{r}] {v}",
                                      lambda: replace(p, whisker(p, w, q, u), r, v)
                                      == whisker(p, w, q, replace(p, u, r, v)))

    # -----------------------------------------------------------------
    # Structure
    # -----------------------------------------------------------------

    def check_globularity(self) -> List[LawViolation]:
        """Multitopic conditions per level, plus dd = dc and cd = cc on all cells."""
        report: List[LawViolation] = []
        p = self.p
        for n in self.dims:
            report.extend(check_multitopic_laws(self.S, n, self.bound))
            if n < 2:
                continue
            for u in self.cells(n):
                self._law(report, 'globularity', render(u),
                          lambda: boundary(p, domain(p, u)) == boundary(p, codomain(p, u)))
        return report

    def _is_identity_at(self, u: Cell, k: int) -> bool:
        return identity_depth(self.p, u) >= u.dim - k

    def check_well_behaved(self) -> List[LawViolation]:
        """Identity composites only come from identities; indets never decompose."""
        report: List[LawViolation] = []
        for n in self.dims:
            for k in range(n):
                for v, w, vw in self.pairs(n, k):
                    subject = f"{v} *{k} {w}"
                    if self._is_identity_at(vw, k):
                        self._law(report, 'identity-composite', subject,
                                  lambda: self._is_identity_at(v, k) and self._is_identity_at(w, k))
                    if is_indet_cell(vw):
                        self._law(report, 'indet-composite', subject,
                                  lambda: self._is_identity_at(v, k) or self._is_identity_at(w, k))
        return report

    def check_indet_characterization(self) -> List[LawViolation]:
        """A cell is an indet iff it is no identity and has no proper decomposition."""
        report: List[LawViolation] = []
        for n in self.dims:
            decomposable = set()
            for k in range(n):
                for v, w, vw in self.pairs(n, k):
                    if not (self._is_identity_at(v, k) or self._is_identity_at(w, k)):
                        decomposable.add(vw)
            for u in self.cells(n):
                expected = _count(u) > 0 and u not in decomposable
                self._law(report, 'indet-characterization', render(u),
                          lambda: is_indet_cell(u) == expected,
                          f"is_indet={is_indet_cell(u)}, indecomposable non-identity={expected}")
        return report

    # -----------------------------------------------------------------
    # Term languages and proofs
    # -----------------------------------------------------------------

    def check_readback(self) -> List[LawViolation]:
        """Cell rendering, readback and presentation printing round trips."""
        report: List[LawViolation] = []
        p = self.p
        self._law(report, 'presentation-round-trip', p.name,
                  lambda: parse_presentation(render_presentation(p)) == p)
        for n in range(0, p.top_dim + 1):
            for u in self.cells(n):
                self._law(report, 'cell-rendering', render(u), lambda: parse_cell(render(u), p) == u)
                self._law(report, 'readback-c', render(u),
                          lambda: eval_cterm(parse_cterm(readback(u, p, LANG_C), p, n), p) == u)
                if isinstance(u, App) and not isinstance(u.head, Indet):
                    continue
                self._law(report, 'readback-m', render(u),
                          lambda: eval_mterm(parse_mterm(readback(u, p, LANG_M), p, n), p) == u)
        return report

    def check_proofs(self) -> List[LawViolation]:
        """Random valid proofs check and are sound; mutations never certify falsehoods.

        Also checks that single axiom rewrites at any position preserve the
        denoted cell on every enumerated term.
        """
        report: List[LawViolation] = []
        p = self.p
        spaces = []
        for n in self.dims:
            for language in (LANG_C, LANG_M):
                try:
                    spaces.append(TermSpace(p, n, self.proof_term_size, language, self.config))
                except KernelError as e:
                    logger.warning(f"⚠️ No {language.upper()}-term space at dim {n}: {e}")

        for space in spaces:
            self._rewrite_soundness(report, space)

        if not spaces:
            return report
        for i in range(self.proofs):
            space = spaces[i % len(spaces)]
            pf = random_proof(p, space.dim, self.rng, space.language, self.proof_steps, space)
            text = render_proof(pf)
            try:
                eq = check_proof(pf, p, space.value)
                reparsed = check_proof_text(text, p, space.language)
            except KernelError as e:
                report.append(LawViolation('proof-valid', text.splitlines()[-1], str(e)))
                continue
            self._law(report, 'proof-sound', str(eq), lambda: decide_equal(eq.left, eq.right, p))
            self._law(report, 'proof-text', str(eq), lambda: str(reparsed) == str(eq))

            for _ in range(self.mutations // max(self.proofs, 1) or 1):
                mutated = mutate_proof(text, p, self.rng, space.language)
                try:
                    accepted = check_proof_text(mutated, p, space.language)
                except KernelError:
                    continue
                self._law(report, 'mutation-sound', str(accepted),
                          lambda: decide_equal(accepted.left, accepted.right, p),
                          f"mutated proof certified a false equation:\n{mutated}")
        return report

    def _rewrite_soundness(self, report: List[LawViolation], space: TermSpace) -> None:
        for t, cell in zip(space.terms, space.values):
            for path, sub in subterms(t):
                for rule, rewritten in axiom_rewrites(sub, self.p, space.language, space.value):
                    whole = replace_subterm(t, path, rewritten)
                    self._law(report, f"{rule}-sound", str(t),
                              lambda: space.value(whole) == cell)
