"""Tests for canonical cells and the cell operations."""
import os

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.cells import (
    CODOMAIN,
    DOMAIN,
    INDETS,
    OBJECTS,
    App,
    Indet,
    Name,
    ObjId,
    boundary,
    cell_record,
    classify,
    compose,
    domain,
    identity_depth,
    identity_over,
    indet_cell,
    is_indet_cell,
    iterated_boundary,
    iterated_identity,
    multicompose,
    occurrences,
    parallel,
    placed_compose,
    render,
    replace,
    replace_tracked,
    target,
    whisker,
)
from src.errors import (
    CompositionError,
    DimensionError,
    ParallelismError,
    PositionError,
    UnknownNameError,
)
from src.multitopic import MultitopicSet, enumerate_cells
from src.presentation import load_presentation
from src.terms import parse_cell

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')

F2 = load_presentation(os.path.join(FIXTURES, 'f2.cmp'))
DEEP = load_presentation(os.path.join(FIXTURES, 'deep.cmp'))
F2_CELLS = enumerate_cells(MultitopicSet(F2), 2, 3)
DEEP_CELLS = enumerate_cells(MultitopicSet(DEEP), 3, 2)


class TestIndetCell:
    """Default cells of indets."""

    def test_one_indet(self, f1):
        assert render(indet_cell(f1, 'x')) == 'x(#a)'

    def test_two_indet(self, f2):
        assert render(indet_cell(f2, 'X')) == 'X(#f2)'

    def test_zero_indet(self, f1):
        assert indet_cell(f1, 'a') == Name('a')

    def test_nullary_indet(self, loop):
        u = indet_cell(loop, 'U')
        assert render(u) == 'U()'
        assert is_indet_cell(u)

    def test_unknown_name(self, f1):
        with pytest.raises(UnknownNameError):
            indet_cell(f1, 'z')


class TestOccurrences:
    """Canonical occurrence indexing."""

    def test_indets_of_running_example(self, f1):
        u = parse_cell('x(y(x(#a)))', f1)
        assert occurrences(u, INDETS) == ('x', 'y', 'x')

    def test_objects(self, f1):
        assert occurrences(parse_cell('x(y(#b))', f1), OBJECTS) == ('b',)

    def test_identity_has_no_indets(self, f1):
        assert occurrences(parse_cell('e{#a}()', f1), INDETS) == ()

    def test_zero_cell(self):
        assert occurrences(Name('a'), INDETS) == ('a',)
        assert occurrences(Name('a'), OBJECTS) == ('a',)

    def test_predet_heads_are_not_indets(self, f2):
        u = parse_cell('e{g1(f1(#a))}(Y(#g2), X(#f2))', f2)
        assert occurrences(u, INDETS) == ('Y', 'X')
        assert occurrences(u, OBJECTS) == ('g2', 'f2')

    def test_unknown_kind(self, f1):
        with pytest.raises(ValueError):
            occurrences(indet_cell(f1, 'x'), 'heads')


class TestIdentities:
    """identity_over and its iterates."""

    def test_identity_over_composite(self, f1):
        u = identity_over(parse_cell('x(y(#b))', f1))
        assert render(u) == 'e{x(y(#b))}(#x, #y)'
        assert u.dim == 2

    def test_identity_over_identity_is_nullary(self, f1):
        assert render(identity_over(ObjId('a', 1))) == 'e{#a}()'

    def test_identity_over_indet_cell(self, f1):
        assert identity_over(indet_cell(f1, 'x')) == ObjId('x', 2)

    def test_identity_over_name(self):
        assert identity_over(Name('a')) == ObjId('a', 1)

    def test_iterated_identity(self, f1):
        assert iterated_identity(Name('a'), 2) == parse_cell('e{#a}()', f1)
        assert iterated_identity(indet_cell(f1, 'x'), 1) == indet_cell(f1, 'x')

    def test_iterated_identity_cannot_lower(self, f1):
        with pytest.raises(DimensionError):
            iterated_identity(indet_cell(f1, 'x'), 0)


class TestBoundary:
    """Domains, codomains and their iterates."""

    def test_one_cell(self, f1):
        assert boundary(f1, parse_cell('x(y(#b))', f1)) == (Name('b'), Name('b'))

    def test_two_cell_chain(self, f2):
        d, c = boundary(f2, parse_cell('X(X1(#f3))', f2))
        assert render(d) == 'f3(#a)'
        assert render(c) == 'f1(#a)'

    def test_identity_arrow(self, f2):
        f2_cell = indet_cell(f2, 'f2')
        assert boundary(f2, ObjId('f2', 2)) == (f2_cell, f2_cell)

    def test_predet_codomain_is_payload(self, f2):
        u = parse_cell('e{g1(f1(#a))}(Y(#g2), X(#f2))', f2)
        d, c = boundary(f2, u)
        assert render(d) == 'g2(f2(#a))'
        assert render(c) == 'g1(f1(#a))'

    def test_nullary_indet(self, loop):
        d, c = boundary(loop, indet_cell(loop, 'U'))
        assert d == ObjId('a', 1)
        assert render(c) == 'e(#a)'

    def test_iterated(self, f2):
        u = parse_cell('X(X1(#f3))', f2)
        assert iterated_boundary(f2, u, 0, DOMAIN) == Name('a')
        assert iterated_boundary(f2, u, 0, CODOMAIN) == Name('b')

    def test_zero_cell_has_no_boundary(self, f1):
        with pytest.raises(DimensionError):
            boundary(f1, Name('a'))

    def test_results_are_cached(self, f2):
        u = parse_cell('Y(Y1(#g3))', f2)
        result = boundary(f2, u)
        assert f2.boundary_cache[u] == result

    def test_target(self, f1):
        assert target(f1, parse_cell('x(y(#b))', f1)) == 'b'
        assert target(f1, ObjId('a', 1)) == 'a'


class TestReplace:
    """Replacement of indet occurrences by parallel cells."""

    def test_replace_middle_occurrence(self, f1):
        u = parse_cell('x(y(x(#a)))', f1)
        v = parse_cell('y(x(y(#b)))', f1)
        assert render(replace(f1, u, 1, v)) == 'x(y(x(y(x(#a)))))'

    def test_tracked_provenance(self, f1):
        u = parse_cell('x(y(x(#a)))', f1)
        v = parse_cell('y(x(y(#b)))', f1)
        cell, prov = replace_tracked(f1, u, 1, v)
        assert prov.kind == INDETS
        assert prov.left == {0: 0, 2: 4}
        assert prov.right == {0: 1, 1: 2, 2: 3}
        assert occurrences(cell, INDETS) == ('x', 'y', 'x', 'y', 'x')

    def test_identity(self, f2):
        u = parse_cell('e{g1(f1(#a))}(Y(#g2), X(#f2))', f2)
        assert replace(f2, u, 1, indet_cell(f2, 'X')) == u

    def test_result_is_parallel(self, f1):
        u = parse_cell('x(y(x(#a)))', f1)
        v = parse_cell('y(x(y(#b)))', f1)
        assert parallel(f1, replace(f1, u, 1, v), u)

    def test_not_parallel(self, f1):
        u = parse_cell('x(y(x(#a)))', f1)
        with pytest.raises(ParallelismError):
            replace(f1, u, 1, indet_cell(f1, 'x'))

    def test_position_out_of_range(self, f1):
        with pytest.raises(PositionError):
            replace(f1, indet_cell(f1, 'x'), 3, indet_cell(f1, 'x'))

    def test_dimension_zero(self, f1):
        assert replace(f1, Name('a'), 0, Name('b')) == Name('b')


class TestMulticompose:
    """Partial multicomposition of many-to-one cells."""

    def test_single_splice(self, f1):
        cell, prov = multicompose(f1, indet_cell(f1, 'x'), 0, indet_cell(f1, 'y'))
        assert render(cell) == 'x(y(#b))'
        assert prov.kind == OBJECTS
        assert prov.left == {}
        assert prov.right == {0: 0}

    def test_identities(self, f1):
        u = parse_cell('x(y(#b))', f1)
        assert multicompose(f1, u, 0, ObjId('b', 1))[0] == u
        assert multicompose(f1, ObjId('b', 1), 0, u)[0] == u

    def test_target_mismatch(self, f1):
        with pytest.raises(CompositionError):
            multicompose(f1, indet_cell(f1, 'x'), 0, indet_cell(f1, 'x'))

    def test_bad_slot(self, f1):
        with pytest.raises(PositionError):
            multicompose(f1, indet_cell(f1, 'x'), 1, indet_cell(f1, 'y'))

    def test_predet_is_not_many_to_one(self, f1):
        with pytest.raises(CompositionError):
            multicompose(f1, ObjId('x', 2), 0, parse_cell('e{x(y(#b))}(#x, #y)', f1))


class TestPlacedCompose:
    """Placed composition and whiskering."""

    def test_two_cells(self, f2):
        u = placed_compose(f2, indet_cell(f2, 'X'), 0, indet_cell(f2, 'X1'))
        assert render(u) == 'X(X1(#f3))'

    def test_identity_rules(self, f2):
        u = indet_cell(f2, 'X')
        assert placed_compose(f2, u, 0, ObjId('f2', 2)) == u
        assert placed_compose(f2, ObjId('f1', 2), 0, u) == u

    def test_domain_law(self, f2):
        u = parse_cell('e{g1(f1(#a))}(Y(#g2), X(#f2))', f2)
        v = indet_cell(f2, 'X1')
        result = placed_compose(f2, u, 1, v)
        assert domain(f2, result) == replace(f2, domain(f2, u), 1, domain(f2, v))
        assert render(result) == 'e{g1(f1(#a))}(Y(#g2), X(X1(#f3)))'

    def test_codomain_mismatch(self, f2):
        with pytest.raises(CompositionError):
            placed_compose(f2, indet_cell(f2, 'X'), 0, indet_cell(f2, 'Y'))

    def test_whisker(self, f2):
        w = parse_cell('g1(f2(#a))', f2)
        u = whisker(f2, w, 1, indet_cell(f2, 'X1'))
        assert render(u) == 'e{g1(f2(#a))}(#g1, X1(#f3))'


class TestCompose:
    """Composition along k-dimensional boundaries."""

    def test_one_cells(self, f1):
        xy, _ = compose(f1, indet_cell(f1, 'x'), 0, indet_cell(f1, 'y'))
        assert render(xy) == 'x(y(#b))'
        xyx, prov = compose(f1, xy, 0, indet_cell(f1, 'x'))
        assert render(xyx) == 'x(y(x(#a)))'
        assert prov.left == {0: 0, 1: 1}
        assert prov.right == {0: 2}

    def test_horizontal_two_cells(self, f2):
        u, prov = compose(f2, indet_cell(f2, 'Y'), 0, indet_cell(f2, 'X'))
        assert render(u) == 'e{g1(f1(#a))}(Y(#g2), X(#f2))'
        assert prov.left == {0: 0}
        assert prov.right == {0: 1}

    def test_vertical_through_predet(self, f2):
        top, _ = compose(f2, indet_cell(f2, 'Y'), 0, indet_cell(f2, 'X'))
        bottom, _ = compose(f2, indet_cell(f2, 'Y1'), 0, indet_cell(f2, 'X1'))
        u, _ = compose(f2, top, 1, bottom)
        assert render(u) == 'e{g1(f1(#a))}(Y(Y1(#g3)), X(X1(#f3)))'

    def test_exchange_pair_agrees(self, f2):
        left, _ = compose(f2, indet_cell(f2, 'Y'), 1, indet_cell(f2, 'Y1'))
        right, _ = compose(f2, indet_cell(f2, 'X'), 1, indet_cell(f2, 'X1'))
        u, _ = compose(f2, left, 0, right)
        assert render(u) == 'e{g1(f1(#a))}(Y(Y1(#g3)), X(X1(#f3)))'

    def test_whiskering_lower_cell(self, f2):
        u, _ = compose(f2, indet_cell(f2, 'Y'), 0, indet_cell(f2, 'f1'))
        assert render(u) == 'e{g1(f1(#a))}(Y(#g2), #f1)'

    def test_identity_laws(self, f2):
        u = indet_cell(f2, 'X')
        assert compose(f2, u, 1, ObjId('f2', 2))[0] == u
        assert compose(f2, ObjId('f1', 2), 1, u)[0] == u
        assert compose(f2, u, 0, parse_cell('e{#a}()', f2))[0] == u

    def test_k_too_large(self, f1):
        with pytest.raises(DimensionError, match='k ≥ dimension'):
            compose(f1, indet_cell(f1, 'x'), 1, indet_cell(f1, 'y'))

    def test_boundary_mismatch(self, f1):
        with pytest.raises(CompositionError, match='composite undefined'):
            compose(f1, indet_cell(f1, 'x'), 0, indet_cell(f1, 'x'))


class TestClassify:
    """Identity, indet and many-to-one detection."""

    def test_indet(self, f2):
        c = classify(f2, indet_cell(f2, 'X'))
        assert c.is_indet and not c.is_identity and c.is_many_to_one
        assert c.identity_depth == 0

    def test_identity_arrow(self, f2):
        c = classify(f2, ObjId('f2', 2))
        assert c.is_identity and not c.is_indet and c.is_many_to_one
        assert c.identity_depth == 1

    def test_doubly_degenerate(self, f1):
        u = parse_cell('e{#a}()', f1)
        c = classify(f1, u)
        assert c.is_identity and not c.is_many_to_one
        assert identity_depth(f1, u) == 2

    def test_composite(self, f2):
        c = classify(f2, parse_cell('e{g1(f1(#a))}(Y(#g2), X(#f2))', f2))
        assert not (c.is_identity or c.is_indet or c.is_many_to_one)


class TestCellRecords:
    """Rendering, parsing and structured export."""

    def test_record(self, f1):
        assert cell_record(indet_cell(f1, 'x')) == {
            'dim': 1,
            'head': {'kind': 'indet', 'name': 'x'},
            'args': [{'dim': 1, 'head': {'kind': 'identity', 'name': 'a'}, 'args': []}],
        }

    def test_predet_record(self, f1):
        record = cell_record(parse_cell('e{#a}()', f1))
        assert record['head']['kind'] == 'predet'
        assert record['head']['payload']['head'] == {'kind': 'identity', 'name': 'a'}

    def test_parse_render(self, f2):
        text = 'e{g1(f1(#a))}(Y(Y1(#g3)), X(X1(#f3)))'
        assert render(parse_cell(text, f2)) == text

    def test_cells_are_hashable_values(self, f1):
        u = App(Indet('x'), (ObjId('a', 1),), 1)
        assert u == indet_cell(f1, 'x')
        assert len({u, indet_cell(f1, 'x')}) == 1

    def test_wrong_argument_target(self, f1):
        with pytest.raises(CompositionError):
            parse_cell('x(#b)', f1)

    def test_predet_over_indet_cell(self, f1):
        with pytest.raises(CompositionError):
            parse_cell('e{x(#a)}(#x)', f1)


class TestEnumeratedCells:
    """Identity, replacement and globularity laws on enumerated populations."""

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from(DEEP_CELLS), st.integers(0, 2))
    def test_compose_with_identities(self, u, k):
        start = iterated_boundary(DEEP, u, k, DOMAIN)
        end = iterated_boundary(DEEP, u, k, CODOMAIN)
        assert compose(DEEP, u, k, iterated_identity(start, 3))[0] == u
        assert compose(DEEP, iterated_identity(end, 3), k, u)[0] == u

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from(DEEP_CELLS))
    def test_globularity(self, u):
        du, cu = boundary(DEEP, u)
        assert boundary(DEEP, du) == boundary(DEEP, cu)

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from(F2_CELLS), st.data())
    def test_replace_by_own_indet(self, u, data):
        occ = occurrences(u, INDETS)
        assume(occ)
        r = data.draw(st.integers(0, len(occ) - 1))
        assert replace(F2, u, r, indet_cell(F2, occ[r])) == u
