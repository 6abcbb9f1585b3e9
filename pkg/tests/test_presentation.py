"""Tests for presentation parsing, validation, truncation and printing."""
import pytest

from src.cells import Name, indet_cell, render
from src.errors import DimensionError, PresentationError, TermSyntaxError
from src.presentation import (
    IndetEntry,
    Violation,
    load_presentation,
    parse_presentation,
    presentation_from_levels,
    render_presentation,
    truncate_presentation,
    validate_presentation,
)
from src.terms import eval_cterm, parse_cterm

F2_HEAD = """name: F2
dim 0: a b c
dim 1: f1 : a -> b
dim 1: f2 : a -> b
dim 1: g1 : b -> c
"""


class TestParsePresentation:
    """Reading .cmp sources."""

    def test_level_sizes(self, f1, f2):
        assert [len(level) for level in f1.levels] == [2, 2]
        assert [len(level) for level in f2.levels] == [3, 6, 4]

    def test_repr(self, f1):
        assert repr(f1) == "<Presentation(name='F1', indets=2+2)>"

    def test_boundary_data(self, f2):
        assert f2.dim_of('X') == 2
        assert render(f2.domain_of('X')) == 'f2(#a)'
        assert f2.codomain_of('X') == 'f1'
        assert f2.source_of('X') == ('f2',)

    def test_domain_written_as_mterm(self, binary):
        text = "dim 0: a b c\ndim 1: f : a -> b\ndim 1: g : b -> c\ndim 1: h : a -> c\n"
        placed = parse_presentation(text + "dim 2: M : (g o[0] f) => h\n")
        starred = parse_presentation(text + "dim 2: M : (g *0 f) => h\n")
        assert placed.domain_of('M') == starred.domain_of('M')
        assert render(binary.domain_of('M')) == 'g(f(#a))'
        assert binary.source_of('M') == ('g', 'f')

    def test_nullary_indet(self, loop):
        assert render(loop.domain_of('U')) == '#a'
        assert loop.source_of('U') == ()

    def test_parallelism_violated(self):
        with pytest.raises(PresentationError, match='parallelism violated'):
            parse_presentation(F2_HEAD + "dim 2: X : f2 => g1\n")

    def test_duplicate_name(self):
        with pytest.raises(PresentationError, match="duplicate name 'a'"):
            parse_presentation("dim 0: a b a\n")

    def test_unknown_name_in_domain(self):
        with pytest.raises(PresentationError, match='line 2'):
            parse_presentation("dim 0: a\ndim 1: x : q -> a\n")

    def test_codomain_of_wrong_dimension(self):
        with pytest.raises(PresentationError, match='not an indet of dimension 1'):
            parse_presentation(F2_HEAD + "dim 2: X : f2 => a\n")

    def test_domain_of_wrong_dimension(self):
        with pytest.raises(PresentationError, match='expected 1'):
            parse_presentation(F2_HEAD + "dim 2: X : a => f1\n")

    def test_levels_out_of_order(self):
        with pytest.raises(PresentationError, match='declared after'):
            parse_presentation("dim 0: a\ndim 2: X : a => a\n")

    def test_zero_indets_carry_no_boundary(self):
        with pytest.raises(PresentationError, match='no boundary data'):
            parse_presentation("dim 0: a : a -> a\n")

    def test_arrows_need_boundary(self):
        with pytest.raises(PresentationError):
            parse_presentation("dim 0: a\ndim 1: x y\n")

    def test_syntax_error_line(self):
        with pytest.raises(TermSyntaxError) as info:
            parse_presentation("dim 0: a\ndim 1 x : a -> a\n")
        assert info.value.line == 2

    def test_file_stem_is_default_name(self, tmp_path):
        path = tmp_path / 'triangle.cmp'
        path.write_text("dim 0: a b\ndim 1: x : a -> b\n", encoding='utf-8')
        p = load_presentation(str(path))
        assert p.name == 'triangle'
        assert p.names(1) == ['x']


class TestValidatePresentation:
    """Validation of programmatically built presentations."""

    def test_fixtures_are_valid(self, f1, f2, loop, binary, deep):
        for p in (f1, f2, loop, binary, deep):
            assert validate_presentation(p) == []

    def test_parallel_domain_swap(self, f2):
        # f3 shares its endpoints with f1, so X : f3 => f1 is still well formed
        levels = [list(level) for level in f2.levels]
        swapped = IndetEntry('X', 2, indet_cell(f2, 'f3'), 'f1')
        levels[2] = [swapped if e.name == 'X' else e for e in levels[2]]
        p = presentation_from_levels('swapped', levels, check=False)
        assert validate_presentation(p) == []
        assert render(p.domain_of('X')) == 'f3(#a)'

    def test_codomain_not_an_indet(self, f2):
        levels = [list(level) for level in f2.levels]
        bad = IndetEntry('X1', 2, f2.domain_of('X1'), 'a')
        levels[2] = [bad if e.name == 'X1' else e for e in levels[2]]
        p = presentation_from_levels('bad', levels, check=False)
        assert validate_presentation(p) == [
            Violation('X1', 'codomain not an indet of dimension 1')
        ]

    def test_checked_construction_raises(self, f2):
        levels = [list(level) for level in f2.levels]
        levels[2] = [IndetEntry('Z', 2, f2.domain_of('X'), 'g1')]
        with pytest.raises(PresentationError, match='not parallel'):
            presentation_from_levels('bad', levels)

    def test_boundary_data_at_dimension_zero(self):
        p = presentation_from_levels('bad', [[IndetEntry('a', 0, Name('a'), 'a')]], check=False)
        assert [v.message for v in validate_presentation(p)] == ['0-indet with boundary data']

    def test_duplicates(self):
        p = presentation_from_levels(
            'bad', [[IndetEntry('a', 0), IndetEntry('a', 0)]], check=False
        )
        assert [str(v) for v in validate_presentation(p)] == ['a: duplicate name']


class TestTruncateAndRender:
    """Truncation and canonical printing."""

    def test_truncate(self, f1, f2):
        low = truncate_presentation(f2, 1)
        assert low.top_dim == 1
        assert not low.has('X')
        assert truncate_presentation(f1, 0).names(0) == ['a', 'b']
        assert truncate_presentation(f2, 2) is f2

    def test_truncate_above_top(self, f1):
        with pytest.raises(DimensionError):
            truncate_presentation(f1, 3)

    def test_render(self, f1):
        assert render_presentation(f1) == (
            "name: F1\n"
            "dim 0: a b\n"
            "dim 1: x : a -> b\n"
            "dim 1: y : b -> a\n"
        )

    def test_render_round_trip(self, f1, f2, loop, binary):
        for p in (f1, f2, loop, binary):
            assert parse_presentation(render_presentation(p)) == p

    def test_terms_over_truncation(self, f2):
        low = truncate_presentation(f2, 1)
        assert eval_cterm(parse_cterm('(g1 *0 f1)', low), low) == eval_cterm(
            parse_cterm('(g1 *0 f1)', f2), f2
        )
