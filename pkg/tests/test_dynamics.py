from fractions import Fraction

import pytest

from padyn.dynamics import (
    PlotSet,
    accumulate_plot,
    box_count,
    cycle_report,
    level_map,
    orbit,
    padded_endomap,
    plot_points,
    preimage_census,
    to_csv,
    to_pgm,
)
from padyn.errors import BudgetError
from padyn.mapdsl import parse_map


# --- level maps ---------------------------------------------------------------


def test_level_map_shift():
    lm = level_map(parse_map("sigma(x)"), 2, 1, 2)
    assert lm.table == (0, 0, 1, 1)
    assert (lm.domain_digits, lm.codomain_digits) == (2, 1)


def test_level_map_increment():
    assert level_map(parse_map("x+1"), 2, 1, 2).table == (1, 0, 1, 0)


def test_level_map_binomial():
    lm = level_map(parse_map("C(x,2)"), 2, 1, 3)
    assert lm.table == (0, 0, 1, 3, 2, 2, 3, 1)


def test_level_map_needs_census_depth():
    with pytest.raises(ValueError):
        level_map(parse_map("x"), 2, 1, 1)


def test_level_map_budget():
    with pytest.raises(BudgetError):
        level_map(parse_map("x"), 2, 1, 8, budget=10)


# --- censuses ---------------------------------------------------------------


def test_census_shift_uniform():
    census = preimage_census(level_map(parse_map("sigma(x)"), 2, 1, 3))
    assert census.uniform and census.expected == 2
    assert census.counts == (2, 2, 2, 2)


def test_census_binomial_uniform():
    census = preimage_census(level_map(parse_map("C(x,2)"), 2, 1, 3))
    assert census.uniform and census.counts == (2, 2, 2, 2)


def test_census_square_endomap_not_bijective():
    census = preimage_census(padded_endomap(parse_map("x^2"), 2, 2))
    assert not census.uniform
    assert census.expected == 1
    assert census.witness_pair == (0, 2)  # 0^2 = 2^2 (mod 4)


def test_census_mass(corpus_texts):
    for text in corpus_texts:
        lm = level_map(parse_map(text), 2, 1, 4)
        census = preimage_census(lm)
        assert sum(census.counts) == 2**4


def test_level_compatibility_for_zero_lookahead():
    for text in ("x", "x+1", "3*x+1", "x^2", "x^2+x+1"):
        e = parse_map(text)
        for k in (2, 3, 4):
            coarse = level_map(e, 2, 1, k).table
            fine = level_map(e, 2, 1, k + 1).table
            for i in range(2**k):
                assert coarse[i] == fine[i] % 2 ** (k - 1)


# --- endomaps and cycles ---------------------------------------------------------


def test_padded_endomap_examples():
    assert padded_endomap(parse_map("x+1"), 2, 2).table == (1, 2, 3, 0)
    assert padded_endomap(parse_map("C(x,2)"), 2, 2).table == (0, 0, 1, 3)
    assert padded_endomap(parse_map("sigma(x)"), 2, 2).table == (0, 0, 1, 1)


def test_cycle_report_full_cycle():
    report = cycle_report(padded_endomap(parse_map("x+1"), 2, 2))
    assert report.unique_cycle
    assert report.cycles == ((0, 1, 2, 3),)
    assert report.distance_histogram == {0: 4}


def test_cycle_report_two_fixed_points():
    report = cycle_report(padded_endomap(parse_map("C(x,2)"), 2, 2))
    assert not report.unique_cycle
    assert sorted(report.cycles) == [(0,), (3,)]


def test_cycle_report_shift():
    report = cycle_report(padded_endomap(parse_map("sigma(x)"), 2, 2))
    assert report.unique_cycle and report.cycles == ((0,),)
    assert report.distance_histogram == {0: 1, 1: 1, 2: 2}


def test_cycle_report_partition(corpus_texts):
    for text in corpus_texts:
        report = cycle_report(padded_endomap(parse_map(text), 2, 5))
        assert sum(report.distance_histogram.values()) == 2**5
        covered = sum(len(c) for c in report.cycles)
        assert report.distance_histogram.get(0, 0) == covered


def test_bijective_endomap_has_no_tails():
    report = cycle_report(padded_endomap(parse_map("x+1"), 3, 3))
    assert report.distance_histogram == {0: 27}


def test_cycle_report_needs_endomap():
    with pytest.raises(ValueError):
        cycle_report(level_map(parse_map("x"), 2, 1, 3))


# --- orbits ---------------------------------------------------------------


def test_orbit_increment():
    result = orbit(parse_map("x+1"), 2, 0, 4, 3)
    assert result.points == (0, 1, 2, 3, 4)
    assert result.cycle_start is None


def test_orbit_binomial_fixed_point():
    result = orbit(parse_map("C(x,2)"), 2, 3, 4, 3)
    assert result.points == (3, 3, 3, 3, 3)
    assert (result.cycle_start, result.cycle_length) == (0, 1)


def test_orbit_shift():
    result = orbit(parse_map("sigma(x)"), 2, 5, 4, 3)
    assert result.points == (5, 2, 1, 0, 0)
    assert (result.cycle_start, result.cycle_length) == (3, 1)


def test_orbit_validates_start():
    with pytest.raises(ValueError):
        orbit(parse_map("x"), 2, 9, 2, 3)


# --- plot sets ---------------------------------------------------------------


def test_plot_points_shift():
    ps = plot_points(parse_map("sigma(x)"), 2, 1, 1)
    assert ps.points == {
        (Fraction(0), Fraction(0)),
        (Fraction(1, 4), Fraction(0)),
        (Fraction(1, 2), Fraction(1, 2)),
        (Fraction(3, 4), Fraction(1, 2)),
    }


def test_plot_points_identity():
    ps = plot_points(parse_map("x"), 2, 1, 1)
    assert ps.points == {
        (Fraction(0), Fraction(0)),
        (Fraction(1, 4), Fraction(1, 2)),
        (Fraction(1, 2), Fraction(0)),
        (Fraction(3, 4), Fraction(1, 2)),
    }


def test_plot_point_count_bound(corpus_texts):
    for text in corpus_texts:
        for k in (1, 2, 3):
            ps = plot_points(parse_map(text), 2, 1, k)
            assert len(ps.points) <= 2 ** (1 + k)


def test_plot_denominators_divide_the_level_moduli():
    ps = plot_points(parse_map("sigma(x)"), 2, 1, 3)
    for x, y in ps.levels[3]:
        assert 2 ** 4 % x.denominator == 0
        assert 2 ** 3 % y.denominator == 0


# --- box counting ---------------------------------------------------------------


def test_box_count_shift_level_one():
    bc = box_count(plot_points(parse_map("sigma(x)"), 2, 1, 1), 2)
    assert bc.covered_cells == {(0, 0), (1, 1)}
    assert bc.fraction == Fraction(1, 2)


def test_box_count_empty():
    assert box_count(PlotSet(2, 1, {}), 7).fraction == 0


def test_box_count_grid_refinement():
    ps = accumulate_plot(parse_map("sigma(x)"), 2, 1, 6)
    for j in (1, 2, 3):
        coarse = box_count(ps, 2**j).covered
        fine = box_count(ps, 2 ** (j + 1)).covered
        assert fine <= 4 * coarse


def test_box_count_at_full_resolution_counts_points():
    k_max = 3
    ps = accumulate_plot(parse_map("sigma(x)"), 2, 1, k_max)
    grid = 2 ** (1 + k_max)
    assert box_count(ps, grid).covered == len(ps.points)


def test_shift_plot_band(corpus_texts):
    # every shift plot point hugs the diagonal at its level
    for k in range(1, 7):
        for x, y in plot_points(parse_map("sigma(x)"), 2, 1, k).levels[k]:
            assert abs(y - x) <= Fraction(1, 2 ** (k + 1))


# --- dumps ---------------------------------------------------------------


def test_csv_format():
    text = to_csv(plot_points(parse_map("sigma(x)"), 2, 1, 1))
    lines = text.splitlines()
    assert lines[0] == "xnum,xden,ynum,yden"
    assert lines[1] == "0,1,0,1"
    assert len(lines) == 5


def test_pgm_format():
    bc = box_count(plot_points(parse_map("sigma(x)"), 2, 1, 1), 2)
    text = to_pgm(bc)
    lines = text.splitlines()
    assert lines[:3] == ["P2", "2 2", "1"]
    assert lines[3] == "0 1"  # top row: the (1, 1) cell
    assert lines[4] == "1 0"


def test_dumps_are_deterministic():
    e = parse_map("sigma(x)")
    first = to_csv(accumulate_plot(e, 2, 1, 5))
    second = to_csv(accumulate_plot(e, 2, 1, 5))
    assert first == second
