from __future__ import annotations

import csv
from fractions import Fraction

import pytest
import sympy

from core.smoothlab import (
    CSV_COLUMNS,
    conjecture_bound,
    conjecture_table,
    count_v,
    curve_order_frequency,
    dickman_rho,
    interval_bounds,
    l_function,
    sample_curve_orders,
    smooth_part,
    smoothness_bound,
    write_csv,
)


def test_smooth_part():
    assert smooth_part(360, 5) == 360
    assert smooth_part(2 * 3 * 7 * 11, 5) == 6
    assert smooth_part(97, 100) == 97
    assert smooth_part(97, 96) == 1
    assert smooth_part(1, 10) == 1
    assert smooth_part(12, 1) == 1
    with pytest.raises(ValueError):
        smooth_part(0, 10)


def test_smooth_part_matches_factorization():
    for m in range(2, 3000, 7):
        for B in (2, 5, 30):
            expected = 1
            for l, e in sympy.factorint(m).items():
                if l <= B:
                    expected *= l ** e
            assert smooth_part(m, B) == expected


def test_interval_bounds():
    assert interval_bounds(100) == (91, 111)
    assert interval_bounds(100, "hasse") == (81, 121)
    with pytest.raises(ValueError):
        interval_bounds(100, "wide")


def test_count_v_matches_brute_force():
    sample = count_v(1000, 20, Fraction(1, 2))
    assert (sample.v, sample.total) == (18, 63)
    assert sample.side_condition

    x, B = 10 ** 4, 10
    lo, hi = interval_bounds(x)
    smooth = sum(1 for m in range(lo, hi + 1) if smooth_part(m, B) == m)
    assert count_v(x, B, Fraction(1)).v == smooth


def test_count_v_input_checks():
    with pytest.raises(ValueError):
        count_v(10, 5, Fraction(1))
    with pytest.raises(ValueError):
        count_v(1000, 5, Fraction(3, 2))


def test_l_function_and_bound():
    assert l_function(0.0, 1000).value == 1.0
    assert l_function(1.0, 10 ** 6).value > l_function(0.5, 10 ** 6).value
    assert smoothness_bound(0.0, 1000) == 2
    with pytest.raises(ValueError):
        l_function(1.0, 10)


def test_dickman_rho():
    assert dickman_rho(0.5) == 1.0
    assert dickman_rho(2) == pytest.approx(1 - 0.6931471805599453, abs=2e-3)
    assert dickman_rho(3) == pytest.approx(0.0486, abs=2e-3)


def test_conjecture_table_theta_prefix():
    thetas = [Fraction(0), Fraction(1), Fraction(2), Fraction(3)]
    table = conjecture_table([10 ** 4, 10 ** 5], 0.7071, Fraction(3, 4), thetas)
    assert len(table.rows) == 8

    # the bound grows with theta, so passing values form a prefix
    passing = [t for t in thetas if all(r.passed for r in table.rows if r.theta == t)]
    assert passing == thetas[: len(passing)]
    if passing:
        assert table.least_theta == passing[0]
        assert table.greatest_passing_theta == passing[-1]
    else:
        assert table.least_theta is None

    b0 = conjecture_bound(0.7071, 10 ** 4, Fraction(3, 4), Fraction(0))
    b3 = conjecture_bound(0.7071, 10 ** 4, Fraction(3, 4), Fraction(3))
    assert b0 < b3


def test_conjecture_table_rejects_negative_theta():
    with pytest.raises(ValueError):
        conjecture_table([10 ** 4], 0.7, Fraction(1), [Fraction(-1)])


def test_write_csv(tmp_path):
    table = conjecture_table([10 ** 4], 0.7071, Fraction(1))
    out = write_csv(table.rows, tmp_path / "lab" / "table.csv")
    with out.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[1][0] == "10000"
    assert rows[1][-1] in ("0", "1")


def test_curve_orders_stay_in_hasse_interval():
    orders = sample_curve_orders(101, 30, seed=4)
    assert len(orders) == 30
    assert all(abs(E - 102) <= 2 * 101 ** 0.5 for E in orders)
    assert curve_order_frequency(101, 200, Fraction(1), 30, seed=4) == 1.0
    with pytest.raises(ValueError):
        sample_curve_orders(3, 1)


def test_segmented_and_pooled_counts_agree():
    whole = count_v(10 ** 6, 50, Fraction(1, 2))
    for segment in (1, 7, 300, 2001):
        assert count_v(10 ** 6, 50, Fraction(1, 2), segment=segment) == whole
    assert count_v(10 ** 6, 50, Fraction(1, 2), workers=2, segment=500) == whole
