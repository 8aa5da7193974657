from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
import sympy

from core.bigmod import SemiprimeContext
from core.curve import CurveE2, CurveW, EqualOrdersSignal, Finite, PointResult, crt_point, oracle_reduce, scalar_mul
from core.multiplier import (
    HasseWindow,
    NonSeparating,
    Separated,
    StillFinite,
    build_multiplier,
    hasse_exponent,
    recover_order,
    staged_multiply,
)

EXAMPLE_N = 3839985129719
EXAMPLE_CURVE = CurveW(1594604, 450302, EXAMPLE_N)
EXAMPLE_POINT = Finite(540525859015, 1621377667969)


def test_hasse_window_from_modulus():
    w = HasseWindow.from_modulus(EXAMPLE_N)
    assert (w.r, w.bound) == (1959588, 1962388)
    assert hasse_exponent(2, w) == 20
    assert hasse_exponent(3, w) == 13

    w34 = HasseWindow.from_modulus(EXAMPLE_N, Fraction(3, 4))
    assert (w34.r, w34.bound) == (1469691, 1472116)

    small = HasseWindow.from_modulus(35)
    assert (small.r, small.bound) == (6, 11)
    assert hasse_exponent(13, small) == 0


def test_example_multiplier_value():
    w = HasseWindow.from_modulus(EXAMPLE_N, Fraction(3, 4))
    M = build_multiplier(3, w)
    assert M.factors == ((2, 20), (3, 12))
    assert M.value == 557256278016
    assert M.bits == 40
    with pytest.raises(ValueError):
        build_multiplier(1, w)


def test_example_is_non_separating_at_three():
    w = HasseWindow.from_modulus(EXAMPLE_N, Fraction(3, 4))
    rep = staged_multiply(EXAMPLE_CURVE, EXAMPLE_POINT, 3, w)
    assert isinstance(rep, NonSeparating)
    assert rep.t_min == 3
    assert rep.order == ((2, 7), (3, 7))
    assert rep.d == 279936
    assert rep.additions > 0

    # only the 2-part is applied below t = 3
    assert isinstance(staged_multiply(EXAMPLE_CURVE, EXAMPLE_POINT, 2, w), StillFinite)


def test_recovered_order_is_minimal():
    w = HasseWindow.from_modulus(EXAMPLE_N, Fraction(3, 4))
    rep = recover_order(EXAMPLE_CURVE, EXAMPLE_POINT, 3, w)
    assert isinstance(rep, NonSeparating)
    d = rep.d
    assert build_multiplier(3, w).value % d == 0
    assert scalar_mul(d, EXAMPLE_POINT, EXAMPLE_CURVE) == EqualOrdersSignal()
    for l, _ in rep.order:
        assert isinstance(scalar_mul(d // l, EXAMPLE_POINT, EXAMPLE_CURVE), PointResult)


def test_two_torsion_point_has_order_two():
    w = HasseWindow.from_modulus(35)
    rep = staged_multiply(CurveE2(2, 5, 35), Finite(2, 0), 2, w)
    assert isinstance(rep, NonSeparating)
    assert (rep.t_min, rep.d) == (2, 2)


def test_staged_multiply_needs_a_finite_point():
    from core.curve import IDENTITY

    with pytest.raises(ValueError):
        staged_multiply(EXAMPLE_CURVE, IDENTITY, 3, HasseWindow.from_modulus(EXAMPLE_N))


def test_every_pair_over_small_modulus_matches_the_oracle():
    ctx = SemiprimeContext(143, oracle=(11, 13))
    w_curve = CurveW(1, 1, 143)
    window = HasseWindow.from_context(ctx)
    seen = set()
    for Pp, Pq in itertools.product(w_curve.reduce(11).points(), w_curve.reduce(13).points()):
        P = crt_point(Pp, Pq, ctx)
        red = oracle_reduce(P, w_curve, ctx)
        rep = staged_multiply(w_curve, P, 19, window)
        seen.add(type(rep))
        if isinstance(rep, Separated):
            assert rep.g in (11, 13)
            assert red.order_p != red.order_q
        else:
            assert isinstance(rep, NonSeparating)
            assert rep.d == red.order_p == red.order_q
    assert seen == {Separated, NonSeparating}


def test_window_exponents_match_brute_force():
    rng = random.Random(9)
    for _ in range(50):
        r = rng.randrange(2, 10 ** 15)
        w = HasseWindow.from_scale(r)
        assert (w.bound - r - 1) ** 2 <= 4 * r < (w.bound - r) ** 2
        for l in sympy.primerange(2, 101):
            nu = max(k for k in range(64) if l ** k <= w.bound)
            assert hasse_exponent(l, w) == nu


def test_multiplier_grows_with_t():
    w = HasseWindow.from_modulus(10 ** 12 + 39)
    previous = build_multiplier(2, w)
    for t in sympy.primerange(3, 200):
        m = build_multiplier(t, w)
        assert m.value > previous.value
        assert m.value % previous.value == 0
        assert m.value // previous.value == t ** hasse_exponent(t, w)
        previous = m
