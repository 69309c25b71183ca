"""Scalars and sparse *-algebra elements: exact arithmetic and ring axioms."""

import random
from fractions import Fraction

import pytest

from pqt import words as W
from pqt.algebra import Element, GaussianRational, I, ONE, ZERO, delta, linear_combine, unit, zero
from pqt.errors import UniverseMismatch
from oracles import random_element, random_scalar

B = W.BCElement
T = W.t


def gr(re, im=0):
    return GaussianRational(Fraction(re), Fraction(im))


class TestGaussianRational:
    def test_arithmetic(self):
        a = gr("1/2", "1/3")
        b = gr("-2", "1/6")
        assert a + b == gr("-3/2", "1/2")
        assert a - b == gr("5/2", "1/6")
        assert a * b == gr(Fraction(-1) - Fraction(1, 18), Fraction(1, 12) - Fraction(2, 3))
        assert (a / b) * b == a
        assert -a == gr("-1/2", "-1/3")

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            gr(1) / gr(0)

    def test_conjugate_and_abs2(self):
        a = gr("3/4", "-2/5")
        assert a.conjugate() == gr("3/4", "2/5")
        assert a.abs2() == Fraction(9, 16) + Fraction(4, 25)
        assert (a * a.conjugate()) == GaussianRational(a.abs2())

    def test_str(self):
        assert str(gr("1/2")) == "1/2"
        assert str(gr(0, 1)) == "0+1i"
        assert str(gr("-1/2", "-1/3")) == "-1/2-1/3i"
        assert str(gr(3)) == "3"


def test_linear_combine_prunes_and_merges():
    dp = delta(W.BC, W.P)
    dq = delta(W.BC, W.Q)
    assert linear_combine([(1, dp), (0, dq)]) == dp
    de = unit(W.BC)
    assert linear_combine([(1, de), (-1, de)]) == zero(W.BC)
    dt = delta(W.SINF, (T(1),))
    assert linear_combine([(Fraction(1, 2), dt), (Fraction(1, 2), dt)]) == dt


def test_mul_pinned_values():
    dp = delta(W.BCS, (W.P,))
    dq = delta(W.BCS, (W.Q,))
    assert dp * dq == unit(W.BCS)
    assert dq * dp == delta(W.BCS, (B(1, 1),))
    t1 = delta(W.BCS, (T(1),))
    t2 = delta(W.BCS, (T(2),))
    product = (dp + t1) * (dq + t2)
    expected = (
        unit(W.BCS)
        + delta(W.BCS, (W.P, T(2)))
        + delta(W.BCS, (T(1), W.Q))
        + delta(W.BCS, (T(1), T(2)))
    )
    assert product == expected


def test_star_pinned_values():
    assert (delta(W.BC, W.P).scale(I)).star() == delta(W.BC, W.Q).scale(-I)
    assert unit(W.BCS).star() == unit(W.BCS)
    x = delta(W.BCS, (T(1),)) + delta(W.BCS, (W.P, T(2))).scale(2)
    expected = delta(W.BCS, (T(1, True),)) + delta(W.BCS, (T(2, True), W.Q)).scale(2)
    assert x.star() == expected


def test_coordinate():
    x = delta(W.BC, W.P) + delta(W.BC, W.Q).scale(3)
    assert x.coordinate(W.Q) == gr(3)
    assert unit(W.BC).coordinate(W.P) == ZERO
    assert (delta(W.BC, W.P) * delta(W.BC, W.Q)).coordinate(W.BC_IDENTITY) == ONE


def test_support_max_len():
    assert unit(W.BCS).support_max_len() == 0
    assert (delta(W.BCS, (W.P, T(2))) + unit(W.BCS)).support_max_len() == 2
    assert zero(W.BCS).support_max_len() == 0


def test_ring_axioms_on_random_triples():
    rng = random.Random(101)
    one = unit(W.BCS)
    for _ in range(1000):
        x = random_element(rng, W.BCS)
        y = random_element(rng, W.BCS)
        z = random_element(rng, W.BCS)
        assert x * (y + z) == x * y + x * z
        assert (x + y) * z == x * z + y * z
        assert (x * y) * z == x * (y * z)
        assert one * x == x == x * one


def test_star_is_conjugate_linear_antiautomorphism():
    rng = random.Random(102)
    for _ in range(400):
        x = random_element(rng, W.BCS)
        y = random_element(rng, W.BCS)
        a = random_scalar(rng)
        assert (x * y).star() == y.star() * x.star()
        assert x.star().star() == x
        assert x.scale(a).star() == x.star().scale(a.conjugate())


def test_support_of_products():
    rng = random.Random(103)
    for _ in range(300):
        x = random_element(rng, W.BCS)
        y = random_element(rng, W.BCS)
        allowed = {W.pw_mul(u, v) for u in x.support() for v in y.support()}
        assert set((x * y).support()) <= allowed
        assert (x * y).support_max_len() <= x.support_max_len() + y.support_max_len()


def test_coordinate_is_linear():
    rng = random.Random(104)
    for _ in range(300):
        x = random_element(rng, W.BCS)
        y = random_element(rng, W.BCS)
        a = random_scalar(rng)
        b = random_scalar(rng)
        combo = linear_combine([(a, x), (b, y)])
        probe = next(iter(x.support()), W.identity_word(W.BCS))
        assert combo.coordinate(probe) == a * x.coordinate(probe) + b * y.coordinate(probe)


def test_universe_mismatch_raises():
    with pytest.raises(UniverseMismatch):
        delta(W.BC, W.P) * unit(W.BCS)
    with pytest.raises(UniverseMismatch):
        delta(W.BC, W.P) + unit(W.BCS)
    with pytest.raises(UniverseMismatch):
        linear_combine([(1, delta(W.BC, W.P)), (1, unit(W.F2))])


def test_linear_combine_rejects_empty_input():
    with pytest.raises(ValueError):
        linear_combine([])


def test_zero_handling():
    x = delta(W.BCS, (T(1),))
    assert (x - x).is_zero()
    assert (x - x).render() == "0*e"
    assert x.scale(0).is_zero()
    assert (x * zero(W.BCS)).is_zero()


def test_render_sorted_by_word_order():
    x = delta(W.BCS, (T(2),)) + unit(W.BCS) + delta(W.BCS, (W.P, T(2))).scale(Fraction(1, 2))
    assert x.render() == "1*e + 1*t2 + 1/2*p t2"
