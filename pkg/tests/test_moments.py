from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from coulgreen.moments import script_f, script_g, script_i
from coulgreen.oracle import QuadratureSpec, quad_interval

mp.mp.dps = 34
close = lambda a, b, tol=1e-25: abs(a - b) <= tol * max(1, abs(b))


def test_f_examples():
    assert close(script_f(1, 0, mp.mpf("2.5")).value, mp.mpf("2.5"))
    assert close(script_f(2, 0, 3).value, mp.mpf(9) / 2)
    assert close(script_f(1, 1, 1).value, mp.e - 1)


def test_i_examples():
    assert close(script_i(0, 1, 1).value, mp.euler)
    assert close(script_i(1, 1, 1).value, 1 + mp.euler)
    # int_0^inf e^(-2t) Ei(min(1, t)) dt by quadrature
    assert abs(float(script_i(0, 2, 1).value) + 0.10969196719769) < 1e-9


def test_g_examples():
    assert close(script_g(1, mp.mpf("1.7")).value, 1 / mp.mpf("1.7"))
    assert close(script_g(2, 2).value, mp.mpf(1) / 4)
    assert close(script_g(0, 1).value, -mp.euler)


@pytest.mark.parametrize("s", [-2, -0.5, 0, 1])
@pytest.mark.parametrize("y", [0.1, 1, 5])
def test_f_vs_quadrature(s, y):
    for q in (1, 2, 3, 5):
        quad = quad_interval(lambda t: t ** (q - 1) * np.exp(s * t), 0, y,
                             QuadratureSpec(rel_tol=1e-13))
        v = float(script_f(q, Fraction(s), Fraction(y)).value)
        assert abs(v - quad.value) <= 1e-9 * abs(quad.value)


@pytest.mark.parametrize("q", [-3, -1, 0, 1, 2, 3])
@pytest.mark.parametrize("s", [Fraction(-9, 2), Fraction(-1, 3), Fraction(4, 5)])
def test_f_derivative(q, s):
    y, h = mp.mpf("1.7"), mp.mpf("1e-10")
    d = (script_f(q, s, y + h).value - script_f(q, s, y - h).value) / (2 * h)
    assert abs(d - y ** (q - 1) * mp.exp(s * y)) < 1e-12


@pytest.mark.parametrize("q", [0, -1, -2, -4])
@pytest.mark.parametrize("s", [Fraction(-5), Fraction(-1, 2), Fraction(3, 2)])
def test_f_finite_part_by_extrapolation(q, s):
    # finite part of sum_i s^i y^(q+d+i) / ((q+d+i) i!) as d -> 0
    y = mp.mpf(2)
    sm = mp.mpf(s.numerator) / s.denominator
    with mp.workdps(60):
        def reg(d):
            return mp.nsum(lambda i: sm ** i * y ** (q + d + i) / ((q + d + i) * mp.factorial(i)),
                           [0, mp.inf])
        h = mp.mpf("1e-12")
        fin = (reg(h) + reg(-h)) / 2
    assert abs(fin - script_f(q, s, y).value) <= 1e-8 * max(1, abs(fin))


@pytest.mark.parametrize("q", [0, 1, 2, 3])
def test_i_continuity(q):
    y = Fraction(7, 5)
    v = script_i(q, 1, y).value
    for e in (Fraction(1, 10 ** 6), -Fraction(1, 10 ** 6)):
        assert abs(script_i(q, 1 + e, y).value - v) <= 1e-4 * abs(v)
