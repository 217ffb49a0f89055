from fractions import Fraction
import math

import numpy as np
import pytest

from coulgreen.integrals import j_mom, k_gen
from coulgreen.numerics import DomainError
from coulgreen.oracle import (QuadratureSpec, float_green, ode_residual, oracle_j,
                              oracle_k, oracle_k_batch, quad_interval,
                              quad_semi_inf_1d, quad_semi_inf_2d)
from coulgreen.rcgf import QuantumIndex as Q


def test_quad_1d_examples():
    assert abs(quad_semi_inf_1d(lambda x: np.exp(-x)).value - 1) < 1e-13
    v = quad_semi_inf_1d(lambda x: x ** 5 * np.exp(-x / 2), QuadratureSpec(decay_rate=0.5), degree=5)
    assert abs(v.value - 120 * 64) < 1e-8
    # log singularity at the origin
    v = quad_semi_inf_1d(lambda x: np.log(x) * np.exp(-x))
    assert abs(v.value + np.euler_gamma) < 1e-10
    assert abs(quad_interval(np.sin, 0, math.pi).value - 2) < 1e-13


def test_quad_2d_examples():
    v = quad_semi_inf_2d(lambda x, y: np.exp(-x - y))
    assert abs(v.value - 1) < 1e-11
    # kink on the diagonal
    v = quad_semi_inf_2d(lambda x, y: np.exp(-np.maximum(x, y)))
    assert abs(v.value - 2) < 1e-10


def test_order_swap():
    f = lambda x, y: x ** 2 * y * np.exp(-2 * x - y) * float_green(2, 1)(x, y)
    g = lambda x, y: f(y, x)
    a, b = quad_semi_inf_2d(f, degree=4).value, quad_semi_inf_2d(g, degree=4).value
    assert abs(a - b) <= 1e-10 * abs(a)


def test_oracle_self_consistency():
    idx = Q(2, 0)
    cases = [(Fraction(1, 2), 1, 1, 0), (1, 1, 0, 0), (Fraction(3, 2), 2, 2, 1)]
    batch = oracle_k_batch(idx, cases)
    for c, b in zip(cases, batch):
        single = oracle_k(idx, *c)
        assert abs(single.value - b.value) <= 1e-10 * abs(b.value)
        assert abs(float(k_gen(idx, *c).value) - b.value) <= 1e-9 * abs(b.value)


def test_oracle_j_matches():
    for idx, lam, r, q in [(Q(1, 0), 1, 1, 0), (Q(3, 2), Fraction(1, 3), Fraction(5, 2), 2),
                           (Q(2, 3), Fraction(37, 100), 20, 1)]:
        o = oracle_j(idx, lam, r, q)
        assert abs(float(j_mom(idx, lam, r, q).value) - o.value) <= 1e-9 * abs(o.value)


@pytest.mark.parametrize("n,l", [(1, 0), (2, 1), (1, 2)])
def test_ode_residual_small(n, l):
    res = ode_residual(Q(n, l), 1, [Fraction(1, 2), 3, 6], 1e-3, digits=40)
    assert max(abs(x) for x in res) < 1e-9


def test_ode_residual_scaling():
    a = ode_residual(Q(2, 0), 1, [3], Fraction(1, 20), digits=40)[0]
    b = ode_residual(Q(2, 0), 1, [3], Fraction(1, 40), digits=40)[0]
    assert 10 < abs(a / b) < 22


def test_ode_guard():
    with pytest.raises(DomainError):
        ode_residual(Q(1, 0), 1, [1.05], 1e-3)
