from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coulgreen.integrals import (B_FINITE_SUM_SIGN, _b_finite_sum, c_value, const_A12,
                                 const_B, d_value, h_value, identity_c, identity_d,
                                 identity_h, j_high, j_low, j_mom, k_gen, k_high, k_low)
from coulgreen.numerics import DomainError, to_mpf
from coulgreen.oracle import QuadratureSpec, quad_semi_inf_1d
from coulgreen.rcgf import QuantumIndex as Q

mp.mp.dps = 34


def test_A12():
    assert abs(const_A12(Q(1, 0), 1, 1).value - (2 * mp.euler - mp.mpf(7) / 2)) < 1e-30
    for n in range(2, 6):
        for i1 in range(1, n + 1):
            for i2 in range(1, n + 1):
                assert const_A12(Q(n, 0), i1, i2).value == const_A12(Q(n, 0), i2, i1).value
    # n=2, l=0, i1=1, i2=2 term by term
    ps = lambda k: mp.digamma(k)
    ref = -mp.mpf(5) / 4 + ps(3) + ps(2) - ps(1) - ps(2) - ps(2) - ps(3)
    assert abs(const_A12(Q(2, 0), 1, 2).value - ref) < 1e-30
    with pytest.raises(DomainError):
        const_A12(Q(2, 1), 1, 2)


def test_B_sign_convention():
    assert B_FINITE_SUM_SIGN == -1
    assert _b_finite_sum(2, 0, 1) == Fraction(-1, 2)
    assert const_B(Q(2, 0), 1) == Fraction(1, 2)
    assert const_B(Q(3, 1), 2) == Fraction(1, 4)
    for n in range(1, 9):
        assert const_B(Q(n, 0), n) == 0


ORACLE_K = [((1, 0), 1, 1, 0, 0, -2.4999999999999893),
            ((2, 0), Fraction(1, 2), 1, 1, 0, 1.7777777777777775),
            ((1, 1), 1, 1, 0, 0, -0.49999999999999806),
            ((1, 2), 1, 2, 2, 1, -0.025421289597674066),
            ((3, 1), 1, 1, 2, 0, -0.2652387653683481)]


@pytest.mark.parametrize("nl,b,bp,q,qp,ref", ORACLE_K)
def test_k_frozen_oracle(nl, b, bp, q, qp, ref):
    idx = Q(*nl)
    v = (k_low if idx.low else k_high)(idx, b, bp, q, qp).value
    assert abs(float(v) - ref) <= 1e-11 * abs(ref)
    assert float(k_gen(idx, b, bp, q, qp).value) == float(v)


ORACLE_J = [((1, 0), 1, 1, 0, -0.5368370173391055),
            ((1, 1), 1, 1, 0, -0.3678794411714423),
            ((1, 2), 1, Fraction(1, 2), 2, -0.07947156684999838),
            ((3, 1), Fraction(1, 3), 2, 1, 0.2489289406329891)]


@pytest.mark.parametrize("nl,lam,x,q,ref", ORACLE_J)
def test_j_frozen_oracle(nl, lam, x, q, ref):
    idx = Q(*nl)
    v = (j_low if idx.low else j_high)(idx, lam, x, q).value
    assert abs(float(v) - ref) <= 1e-12 * abs(ref)


rates = st.fractions(Fraction(1, 10), 3, max_denominator=12)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(0, 5), rates, rates, st.integers(0, 3), st.integers(0, 3))
def test_k_swap_symmetry(n, l, b, bp, q, qp):
    a = k_gen(Q(n, l), b, bp, q, qp).value
    c = k_gen(Q(n, l), bp, b, qp, q).value
    assert abs(a - c) <= 1e-12 * abs(a)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.integers(0, 5), rates, rates, st.integers(0, 2), st.integers(0, 2),
       st.sampled_from([2, 3, Fraction(5, 2)]))
def test_k_charge_scaling(n, l, b, bp, q, qp, Z):
    a = k_gen(Q(n, l, Z), b * Z, bp * Z, q, qp).value
    c = k_gen(Q(n, l), b, bp, q, qp).value
    assert abs(a - to_mpf(Z) ** (-q - qp - 1) * c) <= 1e-20 * abs(a)


def test_j_charge_scaling():
    from coulgreen.oracle import oracle_j
    idx = Q(2, 1, 3)
    v = j_mom(idx, Fraction(3, 2), Fraction(2, 3), 1)
    o = oracle_j(idx, Fraction(3, 2), Fraction(2, 3), 1)
    assert abs(float(v.value) - o.value) <= 1e-10 * abs(o.value)
    w = j_mom(Q(2, 1), Fraction(1, 2), 2, 1).value / 3
    assert abs(v.value - w) <= 1e-25 * abs(w)


def test_degenerate_tags_and_domain():
    assert "degenerate-lambda" in k_gen(Q(3, 1), Fraction(1, 3), 1, 0, 0).branch_tags
    assert "degenerate-lambda" not in k_gen(Q(3, 1), 1, 1, 0, 0).branch_tags
    with pytest.raises(DomainError):
        k_gen(Q(2, 0), 0, 1, 0, 0)
    with pytest.raises(DomainError):
        j_mom(Q(2, 0), 1, 0, 0)
    with pytest.raises(DomainError):
        k_gen(Q(2, 0), 1, 1, -1, 0)
    # the wide flag lets a slightly negative rate through
    assert mp.isfinite(k_gen(Q(2, 0), Fraction(-1, 10), 1, 0, 0, wide=True).value)


@pytest.mark.parametrize("n,l,q", [(1, 0, 0), (2, 1, 1), (3, 1, 2), (1, 2, 1), (2, 4, 3), (4, 2, 0)])
def test_continuity_at_one_over_n(n, l, q):
    lam = Fraction(1, n)
    k0 = k_gen(Q(n, l), lam, Fraction(3, 2), q, 1).value
    j0 = j_mom(Q(n, l), lam, Fraction(3, 2), q).value
    for e in (Fraction(1, 10 ** 6), -Fraction(1, 10 ** 6)):
        assert abs(k_gen(Q(n, l), lam + e, Fraction(3, 2), q, 1).value - k0) <= 1e-4 * abs(k0)
        assert abs(j_mom(Q(n, l), lam + e, Fraction(3, 2), q).value - j0) <= 1e-4 * abs(j0)


KJ_DRAWS = [((1, 0), 1, 2, 0, 0), ((2, 0), Fraction(1, 2), 1, 1, 2), ((2, 1), Fraction(37, 100), 1, 2, 1),
            ((3, 1), 1, Fraction(3, 2), 0, 2), ((1, 2), 2, 1, 1, 0), ((2, 4), 1, 1, 2, 3),
            ((3, 0), Fraction(2, 3), Fraction(4, 5), 1, 1), ((4, 2), 1, 2, 0, 1),
            ((2, 2), Fraction(3, 4), Fraction(1, 3), 3, 0), ((3, 4), 2, 2, 1, 1)]


@pytest.mark.parametrize("nl,b,bp,q,qp", KJ_DRAWS)
def test_k_from_j(nl, b, bp, q, qp):
    """int e^(-beta r) r^q J(beta', r; q') dr reproduces K."""
    idx = Q(*nl)
    k = float(k_gen(idx, b, bp, q, qp).value)
    f = lambda rs: np.array([float(j_mom(idx, bp, Fraction(r), qp).value) for r in rs]) \
        * rs ** q * np.exp(-float(b) * rs)
    spec = QuadratureSpec(rel_tol=1e-9, decay_rate=float(b), order=6)
    q_ = quad_semi_inf_1d(f, spec, degree=2 * nl[0] + q)
    assert abs(q_.value - k) <= 1e-7 * abs(k)


def test_identity_examples():
    a, b = identity_h(Q(1, 2), 1, Fraction(5, 7))
    assert a == b
    assert identity_h(Q(2, 3), 0, Fraction(-3, 2)) == (0, 0) or \
        identity_h(Q(2, 3), 0, Fraction(-3, 2))[0] == identity_h(Q(2, 3), 0, Fraction(-3, 2))[1]
    assert h_value(Q(1, 1), 1, 1) == 0
    for idx, q, x in [(Q(3, 1), 0, Fraction(2, 3)), (Q(2, 1), 1, Fraction(-7, 4)), (Q(5, 2), 2, Fraction(9, 5))]:
        a, b = identity_c(idx, q, x)
        assert a - b == 0 and c_value(idx, q, x) == 0
    for idx, p, r, x, y in [(Q(1, 2), 1, 1, Fraction(3, 2), Fraction(5, 3)),
                            (Q(1, 3), 4, 2, Fraction(-2, 7), Fraction(1, 2)),
                            (Q(2, 3), 0, 1, 1, 1)]:
        a, b = identity_d(idx, p, r, x, y)
        assert a - b == 0 and d_value(idx, p, r, x, y) == 0


fracs = st.fractions(-5, 5, max_denominator=9).filter(lambda v: v not in (0, -1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.data(), fracs, fracs)
def test_identities_vanish(n, l, data, x, y):
    idx = Q(n, l)
    q = data.draw(st.integers(0, l))
    if idx.low:
        assert c_value(idx, q, x) == 0
        a, b = identity_c(idx, q, x)
        assert a == b
        return
    assert h_value(idx, q, x) == 0
    a, b = identity_h(idx, q, x)
    assert a == b
    if l >= 2:
        p = data.draw(st.integers(0, 2 * l))
        r = data.draw(st.integers(1, l - 1))
        assert d_value(idx, p, r, x, y) == 0


@pytest.mark.parametrize("x", [Fraction(1, 10), 1, 5])
def test_j_vanishes_on_resonant_weight(x):
    # r^l e^(-r/n) is the nodeless n = l+1 state, orthogonal to the reduced G
    assert abs(j_mom(Q(1, 0), 1, x, 2).value) < 1e-25
    assert abs(j_mom(Q(2, 1), Fraction(1, 2), x, 3).value) < 1e-25


@pytest.mark.parametrize("x", [Fraction(1, 10 ** 12), Fraction(1, 10 ** 9)])
def test_j_small_radius_limit(x):
    # J ~ -x/9 for (3,4), q=1, rate 2; the sum loses most of its digits here
    v = j_mom(Q(3, 4), 2, x, 1)
    assert abs(v.value / x + mp.mpf(1) / 9) < 1e-6
    assert "zero" not in v.branch_tags
