"""Generating integrals K_nl, integral moments J_nl and their identities.

    K(beta, beta'; q, q') = int int e^(-beta r - beta' r') G(r, r') r^q r'^q' dr dr'
    J(beta, r; q)         = int e^(-beta r') G(r, r') r'^q dr'

Everything is assembled at charge 1 in the scaled variables lam = beta/Z
and x = Z r, then rescaled.  Rates are held as exact rationals so that the
degenerate line lam = 1/n, where the kernels change form, is hit exactly.
"""
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .moments import script_f, script_g, script_i
from .numerics import (Accumulator, DomainError, PrecisionContext,
                       TrackedValue, binomial, evaluate_with_escalation, fact,
                       harmonic, to_fraction, to_mpf)
from .rcgf import QuantumIndex
from .special import _frac_to_mpf, digamma_int, gamma_upper_int, hyp3f2_unit_terminating
from .ukernel import capI_mn, f_ab, g_ab


@dataclass
class IntegralResult:
    value: object
    abs_err_est: float
    branch_tags: list = field(default_factory=list)
    wall_time_ns: int = 0
    inputs_echo: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    def to_dict(self, digits=None):
        digits = digits or mp.mp.dps
        return {
            "value": float(self.value),
            "value_str": mp.nstr(self.value, digits, strip_zeros=False),
            "abs_err_est": float(self.abs_err_est),
            "branch_tags": list(self.branch_tags),
            "wall_time_ns": int(self.wall_time_ns),
            "inputs": dict(self.inputs_echo),
        }


def _check_idx(idx, i1, i2=None):
    for i in (i1, i2):
        if i is not None and not idx.l + 1 <= i <= idx.n:
            raise DomainError(f"index {i} outside [{idx.l + 1}, {idx.n}]")


def _a12_rational(n, l, i1, i2):
    # psi(k) = H_{k-1} - euler; the euler parts leave +2 euler
    H = lambda k: harmonic(k - 1)
    return (Fraction(-(4 * l + 5), 2 * n) + H(n + l + 1) + H(n - l)
            - H(i1 - l) - H(1 + i1 + l) - H(i2 - l) - H(1 + i2 + l))


def const_A12(idx, i1, i2):
    _check_idx(idx, i1, i2)
    v = _frac_to_mpf(_a12_rational(idx.n, idx.l, i1, i2)) + 2 * mp.euler
    return TrackedValue(v, float(abs(v)) * float(mp.eps) * 4, "exact+euler")


def _b_finite_sum(n, l, i):
    s = Fraction(0)
    for k in range(1, n - i + 1):
        s += Fraction(fact(i - l - 1) * fact(i + l) * fact(n - i) * (-1) ** k * fact(k - 1),
                      fact(k + i - l - 1) * fact(k + i + l) * fact(n - i - k))
    return s


# sign convention of the finite-sum representation of B, fixed by quadrature
B_FINITE_SUM_SIGN = -1


def const_B(idx, i):
    """Exact B_i = (n-i)/((i+l+1)(i-l)) 3F2(1, 1, 1-n+i; 1+i-l, 2+i+l; 1)."""
    _check_idx(idx, i)
    n, l = idx.n, idx.l
    b = B_FINITE_SUM_SIGN * _b_finite_sum(n, l, i)
    if i < n:
        h = Fraction(n - i, (i + l + 1) * (i - l)) * hyp3f2_unit_terminating(
            1, 1, 1 - n + i, 1 + i - l, 2 + i + l)
        assert h == b
    return b


def _rates(idx, lam, lamp=None, wide=False):
    lam = to_fraction(lam)
    if not wide and lam <= 0 or lamp is not None and not wide and to_fraction(lamp) <= 0:
        raise DomainError("decay rates must be positive")
    out = [lam + Fraction(1, idx.n)]
    if lamp is not None:
        out.append(to_fraction(lamp) + Fraction(1, idx.n))
    if any(a <= 0 for a in out):
        raise DomainError("integral diverges: lam + 1/n must be positive")
    return out


def _check_orders(*qs):
    for q in qs:
        if int(q) != q or q < 0:
            raise DomainError("moment orders must be non-negative integers")


def _scaled(tv, k, tags):
    return TrackedValue(k * tv.value, abs(k) * tv.abs_err_est, tv.branch or tags,
                        abs(k) * tv.max_term)


def _tags(acc, main):
    return ",".join([main] + sorted(set(b for b in acc.branches if b)))


def _k_low_body(n, l, q, qp, al, alp, ctx):
    t2 = Fraction(2, n)
    acc = Accumulator()
    for i1 in range(l, n):
        for i2 in range(1 - l, 2 + l):
            co = Fraction(binomial(n + l, n - i1 - 1) * (-1) ** (i1 + l) * fact(i2 - 1 + l),
                          fact(i1 - l)) * t2 ** (i1 - i2)
            if not co:
                continue
            c1 = co * binomial(n - i2, n - l - 1)
            if c1:
                cm = _frac_to_mpf(c1)
                acc.add_tracked(cm, f_ab(q - i2 + 1, qp + i1 + 1, alp, al - t2, ctx))
                acc.add_tracked(cm, f_ab(qp - i2 + 1, q + i1 + 1, al, alp - t2, ctx))
            c2 = co * binomial(n + l, n - 1 + i2)
            if c2:
                cm = -_frac_to_mpf(c2)
                acc.add_tracked(cm, g_ab(q - i2 + 1, qp + i1 + 1, al, alp))
                acc.add_tracked(cm, g_ab(qp - i2 + 1, q + i1 + 1, alp, al))
    alm, alpm = to_mpf(al), to_mpf(alp)
    lg = mp.log(n * n * alm * alpm / 4)
    idx = QuantumIndex(n, l)
    for i1 in range(l + 1, n + 1):
        for i2 in range(l + 1, n + 1):
            co = _frac_to_mpf(Fraction(
                binomial(n + l, n - i1) * binomial(n + l, n - i2) * (-1) ** (i1 + i2 + 1),
                fact(i1 - l - 1) * fact(i2 - l - 1)) * t2 ** (i1 + i2 - 2))
            B = const_B(idx, i2)
            if B:
                cm = co * _frac_to_mpf(B)
                acc.add_tracked(cm, f_ab(q + i2, qp + i1, alp, al - t2, ctx))
                acc.add_tracked(cm, f_ab(qp + i2, q + i1, al, alp - t2, ctx))
            GG = fact(q + i1 - 1) * fact(qp + i2 - 1) / (alm ** (q + i1) * alpm ** (qp + i2))
            rat = (_a12_rational(n, l, i1, i2)
                   + Fraction((2 * n + l - i1 + 1) * (q + i1), (i1 + l + 1) * n * n) / al
                   + Fraction((2 * n + l - i2 + 1) * (qp + i2), (i2 + l + 1) * n * n) / alp)
            for part in (digamma_int(q + i1), digamma_int(qp + i2), -lg,
                         2 * mp.euler, _frac_to_mpf(rat)):
                acc.add(-co * GG * part)
            ci = co * (mp.mpf(n) / 2) ** (q + qp + i1 + i2)
            acc.add_tracked(ci, capI_mn(q + i1 - 1, qp + i2 - 1, n * al / 2, n * alp / 2, ctx))
    tv = acc.result(ctx)
    pre = 4 * mp.mpf(fact(n - l - 1)) / (n * fact(n + l))
    return _scaled(tv, pre, _tags(acc, "low-l"))


def _k_high_body(n, l, q, qp, al, alp, ctx):
    t2 = Fraction(2, n)
    acc = Accumulator()
    for i in range(-l, n + 1):
        for j in range(-l, n + 1):
            co = Fraction(fact(l - i), fact(l + j)) * binomial(l + n, i + l) * t2 ** (i + j)
            if not co:
                continue
            c1 = co * binomial(l - j, l + n) * (-1) ** (j + l)
            if c1:
                cm = _frac_to_mpf(c1)
                acc.add_tracked(cm, f_ab(j + q, i + qp, alp, al - t2, ctx))
                acc.add_tracked(cm, f_ab(j + qp, i + q, al, alp - t2, ctx))
            c2 = co * binomial(l - j, l - n)
            if c2:
                cm = -_frac_to_mpf(c2)
                acc.add_tracked(cm, f_ab(j + q, i + qp, alp, al, ctx))
                acc.add_tracked(cm, f_ab(j + qp, i + q, al, alp, ctx))
    tv = acc.result(ctx)
    return _scaled(tv, mp.mpf((-1) ** (n + l + 1) * n), _tags(acc, "high-l"))


def _k_checked(idx, lam, lamp, q, qp, ctx, wide, want_low):
    if idx.low != want_low:
        raise DomainError("wrong branch for this (n, l)")
    _check_orders(q, qp)
    al, alp = _rates(idx, lam, lamp, wide)
    ctx = ctx or PrecisionContext.for_n(idx.n)
    body = _k_low_body if idx.low else _k_high_body
    return evaluate_with_escalation(
        lambda c: body(idx.n, idx.l, int(q), int(qp), al, alp, c), ctx)


def k_low(idx, lam, lamp, q, qp, ctx=None, wide=False):
    """K at charge 1 for l <= n-1 in the scaled rates lam, lam'."""
    return _k_checked(idx, lam, lamp, q, qp, ctx, wide, True)


def k_high(idx, lam, lamp, q, qp, ctx=None, wide=False):
    return _k_checked(idx, lam, lamp, q, qp, ctx, wide, False)


def _degenerate_tags(idx, *lams):
    return ["degenerate-lambda"] if any(to_fraction(x) == Fraction(1, idx.n) for x in lams) else []


def k_gen(idx, beta, betap, q, qp, ctx=None, wide=False):
    t0 = time.perf_counter_ns()
    Z = to_fraction(idx.Z)
    lam, lamp = to_fraction(beta) / Z, to_fraction(betap) / Z
    one = QuantumIndex(idx.n, idx.l)
    tv = (k_low if one.low else k_high)(one, lam, lamp, q, qp, ctx, wide)
    k = _frac_to_mpf(Z) ** (-q - qp - 1)
    tags = tv.branch.split(",") + _degenerate_tags(idx, lam, lamp)
    return IntegralResult(
        k * tv.value, float(abs(k)) * tv.abs_err_est, tags, time.perf_counter_ns() - t0,
        {"n": idx.n, "l": idx.l, "q": q, "qp": qp, "beta": str(to_fraction(beta)),
         "betap": str(to_fraction(betap)), "Z": str(Z)})


def _j_low_body(n, l, q, al, x, ctx):
    t2 = Fraction(2, n)
    s = t2 - al
    xm, alm = to_mpf(x), to_mpf(al)
    e2 = mp.exp(2 * xm / n)
    acc = Accumulator()
    for i1 in range(l, n):
        for i2 in range(1 - l, 2 + l):
            co = Fraction(binomial(n + l, n - i1 - 1) * (-1) ** (i1 + l) * fact(i2 - 1 + l),
                          fact(i1 - l)) * t2 ** (i1 - i2)
            if not co:
                continue
            c1 = co * binomial(n - i2, n - l - 1)
            if c1:
                cm = _frac_to_mpf(c1)
                acc.add_tracked(cm * xm ** i1, script_f(q + 1 - i2, s, x, ctx))
                acc.add(cm * xm ** (-i2) * e2 * gamma_upper_int(1 + i1 + q, alm * xm)
                        / alm ** (1 + i1 + q))
            c2 = co * binomial(n + l, n - 1 + i2)
            if c2:
                cm = -_frac_to_mpf(c2)
                acc.add_tracked(cm * xm ** i1, script_g(q + 1 - i2, alm))
                acc.add(cm * xm ** (-i2) * fact(q + i1) / alm ** (q + i1 + 1))
    idx = QuantumIndex(n, l)
    lg = mp.log(4 * xm / (n * n * alm))
    for i1 in range(l + 1, n + 1):
        for i2 in range(l + 1, n + 1):
            co = _frac_to_mpf(Fraction(
                binomial(n + l, n - i1) * binomial(n + l, n - i2) * (-1) ** (i1 + i2 + 1),
                fact(i1 - l - 1) * fact(i2 - l - 1)) * t2 ** (i1 + i2 - 2))
            B = const_B(idx, i2)
            if B:
                cm = co * _frac_to_mpf(B)
                acc.add_tracked(cm * xm ** (i1 - 1), script_f(q + i2, s, x, ctx))
                acc.add(cm * xm ** (i2 - 1) * e2 * gamma_upper_int(i1 + q, alm * xm)
                        / alm ** (i1 + q))
            GG = co * xm ** (i1 - 1) * fact(q + i2 - 1) / alm ** (q + i2)
            rat = (_a12_rational(n, l, i1, i2)
                   + Fraction((2 * n + l - i2 + 1) * (i2 + q), (i2 + l + 1) * n * n) / al)
            for part in (lg, digamma_int(q + i2), 2 * mp.euler, _frac_to_mpf(rat),
                         mp.mpf(2 * n + l - i1 + 1) / (i1 + l + 1) * xm / (n * n)):
                acc.add(-GG * part)
            ci = co * xm ** (i1 - 1) * (mp.mpf(n) / 2) ** (q + i2)
            acc.add_tracked(ci, script_i(q + i2 - 1, al * n / 2, t2 * x, ctx))
    tv = acc.result(ctx)
    pre = 4 * mp.mpf(fact(n - l - 1)) / (n * fact(n + l)) * mp.exp(-xm / n)
    return _scaled(tv, pre, _tags(acc, "low-l"))


def _j_high_body(n, l, q, al, x, ctx):
    t2 = Fraction(2, n)
    xm, alm = to_mpf(x), to_mpf(al)
    e2 = mp.exp(2 * xm / n)
    acc = Accumulator()
    for i in range(-l, n + 1):
        for j in range(-l, n + 1):
            co = Fraction(fact(l - i), fact(l + j)) * binomial(l + n, i + l) * t2 ** (i + j)
            if not co:
                continue
            c1 = co * binomial(l - j, l + n) * (-1) ** (j + l)
            c2 = co * binomial(l - j, l - n)
            if not (c1 or c2):
                continue
            gam = gamma_upper_int(i + q, alm * xm) / alm ** (i + q) * xm ** (j - 1)
            if c1:
                cm = _frac_to_mpf(c1)
                acc.add_tracked(cm * xm ** (i - 1), script_f(j + q, t2 - al, x, ctx))
                acc.add(cm * e2 * gam)
            if c2:
                cm = -_frac_to_mpf(c2)
                acc.add_tracked(cm * xm ** (i - 1), script_f(j + q, -al, x, ctx))
                acc.add(cm * gam)
    tv = acc.result(ctx)
    return _scaled(tv, (-1) ** (n + l + 1) * n * mp.exp(-xm / n), _tags(acc, "high-l"))


def _j_checked(idx, lam, x, q, ctx, wide, want_low):
    if idx.low != want_low:
        raise DomainError("wrong branch for this (n, l)")
    _check_orders(q)
    (al,) = _rates(idx, lam, None, wide)
    x = to_fraction(x)
    if x <= 0:
        raise DomainError("radius must be positive")
    ctx = ctx or PrecisionContext.for_n(idx.n)
    body = _j_low_body if idx.low else _j_high_body
    return evaluate_with_escalation(lambda c: body(idx.n, idx.l, int(q), al, x, c), ctx)


def j_low(idx, lam, x, q, ctx=None, wide=False):
    """J at charge 1 for l <= n-1: scaled rate lam, scaled radius x."""
    return _j_checked(idx, lam, x, q, ctx, wide, True)


def j_high(idx, lam, x, q, ctx=None, wide=False):
    return _j_checked(idx, lam, x, q, ctx, wide, False)


def j_mom(idx, beta, r, q, ctx=None, wide=False):
    t0 = time.perf_counter_ns()
    Z = to_fraction(idx.Z)
    lam, x = to_fraction(beta) / Z, to_fraction(r) * Z
    one = QuantumIndex(idx.n, idx.l)
    tv = (j_low if one.low else j_high)(one, lam, x, q, ctx, wide)
    k = _frac_to_mpf(Z) ** (-q)
    tags = tv.branch.split(",") + _degenerate_tags(idx, lam)
    return IntegralResult(
        k * tv.value, float(abs(k)) * tv.abs_err_est, tags, time.perf_counter_ns() - t0,
        {"n": idx.n, "l": idx.l, "q": q, "beta": str(to_fraction(beta)),
         "r": str(to_fraction(r)), "Z": str(Z)})


# exact cancellation identities behind the convergence of K and J

def _frac(x):
    x = to_fraction(x)
    return x


def identity_h(idx, q, x):
    """(double-sum form, closed form) of the two halves of h_{n,l}(q, x)."""
    n, l, x = idx.n, idx.l, _frac(x)
    if idx.low or not 0 <= q <= l or x == 0 or x == -1:
        raise DomainError("identity_h needs l >= n, 0 <= q <= l, x not in {0, -1}")
    h1 = sum((Fraction((-1) ** (l + i) * binomial(l + i, l + n) * binomial(i - q, k),
                       fact(l - i) * fact(i - q)) * x ** (i - k)
              for i in range(q, l + 1) for k in range(i - q + 1)), Fraction(0))
    h2 = sum((x ** i * Fraction(binomial(l + i, l - n), fact(l - i) * fact(i - q))
              for i in range(q, l + 1)), Fraction(0))
    return h1, h2


def h_value(idx, q, x):
    """h_{n,l}(q, x) straight from its bracketed definition."""
    n, l, x = idx.n, idx.l, _frac(x)
    return sum((x ** i / (fact(l - i) * fact(i - q))
                * (binomial(l + i, l + n) * (-1) ** (i + l) * (1 + 1 / x) ** (i - q)
                   - binomial(l + i, l - n)) for i in range(q, l + 1)), Fraction(0))


def identity_c(idx, q, x):
    n, l, x = idx.n, idx.l, _frac(x)
    if not idx.low or not 0 <= q <= l or x == 0 or x == -1:
        raise DomainError("identity_c needs n > l, 0 <= q <= l, x not in {0, -1}")
    c1 = sum((Fraction(fact(i + l - 1), fact(i - q - 1)) * binomial(i - q - 1, k)
              * binomial(n - i, l + 1 - i) * x ** (i - k)
              for i in range(q + 1, l + 2) for k in range(i - q)), Fraction(0))
    c2 = sum((x ** i * Fraction(fact(i + l - 1), fact(i - q - 1)) * binomial(n + l, l - i + 1)
              for i in range(q + 1, l + 2)), Fraction(0))
    return c1, c2


def c_value(idx, q, x):
    n, l, x = idx.n, idx.l, _frac(x)
    return sum((Fraction(fact(i + l - 1), fact(i - q - 1)) * x ** i
                * (binomial(n - i, l + 1 - i) * (1 + 1 / x) ** (i - q - 1)
                   - binomial(n + l, l + 1 - i)) for i in range(q + 1, l + 2)), Fraction(0))


def _d_terms(p, r, x, y):
    for i in range(p + 1):
        for j in range(p - i + 1):
            if j != r - i:
                yield i, j, x ** (-i - j) * y ** j / (fact(p - i - j) * (j + i - r) * fact(i) * fact(j))


def identity_d(idx, p, r, x, y):
    n, l, x, y = idx.n, idx.l, _frac(x), _frac(y)
    if idx.low or not 0 <= p <= 2 * l or not 0 < r < l or x == 0 or y == 0 or y == -1:
        raise DomainError("identity_d needs l >= n, 0 <= p <= 2l, 0 < r < l, x, y != 0, y != -1")
    d1 = sum((w * binomial(2 * l - i, l + n) * (-1) ** i * (1 / y + 1) ** j
              for i, j, w in _d_terms(p, r, x, y)), Fraction(0))
    d2 = sum((w * binomial(2 * l - i, l - n) for i, j, w in _d_terms(p, r, x, y)), Fraction(0))
    return d1, d2


def d_value(idx, p, r, x, y):
    d1, d2 = identity_d(idx, p, r, x, y)
    return d1 - d2
