"""Basis functions for the double (generating) integrals.

    u_a^b(x, y) = int_0^inf dr' r'^(b-1) e^(-x r') int_0^r' dr r^(a-1) e^(-y r)
                = sum_i Gamma(a+b+i) / ((a+i) x^(a+b+i)) (-y)^i / i!

At integer orders some series terms diverge; regularizing the exponents by
a common offset delta and keeping the delta^0 coefficient gives f_a^b.  The
same holds for the product u'_a^b = Gamma(a)Gamma(b)/(x^a y^b) and g_a^b.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .numerics import (Accumulator, DomainError, PrecisionContext,
                       TrackedValue, fact, harmonic, to_mpf)
from .special import (_frac_to_mpf, digamma_int, rational_power_sum,
                      trigamma_int)


@dataclass
class PoleExpansion:
    coeff_d2: object
    coeff_d1: object
    finite: object


def _is_int(v):
    return isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1)


def pole_expansion(kind, n, m, x):
    """Laurent data of the three singular building blocks.

    A_n(x)   = Gamma(n+2d) / (d x^(n+2d))              n >= 1
    B_m^n(x) = Gamma(-n+2d) / ((m+d) x^(-n+2d))        m != 0
    C_n(x)   = Gamma(-n+2d) / (d x^(-n+2d))            n >= 0
    """
    x = to_mpf(x)
    L = mp.log(x)
    if kind == "A":
        if n < 1:
            raise DomainError("A_n needs n >= 1")
        g = fact(n - 1) / x ** n
        return PoleExpansion(mp.mpf(0), g, g * (2 * digamma_int(n) - 2 * L))
    if kind == "B":
        if m == 0:
            raise DomainError("B_m^n needs m != 0")
        pre = (-x) ** n / (fact(n) * m)
        return PoleExpansion(mp.mpf(0), pre / 2,
                             pre * (digamma_int(n + 1) - L - mp.mpf(1) / (2 * m)))
    if kind == "C":
        if n < 0:
            raise DomainError("C_n needs n >= 0")
        pre = (-x) ** n / fact(n)
        ps = digamma_int(n + 1)
        return PoleExpansion(pre / 2, pre * (ps - L),
                             pre * ((ps - L) ** 2 - trigamma_int(n + 1) + mp.pi ** 2 / 3))
    raise DomainError(f"unknown pole kind {kind!r}")


def _term_laurent(a, c, i, x):
    """(d^-2, d^-1, d^0) coefficients of Gamma(c+i+2d)/((a+i+d) x^(c+i+2d))."""
    k, m = c + i, a + i
    if k >= 1 and m != 0:
        return 0, 0, fact(k - 1) / (m * x ** k)
    if k >= 1:
        pe = pole_expansion("A", k, None, x)
    elif m != 0:
        pe = pole_expansion("B", -k, m, x)
    else:
        pe = pole_expansion("C", -k, None, x)
    return pe.coeff_d2, pe.coeff_d1, pe.finite


def u_ab(a, b, x, y, ctx=None):
    """The regular function u_a^b(x, y).

    Positive integer orders use the closed finite sum, b = 0 the
    logarithmic form, anything else the Gauss 2F1 representation.
    Orders where a series term diverges are rejected; use f_ab there.
    """
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        xm, ym = to_mpf(x), to_mpf(y)
        if xm <= 0:
            raise DomainError("u_ab needs x > 0")
        if (_is_int(a) and a <= 0) or (_is_int(a + b) and a + b <= 0):
            raise DomainError("singular orders, use f_ab")
        if _is_int(a) and _is_int(b) and b >= 0:
            a, b = int(a), int(b)
            if xm + ym <= 0:
                raise DomainError("u_ab needs x + y > 0")
            if ym == 0:
                return TrackedValue(fact(a + b - 1) / (a * xm ** (a + b)), 0.0, "y0")
            # cancellation ~ (x/|y|)^a, paid for with extra digits
            guard = int(a * max(0.0, float(mp.log10(abs(xm / ym))))) + 5
            with mp.extradps(guard):
                s = xm + ym
                if b == 0:
                    acc = mp.log(s / xm) - mp.fsum(fact(k - 1) * ym ** k / (fact(k) * s ** k)
                                                   for k in range(1, a))
                    branch = "log"
                else:
                    acc = fact(b - 1) / xm ** b - mp.fsum(
                        ym ** k * fact(b + k - 1) / (fact(k) * s ** (b + k)) for k in range(a))
                    branch = "finite-sum"
                v = fact(a - 1) / ym ** a * acc
            return TrackedValue(+v, abs(v) * ctx.unit_roundoff * 10, branch)
        am, bm = to_mpf(a), to_mpf(b)
        v = mp.gamma(am + bm) / (am * xm ** (am + bm)) * mp.hyp2f1(am + bm, am, am + 1, -ym / xm)
        return TrackedValue(v, abs(v) * ctx.unit_roundoff * 10, "hyp2f1")


def uprime_ab(a, b, x, y):
    if a <= 0 or b <= 0:
        raise DomainError("uprime_ab needs positive orders, use g_ab")
    x, y = to_mpf(x), to_mpf(y)
    v = mp.gamma(a) / x ** a * mp.gamma(b) / y ** b
    return TrackedValue(v, abs(v) * mp.eps, "product")


def g_ab(a, b, x, y):
    """Finite part of Gamma(a+d)Gamma(b+d)/(x^(a+d) y^(b+d)), b >= 1."""
    if b < 1:
        raise DomainError("g_ab needs b >= 1")
    x, y = to_mpf(x), to_mpf(y)
    if a >= 1:
        v = fact(a - 1) / x ** a * fact(b - 1) / y ** b
        return TrackedValue(v, abs(v) * mp.eps, "regular")
    n = -a
    v = fact(b - 1) / y ** b * (-x) ** n / fact(n) * (
        digamma_int(n + 1) + digamma_int(b) - mp.log(x * y))
    return TrackedValue(v, abs(v) * mp.eps * 8, "pole")


def _f_branch(a, c):
    if c > 0:
        return "regular" if a > 0 else "a-nonpositive"
    if a > 0:
        return "sum-nonpositive"
    if c - a > 0:
        return "sum-nonpositive-b-positive"
    return "both-nonpositive"


def _tail(a, c, N, x, y, ctx):
    """sum_{i>=N} Gamma(c+i)/((a+i) x^(c+i)) (-y)^i/i!, all terms regular."""
    w = -y / x
    if abs(w) <= 0.5:
        t = fact(c + N - 1) / ((a + N) * x ** (c + N)) * (-y) ** N / fact(N)
        acc = Accumulator()
        acc.add(t)
        big = abs(t)
        i = N
        while True:
            t = t * (c + i) * (a + i) / mp.mpf((a + i + 1) * (i + 1)) * w
            acc.add(t)
            big = max(big, abs(t))
            i += 1
            if abs(t) <= mp.eps * big * 1e-3:
                break
        return acc.result(ctx, "series")
    if c >= 1:
        numer = [Fraction(1)]
        for p in range(1, c):
            numer = _poly_mul_lin(numer, p)
        poles = {a: 1}
    else:
        numer = [Fraction(1)]
        poles = {-p: 1 for p in range(0, -c + 1)}
        poles[a] = poles.get(a, 0) + 1
    acc = rational_power_sum(numer, poles, w, N)
    tv = acc.result(ctx, "partial-fractions")
    scale = x ** (-c)
    return TrackedValue(tv.value * scale, tv.abs_err_est * abs(scale),
                        tv.branch, tv.max_term * abs(scale))


def _poly_mul_lin(p, s):
    # p(k) * (k + s)
    out = [Fraction(0)] * (len(p) + 1)
    for i, c in enumerate(p):
        out[i] += c * s
        out[i + 1] += c
    return out


@lru_cache(maxsize=200000)
def _f_cached(a, b, x, y, dps, tol):
    ctx = PrecisionContext(working_digits=dps, target_rel_tol=tol)
    c = a + b
    xm, ym = to_mpf(x), to_mpf(y)
    N = max(0, 1 - a, 1 - c)
    acc = Accumulator()
    for i in range(N):
        _, _, fin = _term_laurent(a, c, i, xm)
        if ym == 0:
            if i == 0:
                acc.add(fin)
            continue
        acc.add(fin * (-ym) ** i / fact(i))
    branch = _f_branch(a, c)
    if ym == 0:
        if N == 0:
            acc.add(fact(c - 1) / (a * xm ** c))
        return acc.result(ctx, branch + "/y0")
    tail = _tail(a, c, N, xm, ym, ctx)
    acc.add_tracked(1, tail)
    return acc.result(ctx, branch)


def f_ab(a, b, x, y, ctx=None):
    """Finite part of u_{a+d}^{b+d}(x, y) at integer orders a, b.

    Needs x > 0 and x + y > 0.  For a > 0, a + b > 0 this is u_a^b itself.
    Exact rational y is recommended so y = 0 is detected exactly.
    """
    ctx = ctx or PrecisionContext()
    if not (_is_int(a) and _is_int(b)):
        raise DomainError("f_ab takes integer orders")
    xm, ym = to_mpf(x), to_mpf(y)
    if xm <= 0 or xm + ym <= 0:
        raise DomainError("f_ab needs x > 0 and x + y > 0")
    with ctx.workdps():
        return _f_cached(int(a), int(b), x, y, ctx.working_digits, ctx.target_rel_tol)


def f_ab_extrapolated(a, b, x, y, h=None, ctx=None):
    """Finite part of u_{a+d}^{b+d} by symmetric extrapolation in d.

    Evaluates the generic 2F1 form at d = +-h, +-2h, removes the d^-2 pole
    and Richardson-extrapolates; the odd d^-1 pole cancels by symmetry.
    Slow; used to cross-check f_ab.
    """
    ctx = ctx or PrecisionContext()
    with mp.workdps(ctx.working_digits + 40):
        h = mp.mpf(h) if h is not None else mp.mpf(10) ** (-(ctx.working_digits // 3))
        xm, ym = to_mpf(x), to_mpf(y)
        c = a + b
        d2 = mp.mpf(0)
        for i in range(max(0, 1 - a, 1 - c)):
            p2, _, _ = _term_laurent(a, c, i, xm)
            d2 += p2 * (-ym) ** i / fact(i)

        def u(d):
            ad, cd = a + d, c + 2 * d
            return mp.gamma(cd) / (ad * xm ** cd) * mp.hyp2f1(cd, ad, ad + 1, -ym / xm)

        def avg(d):
            return (u(d) + u(-d)) / 2 - d2 / d ** 2

        v = (4 * avg(h) - avg(2 * h)) / 3
    return TrackedValue(+v, float(abs(v)) * float(h) ** 3, "extrapolated")


def capI_mn(m, n, x, y, ctx=None):
    """I_{m,n}(x, y) = int int e^(-x r - y r') r^m r'^n Ei(min(r, r')) dr dr'.

    Closed form
        m! n! / (x^(m+1) y^(n+1)) [ sum_{s<=m, t<=n, s+t>0} Gamma(s+t)/(s! t!)
                                    (x/S)^s (y/S)^t - ln S ],  S = x + y - 1,
    which is real and regular for x + y > 1.  At y = 1 the equivalent
    f-based form is used.
    """
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        xm, ym = to_mpf(x), to_mpf(y)
        S = xm + ym - 1
        if S <= 0:
            raise DomainError("capI_mn needs x + y > 1")
        acc = Accumulator()
        if ym == 1:
            for t in range(1, n + 1):
                acc.add_tracked(mp.mpf(1) / fact(t), f_ab(t, m + 1, x, 0, ctx))
            acc.add(fact(m) / xm ** (m + 1) * (_frac_to_mpf(harmonic(m)) - mp.log(xm)))
            tv = acc.result(ctx, "unit-rate")
            k = fact(n)
            return TrackedValue(k * tv.value, k * tv.abs_err_est, tv.branch, k * tv.max_term)
        for s in range(m + 1):
            for t in range(n + 1):
                if s + t:
                    acc.add(fact(s + t - 1) / mp.mpf(fact(s) * fact(t))
                            * (xm / S) ** s * (ym / S) ** t)
        acc.add(-mp.log(S))
        tv = acc.result(ctx, "general")
        k = fact(m) * fact(n) / (xm ** (m + 1) * ym ** (n + 1))
        return TrackedValue(k * tv.value, abs(k) * tv.abs_err_est, tv.branch, abs(k) * tv.max_term)
