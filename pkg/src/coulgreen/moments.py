"""Basis functions for the single (moment) integrals.

    F_q(s, y) = int_0^y t^(q-1) e^(s t) dt       (finite part for q <= 0)
    I_q(lam, y) = int_0^inf e^(-lam t) t^q Ei(min(y, t)) dt
    G_q(a) = Gamma(q) / a^q                      (finite part for q <= 0)
"""
from fractions import Fraction

import mpmath as mp

from .numerics import (Accumulator, DomainError, PrecisionContext,
                       TrackedValue, fact, to_mpf)
from .special import digamma_int, ein, hyp1f1, hyp2f2_11, regularized_lower_gamma


def _tv(v, branch, cond=1):
    return TrackedValue(v, float(abs(v)) * float(mp.eps) * 16 * cond, branch)


def script_f(q, s, y, ctx=None):
    """F_q(s, y) with the delta-regularized finite part at q <= 0.

    Negative s y would make the power series alternate, so q >= 1 then
    goes through the lower incomplete gamma and q <= 0 through a downward
    recurrence started from F_0 = ln y + Ein(s y).
    """
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        sm, ym = to_mpf(s), to_mpf(y)
        if ym <= 0:
            raise DomainError("script_f needs y > 0")
        if sm == 0:
            if q == 0:
                return _tv(mp.log(ym), "zero-rate")
            return _tv(ym ** q / q, "zero-rate")
        z = sm * ym
        if q >= 1:
            if z < -1:
                v = fact(q - 1) * regularized_lower_gamma(q, -z) / (-sm) ** q
                return _tv(v, "incomplete-gamma")
            return _tv(ym ** q / q * hyp1f1(q, q + 1, z).value, "series")
        m = -q
        if z < -2:
            F = mp.log(ym) + ein(z)
            for p in range(-1, q - 1, -1):
                res = sm ** (-p - 1) / fact(-p - 1)
                F = (ym ** p * mp.exp(z) - sm * F) / p + sm * res / p ** 2
            return _tv(F, "recurrence", cond=m + 1)
        acc = Accumulator()
        for i in range(m):
            acc.add(sm ** i * ym ** (i - m) / ((i - m) * fact(i)))
        acc.add(sm ** m / fact(m) * mp.log(ym))
        acc.add(ym * sm ** (m + 1) / fact(m + 1) * hyp2f2_11(m, z))
        return acc.result(ctx, "finite-part")


def script_i(q, lam, y, ctx=None):
    """I_q(lam, y) for lam > 0, y > 0.

    Written as q!/lam^(q+1) [euler + ln y + Ein((1-lam) y)
    + sum_{i=1..q} lam^i/i! F_i(1-lam, y)], which is regular through
    lam = 1; there it reduces to q! (ln y + euler + sum y^i/(i i!)).
    """
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        lm, ym = to_mpf(lam), to_mpf(y)
        if lm <= 0 or ym <= 0:
            raise DomainError("script_i needs lam > 0 and y > 0")
        acc = Accumulator()
        acc.add(mp.euler)
        acc.add(mp.log(ym))
        if lm == 1:
            for i in range(1, q + 1):
                acc.add(ym ** i / (i * fact(i)))
            tv = acc.result(ctx, "unit-rate")
            k = fact(q)
        else:
            acc.add(ein((1 - lm) * ym))
            for i in range(1, q + 1):
                acc.add_tracked(lm ** i / fact(i), script_f(i, 1 - lm, ym, ctx))
            tv = acc.result(ctx, "general")
            k = fact(q) / lm ** (q + 1)
        return TrackedValue(k * tv.value, abs(k) * tv.abs_err_est, tv.branch,
                            abs(k) * tv.max_term)


def script_g(q, a):
    a = to_mpf(a)
    if a <= 0:
        raise DomainError("script_g needs a > 0")
    if q >= 1:
        return _tv(fact(q - 1) / a ** q, "regular")
    n = -q
    return _tv((-a) ** n / fact(n) * (digamma_int(n + 1) - mp.log(a)), "finite-part", 4)
