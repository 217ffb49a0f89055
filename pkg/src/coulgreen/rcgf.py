"""Hydrogen-like radial functions and the reduced Coulomb Green's function.

Lengths are in atomic units.  With t = 2 Z r / n the Green's function for
l <= n-1 is built from Laguerre polynomials, Ei and a few finite sums; for
l >= n it is a product of two finite sums.  Both forms contain pieces that
cancel to high order at small radius; those are rewritten here in terms of
the regularized lower incomplete gamma P(k, t), which is accurate down to
t -> 0.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .numerics import (Accumulator, DomainError, PrecisionContext,
                       TrackedValue, binomial, fact, to_fraction, to_mpf)
from .special import _frac_to_mpf, digamma_int, ein, regularized_lower_gamma


@dataclass(frozen=True)
class QuantumIndex:
    n: int
    l: int
    Z: object = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be a positive integer")
        if int(self.l) != self.l or self.l < 0:
            raise DomainError("l must be a non-negative integer")
        if not to_mpf(self.Z) > 0:
            raise DomainError("Z must be positive")

    @property
    def low(self):
        return self.l <= self.n - 1

    @property
    def energy(self):
        return -to_mpf(self.Z) ** 2 / (2 * self.n ** 2)


@lru_cache(maxsize=None)
def laguerre_coeffs(k, m):
    """Exact monomial coefficients of the associated Laguerre L_k^m."""
    if k < 0:
        return ()
    return tuple(Fraction((-1) ** j * binomial(k + m, k - j), fact(j)) for j in range(k + 1))


def _poly(coeffs, t):
    s = mp.mpf(0)
    for c in reversed(coeffs):
        s = s * t + (_frac_to_mpf(c) if isinstance(c, Fraction) else c)
    return s


def radial_wf(idx, r):
    if not idx.low:
        raise DomainError("radial_wf needs l <= n-1")
    r = to_mpf(r)
    if r < 0:
        raise DomainError("radius must be non-negative")
    n, l, Z = idx.n, idx.l, to_mpf(idx.Z)
    t = 2 * Z * r / n
    norm = mp.sqrt(Z ** 3 * fact(n - l - 1) / fact(n + l)) * 2 / n ** 2
    v = norm * t ** l * mp.exp(-t / 2) * _poly(laguerre_coeffs(n - l - 1, 2 * l + 1), t)
    return TrackedValue(v, float(abs(v)) * float(mp.eps) * 4 * n, "bound-state")


@lru_cache(maxsize=None)
def _a_coeffs(n, l):
    out = []
    for k in range(n - l - 1):
        s = sum((Fraction(2 * j + 2 * l + 1, j * (j + 2 * l + 1)) for j in range(k + 1, n - l)),
                Fraction(0))
        out.append(Fraction((-1) ** k, fact(k)) * binomial(n + l, n - l - 1 - k) * s)
    return tuple(out)


def a_coeffs(idx):
    if not idx.low:
        raise DomainError("a_coeffs needs l <= n-1")
    return list(_a_coeffs(idx.n, idx.l))


@lru_cache(maxsize=None)
def _phi_poly(n, l):
    # Phi is a polynomial once the 1/x^k of the inner sum meet (-x)^j
    deg = max(n - l - 2, 0)
    c = [Fraction(0)] * (deg + 1)
    for j in range(1, n - l):
        b = Fraction((-1) ** j * binomial(n + l, n - l - 1 - j), fact(j))
        for k in range(1, j + 1):
            c[j - k] += b * fact(k - 1)
    return tuple(c)


def phi_nl(idx, x):
    if not idx.low:
        raise DomainError("phi_nl needs l <= n-1")
    x = to_mpf(x)
    if x <= 0:
        raise DomainError("phi_nl needs x > 0")
    v = _poly(_phi_poly(idx.n, idx.l), x)
    return TrackedValue(v, float(abs(v)) * float(mp.eps) * 8, "finite-sum")


def _radii(idx, r, rp):
    r, rp = to_mpf(r), to_mpf(rp)
    if r <= 0 or rp <= 0:
        raise DomainError("Green's function needs r, r' > 0")
    k = 2 * to_mpf(idx.Z) / idx.n
    return k * r, k * rp


def _low_sum(n, l, t, tp):
    """Bracketed sum of the l <= n-1 form, split by exponential weight.

    Returns (plain, weighted) accumulators: the full function is
    e^{-(t+t')/2} * plain + e^{-(t_> - t_<)/2} * weighted.
    """
    ts, tg = min(t, tp), max(t, tp)
    Lc = laguerre_coeffs(n - l - 1, 2 * l + 1)
    L2c = laguerre_coeffs(n - l - 2, 2 * l + 2)
    Ac = _a_coeffs(n, l)
    L = lambda x: _poly(Lc, x)
    L2 = lambda x: _poly(L2c, x) if L2c else mp.mpf(0)
    Lt, Ltp, Ls, Lg = L(t), L(tp), L(ts), L(tg)
    plain, weighted = Accumulator(), Accumulator()
    const = (mp.mpf(0) - digamma_int(n - l) - digamma_int(n + l + 1)
             - mp.mpf(4 * l + 5) / (2 * n))
    # ln t + ln t' - Ei(t_<) = ln t_> - euler - Ein(t_<)
    for term in (mp.log(tg), -mp.euler, -ein(ts), (t + tp) / (2 * n), const):
        plain.add(Lt * Ltp * term)
    plain.add(Lt * (tp / n * L2(tp) + _poly(Ac, tp)))
    plain.add(Ltp * (t / n * L2(t) + _poly(Ac, t)))
    for k in range(1, 2 * l + 2):
        plain.add(-Ls * binomial(n + l, n - l - 1 + k) * fact(k - 1) / tg ** k)
    weighted.add(Lg * _poly(_phi_poly(n, l), ts))
    for k in range(1, 2 * l + 2):
        c1 = binomial(n + l - k, n - l - 1)
        if c1:
            weighted.add(Lg * fact(k - 1) * c1 * regularized_lower_gamma(k, ts) / ts ** k)
    return plain, weighted


def green_low(idx, r, rp, ctx=None):
    ctx = ctx or PrecisionContext.for_n(idx.n)
    if not idx.low:
        raise DomainError("green_low needs l <= n-1")
    with ctx.workdps():
        n, l = idx.n, idx.l
        t, tp = _radii(idx, r, rp)
        plain, weighted = _low_sum(n, l, t, tp)
        ts, tg = min(t, tp), max(t, tp)
        pre = 4 * to_mpf(idx.Z) / n * mp.mpf(fact(n - l - 1)) / fact(n + l) * (t * tp) ** l
        acc = Accumulator()
        e1, e2 = mp.exp(-(t + tp) / 2), mp.exp(-(tg - ts) / 2)
        for x in plain.terms:
            acc.add(pre * e1 * x)
        for x in weighted.terms:
            acc.add(pre * e2 * x)
        return acc.result(ctx, "low-l")


def _high_parts(n, l):
    P = tuple(Fraction(binomial(2 * l - i, l - n), fact(i)) for i in range(l + n + 1))
    c = tuple(Fraction(binomial(2 * l - j, l + n) * (-1) ** j, fact(j)) for j in range(l - n + 1))
    return P, c


def green_high(idx, r, rp, ctx=None):
    ctx = ctx or PrecisionContext.for_n(idx.n)
    if idx.low:
        raise DomainError("green_high needs l >= n")
    with ctx.workdps():
        n, l = idx.n, idx.l
        t, tp = _radii(idx, r, rp)
        ts, tg = min(t, tp), max(t, tp)
        P, c = _high_parts(n, l)
        # e^t sum_j c_j t^j - sum_k ... = O(t^(2l+1)); written without cancellation
        br = Accumulator()
        for j, cj in enumerate(c):
            if cj:
                br.add(_frac_to_mpf(cj) * ts ** j * regularized_lower_gamma(2 * l + 1 - j, ts))
        brv = br.result(ctx)
        pre = ((-1) ** (l + 1 - n) * 4 * to_mpf(idx.Z) / n * fact(l - n) * fact(l + n)
               * (t * tp) ** (-l - 1) * mp.exp(-(tg - ts) / 2) * _poly(P, tg))
        v = pre * brv.value
        err = abs(pre) * brv.abs_err_est + float(abs(v)) * ctx.unit_roundoff * (l + n + 4)
        return TrackedValue(v, float(err), "high-l", float(abs(pre)) * brv.max_term)


def green(idx, r, rp, ctx=None):
    if idx.low:
        return green_low(idx, r, rp, ctx)
    return green_high(idx, r, rp, ctx)
