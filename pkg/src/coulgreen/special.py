"""Scalar special functions at the integer parameters the closed forms need.

Everything runs at the current mpmath precision.  Terminating hypergeometric
sums are done in exact rationals when the argument is rational.

The regularized 3F2 family with unit upper parameters is continued past
|z| = 1 by splitting the rational coefficient function into partial
fractions, which turns the series into logarithms, dilogarithms and
rational functions of z (see ``rational_power_sum``).
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .numerics import (Accumulator, DomainError, PrecisionContext,
                       ToleranceError, binomial, fact, harmonic, to_mpf)


@dataclass
class HypSeriesReport:
    value: object
    terms_used: int
    converged: bool
    method: str


def _frac_to_mpf(q):
    return mp.mpf(q.numerator) / q.denominator


@lru_cache(maxsize=4096)
def _digamma_cached(n, dps):
    return -mp.euler + _frac_to_mpf(harmonic(n - 1))


def digamma_int(n):
    """Psi(n) = -euler + H_{n-1} for positive integer n."""
    if n < 1:
        raise DomainError("digamma_int needs n >= 1")
    return _digamma_cached(n, mp.mp.dps)


@lru_cache(maxsize=1024)
def _trigamma_cached(n, dps):
    tail = sum((Fraction(1, k * k) for k in range(1, n)), Fraction(0))
    return mp.pi ** 2 / 6 - _frac_to_mpf(tail)


def trigamma_int(n):
    if n < 1:
        raise DomainError("trigamma_int needs n >= 1")
    return _trigamma_cached(n, mp.mp.dps)


def gamma_upper_int(a, x):
    """Upper incomplete gamma Gamma(a, x) for integer a.

    Positive a uses the finite sum.  Non-positive a (reached by the high-l
    moment formulas) is handed to mpmath and needs x > 0.
    """
    x = to_mpf(x)
    if x < 0:
        raise DomainError("gamma_upper_int needs x >= 0")
    if a >= 1:
        s, t = mp.mpf(0), mp.mpf(1)
        for k in range(a):
            s += t
            t = t * x / (k + 1)
        return fact(a - 1) * mp.exp(-x) * s
    if x == 0:
        raise DomainError("Gamma(a, 0) diverges for a <= 0")
    return mp.gammainc(a, x)


def expint_ei(x):
    x = to_mpf(x)
    if x == 0:
        raise DomainError("Ei has a logarithmic singularity at 0")
    return mp.ei(x)


def ein(x):
    """sum_{k>=1} x^k/(k k!) = Ei(x) - euler - ln|x|, regular at 0."""
    x = to_mpf(x)
    if x == 0:
        return mp.mpf(0)
    if abs(x) > 2:
        if x < 0:
            # Ei is tiny here, no cancellation against the log
            return mp.ei(x) - mp.euler - mp.log(-x)
        return mp.ei(x) - mp.euler - mp.log(x)
    s, t, k = mp.mpf(0), mp.mpf(1), 0
    eps = mp.eps
    while True:
        k += 1
        t = t * x / k
        term = t / k
        s += term
        if abs(term) <= eps * abs(s):
            return s


def regularized_lower_gamma(k, t):
    """P(k, t) = 1 - e^{-t} sum_{m<k} t^m/m!, accurate for small t."""
    return mp.gammainc(k, 0, t, regularized=True)


def _series(coef_ratio, z, first=1, max_terms=100000, terminate_at=None):
    """Sum of t_k with t_0 = first and t_{k+1} = t_k * coef_ratio(k) * z."""
    s = t = mp.mpf(first)
    eps = mp.eps
    k = 0
    small = 0
    while True:
        if terminate_at is not None and k >= terminate_at:
            return s, k + 1, True
        r = coef_ratio(k)
        if r == 0:
            return s, k + 1, True
        t = t * r * z
        s += t
        k += 1
        if abs(t) <= eps * abs(s):
            small += 1
            if small >= 2:
                return s, k + 1, True
        else:
            small = 0
        if k > max_terms:
            return s, k + 1, False


def hyp1f1(a, b, z):
    """Confluent 1F1(a; b; z) for integer a, b.

    For z < 0 the Kummer transform e^z 1F1(b-a; b; -z) is used so the
    series has terms of one sign.
    """
    z = to_mpf(z)
    if b <= 0 and not (a <= 0 and a > b):
        raise DomainError("1F1 lower parameter hits a pole")
    if a == b:
        return HypSeriesReport(mp.exp(z), 1, True, "direct-series")
    if a <= 0:
        v, n, ok = _series(lambda k: mp.mpf(a + k) / ((b + k) * (k + 1)), z,
                           terminate_at=-a)
        return HypSeriesReport(v, n, ok, "terminating-sum")
    if z < 0:
        inner = hyp1f1(b - a, b, -z)
        return HypSeriesReport(mp.exp(z) * inner.value, inner.terms_used,
                               inner.converged, inner.method)
    v, n, ok = _series(lambda k: mp.mpf(a + k) / ((b + k) * (k + 1)), z)
    return HypSeriesReport(v, n, ok, "direct-series")


def hyp2f1_terminating(a, b, c, z):
    """Gauss 2F1 with a terminating series.

    If neither a nor b is a non-positive integer but c-a or c-b is, the
    Euler transform (1-z)^{c-a-b} 2F1(c-a, c-b; c; z) is used.  Rational z
    gives an exact Fraction.
    """
    if a > 0 and b > 0:
        if c - a <= 0 or c - b <= 0:
            inner = hyp2f1_terminating(c - a, c - b, c, z)
            e = c - a - b
            if isinstance(z, (int, Fraction)):
                return Fraction(1 - z) ** e * inner
            return (1 - to_mpf(z)) ** e * inner
        raise DomainError("2F1 series does not terminate")
    m = -a if a <= 0 else -b
    exact = isinstance(z, (int, Fraction))
    s = Fraction(0) if exact else mp.mpf(0)
    t = Fraction(1) if exact else mp.mpf(1)
    zz = Fraction(z) if exact else to_mpf(z)
    for k in range(m + 1):
        s += t
        if k == m:
            break
        if c + k == 0:
            raise DomainError("2F1 lower parameter hits a pole before termination")
        t = t * Fraction((a + k) * (b + k), (c + k) * (k + 1)) * zz if exact \
            else t * mp.mpf((a + k) * (b + k)) / ((c + k) * (k + 1)) * zz
    return s


def hyp2f2_11(n, z):
    """2F2(1, 1; 2, 2+n; z) by its (entire) power series.

    For negative z the series alternates, so extra digits are carried in
    proportion to |z|.
    """
    z = to_mpf(z)
    guard = int(abs(z) / 2.3) + 10 if z < 0 else 5
    with mp.extradps(guard):
        v, _, ok = _series(lambda k: mp.mpf(k + 1) / ((k + 2) * (k + 2 + n)), z)
    if not ok:
        raise ToleranceError("2F2 series did not converge")
    return +v


def hyp3f2_unit_terminating(p1, p2, p3, q1, q2):
    """Exact 3F2(p1, p2, p3; q1, q2; 1) for a terminating series."""
    ps = (p1, p2, p3)
    stops = [-p for p in ps if p <= 0]
    if not stops:
        raise DomainError("3F2 at unit argument must terminate")
    m = min(stops)
    s, t = Fraction(0), Fraction(1)
    for k in range(m + 1):
        s += t
        if k == m:
            break
        if q1 + k == 0 or q2 + k == 0:
            raise DomainError("3F2 lower parameter hits a pole before termination")
        t *= Fraction((p1 + k) * (p2 + k) * (p3 + k), (q1 + k) * (q2 + k) * (k + 1))
    return s


# --- exact partial fractions and their power sums ------------------------

def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_divmod(num, den):
    num = list(num)
    dn = len(den) - 1
    if len(num) - 1 < dn:
        return [Fraction(0)], num
    quot = [Fraction(0)] * (len(num) - dn)
    lead = den[-1]
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i] / lead
        quot[i - dn] = c
        if c:
            for j, d in enumerate(den):
                num[i - dn + j] -= c * d
    return quot, num[:dn] if dn else [Fraction(0)]


def _poly_shift(p, s):
    """Coefficients of p(Delta - s) in powers of Delta."""
    out = [Fraction(0)] * len(p)
    for i, c in enumerate(p):
        if c:
            for j in range(i + 1):
                out[j] += c * binomial(i, j) * Fraction(-s) ** (i - j)
    return out


def partial_fractions(numer, poles):
    """Split N(k) / prod (k+s)^m into a polynomial plus simple pole terms.

    ``numer`` lists Fraction coefficients of k^0, k^1, ...; ``poles`` maps
    integer s to multiplicity m.  Returns (quotient, {(s, mu): coefficient})
    for the terms coefficient / (k+s)^mu.
    """
    den = [Fraction(1)]
    for s, m in poles.items():
        for _ in range(m):
            den = _poly_mul(den, [Fraction(s), Fraction(1)])
    quot, rem = _poly_divmod([Fraction(c) for c in numer], den)
    parts = {}
    for s, m in poles.items():
        # Taylor series of rem(k) / prod_{s' != s} (k+s')^{m'} around k = -s
        h = _poly_shift(rem, s)[:m] + [Fraction(0)] * max(0, m - len(rem))
        h = h[:m]
        for s2, m2 in poles.items():
            if s2 == s:
                continue
            d = Fraction(s2 - s)
            ser = [Fraction((-1) ** j * binomial(m2 + j - 1, j)) / d ** (m2 + j)
                   for j in range(m)]
            h = _poly_mul(h, ser)[:m]
        for mu in range(1, m + 1):
            c = h[m - mu] if m - mu < len(h) else Fraction(0)
            if c:
                parts[(s, mu)] = c
    return quot, parts


@lru_cache(maxsize=None)
def _eulerian(p):
    # row p of the Eulerian triangle
    row = [1]
    for n in range(1, p + 1):
        new = [0] * n
        for k in range(n):
            a = row[k] if k < len(row) else 0
            b = row[k - 1] if 0 < k <= len(row) else 0
            new[k] = (k + 1) * a + (n - k) * b
        row = new
    return row


def _li_neg(p, z):
    """sum_{k>=0} k^p z^k for |z| < 1, continued to all z != 1."""
    if p == 0:
        return 1 / (1 - z)
    num = sum(c * z ** j for j, c in enumerate(_eulerian(p)))
    return z * num / (1 - z) ** (p + 1)


def _li(mu, z):
    if mu == 1:
        return -mp.log(1 - z)
    return mp.polylog(mu, z)


def rational_power_sum(numer, poles, z, k0=0):
    """sum_{k>=k0} N(k)/prod(k+s)^m z^k for real z < 1, z != 0.

    Every pole must satisfy k0 + s >= 1.  Polynomial parts give Eulerian
    rational functions; pole parts give z^{-s} (Li_mu(z) - partial sum).
    Returned as an Accumulator so callers see the cancellation.
    """
    z = to_mpf(z)
    if z >= 1 or z == 0:
        raise DomainError("rational_power_sum needs z < 1 and z != 0")
    for s in poles:
        if k0 + s < 1:
            raise DomainError("pole inside summation range")
    quot, parts = partial_fractions(numer, poles)
    acc = Accumulator()
    for p, c in enumerate(quot):
        if c:
            acc.add(_frac_to_mpf(c) * _li_neg(p, z))
    for k in range(k0):
        qk = sum(c * k ** p for p, c in enumerate(quot))
        if qk:
            acc.add(-_frac_to_mpf(Fraction(qk)) * z ** k)
    for (s, mu), c in parts.items():
        cc = _frac_to_mpf(c) * z ** (-s)
        acc.add(cc * _li(mu, z))
        for j in range(1, k0 + s):
            acc.add(-cc * z ** j / mp.mpf(j) ** mu)
    return acc


def hyp3f2reg_11c(c, d, z, ctx=None):
    """Regularized 3F2(1, 1, c; d, 2; z) for integers c, d.

    Direct series for |z| <= 0.9, a finite sum when c <= 0, and otherwise
    the exact partial-fraction continuation, valid for every z < 1.
    """
    ctx = ctx or PrecisionContext()
    z = to_mpf(z)
    k0 = max(0, 1 - d)

    def term0():
        # (c)_k0 / (Gamma(d+k0) (k0+1)) z^k0
        if k0 == 0:
            return 1 / mp.gamma(d) if d >= 1 else mp.mpf(0)
        return mp.rf(c, k0) / (mp.gamma(d + k0) * (k0 + 1)) * z ** k0

    ratio = lambda k: mp.mpf((c + k) * (k + 1)) / ((d + k) * (k + 2))
    if c <= 0:
        if k0 > -c:
            return HypSeriesReport(mp.mpf(0), 0, True, "terminating-sum")
        v, n, ok = _series(lambda k: ratio(k + k0), z, first=term0(),
                           terminate_at=-c - k0)
        return HypSeriesReport(v, n, ok, "terminating-sum")
    if abs(z) <= 0.9:
        v, n, ok = _series(lambda k: ratio(k + k0), z, first=term0())
        return HypSeriesReport(v, n, ok, "direct-series")
    if z >= 1:
        raise DomainError("3F2 continuation needs z < 1")
    # term(k) = (c+k-1)! / ((c-1)! (d+k-1)! (k+1))
    if c >= d:
        numer = [Fraction(1)]
        for p in range(d, c):
            numer = _poly_mul(numer, [Fraction(p), Fraction(1)])
        poles = {1: 1}
    else:
        numer = [Fraction(1)]
        poles = {p: 1 for p in range(c, d)}
        poles[1] = poles.get(1, 0) + 1
    numer = [q / fact(c - 1) for q in numer]
    tv = rational_power_sum(numer, poles, z, k0).result(ctx, "partial-fractions")
    return HypSeriesReport(tv.value, len(numer) + len(poles), True, "partial-fractions")
