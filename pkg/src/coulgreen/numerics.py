"""Precision handling, tracked results and exact combinatorics.

Every transcendental evaluation in the package runs inside a
``PrecisionContext``.  Summations go through ``Accumulator`` which keeps the
largest summand seen, so cancellation shows up in the error estimate and can
trigger a retry at higher precision.
"""
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath as mp


class DomainError(ValueError):
    """Input outside the supported domain of a formula."""


class ToleranceError(ArithmeticError):
    """Requested accuracy not reached after all precision escalations."""

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


@dataclass(frozen=True)
class PrecisionContext:
    working_digits: int = 34
    target_rel_tol: float = 1e-12
    max_escalations: int = 3

    def __post_init__(self):
        if self.working_digits < 15:
            raise DomainError("working_digits must be at least 15")
        if not self.target_rel_tol > 0:
            raise DomainError("target_rel_tol must be positive")
        if self.max_escalations < 0:
            raise DomainError("max_escalations must be non-negative")

    @classmethod
    def for_n(cls, n, **kw):
        """Default digits grow with n since the binomials do."""
        digits = 34 if n <= 8 else 64 if n <= 20 else 128
        kw.setdefault("working_digits", digits)
        return cls(**kw)

    @property
    def unit_roundoff(self):
        return 10.0 ** (1 - self.working_digits)

    def escalated(self):
        return replace(self, working_digits=2 * self.working_digits,
                       max_escalations=self.max_escalations - 1)

    def workdps(self):
        return mp.workdps(self.working_digits)


@dataclass
class TrackedValue:
    """A number with an error estimate and the formula branch that made it."""
    value: object
    abs_err_est: float = 0.0
    branch: str = ""
    max_term: float = 0.0

    def __float__(self):
        return float(self.value)

    @property
    def rel_err(self):
        v = abs(float(self.value))
        return self.abs_err_est / v if v else float("inf") if self.abs_err_est else 0.0

    def accepted(self, ctx):
        return self.abs_err_est <= max(ctx.target_rel_tol * abs(float(self.value)),
                                       ctx.unit_roundoff)

    def is_zero_like(self):
        return abs(self.value) <= self.abs_err_est


def to_mpf(x):
    """mpf from int, Fraction, float, string or mpf (exact for rationals)."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def to_fraction(x):
    """Exact rational from int, Fraction, decimal string or 'p/q' string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        try:
            return Fraction(x.strip() if isinstance(x, str) else x)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse {x!r} as a rational") from exc
    if isinstance(x, float):
        # shortest repr, so 0.37 becomes 37/100 rather than the binary value
        return Fraction(repr(x))
    raise DomainError(f"unsupported numeric type {type(x).__name__}")


@lru_cache(maxsize=None)
def binomial(a, k):
    """C(a, k) for integers, zero outside 0 <= k <= a."""
    if k < 0 or a < 0 or k > a:
        return 0
    return comb(a, k)


@lru_cache(maxsize=None)
def harmonic(n):
    if n < 0:
        raise DomainError("harmonic number needs n >= 0")
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


@lru_cache(maxsize=None)
def fact(n):
    return factorial(n)


class Accumulator:
    """Sum of mpf terms with max-term bookkeeping.

    ``add`` takes a plain number, ``add_tracked`` a TrackedValue scaled by a
    coefficient whose own error is propagated linearly.
    """

    def __init__(self):
        self.terms = []
        self.err = 0.0
        self.branches = []

    def add(self, x):
        self.terms.append(x)

    def add_tracked(self, coef, tv):
        self.terms.append(coef * tv.value)
        c = abs(float(coef))
        self.err += c * tv.abs_err_est
        if tv.branch:
            self.branches.append(tv.branch)

    def result(self, ctx, branch=""):
        value = mp.fsum(self.terms) if self.terms else mp.mpf(0)
        max_term = max((abs(float(t)) for t in self.terms), default=0.0)
        err = self.err + max_term * ctx.unit_roundoff * max(len(self.terms), 1)
        return TrackedValue(value, err, branch, max_term)


def compensated_sum(terms, ctx=None):
    """Sum at the working precision, reporting max term and error bound.

    mpmath's fsum accumulates mantissas exactly and rounds once, so the
    only loss is what the working precision cannot represent.
    """
    ctx = ctx or PrecisionContext()
    if any(isinstance(t, float) and not mp.isfinite(t) for t in terms):
        raise ToleranceError("non-finite term in sum")
    with ctx.workdps():
        acc = Accumulator()
        for t in terms:
            acc.add(to_mpf(t))
        return acc.result(ctx, "compensated-sum")


def evaluate_with_escalation(fn, ctx):
    """Run ``fn(ctx)`` and retry at doubled precision until accepted."""
    c, prev = ctx, None
    while True:
        with c.workdps():
            tv = fn(c)
        if tv.accepted(c):
            return tv
        # an exact zero: the value stays inside its error bar while the bar
        # shrinks with the extra digits and is already below the starting
        # roundoff (heavy cancellation alone also gives a shrinking bar)
        if prev is not None and prev[0].is_zero_like() and tv.is_zero_like():
            gain = 10.0 ** (-(c.working_digits - prev[1]) / 2)
            if tv.abs_err_est <= min(prev[0].abs_err_est * gain, ctx.unit_roundoff):
                tv.branch = ",".join(filter(None, [tv.branch, "zero"]))
                return tv
        prev = (tv, c.working_digits)
        if c.max_escalations <= 0:
            raise ToleranceError(
                f"relative error estimate {float(tv.rel_err):.3g} above "
                f"{ctx.target_rel_tol:g} at {c.working_digits} digits", tv)
        c = c.escalated()
