import itertools
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from coulgreen.numerics import (DomainError, PrecisionContext, ToleranceError,
                                TrackedValue, binomial, compensated_sum,
                                evaluate_with_escalation, harmonic, to_fraction)


@pytest.mark.parametrize("a,k,v", [(5, 2, 10), (3, 5, 0), (0, 0, 1), (4, -1, 0)])
def test_binomial_examples(a, k, v):
    assert binomial(a, k) == v


@pytest.mark.parametrize("n,v", [(0, 0), (1, 1), (3, Fraction(11, 6))])
def test_harmonic_examples(n, v):
    assert harmonic(n) == v


@given(st.integers(1, 200), st.integers(-2, 202))
def test_pascal(a, k):
    assert binomial(a, k) == binomial(a - 1, k) + binomial(a - 1, k - 1)


@given(st.integers(0, 200), st.data())
def test_binomial_reflection(a, data):
    k = data.draw(st.integers(0, a))
    assert binomial(a, k) == binomial(a, a - k)


@given(st.integers(1, 300))
def test_harmonic_step(n):
    assert harmonic(n) - harmonic(n - 1) == Fraction(1, n)


def test_compensated_sum_examples():
    r = compensated_sum([2, 3])
    assert r.value == 5 and r.abs_err_est < 1e-30
    assert compensated_sum([]).value == 0
    r = compensated_sum([1e16, 1, -1e16])
    assert r.value == 1 and r.abs_err_est > 0


@settings(max_examples=40)
@given(st.lists(st.floats(-1e12, 1e12, allow_nan=False), min_size=1, max_size=8))
def test_compensated_sum_permutation(terms):
    ref = compensated_sum(terms)
    for perm in itertools.islice(itertools.permutations(terms), 6):
        r = compensated_sum(list(perm))
        assert abs(r.value - ref.value) <= r.abs_err_est + ref.abs_err_est


def test_precision_defaults():
    assert PrecisionContext.for_n(3).working_digits == 34
    assert PrecisionContext.for_n(16).working_digits == 64
    assert PrecisionContext.for_n(37).working_digits == 128
    with pytest.raises(DomainError):
        PrecisionContext(working_digits=10)
    with pytest.raises(DomainError):
        PrecisionContext(target_rel_tol=0)


def test_to_fraction():
    assert to_fraction("1/3") == Fraction(1, 3)
    assert to_fraction(0.37) == Fraction(37, 100)
    assert to_fraction("0.37") == Fraction(37, 100)
    with pytest.raises(DomainError):
        to_fraction("x")


def test_escalation_retries_then_gives_up():
    seen = []

    def noisy(ctx):
        seen.append(ctx.working_digits)
        err = 1e-3 if ctx.working_digits < 100 else 0.0
        return TrackedValue(mp.mpf(1), err)

    tv = evaluate_with_escalation(noisy, PrecisionContext())
    assert seen == [34, 68, 136] and tv.value == 1
    with pytest.raises(ToleranceError):
        evaluate_with_escalation(lambda c: TrackedValue(mp.mpf(1), 1.0),
                                 PrecisionContext(max_escalations=1))


def test_escalation_exact_zero():
    # roundoff-level noise around 0 that shrinks with precision
    def cancel(ctx):
        u = 10.0 ** (-ctx.working_digits)
        return TrackedValue(mp.mpf(u), 1000 * u)

    tv = evaluate_with_escalation(cancel, PrecisionContext())
    assert "zero" in tv.branch


def test_escalation_heavy_cancellation_is_not_zero():
    # sixty digits lost: the bar shrinks too, but stays huge until the
    # precision covers the loss
    def lossy(ctx):
        if ctx.working_digits < 100:
            err = 10.0 ** (60 - ctx.working_digits)
            return TrackedValue(mp.mpf(err / 2), err)
        return TrackedValue(mp.mpf("1e-15"), 1e-40)

    tv = evaluate_with_escalation(lossy, PrecisionContext())
    assert float(tv.value) == 1e-15 and "zero" not in tv.branch
