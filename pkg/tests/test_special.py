import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from lcrit.characters import enumerate_characters, primitive_characters, principal_character
from lcrit.errors import DomainError, PoleError
from lcrit.special import (
    HurwitzParams,
    bernoulli_exact,
    default_params,
    em_remainder_estimate,
    gauss_sum,
    hurwitz_zeta,
    log_gamma,
)

mpmath.mp.dps = 30

strip = st.builds(complex, st.floats(0.01, 0.99), st.floats(-60, 60))
domain = st.builds(complex, st.floats(-2, 4), st.floats(-1000, 1000))


def mp_hurwitz(s, w):
    return complex(mpmath.zeta(mpmath.mpc(s.real, s.imag), mpmath.mpf(w)))


# --- Bernoulli / params ----------------------------------------------------------


def test_bernoulli_known_values():
    B = bernoulli_exact()
    assert B[0] == 1 and B[1] == Fraction(-1, 2) and B[2] == Fraction(1, 6)
    assert B[12] == Fraction(-691, 2730)
    assert B[60] == Fraction(mpmath.bernfrac(60)[0], mpmath.bernfrac(60)[1])
    assert all(B[k] == 0 for k in range(3, 61, 2))


@pytest.mark.parametrize("kw", [dict(N=0), dict(N=5, K=31), dict(N=5, K=-1), dict(N=5, target_abs_error=0)])
def test_params_bounds(kw):
    with pytest.raises(DomainError):
        HurwitzParams(**kw)


def test_default_params_rule():
    assert default_params(0.5 + 3j) == HurwitzParams(12, 12)
    assert default_params(0.5 - 100j).N == 130
    assert default_params(np.array([1j, 40j])).N == 52


# --- Hurwitz zeta -------------------------------------------------------------------


def test_hurwitz_zeta2():
    assert abs(hurwitz_zeta(2, 1.0) - math.pi**2 / 6) < 1e-13
    assert abs(hurwitz_zeta(2, 0.5) - math.pi**2 / 2) < 1e-13


def test_hurwitz_pole_and_domain():
    with pytest.raises(PoleError):
        hurwitz_zeta(1, 0.5)
    for w in (0.0, 1.5, -0.2):
        with pytest.raises(DomainError):
            hurwitz_zeta(2, w)


def _brute_hurwitz(s, w, M=10**7, chunk=10**6):
    """Direct sum of M terms plus the two-term tail and the half term."""
    total = 0j
    for start in range(0, M, chunk):
        n = np.arange(start, min(M, start + chunk), dtype=float)
        total += np.sum(np.exp(-s * np.log(n + w)))
    x = M + w
    return total + x ** (1 - s) / (s - 1) + 0.5 * x ** (-s)


def test_hurwitz_brute_force_oracle():
    s = 0.5 + 14.1j
    ref = _brute_hurwitz(s, 0.3)
    assert abs(hurwitz_zeta(s, 0.3) - ref) < 1e-9
    assert abs(ref - mp_hurwitz(s, 0.3)) < 1e-9


@pytest.mark.parametrize(
    "s,w",
    [(0.5 + 14.134725j, 1.0), (-1.5 + 3j, 0.25), (3.9 - 700j, 0.9), (-2 + 1000j, 0.5), (0.5 + 999j, 1.0), (2.5, 0.1)],
)
def test_hurwitz_validated_domain(s, w):
    # absolute for |zeta| <= 1; for Re s < 0 at large height |zeta| reaches 1e5 and
    # double rounding of the direct sum makes the bound relative
    ref = mp_hurwitz(s, w)
    assert abs(hurwitz_zeta(s, w) - ref) < 1e-10 * max(1.0, abs(ref))


@settings(max_examples=60, deadline=None)
@given(domain, st.floats(0.05, 1.0))
def test_hurwitz_matches_mpmath(s, w):
    assume(abs(s - 1) > 1e-3)
    ref = mp_hurwitz(s, w)
    assert abs(hurwitz_zeta(s, w) - ref) <= 1e-10 * max(1.0, abs(ref))


@settings(max_examples=30, deadline=None)
@given(st.builds(complex, st.floats(-2, 4), st.floats(-50, 50)), st.floats(1e-4, 0.05))
def test_hurwitz_small_shift_relative(s, w):
    # the leading term w^{-s} can be huge; the error is relative to the value
    assume(abs(s - 1) > 1e-3)
    ref = mp_hurwitz(s, w)
    assert abs(hurwitz_zeta(s, w) - ref) <= 1e-10 * max(1.0, abs(ref))


@settings(max_examples=100, deadline=None)
@given(strip)
def test_hurwitz_halving_identity(s):
    lhs = hurwitz_zeta(s, 0.5) + hurwitz_zeta(s, 1.0)
    rhs = 2**s * hurwitz_zeta(s, 1.0)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


@settings(max_examples=40, deadline=None)
@given(strip, st.floats(0.05, 1.0), st.integers(0, 10))
def test_refinement_does_not_hurt(s, w, K):
    # more terms (doubling N, raising K) never moves further from the oracle than the error bound
    ref = mp_hurwitz(s, w)
    p = HurwitzParams(N=max(12, math.ceil(1.3 * abs(s.imag))), K=K)
    err = abs(hurwitz_zeta(s, w, p) - ref)
    for p2 in (HurwitzParams(2 * p.N, K), HurwitzParams(p.N, min(30, K + 4))):
        assert abs(hurwitz_zeta(s, w, p2) - ref) <= err + 1e-10


def test_vectorized_matches_scalar():
    s = np.array([0.2 + 1j, 0.7 - 30j, 2.0 + 0j])
    vec = hurwitz_zeta(s, 0.4)
    assert vec.shape == (3,)
    for z, v in zip(s, vec):
        assert abs(hurwitz_zeta(complex(z), 0.4, default_params(s)) - v) < 1e-14


def test_remainder_estimate_is_small_by_default():
    for s in (0.5 + 1000j, 4 - 1000j, -2 + 0j):
        assert em_remainder_estimate(s, 1.0, default_params(s)) < 1e-10


# --- log Gamma ------------------------------------------------------------------------


def test_log_gamma_half():
    assert abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-15


def test_log_gamma_recurrence():
    s = 2.5 + 3j
    assert abs(cmath.exp(log_gamma(s + 1) - log_gamma(s)) - s) <= 1e-12 * abs(s)


def test_log_gamma_reflection_modulus():
    t = 5.0
    val = math.exp(2 * log_gamma(0.5 + 1j * t).real)
    assert abs(val - math.pi / math.cosh(math.pi * t)) <= 1e-12 * val


@pytest.mark.parametrize("s", [0, -1, -7, -100])
def test_log_gamma_poles(s):
    with pytest.raises(DomainError):
        log_gamma(s)


@settings(max_examples=300, deadline=None)
@given(st.builds(complex, st.floats(-40, 400), st.floats(-400, 400)))
def test_log_gamma_principal_branch(s):
    assume(abs(s) <= 400 and min(abs(s - k) for k in range(-41, 1)) > 1e-3)
    ref = complex(mpmath.loggamma(mpmath.mpc(s.real, s.imag)))
    got = log_gamma(s)
    # principal branch, so the imaginary parts agree too (not only modulo 2 pi)
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref) / 400)


@settings(max_examples=200, deadline=None)
@given(st.builds(complex, st.floats(-1e4, 1e4), st.floats(-1e4, 1e4)))
def test_log_gamma_large_arguments(s):
    # exp(result) relative error equals the absolute error of the log, whose floor is
    # a few ulps of |log Gamma| (about 1e-11 at |s| = 1e4)
    assume(abs(s) <= 1e4 and min(abs(s - round(s.real)), 1.0) > 1e-3)
    ref = mpmath.loggamma(mpmath.mpc(s.real, s.imag))
    err = abs(complex(mpmath.exp(mpmath.mpc(log_gamma(s)) - ref)) - 1)
    assert err <= max(1e-12, 8 * np.finfo(float).eps * abs(complex(ref)))


@settings(max_examples=100, deadline=None)
@given(st.builds(complex, st.floats(-30, 30), st.floats(-30, 30)))
def test_log_gamma_conjugation(s):
    assume(abs(s.imag) > 1e-9 or s.real > 0)
    a, b = log_gamma(s.conjugate()), log_gamma(s).conjugate()
    assert abs(cmath.exp(a - b) - 1) < 1e-13


def test_log_gamma_vectorized():
    z = np.array([0.5, -2.5 + 1j, 10 - 3j])
    out = log_gamma(z)
    assert all(abs(o - complex(mpmath.loggamma(complex(x)))) < 1e-13 for o, x in zip(out, z))


# --- Gauss sums -----------------------------------------------------------------------


def test_gauss_mod4():
    assert abs(gauss_sum(enumerate_characters(4)[1]) - 2j) < 1e-14


def test_gauss_mod3():
    assert abs(gauss_sum(enumerate_characters(3)[1]) - 1j * math.sqrt(3)) < 1e-14


def test_gauss_mod5_modulus():
    for chi in primitive_characters(5):
        assert abs(abs(gauss_sum(chi)) - math.sqrt(5)) < 1e-12


def test_gauss_nonprimitive():
    with pytest.raises(DomainError):
        gauss_sum(principal_character(4))


@pytest.mark.parametrize("q", range(1, 51))
def test_gauss_properties(q):
    for chi in primitive_characters(q):
        tau = gauss_sum(chi)
        direct = sum(chi(a) * cmath.exp(2j * math.pi * a / q) for a in range(1, q + 1))
        assert abs(tau - direct) < 1e-10
        assert abs(abs(tau) - math.sqrt(q)) < 1e-12 * max(1, math.sqrt(q))
        assert abs(gauss_sum(chi.conjugate()) - chi(-1) * tau.conjugate()) < 1e-10
