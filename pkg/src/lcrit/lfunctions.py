"""Dirichlet L-functions, their completions, and the paired function G.

For an imprimitive character the completed objects (Lambda, G, Psi) are built
from the primitive character that induces it, with the conductor in the
(f/pi)^{(s+e)/2} factor.  ``l_value`` alone carries the extra Euler factors
of the imprimitive character.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characters import Character, conductor, is_primitive, prime_divisors
from .errors import DomainError, NumericConsistencyError, PoleError
from .special import HurwitzParams, _as_array, _unwrap, gauss_sum, hurwitz_weighted_sum, log_gamma

REALITY_TOL = 1e-8


def root_number(chi: Character) -> complex:
    """W(chi) = tau(chi) / (i^e sqrt(q)) for primitive chi."""
    if not is_primitive(chi):
        raise DomainError(f"root number needs a primitive character, got {chi.label}")
    tau = gauss_sum(chi)
    return tau / ((1j) ** chi.parity * math.sqrt(chi.modulus))


@dataclass(frozen=True)
class LContext:
    chi: Character
    chi_f: Character
    conductor: int
    parity: int
    root_number: complex
    hurwitz_params: HurwitzParams | None = None

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.chi.modulus

    @property
    def is_real(self) -> bool:
        return self.chi.is_real

    def conjugate(self) -> "LContext":
        return make_context(self.chi.conjugate(), self.hurwitz_params)

    @property
    def label(self) -> str:
        return self.chi.label


@lru_cache(maxsize=1024)
def make_context(chi: Character, hurwitz_params: HurwitzParams | None = None) -> LContext:
    f, chi_f = conductor(chi)
    W = root_number(chi_f)
    if abs(abs(W) - 1) > 1e-10:
        raise NumericConsistencyError(f"|W({chi_f.label})| = {abs(W)!r} is not 1")
    return LContext(chi, chi_f, f, chi_f.parity, W, hurwitz_params)


def _primitive_l(ctx: LContext, s):
    """L(chi_f, s) via the Hurwitz decomposition at modulus f."""
    f = ctx.conductor
    s_arr, scalar = _as_array(s)
    if f == 1:
        out = hurwitz_weighted_sum(s_arr, [1.0], [1.0], ctx.hurwitz_params)
        return _unwrap(out, scalar)
    vals = ctx.chi_f.values()
    a = np.nonzero(vals)[0]
    total = hurwitz_weighted_sum(s_arr, a / f, vals[a], ctx.hurwitz_params, weights_sum_zero=True)
    out = np.exp(-s_arr * math.log(f)) * total
    return _unwrap(out, scalar)


def euler_correction(ctx: LContext, s):
    """prod over p | q of (1 - chi_f(p) p^{-s})."""
    s_arr, scalar = _as_array(s)
    out = np.ones(s_arr.shape, dtype=complex)
    for p in prime_divisors(ctx.chi.modulus):
        c = ctx.chi_f(p)
        if c != 0:
            out = out * (1 - c * np.exp(-s_arr * math.log(p)))
    return _unwrap(out, scalar)


def l_value(ctx: LContext, s):
    """L(chi, s) for the (possibly imprimitive) character of ``ctx``."""
    out = _primitive_l(ctx, s)
    if ctx.is_primitive:
        return out
    return out * euler_correction(ctx, s)


def log_gamma_factor(ctx: LContext, s):
    """log of (f/pi)^{(s+e)/2} Gamma((s+e)/2)."""
    half = (np.asarray(s, dtype=complex) + ctx.parity) / 2
    out = half * math.log(ctx.conductor / math.pi) + log_gamma(half)
    return complex(out) if np.ndim(out) == 0 else out


# within this distance of s = e - 2k, Lambda is taken from the functional equation
_POLE_RADIUS = 0.05


def _near_gamma_pole(ctx: LContext, s_arr: np.ndarray) -> np.ndarray:
    half = (s_arr + ctx.parity) / 2
    k = np.minimum(np.round(half.real), 0)
    return np.abs(half - k) < _POLE_RADIUS / 2


def lambda_value(ctx: LContext, s):
    """Completed Lambda(chi_f, s), assembled in log space.

    At s = e - 2k the Gamma pole meets a trivial zero of L, and nearby the
    product loses relative accuracy, so there the value comes from the
    functional equation.  For the trivial character s = 0 and s = 1 are
    genuine poles.
    """
    s_arr, scalar = _as_array(s)
    out = np.empty(s_arr.shape, dtype=complex)
    pole = _near_gamma_pole(ctx, s_arr)
    if ctx.conductor == 1 and np.any(s_arr == 0):
        raise PoleError("Lambda of the trivial character has a pole at s = 0")
    if ctx.conductor == 1:
        pole &= np.abs(s_arr) >= _POLE_RADIUS
    ok = ~pole
    if ok.any():
        sr = s_arr[ok]
        with np.errstate(divide="ignore"):
            out[ok] = np.exp(log_gamma_factor(ctx, sr) + np.log(_primitive_l(ctx, sr)))
    if pole.any():
        out[pole] = ctx.root_number * lambda_value(ctx.conjugate(), 1 - s_arr[pole])
    return _unwrap(out, scalar)


def xi_value(s):
    """Classical xi(s) = s(s-1)/2 pi^{-s/2} Gamma(s/2) zeta(s); xi(0) = xi(1) = 1/2."""
    ctx = make_context(Character(1, (0,)))
    s_arr, scalar = _as_array(s)
    out = np.full(s_arr.shape, 0.5 + 0j)
    regular = (s_arr != 0) & (s_arr != 1)
    sr = s_arr[regular]
    out[regular] = sr * (sr - 1) / 2 * lambda_value(ctx, sr)
    return _unwrap(out, scalar)


def g_value(ctx: LContext, s):
    """G(chi, s) = Lambda(chi, s) Lambda(chi-bar, s)."""
    return lambda_value(ctx, s) * lambda_value(ctx.conjugate(), s)


def _check_real(val, scale, what):
    """Raise if |Im val| exceeds REALITY_TOL * scale (scale already floored by the caller)."""
    val = np.asarray(val)
    ratio = np.abs(val.imag) / np.maximum(scale, 1e-300)
    if np.any(ratio > REALITY_TOL):
        raise NumericConsistencyError(
            f"{what} is not real on the critical line (relative imaginary part {float(np.max(ratio)):.3g})"
        )


# |value| is floored at this fraction of the natural scale so the test stays meaningful at zeros
_REALITY_FLOOR = 1e-3


def psi_value(ctx: LContext, v):
    """Psi(chi, v) = G(chi, 1/2 + iv), real for real v."""
    v_arr = np.asarray(v, dtype=float)
    s = 0.5 + 1j * v_arr
    G = np.asarray(g_value(ctx, s))
    natural = np.exp(2 * np.real(log_gamma_factor(ctx, s)))
    _check_real(G, np.maximum(np.abs(G), _REALITY_FLOOR * natural), "G")
    out = G.real
    return float(out) if out.ndim == 0 else out


def psi_scaled(ctx: LContext, v):
    """Psi(chi, v) / |F(1/2+iv)|^2 where F is the Gamma factor; same sign, no underflow."""
    v_arr = np.asarray(v, dtype=float)
    s = 0.5 + 1j * v_arr
    rot = np.exp(2j * np.imag(log_gamma_factor(ctx, s)))
    val = rot * _primitive_l(ctx, s) * _primitive_l(ctx.conjugate(), s)
    val = np.asarray(val)
    _check_real(val, np.maximum(np.abs(val), _REALITY_FLOOR), "scaled Psi")
    out = val.real
    return float(out) if out.ndim == 0 else out


def hardy_z(ctx: LContext, v):
    """Real-valued Lambda(chi, 1/2+iv) / (sqrt(W) |F|), a generalized Hardy Z-function.

    For a real character Psi is the square of this function up to a positive
    factor, so its sign changes are the ones to scan.
    """
    v_arr = np.asarray(v, dtype=float)
    s = 0.5 + 1j * v_arr
    theta = np.imag(log_gamma_factor(ctx, s)) - cmath.phase(ctx.root_number) / 2
    val = np.asarray(np.exp(1j * theta) * _primitive_l(ctx, s))
    _check_real(val, np.maximum(np.abs(val), _REALITY_FLOOR), "rotated Lambda")
    out = val.real
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FunctionalEqResidual:
    s: complex
    lhs: complex
    rhs: complex
    relative_residual: float


def relative_residual(a, b) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def functional_equation_residual(ctx: LContext, s: complex) -> FunctionalEqResidual:
    """Compare Lambda(chi, s) with W(chi) Lambda(chi-bar, 1 - s)."""
    s = complex(s)
    lhs = lambda_value(ctx, s)
    rhs = ctx.root_number * lambda_value(ctx.conjugate(), 1 - s)
    return FunctionalEqResidual(s, lhs, rhs, relative_residual(lhs, rhs))


def dirichlet_series(chi: Character, s: complex, terms: int = 10**6) -> complex:
    """sum chi(n) n^{-s} by direct summation, plus a two-term tail per residue class.

    Independent of the Euler-Maclaurin path; meant for Re s >= 2 as an oracle.
    """
    s = complex(s)
    q = chi.modulus
    blocks = max(1, terms // q)
    M = blocks * q
    n = np.arange(1, M + 1)
    vals = np.tile(np.roll(chi.values(), -1), blocks)  # chi(1), ..., chi(q), chi(q+1), ...
    mask = vals != 0
    head = np.sum(vals[mask] * np.exp(-s * np.log(n[mask])))
    # tail: n = q k + a with k >= blocks
    a = np.arange(1, q + 1)
    ca = np.roll(chi.values(), -1)
    w = blocks + a / q
    if s == 1:
        raise PoleError("direct series tail undefined at s = 1")
    tail_terms = w ** (1 - s) / (s - 1) + 0.5 * w ** (-s)
    tail = q ** (-s) * np.sum(ca * tail_terms)
    return complex(head + tail)


def factorization_check(chi: Character, s: complex, terms: int = 10**6) -> float:
    """Relative residual between the direct series and L(chi_f, s) times the Euler factors."""
    if is_primitive(chi):
        raise DomainError(f"{chi.label} is primitive; nothing to factor")
    s = complex(s)
    if s.real < 2:
        raise DomainError("factorization check uses the direct series, which needs Re s >= 2")
    direct = dirichlet_series(chi, s, terms)
    factored = l_value(make_context(chi), s)
    return relative_residual(direct, factored)
