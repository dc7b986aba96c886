"""Numerical kernels: Bernoulli numbers, Hurwitz zeta, log-Gamma and Gauss sums.

All evaluators accept a Python complex or a numpy array of complex points and
return the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .characters import Character, is_primitive, roots_of_unity
from .errors import DomainError, PoleError

MAX_BERNOULLI_TERMS = 30
DEFAULT_BERNOULLI_TERMS = 12
DEFAULT_TARGET_ERROR = 1e-10


@lru_cache(maxsize=None)
def bernoulli_exact(n_max: int = 2 * MAX_BERNOULLI_TERMS) -> tuple[Fraction, ...]:
    """B_0 .. B_{n_max} as exact rationals (B_1 = -1/2 convention)."""
    B = [Fraction(1)]
    for m in range(1, n_max + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * B[k]
        B.append(-acc / (m + 1))
    return tuple(B)


def _em_coefficients() -> np.ndarray:
    """B_{2k}/(2k)! for k = 1 .. MAX_BERNOULLI_TERMS, as doubles."""
    B = bernoulli_exact()
    return np.array(
        [float(B[2 * k] / math.factorial(2 * k)) for k in range(1, MAX_BERNOULLI_TERMS + 1)]
    )


_EM_COEFFS = _em_coefficients()


@dataclass(frozen=True)
class HurwitzParams:
    """Euler-Maclaurin settings: direct terms N, Bernoulli corrections K."""

    N: int
    K: int = DEFAULT_BERNOULLI_TERMS
    target_abs_error: float = DEFAULT_TARGET_ERROR

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if not 0 <= self.K <= MAX_BERNOULLI_TERMS:
            raise DomainError(f"K must lie in [0, {MAX_BERNOULLI_TERMS}], got {self.K}")
        if not self.target_abs_error > 0:
            raise DomainError("target_abs_error must be positive")


def default_params(s) -> HurwitzParams:
    """N = max(12, ceil(1.3 |Im s|)) over all points of ``s``, K = 12."""
    t_max = float(np.max(np.abs(np.imag(s)))) if np.size(s) else 0.0
    return HurwitzParams(N=max(12, math.ceil(1.3 * t_max)))


def _as_array(s):
    arr = np.asarray(s, dtype=complex)
    return arr, arr.ndim == 0


def _unwrap(out, scalar):
    return complex(out) if scalar else out


def hurwitz_weighted_sum(s, shifts, weights, params: HurwitzParams | None = None, *, weights_sum_zero=False):
    """sum_j weights[j] * zeta(s, shifts[j]) by Euler-Maclaurin.

    ``weights_sum_zero`` tells the evaluator that the poles at s = 1 cancel
    (a nonprincipal character), so s = 1 itself is evaluated as a limit.
    """
    s_arr, scalar = _as_array(s)
    shifts = np.asarray(shifts, dtype=float)
    weights = np.asarray(weights, dtype=complex)
    if np.any(shifts <= 0) or np.any(shifts > 1):
        raise DomainError("Hurwitz shift must lie in (0, 1]")
    if params is None:
        params = default_params(s_arr)
    at_pole = s_arr == 1
    if at_pole.any() and not weights_sum_zero:
        raise PoleError("Hurwitz zeta has a pole at s = 1")

    N, K = params.N, params.K
    flat = s_arr.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)

    bases = (np.arange(N)[:, None] + shifts[None, :]).reshape(-1)
    log_bases = np.log(bases)
    base_weights = np.tile(weights, N)
    x = N + shifts
    log_x = np.log(x)

    chunk = max(1, 2_000_000 // max(1, bases.size))
    for start in range(0, flat.size, chunk):
        sc = flat[start : start + chunk]
        direct = np.exp(-np.outer(sc, log_bases)) @ base_weights

        x_pow = np.exp(-np.outer(sc, log_x))  # (N+w)^{-s}
        sm1 = sc - 1
        if weights_sum_zero:
            # sum(weights) = 0, so x^{1-s}/(s-1) may be replaced by expm1((1-s) log x)/(s-1)
            safe = np.where(sm1 == 0, 1, sm1)
            ratio = np.expm1(-np.outer(sm1, log_x)) / safe[:, None]
            ratio[sm1 == 0, :] = -log_x
            integral = ratio @ weights
        else:
            integral = (x_pow * x[None, :]) @ weights / sm1
        half = 0.5 * (x_pow @ weights)

        corr = np.zeros(sc.shape, dtype=complex)
        term = x_pow / x[None, :] * sc[:, None]  # s (N+w)^{-s-1}
        inv_x2 = 1.0 / (x * x)
        for k in range(1, K + 1):
            corr += _EM_COEFFS[k - 1] * (term @ weights)
            term = term * ((sc + 2 * k - 1) * (sc + 2 * k))[:, None] * inv_x2[None, :]
        out[start : start + chunk] = direct + integral + half + corr
    return _unwrap(out.reshape(s_arr.shape), scalar)


def em_remainder_estimate(s, w: float, params: HurwitzParams) -> float:
    """Magnitude of the first omitted Euler-Maclaurin term (a practical error estimate)."""
    s = complex(s)
    K, x = params.K, params.N + w
    poch = 1.0 + 0j
    for j in range(2 * K + 1):
        poch *= s + j
    coeff = float(bernoulli_exact()[2 * K + 2] / math.factorial(2 * K + 2)) if K < MAX_BERNOULLI_TERMS else _EM_COEFFS[-1]
    return abs(coeff * poch) * x ** (-s.real - 2 * K - 1)


def hurwitz_zeta(s, w: float, params: HurwitzParams | None = None):
    """Hurwitz zeta(s, w) for 0 < w <= 1.

    Accurate to about 1e-10 absolute with the default parameters on
    -2 <= Re s <= 4, |Im s| <= 1000.  When ``params`` is omitted the
    truncation is raised further until the remainder estimate falls below
    the target error.
    """
    if not 0 < w <= 1:
        raise DomainError(f"w must lie in (0, 1], got {w}")
    if params is None:
        params = default_params(s)
        pts = np.atleast_1d(np.asarray(s, dtype=complex))
        worst = pts[np.argmax(np.abs(pts))] if pts.size else 0j
        while params.N < 10**6 and em_remainder_estimate(worst, w, params) > params.target_abs_error:
            params = HurwitzParams(N=2 * params.N, K=params.K)
    return hurwitz_weighted_sum(s, [w], [1.0], params)


# --- log-Gamma -------------------------------------------------------------

_LANCZOS_G = 671.0 / 128.0
_LANCZOS_COEFFS = np.array(
    [
        57.1562356658629235,
        -59.5979603554754912,
        14.1360979747417471,
        -0.491913816097620199,
        0.339946499848118887e-4,
        0.465236289270485756e-4,
        -0.983744753048795646e-4,
        0.158088703224912494e-3,
        -0.210264441724104883e-3,
        0.217439618115212643e-3,
        -0.164318106536763890e-3,
        0.844182239838527433e-4,
        -0.261908384015814087e-4,
        0.368991826595316234e-5,
    ]
)
_LANCZOS_C0 = 0.999999999999997092
_SQRT_2PI = 2.5066282746310005
_LOG_PI = math.log(math.pi)
_LOG2 = math.log(2.0)


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    tmp = z + _LANCZOS_G
    series = np.full(z.shape, _LANCZOS_C0, dtype=complex)
    for j, c in enumerate(_LANCZOS_COEFFS, start=1):
        series = series + c / (z + j)
    return (z + 0.5) * np.log(tmp) - tmp + np.log(_SQRT_2PI * series) - np.log(z)


def _log_sin_pi_upper(z: np.ndarray) -> np.ndarray:
    """A branch of log sin(pi z), analytic on Im z > 0, real on (0, 1)."""
    # e^{2 pi i z} has period 1; reducing first keeps full precision near the poles
    zr = z - np.round(z.real)
    return -1j * np.pi * z + np.log1p(-np.exp(2j * np.pi * zr)) - _LOG2 + 0.5j * np.pi


def log_gamma(s):
    """Principal branch of log Gamma(s); the negative real axis takes the limit from above."""
    z, scalar = _as_array(s)
    re = z.real
    if np.any((z.imag == 0) & (re <= 0) & (re == np.round(re))):
        raise PoleError("Gamma has poles at the non-positive integers")
    out = np.empty(z.shape, dtype=complex)
    right = re >= 0.5
    out[right] = _lanczos_log_gamma(z[right])
    left = ~right
    if left.any():
        zl = z[left]
        flip = zl.imag < 0
        zu = np.where(flip, zl.conj(), zl)
        refl = _LOG_PI - _log_sin_pi_upper(zu) - _lanczos_log_gamma(1 - zu)
        # on the real axis the imaginary part is an exact multiple of pi
        real_axis = zl.imag == 0
        refl[real_axis] = refl[real_axis].real + 1j * np.pi * np.round(refl[real_axis].imag / np.pi)
        out[left] = np.where(flip, refl.conj(), refl)
    return _unwrap(out, scalar)


def gamma(s):
    return np.exp(log_gamma(s)) if not np.isscalar(s) else complex(np.exp(log_gamma(s)))


# --- Gauss sums ------------------------------------------------------------


def gauss_sum(chi: Character) -> complex:
    """tau(chi) = sum_a chi(a) e^{2 pi i a/q}, for primitive chi."""
    if not is_primitive(chi):
        raise DomainError(f"Gauss sum requested for imprimitive character {chi.label}")
    q = chi.modulus
    num, den = chi.phase_numerators()
    a = np.arange(q, dtype=np.int64)
    units = num >= 0
    # chi(a) e(a/q) = e((num*q + a*den) / (den*q)), exactly in integers
    return complex(np.sum(roots_of_unity(num[units] * q + a[units] * den, den * q)))
