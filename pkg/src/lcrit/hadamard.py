"""Truncated Hadamard products built from computed critical-line zeros.

Ordinates phi_n are the v-coordinates of zeros 1/2 + i*phi_n.  Even forms use
factors (1 - v^2/phi_n^2), i.e. each zero paired with its mirror -phi_n, so
no exponential convergence factors are needed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import CompletenessError, DomainError
from .lfunctions import LContext, _primitive_l, log_gamma_factor, psi_scaled, xi_value
from .zeros import ZeroRecord, default_count_kind, expected_rectangle_count, rectangle_count, scan_zeros

KINDS = ("classical_rho", "classical_centered", "classical_even", "paired_even_general")


@dataclass(frozen=True)
class ProductForm:
    kind: str
    constant: complex
    zeros_used: tuple[complex, ...]
    height: float
    multiplicities: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown product kind {self.kind!r}")
        if not self.multiplicities:
            object.__setattr__(self, "multiplicities", (1,) * len(self.zeros_used))

    @property
    def base_point(self) -> complex:
        return {"classical_rho": 0j, "classical_centered": 0.5 + 0j}.get(self.kind, 0j)


def build_product(kind: str, zeros: Sequence[complex], target: Callable, height: float | None = None,
                  multiplicities: Sequence[int] | None = None) -> ProductForm:
    """Anchor a truncated product at its base point: c = target(base point)."""
    zeros = tuple(complex(z) for z in zeros)
    if height is None:
        height = max((z.real for z in zeros), default=0.0)
    if not zeros and height > 0:
        raise DomainError("no zeros supplied for a positive truncation height")
    if kind not in KINDS:
        raise DomainError(f"unknown product kind {kind!r}")
    base = 0.5 if kind == "classical_centered" else 0.0
    constant = complex(target(base))
    return ProductForm(kind, constant, zeros, float(height), tuple(multiplicities or ()))


def log_product(p: ProductForm, x) -> np.ndarray:
    """log of the product without its constant, summed factor by factor; -inf at a used zero."""
    x = np.asarray(x, dtype=complex)
    total = np.zeros(x.shape, dtype=complex)
    for phi, m in zip(p.zeros_used, p.multiplicities):
        if p.kind == "classical_rho":
            rho = 0.5 + 1j * phi
            factor = (1 - x / rho) * (1 - x / (1 - rho))
        elif p.kind == "classical_centered":
            rho = 0.5 + 1j * phi
            factor = 1 - (x - 0.5) ** 2 / (rho - 0.5) ** 2
        else:
            factor = 1 - x * x / (phi * phi)
        with np.errstate(divide="ignore", invalid="ignore"):
            total = total + m * np.log(factor)
    total = np.asarray(total)
    return np.where(np.isneginf(total.real), -np.inf + 0j, total)


def evaluate_product(p: ProductForm, x):
    """c * prod(...) at x (s for the rho forms, v for the even forms)."""
    x_arr = np.asarray(x, dtype=complex)
    logs = log_product(p, x_arr)
    out = np.where(np.isneginf(logs.real), 0j, p.constant * np.exp(logs))
    return complex(out) if x_arr.ndim == 0 else out


# --- tail envelope (trivial character) ---------------------------------------


def zeta_zero_count_upper(t: float) -> float:
    """Upper bound for N(t), the number of zeta zeros with 0 < gamma <= t (t >= e).

    N(t) <= (t/2pi) log(t/2pi e) + 7/8 + 0.112 log t + 0.278 log log t + 2.51.
    """
    return t / (2 * math.pi) * math.log(t / (2 * math.pi * math.e)) + 0.875 + 0.112 * math.log(t) + 0.278 * math.log(math.log(t)) + 2.51


def inverse_square_tail_bound(T: float, count_at_T: int) -> float:
    """Upper bound for sum over zeros gamma > T of 1/gamma^2, given N(T) exactly.

    Stieltjes integration by parts: sum = -N(T)/T^2 + 2 int_T^inf N(t)/t^3 dt.
    """
    if T < math.e:
        raise DomainError("tail bound needs T >= e")
    integral, _ = quad(lambda t: zeta_zero_count_upper(t) / t**3, T, math.inf, epsabs=1e-14, epsrel=1e-12)
    return -count_at_T / T**2 + 2 * integral


def tail_envelope(v, T: float, count_at_T: int):
    """Bound for |log(Xi(v)/Xi_T(v))| = |sum_{gamma>T} log(1 - v^2/gamma^2)| for real |v| < T."""
    v = np.asarray(v, dtype=float)
    x = v * v / (T * T)
    return v * v * inverse_square_tail_bound(T, count_at_T) / (1 - x)


# --- reconstruction ------------------------------------------------------------


def _multiplicity(r: ZeroRecord) -> int:
    return 2 if r.attribution in ("both/real", "both") else 1


@dataclass
class ReconstructionReport:
    label: str
    height: float
    form: ProductForm
    v: np.ndarray
    direct: np.ndarray
    product: np.ndarray
    log_ratio: np.ndarray
    envelope: np.ndarray | None = None
    checks: dict = field(default_factory=dict)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["v", "direct_re", "direct_im", "product_re", "product_im", "log_ratio"])
            for v, d, p, lr in zip(self.v, self.direct, self.product, self.log_ratio):
                w.writerow([_fmt(v), _fmt(d.real), _fmt(d.imag), _fmt(p.real), _fmt(p.imag), _fmt(lr)])


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _direct_target(ctx: LContext):
    """Returns (callable v -> (log|value|, sign)) for Xi (trivial character) or Psi."""
    if ctx.conductor == 1:
        def direct(v):
            v = np.asarray(v, dtype=float)
            val = np.asarray(xi_value(0.5 + 1j * v)).real
            return np.log(np.abs(val)), np.sign(val)
        return direct

    conj = ctx.conjugate()

    def direct(v):
        v = np.asarray(v, dtype=float)
        s = 0.5 + 1j * v
        log_mod = 2 * np.real(log_gamma_factor(ctx, s)) + np.log(np.abs(_primitive_l(ctx, s))) + np.log(np.abs(_primitive_l(conj, s)))
        return log_mod, np.sign(psi_scaled(ctx, v))
    return direct


def reconstruction_report(ctx: LContext, T: float, v_values, records: Sequence[ZeroRecord] | None = None,
                          *, check_completeness: bool = True) -> ReconstructionReport:
    """Compare Psi (Xi for the trivial character) with its truncated even product."""
    if records is None:
        records = scan_zeros(ctx, T)
    records = [r for r in records if r.t <= T]
    if check_completeness:
        kind = default_count_kind(ctx)
        found = rectangle_count(ctx, (-0.1, 1.1), (0.0, T), kind)
        expected = expected_rectangle_count(records, kind)
        if found != expected:
            raise CompletenessError(f"{ctx.label}: atlas has {expected} zeros to height {T}, argument principle counts {found}")

    direct = _direct_target(ctx)
    log0, sign0 = direct(0.0)
    kind = "classical_even" if ctx.conductor == 1 else "paired_even_general"
    zeros = [r.t for r in records]
    mult = [_multiplicity(r) for r in records] if ctx.conductor != 1 else [1] * len(records)
    form = build_product(kind, zeros, lambda _: float(sign0) * math.exp(float(log0)), T, mult)

    v = np.asarray(v_values, dtype=float)
    log_d, sign_d = direct(v)
    log_p = np.real(log_product(form, v)) + math.log(abs(form.constant))
    sign_p = np.sign(form.constant.real) * np.prod(
        [np.sign(1 - v * v / (z.real * z.real)) ** m for z, m in zip(form.zeros_used, form.multiplicities)], axis=0
    ) if form.zeros_used else np.full(v.shape, np.sign(form.constant.real))
    log_ratio = log_d - log_p
    direct_vals = sign_d * np.exp(log_d)
    product_vals = sign_p * np.exp(log_p)

    envelope = None
    if ctx.conductor == 1 and T >= math.e:
        envelope = tail_envelope(v, T, len(records))

    mirror = {round(x, 12): lr for x, lr in zip(v, log_ratio)}
    even_dev = max((abs(lr - mirror[round(-x, 12)]) for x, lr in zip(v, log_ratio) if round(-x, 12) in mirror), default=0.0)
    checks = {
        "same_sign": bool(np.all(sign_d == sign_p)),
        "evenness_max_dev": float(even_dev),
        "max_abs_log_ratio": float(np.max(np.abs(log_ratio))) if v.size else 0.0,
        "within_envelope": None if envelope is None else bool(np.all(np.abs(log_ratio) <= envelope + 1e-12)),
    }
    return ReconstructionReport(ctx.label, T, form, v, direct_vals.astype(complex), product_vals.astype(complex),
                                log_ratio, envelope, checks)


def weierstrass_comparison(ctx: LContext, records: Sequence[ZeroRecord], v_values) -> dict:
    """Lambda(chi, 1/2+iv) against two truncated products over its own zeros.

    ``with_exponentials``: e^{A + Bv} prod (1 - v/phi) e^{v/phi}.
    ``paired_no_exponentials``: e^{A} prod (1 - v/phi), exponentials dropped.
    For a complex character the zeros of Lambda(chi) alone are not symmetric
    under phi -> -phi, so the two truncations differ; the log-ratios are
    returned as data.
    """
    phis = []
    for r in records:
        if r.attribution in ("chi", "both", "both/real"):
            phis.append(r.t)
        if r.attribution in ("chi_bar", "both", "both/real"):
            phis.append(-r.t)
    phis = np.array(sorted(phis))

    def log_lambda(v):
        s = 0.5 + 1j * np.asarray(v, dtype=float)
        return log_gamma_factor(ctx, s) + np.log(_primitive_l(ctx, s))

    A = complex(log_lambda(0.0))
    h = 1e-5
    B = complex((log_lambda(h) - log_lambda(-h)) / (2 * h))
    v = np.asarray(v_values, dtype=float)
    direct = log_lambda(v)
    terms = np.log(1 - v[:, None] / phis[None, :])
    with_exp = A + B * v + np.sum(terms + v[:, None] / phis[None, :], axis=1)
    without = A + np.sum(terms, axis=1)

    def wrap(z):
        return np.real(z) + 1j * np.angle(np.exp(1j * np.imag(z)))

    return {
        "v": v,
        "with_exponentials": wrap(direct - with_exp),
        "paired_no_exponentials": wrap(direct - without),
        "B": B,
        "sum_inverse_zeros": float(np.sum(1 / phis)) if phis.size else 0.0,
    }
