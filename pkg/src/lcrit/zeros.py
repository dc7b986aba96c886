"""Critical-line zeros: scanning, bisection refinement, rectangle counts, classification."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from .characters import Character, prime_divisors
from .criteria import rectangle_path, winding_number
from .errors import DomainError
from .lfunctions import LContext, _primitive_l, hardy_z, l_value, log_gamma_factor, make_context

log = logging.getLogger(__name__)

DEFAULT_STEP = 0.02
BISECTION_WIDTH = 1e-9
ZERO_TOL = 1e-8


@dataclass(frozen=True)
class ZeroRecord:
    """A critical-line zero 1/2 + it.

    ``residual`` is |L| at the refined ordinate for the factor that vanishes
    (the smaller of |L(chi)| and |L(chi-bar)|); ``g_residual`` is |G| there.
    """

    modulus: int
    label: str
    t: float
    t_lo: float
    t_hi: float
    residual: float
    attribution: str
    g_residual: float = 0.0


@dataclass
class ScanResult:
    records: list[ZeroRecord]
    tangential: list[float] = field(default_factory=list)


def _bisect(f, lo: float, hi: float, f_lo: float, width: float) -> tuple[float, float]:
    while hi - lo >= width:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid - width / 4, mid + width / 4
        if (fm > 0) == (f_lo > 0):
            lo, f_lo = mid, fm
        else:
            hi = mid
    return lo, hi


def _scan_factor(ctx: LContext, v: np.ndarray, tag: str) -> tuple[list[ZeroRecord], list[float]]:
    """Sign changes of the real function hardy_z(ctx, .) on the grid v, refined by bisection."""
    f = lambda x: hardy_z(ctx, x)  # noqa: E731
    vals = np.asarray(f(v), dtype=float)
    records = []
    for k in np.nonzero(vals[:-1] * vals[1:] < 0)[0]:
        lo, hi = _bisect(f, float(v[k]), float(v[k + 1]), float(vals[k]), BISECTION_WIDTH)
        t = 0.5 * (lo + hi)
        residual = abs(_primitive_l(ctx, complex(0.5, t)))
        records.append(ZeroRecord(ctx.chi.modulus, ctx.label, t, lo, hi, residual, tag))

    a = np.abs(vals)
    floor = 1e-3 * float(np.median(a))
    tangential = []
    for k in range(1, len(vals) - 1):
        if a[k] < a[k - 1] and a[k] < a[k + 1] and a[k] < floor and vals[k - 1] * vals[k] > 0 and vals[k] * vals[k + 1] > 0:
            tangential.append(float(v[k]))
            log.warning("%s: |Z| dips to %.3g at t=%.4f without a sign change", ctx.label, a[k], v[k])
    return records, tangential


def scan_critical_line(ctx: LContext, T: float, step: float = DEFAULT_STEP) -> ScanResult:
    """Zeros of Psi(chi, .) on (0, T].

    On the critical line Psi = +-|F|^2 Z_chi Z_chibar with Z the real
    rotations of Lambda(chi) and Lambda(chi-bar).  Each factor is scanned
    separately: a zero of L(chi) and one of L(chi-bar) closer than the step
    would cancel as a sign change of Psi, and for real characters Psi is a
    square with no sign changes at all.
    """
    if not ctx.is_primitive:
        raise DomainError("zero scanning needs a primitive character")
    if not 0 < step <= 0.1:
        raise DomainError("scan step must lie in (0, 0.1]")
    if T <= 0:
        raise DomainError("height must be positive")
    n = int(math.ceil(T / step - 1e-9))
    v = np.linspace(0.0, n * step, n + 1)
    v[-1] = min(v[-1], T)

    if ctx.is_real:
        records, tangential = _scan_factor(ctx, v, "both/real")
    else:
        rec_chi, tan_chi = _scan_factor(ctx, v, "chi")
        rec_bar, tan_bar = _scan_factor(ctx.conjugate(), v, "chi_bar")
        rec_bar = [replace(r, label=ctx.label) for r in rec_bar]
        merged: list[ZeroRecord] = []
        for r in sorted(rec_chi + rec_bar, key=lambda r: r.t):
            if merged and abs(r.t - merged[-1].t) < 1e-7:
                merged[-1] = replace(merged[-1], attribution="both", residual=max(merged[-1].residual, r.residual))
            else:
                merged.append(r)
        records, tangential = merged, sorted(tan_chi + tan_bar)

    conj = ctx.conjugate()
    out = []
    for r in records:
        s = complex(0.5, r.t)
        g_res = float(np.exp(2 * log_gamma_factor(ctx, s).real)) * abs(_primitive_l(ctx, s) * _primitive_l(conj, s))
        out.append(replace(r, g_residual=g_res))
    return ScanResult(out, tangential)


def scan_zeros(ctx: LContext, T: float, step: float = DEFAULT_STEP) -> list[ZeroRecord]:
    return scan_critical_line(ctx, T, step).records


def _rescaled_function(ctx: LContext, kind: str) -> Callable:
    """A positive multiple of Lambda, G or xi that does not under/overflow with height."""

    def log_scale(z):
        return log_gamma_factor(ctx, 0.5 + 1j * np.imag(z)).real

    if kind == "lambda":
        def f(z):
            with np.errstate(divide="ignore"):
                return np.exp(log_gamma_factor(ctx, z) - log_scale(z) + np.log(_primitive_l(ctx, z)))
    elif kind == "g":
        conj = ctx.conjugate()

        def f(z):
            with np.errstate(divide="ignore"):
                logs = np.log(_primitive_l(ctx, z)) + np.log(_primitive_l(conj, z))
                return np.exp(2 * (log_gamma_factor(ctx, z) - log_scale(z)) + logs)
    elif kind == "xi":
        if ctx.conductor != 1:
            raise DomainError("xi is only defined for the trivial character")

        def f(z):
            t = np.imag(z)
            poly = z * (z - 1) / 2
            norm = np.abs((0.25 + t * t) / 2)
            with np.errstate(divide="ignore"):
                return poly / norm * np.exp(log_gamma_factor(ctx, z) - log_scale(z) + np.log(_primitive_l(ctx, z)))
    else:
        raise DomainError(f"unknown function kind {kind!r}")

    def guarded(z):
        z = np.asarray(z, dtype=complex).copy()
        # sample points landing exactly on a removable singularity (s = 0, 1)
        z[(z == 0) | (z == 1)] += 1e-9j
        return f(z)

    return guarded


def default_count_kind(ctx: LContext) -> str:
    if ctx.conductor == 1:
        return "xi"
    return "lambda" if ctx.is_real else "g"


def rectangle_count(ctx: LContext, sigma_range=(-0.1, 1.1), t_range=(0.0, 50.0), kind: str | None = None) -> int:
    """Zeros of Lambda / G / xi inside the rectangle, by the argument principle."""
    s0, s1 = sigma_range
    t0, t1 = t_range
    if s1 <= s0 or t1 <= t0:
        return 0
    kind = kind or default_count_kind(ctx)
    path, perimeter = rectangle_path(sigma_range, t_range)
    f = _rescaled_function(ctx, kind)
    return winding_number(f, path, n_initial=max(256, int(64 * perimeter)))


def expected_rectangle_count(records: Iterable[ZeroRecord], kind: str) -> int:
    """Rectangle count implied by scan records: real characters count twice in G."""
    records = list(records)
    if kind == "g":
        return sum(2 if r.attribution in ("both/real", "both") else 1 for r in records)
    return len(records)


def classify_zero(chi: Character, s: complex, tol: float = ZERO_TOL) -> str:
    """'trivial', 'extraneous' or 'nontrivial' for a numerical zero s of L(chi, s)."""
    s = complex(s)
    ctx = make_context(chi)
    if abs(l_value(ctx, s)) >= tol:
        raise DomainError(f"L({chi.label}, {s}) is not numerically zero")
    e = chi.parity
    if abs(s.imag) < tol:
        k = (e - s.real) / 2
        if abs(k - round(k)) < tol and round(k) >= 1:
            return "trivial"
        if abs(s.real) < tol and e == 0 and not chi.is_principal:
            return "trivial"
    for p in prime_divisors(chi.modulus):
        c = ctx.chi_f(p)
        if c != 0 and abs(1 - c * p ** (-s)) < tol:
            return "extraneous"
    return "nontrivial"


@dataclass(frozen=True)
class WindowStats:
    eta: float
    T: float
    counts: tuple[int, ...]
    fraction_within_bounds: float
    lower_bound: float
    upper_bound: float


def window_stats(records: Iterable[ZeroRecord], eta: float, phi: Callable[[float], float], T: float) -> WindowStats:
    """Zero counts in consecutive windows of length eta over (0, T].

    The fraction of windows whose count lies strictly between
    (eta/2pi) log T / Phi(T) and Phi(T) (eta/2pi) log T is exploratory only.
    """
    if eta <= 0 or T <= 0:
        raise DomainError("eta and T must be positive")
    n_win = int(math.floor(T / eta))
    ts = np.array(sorted(r.t for r in records), dtype=float)
    edges = eta * np.arange(n_win + 1)
    counts = np.histogram(ts, bins=edges)[0] if n_win else np.zeros(0, dtype=int)
    base = eta / (2 * math.pi) * math.log(T) if T > 1 else 0.0
    lo, hi = base / phi(T), phi(T) * base
    inside = (counts > lo) & (counts < hi)
    frac = float(inside.mean()) if n_win else 0.0
    return WindowStats(eta, T, tuple(int(c) for c in counts), frac, lo, hi)


def write_atlas_csv(records: Iterable[ZeroRecord], path) -> None:
    rows = sorted(records, key=lambda r: (r.modulus, r.label, r.t))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["q", "char_label", "t", "t_lo", "t_hi", "residual", "attribution"])
        for r in rows:
            w.writerow([r.modulus, r.label, _fmt(r.t), _fmt(r.t_lo), _fmt(r.t_hi), _fmt(r.residual), r.attribution])


def read_atlas_csv(path) -> list[ZeroRecord]:
    with open(path, newline="") as fh:
        return [
            ZeroRecord(int(row["q"]), row["char_label"], float(row["t"]), float(row["t_lo"]), float(row["t_hi"]),
                       float(row["residual"]), row["attribution"])
            for row in csv.DictReader(fh)
        ]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")
