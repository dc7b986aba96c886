"""Checkable non-vanishing criteria for Dirichlet L-functions.

Partial sums S_N and smoothed sums G_N are tested for zeros in small discs by
the argument principle (with an independent grid/Newton oracle), and the
ratio |L(chi-bar, s) / L(chi, 1 - s)| is swept over the two bounded regions
next to the critical line.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .characters import Character
from .errors import (
    BoundaryZeroError,
    DomainError,
    NearZeroError,
    PoleError,
    ResolutionError,
)
from .lfunctions import l_value, log_gamma_factor, make_context
from .special import log_gamma

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
RATIO_DENOMINATOR_FLOOR = 1e-12


# --- discs and contours ------------------------------------------------------


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("disc radius must be positive")
        object.__setattr__(self, "center", complex(self.center))

    @property
    def sigma_min(self) -> float:
        return self.center.real - self.radius

    @property
    def sigma_max(self) -> float:
        return self.center.real + self.radius

    def half_strip(self) -> str | None:
        """'left' or 'right' when the closed disc lies in that open half strip."""
        if self.sigma_min > 0 and self.sigma_max < 0.5:
            return "left"
        if self.sigma_min > 0.5 and self.sigma_max < 1:
            return "right"
        return None

    def boundary(self, tau):
        return self.center + self.radius * np.exp(2j * np.pi * np.asarray(tau))

    def contains(self, z) -> np.ndarray:
        return np.abs(np.asarray(z) - self.center) < self.radius


def rectangle_path(sigma_range, t_range) -> tuple[Callable, float]:
    """Counter-clockwise boundary of a rectangle parametrised by arclength on [0, 1]."""
    s0, s1 = map(float, sigma_range)
    t0, t1 = map(float, t_range)
    w, h = s1 - s0, t1 - t0
    perimeter = 2 * (w + h)
    corners = np.array([complex(s0, t0), complex(s1, t0), complex(s1, t1), complex(s0, t1), complex(s0, t0)])
    cum = np.array([0, w, w + h, 2 * w + h, perimeter]) / perimeter

    def path(tau):
        tau = np.asarray(tau, dtype=float) % 1.0
        idx = np.clip(np.searchsorted(cum, tau, side="right") - 1, 0, 3)
        frac = (tau - cum[idx]) / (cum[idx + 1] - cum[idx])
        return corners[idx] + frac * (corners[idx + 1] - corners[idx])

    return path, perimeter


def winding_number(
    func: Callable[[np.ndarray], np.ndarray],
    path: Callable[[np.ndarray], np.ndarray],
    *,
    n_initial: int = 256,
    max_phase_step: float = math.pi / 2,
    max_rounds: int = 24,
    min_modulus: float = 1e-10,
) -> int:
    """Winding number of func along a closed path by adaptive phase tracking.

    Intervals whose phase increment reaches ``max_phase_step`` are bisected
    until every increment is below it.  ``func`` may be any positive
    rescaling of the function of interest; only its argument matters.
    """
    tau = np.linspace(0.0, 1.0, n_initial + 1)
    w = np.asarray(func(path(tau)), dtype=complex)
    for _ in range(max_rounds):
        scale = float(np.median(np.abs(w)))
        small = np.abs(w) < min_modulus * max(scale, 1e-300)
        if small.any() or not np.all(np.isfinite(w)):
            z_bad = path(tau[np.argmin(np.abs(w))])
            raise BoundaryZeroError(f"function nearly vanishes on the contour near {complex(z_bad):.6g}")
        dphi = np.angle(w[1:] / w[:-1])
        bad = np.abs(dphi) >= max_phase_step
        if not bad.any():
            total = dphi.sum() / TWO_PI
            count = round(total)
            if abs(total - count) > 0.25:
                raise ResolutionError(f"winding sum {total:.4f} is not near an integer")
            return int(count)
        mids = 0.5 * (tau[:-1][bad] + tau[1:][bad])
        w_mid = np.asarray(func(path(mids)), dtype=complex)
        tau = np.concatenate([tau, mids])
        w = np.concatenate([w, w_mid])
        order = np.argsort(tau, kind="stable")
        tau, w = tau[order], w[order]
    raise ResolutionError("phase steps above the threshold remain after maximal refinement")


def disc_zero_count(f: Callable, disc: Disc, **kwargs) -> int:
    """Number of zeros of f inside the disc (argument principle)."""
    return winding_number(f, disc.boundary, **kwargs)


def _newton(f, z0: complex, *, max_iter: int = 60) -> complex | None:
    z = complex(z0)
    for _ in range(max_iter):
        h = 1e-6 * max(1.0, abs(z))
        fz = complex(f(np.array([z]))[0])
        df = complex((f(np.array([z + h]))[0] - f(np.array([z - h]))[0]) / (2 * h))
        if df == 0:
            return None
        step = fz / df
        z -= step
        if abs(step) < 1e-12 * max(1.0, abs(z)):
            return z
        if not math.isfinite(abs(z)) or abs(step) > 10:
            return None
    return None


def grid_zero_count(f: Callable, disc: Disc, n: int = 400, values: np.ndarray | None = None) -> int:
    """Zero count from an n x n grid: Newton from every local minimum of |f|.

    Independent of the contour integral.  ``values`` may hold f on the
    grid returned by :func:`disc_grid` to avoid recomputation.
    """
    Z = disc_grid(disc, n)
    if values is None:
        values = f(Z)
    A = np.abs(values)
    inner = A[1:-1, 1:-1]
    is_min = np.ones(inner.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_min &= inner <= A[1 + di : A.shape[0] - 1 + di, 1 + dj : A.shape[1] - 1 + dj]
    h = 2 * disc.radius / (n - 1)
    cand = Z[1:-1, 1:-1][is_min]
    cand = cand[np.abs(cand - disc.center) <= disc.radius + 2 * h]
    roots: list[complex] = []
    for z0 in cand:
        z = _newton(f, z0)
        if z is None or abs(z - z0) > 4 * h:
            continue
        if all(abs(z - r) > 1e-7 for r in roots):
            roots.append(z)
    return sum(1 for r in roots if abs(r - disc.center) < disc.radius)


def disc_grid(disc: Disc, n: int) -> np.ndarray:
    x = np.linspace(disc.center.real - disc.radius, disc.center.real + disc.radius, n)
    y = np.linspace(disc.center.imag - disc.radius, disc.center.imag + disc.radius, n)
    X, Y = np.meshgrid(x, y, indexing="ij")
    return X + 1j * Y


# --- partial sums ------------------------------------------------------------


def partial_sum(chi: Character, s, N: int):
    """S_N(chi, s) = sum_{n=1}^N chi(n) n^{-s}."""
    if N < 1:
        raise DomainError("N must be positive")
    s_arr = np.asarray(s, dtype=complex)
    q = chi.modulus
    vals = chi.values()
    n = np.arange(1, N + 1)
    c = vals[n % q]
    keep = c != 0
    out = np.exp(-np.multiply.outer(s_arr, np.log(n[keep]))) @ c[keep]
    return complex(out) if s_arr.ndim == 0 else out


def g_n_sum(chi: Character, s, N: int):
    """G_N(s) = q^{-s} sum_a chi(a) [sum_{n<N} (n + a/q)^{-s} + (N + a/q)^{1-s}/(s-1)]."""
    if N < 1:
        raise DomainError("N must be positive")
    s_arr = np.asarray(s, dtype=complex)
    if np.any(s_arr == 1):
        raise PoleError("G_N has a pole at s = 1")
    q = chi.modulus
    vals = chi.values()
    a = np.arange(1, q + 1)
    ca = vals[a % q]
    keep = ca != 0
    a, ca = a[keep], ca[keep]
    w = a / q
    bases = (np.arange(N)[:, None] + w[None, :]).reshape(-1)
    weights = np.tile(ca, N)
    head = np.exp(-np.multiply.outer(s_arr, np.log(bases))) @ weights
    x = N + w
    tail = (np.exp(np.multiply.outer(1 - s_arr, np.log(x))) @ ca) / (s_arr - 1)
    out = np.exp(-s_arr * math.log(q)) * (head + tail)
    return complex(out) if s_arr.ndim == 0 else out


def _incremental_sums(chi: Character, Z: np.ndarray, N_values, variant: str) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (N, S_N or G_N on Z) for increasing N, adding one term per step.

    Uses G_N = S_{qN} + (1/q) sum_a chi(a) (qN + a)^{1-s} / (s - 1).
    """
    q = chi.modulus
    vals = chi.values()
    acc = np.zeros(Z.shape, dtype=complex)
    m_done = 0
    a = np.arange(1, q + 1)
    ca = vals[a % q]
    for N in sorted(N_values):
        m_target = N if variant == "sn" else q * N
        for m in range(m_done + 1, m_target + 1):
            c = vals[m % q]
            if c != 0:
                acc += c * np.exp(-Z * math.log(m))
        m_done = m_target
        if variant == "sn":
            yield N, acc.copy()
        else:
            tail = np.zeros(Z.shape, dtype=complex)
            for ai, ci in zip(a, ca):
                if ci != 0:
                    tail += ci * np.exp((1 - Z) * math.log(q * N + ai))
            yield N, acc + tail / (q * (Z - 1))


@dataclass
class DiscReport:
    disc: Disc
    variant: str
    character: str
    N_range: tuple[int, int]
    zero_counts: dict[int, int | None] = field(default_factory=dict)
    min_modulus: dict[int, float] = field(default_factory=dict)
    grid_counts: dict[int, int] = field(default_factory=dict)

    @property
    def fraction_zero_free(self) -> float:
        known = [c for c in self.zero_counts.values() if c is not None]
        return sum(1 for c in known if c == 0) / len(known) if known else 0.0

    @property
    def oracle_agrees(self) -> bool:
        return all(self.grid_counts.get(N) == c for N, c in self.zero_counts.items() if N in self.grid_counts)

    def to_json(self) -> dict:
        return {
            "character": self.character,
            "variant": self.variant,
            "disc": {"center": [self.disc.center.real, self.disc.center.imag], "radius": self.disc.radius},
            "N_range": list(self.N_range),
            "zero_counts": {str(k): v for k, v in sorted(self.zero_counts.items())},
            "min_modulus": {str(k): v for k, v in sorted(self.min_modulus.items())},
            "grid_counts": {str(k): v for k, v in sorted(self.grid_counts.items())},
            "fraction_zero_free": self.fraction_zero_free,
            "oracle_agrees": self.oracle_agrees,
        }


def criterion_report(
    chi: Character,
    disc: Disc,
    N_range: tuple[int, int],
    variant: str = "sn",
    *,
    cross_check: bool = False,
    grid: int = 400,
) -> DiscReport:
    """Zero counts of S_N (variant 'sn') or G_N ('gn') in ``disc`` for every N in N_range."""
    variant = variant.lower()
    if variant not in ("sn", "gn"):
        raise DomainError(f"unknown variant {variant!r}")
    if disc.half_strip() is None:
        raise DomainError("disc must lie inside the left or right open half of the critical strip")
    if variant == "sn" and chi.is_principal:
        raise DomainError("the partial-sum criterion is stated for nonprincipal characters")
    n_min, n_max = N_range
    if not 1 <= n_min <= n_max:
        raise DomainError("invalid N range")
    fn = partial_sum if variant == "sn" else g_n_sum
    report = DiscReport(disc, variant, chi.label, (n_min, n_max))

    Z = disc_grid(disc, grid if cross_check else 101)
    inside = disc.contains(Z)
    for N, values in _incremental_sums(chi, Z, range(n_min, n_max + 1), variant):
        f = lambda z, N=N: fn(chi, z, N)  # noqa: E731
        try:
            report.zero_counts[N] = disc_zero_count(f, disc)
        except (BoundaryZeroError, ResolutionError) as exc:
            log.warning("N=%d: count indeterminate (%s)", N, exc)
            report.zero_counts[N] = None
        boundary_min = float(np.min(np.abs(f(disc.boundary(np.linspace(0, 1, 257))))))
        report.min_modulus[N] = min(boundary_min, float(np.min(np.abs(values[inside]))))
        if cross_check:
            report.grid_counts[N] = grid_zero_count(f, disc, grid, values=values)
    return report


# --- ratio regions -----------------------------------------------------------


def in_left_region(sigma, t):
    sigma, t = np.asarray(sigma), np.asarray(t)
    return (sigma > 0) & (sigma < 0.5) & ((1 + sigma) ** 2 + t**2 < TWO_PI**2)


def in_right_region(sigma, t):
    sigma, t = np.asarray(sigma), np.asarray(t)
    return (sigma > 0.5) & (sigma < 1) & ((2 - sigma) ** 2 + t**2 < TWO_PI**2)


@dataclass(frozen=True)
class RegionPoint:
    s: complex
    in_left_region: bool
    in_right_region: bool
    ratio_magnitude: float

    @property
    def region(self) -> str:
        return "left" if self.in_left_region else "right" if self.in_right_region else "none"


def ratio_magnitude(chi: Character, s):
    """|L(chi-bar, s) / L(chi, 1 - s)|."""
    s_arr = np.asarray(s, dtype=complex)
    num = np.abs(l_value(make_context(chi.conjugate()), s_arr))
    den = np.abs(l_value(make_context(chi), 1 - s_arr))
    if np.any(den < RATIO_DENOMINATOR_FLOOR):
        raise NearZeroError("L(chi, 1 - s) is numerically zero")
    out = num / den
    return float(out) if s_arr.ndim == 0 else out


def ratio_magnitude_gamma(chi: Character, s):
    """The same ratio from the functional equation: (f/pi)^{1/2-sigma} |Gamma((1-s+e)/2) / Gamma((s+e)/2)|.

    Valid for primitive chi; used as a cross-check of :func:`ratio_magnitude`.
    """
    ctx = make_context(chi)
    s_arr = np.asarray(s, dtype=complex)
    out = np.exp(np.real(log_gamma_factor(ctx, 1 - s_arr) - log_gamma_factor(ctx, s_arr)))
    return float(out) if s_arr.ndim == 0 else out


def region_grid(resolution: float, margin: float = 0.05, region: str = "both") -> np.ndarray:
    """Grid points s = i*h + j*h*1j inside the selected region(s), off the margin band."""
    if resolution < 1e-3:
        raise DomainError("grid resolution must be >= 1e-3")
    h = resolution
    i = np.arange(1, int(math.ceil(1 / h)))
    j = np.arange(-int(math.ceil(TWO_PI / h)), int(math.ceil(TWO_PI / h)) + 1)
    sig = np.round(i * h, 12)
    tt = np.round(j * h, 12)
    S, T = np.meshgrid(sig, tt, indexing="ij")
    keep = np.abs(S - 0.5) >= margin - 1e-12
    if region in ("both", "left") and region in ("both", "right"):
        member = in_left_region(S, T) | in_right_region(S, T)
    elif region == "left":
        member = in_left_region(S, T)
    elif region == "right":
        member = in_right_region(S, T)
    else:
        raise DomainError(f"unknown region {region!r}")
    keep &= member
    return (S + 1j * T)[keep]


@dataclass
class SweepSummary:
    character: str
    resolution: float
    margin: float
    n_points: int
    n_skipped: int
    min_abs_dev: dict[str, float]
    argmin: dict[str, complex]
    n_above: dict[str, int]
    n_below: dict[str, int]

    @property
    def holds(self) -> bool:
        return all(v > 0 for v in self.min_abs_dev.values())

    def sign_changes(self) -> dict[str, bool]:
        """Whether |R| - 1 takes both signs on the grid of each region (recorded, not asserted)."""
        return {r: self.n_above[r] > 0 and self.n_below[r] > 0 for r in self.min_abs_dev}


def region_sweep(chi: Character, grid_resolution: float, margin: float = 0.05):
    """Sample |R| over both regions; returns (points, summary)."""
    pts = region_grid(grid_resolution, margin)
    num = np.abs(l_value(make_context(chi.conjugate()), pts))
    den = np.abs(l_value(make_context(chi), 1 - pts))
    ok = den >= RATIO_DENOMINATOR_FLOOR
    if not ok.all():
        for z in pts[~ok]:
            log.warning("skipping %s: L(chi, 1-s) numerically zero", z)
    pts, ratio = pts[ok], num[ok] / den[ok]
    left = in_left_region(pts.real, pts.imag)
    right = in_right_region(pts.real, pts.imag)
    points = [RegionPoint(complex(z), bool(lf), bool(rt), float(r)) for z, lf, rt, r in zip(pts, left, right, ratio)]
    dev = np.abs(ratio - 1)
    mins, locs, above, below = {}, {}, {}, {}
    for name, mask in (("left", left), ("right", right)):
        if not mask.any():
            continue
        k = int(np.argmin(np.where(mask, dev, np.inf)))
        mins[name] = float(dev[k])
        locs[name] = complex(pts[k])
        above[name] = int(np.sum(mask & (ratio > 1)))
        below[name] = int(np.sum(mask & (ratio < 1)))
    summary = SweepSummary(chi.label, grid_resolution, margin, len(points), int((~ok).sum()), mins, locs, above, below)
    return points, summary


def locate_unit_ratio(chi: Character, s_a: complex, s_b: complex, tol: float = 1e-13) -> complex:
    """Bisect the segment [s_a, s_b] for a point where |R| = 1 (|R| - 1 must change sign)."""
    fa = ratio_magnitude(chi, s_a) - 1
    fb = ratio_magnitude(chi, s_b) - 1
    if fa * fb > 0:
        raise DomainError("|R| - 1 does not change sign on the segment")
    a, b = complex(s_a), complex(s_b)
    while abs(b - a) > tol:
        m = (a + b) / 2
        fm = ratio_magnitude(chi, m) - 1
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return (a + b) / 2


def find_unit_ratio_crossing(chi: Character, points: list[RegionPoint], region: str) -> complex | None:
    """A refined point of the region where |R| = 1, if the grid shows a sign change of |R| - 1."""
    pts = sorted((p for p in points if p.region == region), key=lambda p: (p.s.real, p.s.imag))
    for p, q in zip(pts, pts[1:]):
        if p.s.real == q.s.real and (p.ratio_magnitude - 1) * (q.ratio_magnitude - 1) < 0:
            return locate_unit_ratio(chi, p.s, q.s)
    return None


def write_region_csv(points: list[RegionPoint], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sigma", "t", "region", "ratio_magnitude", "abs_dev_from_1"])
        for p in points:
            w.writerow([_fmt(p.s.real), _fmt(p.s.imag), p.region, _fmt(p.ratio_magnitude), _fmt(abs(p.ratio_magnitude - 1))])


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# --- Gamma inequality ---------------------------------------------------------


def gamma_inequality_check(s) -> tuple[float, float, bool]:
    """|Gamma((2-s)/2) / Gamma((s+1)/2)| <= |(1+s)/2|^{1/2-sigma} on the left region."""
    s = complex(s)
    if not bool(in_left_region(s.real, s.imag)):
        raise DomainError(f"{s} is outside the left region")
    lhs = math.exp((log_gamma((2 - s) / 2) - log_gamma((s + 1) / 2)).real)
    rhs = abs((1 + s) / 2) ** (0.5 - s.real)
    return lhs, rhs, lhs <= rhs * (1 + 1e-12)


def gamma_inequality_sweep(resolution: float, margin: float = 0.0):
    """Vectorised check over the left-region grid; returns (points, lhs, rhs, holds)."""
    pts = region_grid(resolution, margin, region="left")
    lhs = np.exp(np.real(log_gamma((2 - pts) / 2) - log_gamma((pts + 1) / 2)))
    rhs = np.abs((1 + pts) / 2) ** (0.5 - pts.real)
    return pts, lhs, rhs, lhs <= rhs * (1 + 1e-12)
