"""Command-line interface: ``lcrit <subcommand> ...`` (or ``python -m lcrit``).

Every run writes its artifacts plus ``<subcommand>_manifest.json`` to --out.
Complex numbers are written a+bi, a-bi, bi or a (``j`` is accepted for ``i``).
Exit codes: 0 success, 2 usage/domain error, 3 numeric-consistency failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .characters import Character, conductor, enumerate_characters, is_primitive, primitive_characters
from .criteria import (
    Disc,
    criterion_report,
    find_unit_ratio_crossing,
    gamma_inequality_sweep,
    region_sweep,
    write_region_csv,
)
from .errors import DomainError, LcritError, NumericConsistencyError
from .hadamard import reconstruction_report
from .lfunctions import functional_equation_residual, l_value, lambda_value, make_context
from .special import DEFAULT_BERNOULLI_TERMS
from .zeros import DEFAULT_STEP, default_count_kind, expected_rectangle_count, rectangle_count, scan_critical_line, write_atlas_csv

log = logging.getLogger("lcrit")

NUMERIC_DEFAULTS = {
    "hurwitz_N": "max(12, ceil(1.3*|Im s|))",
    "hurwitz_K": DEFAULT_BERNOULLI_TERMS,
    "scan_step": DEFAULT_STEP,
    "bisection_width": 1e-9,
    "sweep_margin": 0.05,
    "winding_initial_samples": 256,
    "winding_max_phase_step": "pi/2",
    "csv_significant_digits": 17,
}

def parse_complex(text: str) -> complex:
    """Parse 'a+bi', 'a-bi', 'bi', 'a' (i or j)."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if not t:
        raise argparse.ArgumentTypeError("empty complex number")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from None


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def fmt_complex(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 or np.isnan(z.imag) else "-"
    return f"{fmt(z.real)}{sign}{fmt(abs(z.imag))}i"


def resolve_character(q: int, label: str | None) -> Character:
    if label is None:
        raise DomainError("--char is required")
    if "." not in label:
        label = f"{q}.{label}"
    chi = Character.from_label(label)
    if chi.modulus != q:
        raise DomainError(f"character {label} does not have modulus {q}")
    return chi


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("LCRIT_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _json_default(obj):
    if isinstance(obj, complex):
        return fmt_complex(obj)
    if isinstance(obj, Disc):
        return {"center": fmt_complex(obj.center), "radius": obj.radius}
    if isinstance(obj, np.generic):
        return obj.item()
    return str(obj)


class Run:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.artifacts: list[str] = []
        self.start = time.perf_counter()

    def path(self, name: str) -> Path:
        p = self.out / name
        self.artifacts.append(p.name)
        return p

    def write_json(self, name: str, payload) -> Path:
        p = self.path(name)
        p.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
        return p

    def finish(self) -> None:
        params = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func",)}
        manifest = {
            "subcommand": self.args.command,
            "parameters": params,
            "numeric_defaults": NUMERIC_DEFAULTS,
            "artifacts": self.artifacts,
            "wall_time": time.perf_counter() - self.start,
            "version": __version__,
        }
        (self.out / f"{self.args.command}_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n")


# --- subcommands -----------------------------------------------------------


def cmd_chars(run: Run) -> int:
    q = run.args.modulus
    rows = []
    for chi in enumerate_characters(q):
        f, chi_f = conductor(chi)
        rows.append((chi.label, f, "yes" if f == q else "no", "odd" if chi.parity else "even", "real" if chi.is_real else "complex", chi_f.label))
    header = ("label", "conductor", "primitive", "parity", "type", "inducing")
    with open(run.path(f"chars_{q}.csv"), "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(str(x) for x in r) + "\n")
    print("  ".join(header))
    for r in rows:
        print("  ".join(str(x) for x in r))
    return 0


def cmd_eval(run: Run) -> int:
    a = run.args
    chi = resolve_character(a.q, a.char)
    ctx = make_context(chi)
    s = a.s
    L = l_value(ctx, s)
    fe = functional_equation_residual(ctx, s)
    payload = {
        "character": chi.label,
        "conductor": ctx.conductor,
        "primitive": ctx.is_primitive,
        "parity": ctx.parity,
        "s": fmt_complex(s),
        "L": fmt_complex(L),
        "Lambda": fmt_complex(lambda_value(ctx, s)),
        "root_number": fmt_complex(ctx.root_number),
        "functional_equation_residual": fe.relative_residual,
    }
    run.write_json(f"eval_{chi.label}.json", payload)
    for k, v in payload.items():
        print(f"{k}: {v}")
    if fe.relative_residual > 1e-8:
        raise NumericConsistencyError(f"functional-equation residual {fe.relative_residual:.3g} exceeds 1e-8")
    return 0


def cmd_zeros(run: Run) -> int:
    a = run.args
    chi = resolve_character(a.q, a.char)
    if not is_primitive(chi):
        raise DomainError(f"{chi.label} is not primitive")
    ctx = make_context(chi)
    result = scan_critical_line(ctx, a.height, a.step)
    write_atlas_csv(result.records, run.path(f"zeros_{chi.label}.csv"))
    print(f"{chi.label}: {len(result.records)} zeros on (0, {a.height}]")
    if result.tangential:
        print(f"flagged (no sign change): {', '.join(fmt(t) for t in result.tangential)}")
    if a.validate:
        kind = default_count_kind(ctx)
        found = rectangle_count(ctx, (-0.1, 1.1), (0.0, a.height), kind)
        expected = expected_rectangle_count(result.records, kind)
        print(f"argument principle ({kind}): {found}, expected from scan: {expected}")
        if found != expected:
            raise NumericConsistencyError("scan and rectangle count disagree")
    return 0


def _parse_disc(text: str) -> Disc:
    try:
        cx, cy, r = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("--disc expects cx,cy,r") from None
    return Disc(complex(cx, cy), r)


def cmd_criteria(run: Run) -> int:
    a = run.args
    chi = resolve_character(a.q, a.char)
    report = criterion_report(chi, a.disc, (a.nmin, a.nmax), a.variant, cross_check=a.cross_check, grid=a.grid)
    run.write_json(f"criteria_{a.variant}_{chi.label}.json", report.to_json())
    nonzero = {N: c for N, c in report.zero_counts.items() if c != 0}
    print(f"{chi.label} {a.variant}: zero-free fraction {report.fraction_zero_free:.4f} over N in [{a.nmin}, {a.nmax}]")
    if nonzero:
        print(f"N with zeros or indeterminate counts: {sorted(nonzero)}")
    if a.cross_check and not report.oracle_agrees:
        raise NumericConsistencyError("winding counts disagree with the grid oracle")
    return 0


def cmd_ratio_sweep(run: Run) -> int:
    a = run.args
    chars = [resolve_character(a.q, a.char)] if a.char else primitive_characters(a.q)
    results = parallel_map(lambda c: (c, *region_sweep(c, a.resolution, a.margin)), chars)
    status = 0
    for chi, points, summary in results:
        write_region_csv(points, run.path(f"ratio_{chi.label}.csv"))
        m = min(summary.min_abs_dev.values())
        crossings = {r: find_unit_ratio_crossing(chi, points, r) for r in ("left", "right")}
        print(f"{chi.label}: min ||R|-1| = {fmt(m)} over {summary.n_points} points ({'> 0' if m > 0 else 'NOT > 0'})")
        for r, z in crossings.items():
            if z is not None:
                print(f"  {r} region: |R|-1 changes sign; |R| = 1 at s = {fmt_complex(z)}")
        if not summary.holds:
            status = 3
    if status:
        raise NumericConsistencyError("grid minimum of ||R|-1| is not positive")
    return 0


def cmd_hadamard(run: Run) -> int:
    a = run.args
    chi = resolve_character(a.q, a.char)
    if not is_primitive(chi):
        raise DomainError(f"{chi.label} is not primitive")
    lo, hi, n = a.vrange
    v = np.linspace(lo, hi, int(n))
    report = reconstruction_report(make_context(chi), a.height, v)
    report.write_csv(run.path(f"hadamard_{chi.label}.csv"))
    for k, val in report.checks.items():
        print(f"{k}: {val}")
    if not report.checks["same_sign"] or report.checks["within_envelope"] is False:
        raise NumericConsistencyError("product reconstruction failed its checks")
    return 0


def cmd_gamma_check(run: Run) -> int:
    a = run.args
    pts, lhs, rhs, holds = gamma_inequality_sweep(a.resolution, a.margin)
    with open(run.path("gamma_check.csv"), "w") as fh:
        fh.write("sigma,t,lhs,rhs,holds\n")
        for z, l, r, h in zip(pts, lhs, rhs, holds):
            fh.write(f"{fmt(z.real)},{fmt(z.imag)},{fmt(l)},{fmt(r)},{int(h)}\n")
    print(f"gamma inequality holds at {int(holds.sum())}/{len(pts)} left-region points")
    if not holds.all():
        raise NumericConsistencyError("gamma inequality violated")
    return 0


def _vrange(text: str):
    parts = [float(x) for x in text.split(",")]
    if len(parts) == 2:
        parts.append(101)
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--vrange expects a,b[,n]")
    return tuple(parts)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lcrit", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def char_args(sp, required=True):
        sp.add_argument("--q", type=int, required=True, help="modulus")
        sp.add_argument("--char", required=required, help="character label q.e1-e2-... (or just e1-e2-...)")

    sp = sub.add_parser("chars", help="list characters, conductors, parities")
    sp.add_argument("--modulus", type=int, required=True)
    sp.set_defaults(func=cmd_chars)

    sp = sub.add_parser("eval", help="L, Lambda and functional-equation residual at s")
    char_args(sp)
    sp.add_argument("--s", type=parse_complex, required=True, help="complex point, e.g. 0.5+3i")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("zeros", help="critical-line zero atlas CSV")
    char_args(sp)
    sp.add_argument("--height", type=float, required=True)
    sp.add_argument("--step", type=float, default=DEFAULT_STEP)
    sp.add_argument("--validate", action="store_true", help="cross-check the count by the argument principle")
    sp.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("criteria", help="S_N / G_N zero counts in a disc (DiscReport JSON)")
    char_args(sp)
    sp.add_argument("--variant", choices=("sn", "gn"), required=True)
    sp.add_argument("--disc", type=_parse_disc, required=True, help="cx,cy,r")
    sp.add_argument("--nmin", type=int, required=True)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--cross-check", action="store_true", help="also run the dense-grid oracle")
    sp.add_argument("--grid", type=int, default=400)
    sp.set_defaults(func=cmd_criteria)

    sp = sub.add_parser("ratio-sweep", help="|L(chi-bar,s)/L(chi,1-s)| over the two bounded regions (CSV)")
    char_args(sp, required=False)
    sp.add_argument("--resolution", type=float, default=0.05)
    sp.add_argument("--margin", type=float, default=0.05)
    sp.set_defaults(func=cmd_ratio_sweep)

    sp = sub.add_parser("hadamard", help="truncated product reconstruction (CSV)")
    char_args(sp)
    sp.add_argument("--height", type=float, required=True)
    sp.add_argument("--vrange", type=_vrange, default=(-5.0, 5.0, 101), help="a,b[,n]")
    sp.set_defaults(func=cmd_hadamard)

    sp = sub.add_parser("gamma-check", help="Gamma-ratio inequality over the left region")
    sp.add_argument("--resolution", type=float, default=0.025)
    sp.add_argument("--margin", type=float, default=0.0)
    sp.set_defaults(func=cmd_gamma_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    run = Run(args)
    try:
        code = args.func(run)
    except NumericConsistencyError as exc:
        print(f"lcrit: numeric consistency failure: {exc}", file=sys.stderr)
        code = 3
    except DomainError as exc:
        print(f"lcrit: {exc}", file=sys.stderr)
        code = 2
    except LcritError as exc:
        print(f"lcrit: {exc}", file=sys.stderr)
        code = 3
    run.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
