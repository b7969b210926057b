"""Command-line front end: design / spectrum / bounds / simulate / verify.

Each command reads or writes JSON system descriptions and CSV tables, writes
files atomically (temp + rename), and finishes by writing a run manifest
listing every produced file.  Exit codes: 0 success, 1 internal failure,
2 invalid flags or inputs, 3 inconclusive spectrum/certification.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

__version__ = "0.1.0"


def _apply_thread_cap() -> None:
    """MIDSPEC_THREADS caps the BLAS pools, the only internal parallelism."""
    cap = os.environ.get("MIDSPEC_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, cap)


@dataclass
class RunManifest:
    command: str
    inputs: dict
    outputs: list[str] = field(default_factory=list)
    tool_version: str = __version__
    timestamp: str = ""

    def write(self, out_dir: Path) -> Path:
        self.timestamp = datetime.now(timezone.utc).isoformat()
        path = out_dir / "manifest.json"
        _write_atomic(path, json.dumps(self.__dict__, indent=2) + "\n")
        return path


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    tmp.replace(path)


class _Emitter:
    """Routes human-readable lines to stdout and collects the JSON payload."""

    def __init__(self, as_json: bool, quiet: bool):
        self.as_json = as_json
        self.quiet = quiet
        self.payload: dict = {}

    def say(self, line: str) -> None:
        if not (self.quiet or self.as_json):
            print(line)

    def finish(self) -> None:
        if self.as_json:
            print(json.dumps(self.payload, indent=2))


def _load_system(path: str):
    from .quasipoly import RetardedSystem

    try:
        return RetardedSystem.from_json(Path(path).read_text())
    except FileNotFoundError:
        raise ValueError(f"system file not found: {path}") from None
    except (KeyError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed system file {path}: {exc}") from None


def _default_s0(sys_) -> float:
    from .quasipoly import dominant_root_from_trace

    return dominant_root_from_trace(sys_.n, sys_.a[-1], sys_.tau)


# --- design -------------------------------------------------------------------


def cmd_design(args, em: _Emitter) -> int:
    from .quasipoly import mid_coefficients

    sys_ = mid_coefficients(args.n, args.s0, args.tau)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    system_path = out / "system.json"
    _write_atomic(system_path, sys_.to_json() + "\n")

    lines = [f"order n = {sys_.n}, delay tau = {sys_.tau}, assigned root s0 = {args.s0}"]
    for k in range(sys_.n):
        lines.append(f"  a[{k}]     = {sys_.a[k]: .15g}")
    for k in range(sys_.n):
        lines.append(f"  alpha[{k}] = {sys_.alpha[k]: .15g}")
    identity = args.s0 + sys_.a[-1] / sys_.n + sys_.n / sys_.tau
    lines.append(f"trace identity s0 + a[n-1]/n + n/tau = {identity:.3e}")
    listing = "\n".join(lines) + "\n"
    listing_path = out / "design.txt"
    _write_atomic(listing_path, listing)

    for line in lines:
        em.say(line)
    em.payload = {"system": sys_.to_json_dict(), "trace_identity": identity}
    manifest = RunManifest(
        "design",
        {"n": args.n, "s0": args.s0, "tau": args.tau},
        [str(system_path), str(listing_path)],
    )
    manifest.write(out)
    return 0


# --- spectrum -----------------------------------------------------------------


def cmd_spectrum(args, em: _Emitter) -> int:
    from .bounds import Norm, bound_norm_power
    from .spectral import (
        LocalizationError,
        Rectangle,
        SpectrumReport,
        certify_dominance,
        companion_pair,
        find_roots,
        roots_to_csv,
    )
    from .quasipoly import normalize

    sys_ = _load_system(args.system)
    s0 = args.s0 if args.s0 is not None else _default_s0(sys_)
    region = Rectangle(
        args.re_min if args.re_min is not None else s0 - 5.0,
        args.re_max if args.re_max is not None else s0 + 1.0,
        args.im_min if args.im_min is not None else -30.0,
        args.im_max if args.im_max is not None else 30.0,
    )

    q = sys_.quasipolynomial()
    try:
        roots = find_roots(q, region)
    except LocalizationError as exc:
        em.say(f"inconclusive: {exc}")
        return 3
    if not roots:
        em.say("no roots in region")
        return 3

    pair = companion_pair(normalize(sys_, s0))
    bound = bound_norm_power(pair, Norm.FROBENIUS, 2, sigma_min=0.0)
    try:
        cert = certify_dominance(sys_, s0, bound, re_floor=s0)
    except LocalizationError as exc:
        em.say(f"inconclusive: {exc}")
        return 3

    base = SpectrumReport.from_roots(roots, region)
    report = SpectrumReport(
        base.roots,
        region,
        base.spectral_abscissa,
        cert.dominant if cert.strictly_dominant else base.dominant,
        cert.strictly_dominant,
    )

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "roots.csv"
    _write_atomic(csv_path, roots_to_csv(report.roots))
    json_path = out / "spectrum.json"
    _write_atomic(json_path, report.to_json() + "\n")

    em.say(f"{len(report.roots)} root locations, total multiplicity "
           f"{sum(r.multiplicity for r in report.roots)}")
    em.say(f"spectral abscissa in region: {report.spectral_abscissa:.9g}")
    em.say(f"strictly dominant at s0 = {s0:.9g}: {report.strictly_dominant}")
    em.payload = report.to_json_dict() | {"s0": s0}
    RunManifest(
        "spectrum",
        {"system": args.system, "s0": s0, "region": region.to_json_dict()},
        [str(csv_path), str(json_path)],
    ).write(out)
    return 0


# --- bounds -------------------------------------------------------------------


def _bounds_rows(args, pair):
    from .bounds import (
        Norm,
        bound_mori_kokame,
        bound_norm_power,
        bound_spectral_radius_curve,
        bound_tissir_hmamed,
        lemma3_analytic_bound,
    )

    rows = []

    def add(report):
        rows.append(
            (report.method.value, report.norm.value, report.power,
             report.sigma_min, report.value)
        )

    if args.all:
        add(bound_spectral_radius_curve(pair, args.sigma_min))
        for norm in (Norm.ONE, Norm.FROBENIUS, Norm.INFINITY):
            add(bound_norm_power(pair, norm, 1, args.sigma_min))
        for norm in (Norm.ONE, Norm.FROBENIUS, Norm.INFINITY):
            add(bound_norm_power(pair, norm, 2, args.sigma_min))
        for norm in (Norm.ONE, Norm.TWO, Norm.INFINITY):
            add(bound_mori_kokame(pair, norm))
        for norm in (Norm.ONE, Norm.TWO, Norm.INFINITY):
            add(bound_tissir_hmamed(pair, norm))
        rep = lemma3_analytic_bound(pair)
        rows.append(("lemma3-coarse", "frobenius", 2, 0.0, rep.coarse))
        rows.append(("lemma3-refined", "frobenius", 2, 0.0, rep.refined))
        rows.append(("lemma3-certified", "frobenius", 2, 0.0, rep.certified))
        return rows

    norm = Norm(args.norm)
    if args.method == "rho":
        add(bound_spectral_radius_curve(pair, args.sigma_min))
    elif args.method == "norm-power":
        add(bound_norm_power(pair, norm, args.power, args.sigma_min))
    elif args.method == "mori-kokame":
        add(bound_mori_kokame(pair, norm))
    elif args.method == "tissir-hmamed":
        add(bound_tissir_hmamed(pair, norm))
    elif args.method == "lemma3":
        rep = lemma3_analytic_bound(pair)
        rows.append(("lemma3-coarse", "frobenius", 2, 0.0, rep.coarse))
        rows.append(("lemma3-refined", "frobenius", 2, 0.0, rep.refined))
        rows.append(("lemma3-certified", "frobenius", 2, 0.0, rep.certified))
    else:
        raise ValueError(f"unknown method {args.method!r}")
    return rows


def cmd_bounds(args, em: _Emitter) -> int:
    from .bounds import Norm, boundary_curve
    from .spectral import standard_pair, companion_pair
    from .quasipoly import normalize
    import numpy as np

    if args.standard_pair:
        pair = standard_pair()
    elif args.system:
        sys_ = _load_system(args.system)
        s0 = args.s0 if args.s0 is not None else _default_s0(sys_)
        pair = companion_pair(normalize(sys_, s0))
    else:
        raise ValueError("provide a system file or --standard-pair")

    if not args.all and args.method is None:
        raise ValueError("provide --method or --all")

    rows = _bounds_rows(args, pair)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["method,norm,power,sigma_min,value"]
    for method, norm, power, smin, value in rows:
        lines.append(f"{method},{norm},{power},{smin:.17g},{value:.17g}")
    csv_path = out / "bounds.csv"
    _write_atomic(csv_path, "\n".join(lines) + "\n")
    outputs = [str(csv_path)]

    if args.curves:
        sigmas = np.arange(args.sigma_min, args.sigma_min + 3.0 + 1e-9, 0.02)
        curve_specs = [("rho", None, 1)]
        for norm in (Norm.ONE, Norm.FROBENIUS, Norm.INFINITY):
            curve_specs.append((f"norm-power-{norm.value}-p2", norm, 2))
        for name, norm, power in curve_specs:
            data = boundary_curve(pair, sigmas, norm, power)
            body = ["sigma,omega_boundary"]
            body += [f"{s:.9g},{w:.9g}" for s, w in data]
            cpath = out / f"curve_{name}.csv"
            _write_atomic(cpath, "\n".join(body) + "\n")
            outputs.append(str(cpath))

    for line in lines:
        em.say(line)
    em.payload = {
        "rows": [
            {"method": m, "norm": n, "power": p, "sigma_min": s, "value": v}
            for m, n, p, s, v in rows
        ]
    }
    RunManifest(
        "bounds",
        {
            "system": args.system,
            "standard_pair": args.standard_pair,
            "method": args.method,
            "norm": args.norm,
            "power": args.power,
            "sigma_min": args.sigma_min,
            "all": args.all,
        },
        outputs,
    ).write(out)
    return 0


# --- simulate -----------------------------------------------------------------


def _resolve_histories(spec: str, tau: float):
    from . import sim

    if spec == "all":
        return [(name, sim.builtin_history(name)) for name in sim.BUILTIN_HISTORY_NAMES]
    if spec in sim.BUILTIN_HISTORY_NAMES:
        return [(spec, sim.builtin_history(spec))]
    if spec.startswith("const:"):
        try:
            value = float(spec.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad constant history {spec!r}") from None
        return [("const", sim.constant(value))]
    if spec.startswith("file:"):
        path = Path(spec.split(":", 1)[1])
        if not path.exists():
            raise ValueError(f"history file not found: {path}")
        rows = [r.split(",") for r in path.read_text().strip().splitlines()]
        if rows and not rows[0][0].lstrip("-").replace(".", "").isdigit():
            rows = rows[1:]  # header
        times = [float(r[0]) for r in rows]
        values = [float(r[1]) for r in rows]
        return [("custom", sim.sampled(times, values))]
    raise ValueError(f"unknown history kind {spec!r}")


def cmd_simulate(args, em: _Emitter) -> int:
    from . import sim

    sys_ = _load_system(args.system)
    histories = _resolve_histories(args.history, sys_.tau)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    rates = {}
    for name, hist in histories:
        traj = sim.simulate(sys_, hist, args.t_end, args.step)
        sol_path = out / f"sol_{name}.csv"
        _write_atomic(sol_path, traj.plot_csv())
        traj_path = out / f"traj_{name}.csv"
        _write_atomic(traj_path, traj.to_csv())
        outputs += [str(sol_path), str(traj_path)]
        try:
            rate = sim.decay_rate(traj, args.t_start)
        except ValueError:
            rate = None
        rates[name] = rate
        shown = "n/a (zero tail)" if rate is None else f"{rate:+.6f}"
        em.say(f"history {name}: decay rate over [{args.t_start:g}, {args.t_end:g}] = {shown}")

    em.payload = {"decay_rates": rates}
    RunManifest(
        "simulate",
        {
            "system": args.system,
            "history": args.history,
            "t_end": args.t_end,
            "step": args.step,
            "t_start": args.t_start,
        },
        outputs,
    ).write(out)
    return 0


# --- verify -------------------------------------------------------------------


def cmd_verify(args, em: _Emitter) -> int:
    from .bounds import Norm, bound_norm_power
    from .quasipoly import (
        factorization_residual_n2,
        mid_coefficients,
        multiplicity_at,
        normalize,
    )
    from .spectral import LocalizationError, certify_dominance, companion_pair

    sys_ = _load_system(args.system)
    s0 = args.s0 if args.s0 is not None else _default_s0(sys_)
    n = sys_.n
    checks: list[tuple[str, bool, str]] = []

    q = sys_.quasipolynomial()
    m = multiplicity_at(q, s0)
    checks.append(("multiplicity", m == 2 * n, f"multiplicity at s0 is {m}, want {2 * n}"))

    identity = s0 + sys_.a[-1] / n + n / sys_.tau
    ok = abs(identity) <= 1e-12 * max(1.0, abs(s0))
    checks.append(("trace-identity", ok, f"s0 + a[n-1]/n + n/tau = {identity:.3e}"))

    nsys = normalize(sys_, s0)
    ref = mid_coefficients(n, 0.0, 1.0)
    dev = max(
        abs(x - y) / max(1.0, abs(y))
        for x, y in zip(nsys.b + nsys.beta, ref.a + ref.alpha)
    )
    checks.append(
        ("normalization-universality", dev < 1e-10, f"max relative deviation {dev:.3e}")
    )

    if n == 2:
        worst = max(
            factorization_residual_n2(z) for z in (1.0, 2j * math.pi, 0.7 - 0.3j)
        )
        checks.append(
            ("factorization-residual", worst < 1e-10, f"max residual {worst:.3e}")
        )

    try:
        pair = companion_pair(nsys)
        bound = bound_norm_power(pair, Norm.FROBENIUS, 2, sigma_min=0.0)
        cert = certify_dominance(sys_, s0, bound, re_floor=s0)
        checks.append(
            (
                "dominance",
                cert.strictly_dominant,
                f"strictly dominant: {cert.strictly_dominant}, "
                f"spectral abscissa {cert.spectral_abscissa:.9g}",
            )
        )
    except LocalizationError as exc:
        checks.append(("dominance", False, f"inconclusive: {exc}"))

    all_ok = all(ok for _, ok, _ in checks)
    for name, ok, detail in checks:
        em.say(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    em.say("verdict: " + ("all checks passed" if all_ok else "FAILURES detected"))
    em.payload = {
        "s0": s0,
        "checks": [{"name": n_, "passed": ok, "detail": d} for n_, ok, d in checks],
        "passed": all_ok,
    }
    return 0 if all_ok else 1


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="midspec",
        description="Design, localize, bound, and simulate single-delay "
        "retarded equations with an assigned dominant root of maximal multiplicity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out-dir", default=".", help="output directory (default: .)")
        p.add_argument("--json", action="store_true", help="machine-readable stdout")
        p.add_argument("--quiet", action="store_true", help="suppress normal output")

    p = sub.add_parser("design", help="assign a root of maximal multiplicity 2n")
    p.add_argument("--n", type=int, required=True, help="equation order (>= 1)")
    p.add_argument("--s0", type=float, required=True, help="root to assign")
    p.add_argument("--tau", type=float, required=True, help="delay (> 0)")
    common(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("spectrum", help="locate roots and certify dominance")
    p.add_argument("system", help="system JSON file")
    p.add_argument("--s0", type=float, default=None, help="claimed dominant root")
    p.add_argument("--re-min", type=float, default=None)
    p.add_argument("--re-max", type=float, default=None)
    p.add_argument("--im-min", type=float, default=None)
    p.add_argument("--im-max", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bounds", help="a priori |Im root| bounds")
    p.add_argument("system", nargs="?", default=None, help="system JSON file")
    p.add_argument("--standard-pair", action="store_true",
                   help="use the normalized quartic design's companion pair")
    p.add_argument("--s0", type=float, default=None)
    p.add_argument(
        "--method",
        choices=["rho", "norm-power", "mori-kokame", "tissir-hmamed", "lemma3"],
        default=None,
    )
    p.add_argument("--norm", choices=["one", "two", "frobenius", "infinity"], default="frobenius")
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--sigma-min", type=float, default=0.0)
    p.add_argument("--all", action="store_true", help="emit the full bound table suite")
    p.add_argument("--curves", action="store_true", help="also export boundary curves")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="method-of-steps simulation")
    p.add_argument("system", help="system JSON file")
    p.add_argument(
        "--history",
        required=True,
        help="y01|y02|y03|y04|all|const:<v>|file:<path>",
    )
    p.add_argument("--t-end", type=float, default=40.0)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--t-start", type=float, default=10.0, help="decay-fit start time")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="one-shot design checks")
    p.add_argument("system", help="system JSON file")
    p.add_argument("--s0", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    args = parser.parse_args(argv)
    em = _Emitter(args.json, args.quiet)
    try:
        code = args.func(args, em)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    em.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
