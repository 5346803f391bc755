"""Command-line surface: computations, persistence, reports, verify suites.

Exit codes: 0 success, 1 verify-suite failure, 2 usage error, 3 budget cap.
All numeric inputs are decimal; angles are radians.  The trace-grid cache
directory comes from --cache-dir or the STMOMENTS_CACHE_DIR variable.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

from . import cache as cache_mod
from .arith_curves import CurveParams, Interval, SumCondition, ap_table, curve_ap, primes_in_window
from .classnumbers import build_hurwitz_table, eichler_mass
from .errors import BudgetError, CacheError
from .hecke import TraceStore, hecke_trace, trace_average_probe, traces_via_birch
from .family_averages import s0_brute, s0_formula
from .moments_engine import (
    Hypothesis2Probe,
    MomentPlan,
    Profile,
    almost_all_report,
    clt_histogram,
    family_moments,
    hypothesis2_probe,
)
from .st_approx import CoeffMode, coeffs_to_csv, exact_st_coeffs, parseval_check, sandwich_coeffs
from .verify import SUITES, run_suites, soft_diagnostics


@dataclass
class RunConfig:
    cache_dir: str | None = None
    threads: int = 1
    profile: Profile = Profile.UNCONDITIONAL
    c: float = 1.0
    max_table_p: int = 3000
    tolerance_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.threads < 1 or self.max_table_p < 5:
            raise ValueError("caps must be positive")


def _interval_from_args(args) -> Interval:
    return Interval(alpha=args.alpha, beta=args.beta)


def _cmd_primes(args, cfg: RunConfig) -> int:
    window = primes_in_window(args.x)
    print(window.count)
    if args.list:
        print(" ".join(str(p) for p in window.primes))
    return 0


def _cmd_ap(args, cfg: RunConfig) -> int:
    if args.a is not None and args.b is not None:
        tv = curve_ap(args.p, CurveParams(args.a, args.b))
        print(f"{tv.kind.value} {tv.ap}")
        return 0
    if not args.table:
        print("need --a and --b, or --table", file=sys.stderr)
        return 2
    table = ap_table(args.p, max_p=cfg.max_table_p)
    if args.cache:
        path = cache_mod.cache_path(cfg.cache_dir, args.p)
        cache_mod.cache_write(cache_mod.entry_from_table(table), path)
        print(f"wrote {path}")
    good = int(table.good.sum())
    print(f"p={args.p} good={good} bad={args.p * args.p - good} trace_sum={int(table.ap[table.good].sum())}")
    return 0


def _cmd_hurwitz(args, cfg: RunConfig) -> int:
    table = build_hurwitz_table(args.max_n)
    if args.out:
        table.to_csv(args.out)
        print(f"wrote {args.out}")
    else:
        for n in range(3, args.max_n + 1):
            if n % 4 in (0, 3):
                print(f"{n} {table.twelve(n)}")
    return 0


def _cmd_eichler_check(args, cfg: RunConfig) -> int:
    table = build_hurwitz_table(4 * args.max_p)
    bad = []
    for p in range(5, args.max_p + 1):
        if any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            continue
        r = eichler_mass(p, table)
        if r != 0:
            bad.append((p, r))
    if bad:
        print(f"FAIL {len(bad)} nonzero residuals: {bad[:5]}")
        return 1
    print(f"PASS mass identity for all 5 <= p <= {args.max_p}")
    return 0


def _cmd_trace(args, cfg: RunConfig) -> int:
    if args.method == "miller":
        rec = hecke_trace(args.k, args.p)
    else:
        if args.k % 2 or args.k < 4:
            print("the class-number route needs even weight >= 4", file=sys.stderr)
            return 2
        rec = traces_via_birch(args.p, (args.k - 2) // 2)[-1]
    print(rec.trace)
    return 0


def _cmd_birch_check(args, cfg: RunConfig) -> int:
    from .classnumbers import build_hurwitz_table

    table = build_hurwitz_table(4 * args.p_max)
    store = TraceStore(max_prime=args.p_max, max_weight=2 * args.j_max + 2)
    for p in range(5, args.p_max + 1):
        if any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            continue
        for rec in traces_via_birch(p, args.j_max, table):
            if rec.trace != store.trace(rec.k, p):
                print(f"FAIL k={rec.k} p={p}")
                return 1
    print(f"PASS route agreement for p <= {args.p_max}, J <= {args.j_max}")
    return 0


def _cmd_s0(args, cfg: RunConfig) -> int:
    brute = s0_brute(args.p, args.m)
    formula = s0_formula(args.p, args.m)
    print(f"brute={brute!r} formula={formula!r} gap={abs(brute - formula):.3e}")
    return 0


def _cmd_bs(args, cfg: RunConfig) -> int:
    interval = _interval_from_args(args)
    if args.mode == "exact":
        coeffs = exact_st_coeffs(interval, args.M)
    else:
        side = CoeffMode.MAJORANT if args.mode == "major" else CoeffMode.MINORANT
        coeffs = sandwich_coeffs(interval, args.M, side)
    if args.out:
        coeffs_to_csv(coeffs, args.out)
        print(f"wrote {args.out}")
    print(f"mode={coeffs.mode.value} M={coeffs.M} Z={coeffs.z!r} const={coeffs.const_term!r} cert={coeffs.cert!r}")
    return 0


def _cmd_parseval(args, cfg: RunConfig) -> int:
    res = parseval_check(_interval_from_args(args), args.M)
    bound = 20.0 * math.log(2 * args.M) / args.M
    print(f"Z={res.z!r} mu_term={res.mu_term!r} gap={res.gap:.6e} bound={bound:.6e}")
    return 0 if res.gap <= bound else 1


def _plan_from_args(args, cfg: RunConfig, t_list=None) -> MomentPlan:
    return MomentPlan(
        x=args.x,
        A=args.A,
        B=args.B,
        interval=_interval_from_args(args),
        t_list=tuple(t_list or getattr(args, "t", None) or (1, 2)),
        M=args.M,
        profile=cfg.profile,
        c=cfg.c,
    )


def _cmd_moments(args, cfg: RunConfig) -> int:
    plan = _plan_from_args(args, cfg)
    report = family_moments(plan)
    for r in report.results:
        ratio = "n/a" if r.ratio is None else f"{r.ratio:.4f}"
        print(f"t={r.t} empirical={r.empirical!r} main={r.main_term!r} ratio={ratio}")
    if args.out:
        report.write_json(args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_clt(args, cfg: RunConfig) -> int:
    plan = _plan_from_args(args, cfg, t_list=(2,))
    sample = clt_histogram(plan, bins=args.bins)
    print(f"n={sample.size} mean={sample.mean:.4f} var={sample.variance:.4f} KS={sample.ks:.4f}")
    if args.out:
        sample.write_csv(args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_almost_all(args, cfg: RunConfig) -> int:
    plan = _plan_from_args(args, cfg, t_list=(2,))
    rep = almost_all_report(plan, args.y, cfg.profile)
    print(
        f"threshold={rep.threshold:.4f} exceptions={rep.exceptions}/{rep.total} "
        f"fraction={rep.fraction:.5f} y^-2={rep.y_power:.5f} "
        f"exponent_fit mean={rep.exponent_fit_mean:.3f} max={rep.exponent_fit_max:.3f}"
    )
    return 0


def _cmd_probe(args, cfg: RunConfig) -> int:
    if args.which == "hyp1":
        res = trace_average_probe(args.K, args.x)
        print(f"value={res.value!r} scale={res.scale!r} ratio={res.ratio!r}")
    else:
        probe: Hypothesis2Probe = hypothesis2_probe(
            CurveParams(args.a, args.b), args.m, args.y, args.x, cfg.c
        )
        print(f"value={probe.value!r} scale={probe.scale!r} ratio={probe.ratio!r}")
    return 0


def _cmd_verify(args, cfg: RunConfig) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    ok = run_suites(names)
    if args.soft:
        diag = soft_diagnostics()
        for k, v in diag.items():
            print(f"diagnostic {k} = {v}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stmoments", description=__doc__)
    parser.add_argument("--cache-dir", default=None)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--profile", choices=[p.value for p in Profile], default="unconditional")
    parser.add_argument("--c", type=float, default=1.0, help="log-power knob used in reported scalings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("primes", help="count primes in (x/2, x]")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=_cmd_primes)

    p = sub.add_parser("ap", help="trace of one curve, or a full residue grid")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--table", action="store_true")
    p.add_argument("--cache", action="store_true")
    p.set_defaults(func=_cmd_ap)

    p = sub.add_parser("hurwitz", help="class-number table")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_hurwitz)

    p = sub.add_parser("eichler-check", help="mass identity sweep")
    p.add_argument("--max-p", type=int, required=True)
    p.set_defaults(func=_cmd_eichler_check)

    p = sub.add_parser("trace", help="Hecke operator trace")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--method", choices=["miller", "birch"], default="miller")
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("birch-check", help="trace route agreement sweep")
    p.add_argument("--p-max", type=int, required=True)
    p.add_argument("--j-max", type=int, required=True)
    p.set_defaults(func=_cmd_birch_check)

    p = sub.add_parser("s0", help="grid average vs trace formula at one prime power")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=_cmd_s0)

    p = sub.add_parser("bs", help="interval coefficient sets")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "major", "minor"], default="exact")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bs)

    p = sub.add_parser("parseval", help="coefficient square sum vs mu - mu^2")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--M", type=int, required=True)
    p.set_defaults(func=_cmd_parseval)

    p = sub.add_parser("moments", help="family moments over a box")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--t", type=int, nargs="+", default=[1, 2])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("clt", help="standardized error sample and KS distance")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_clt)

    p = sub.add_parser("almost-all", help="exception counts at level y")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--y", type=float, required=True)
    p.set_defaults(func=_cmd_almost_all)

    p = sub.add_parser("probe", help="averaged-trace and prime-power-sum diagnostics")
    p.add_argument("which", choices=["hyp1", "hyp2"])
    p.add_argument("--K", type=int, default=20)
    p.add_argument("--x", type=float, default=100.0)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--y", type=float, default=0.0)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("verify", help="run exact-identity suites")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    p.add_argument("--soft", action="store_true", help="also print warn-only family diagnostics")
    p.set_defaults(func=_cmd_verify)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(
        cache_dir=args.cache_dir,
        threads=args.threads,
        profile=Profile(args.profile),
        c=args.c,
    )
    try:
        return args.func(args, cfg)
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValueError, CacheError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
