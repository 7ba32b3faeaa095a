"""Command-line interface.

Data (curves, reports) go to ``--output`` or stdout; the one-line summary goes
to stderr when data are on stdout. Exit codes: 0 success, 1 usage or input
error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import io as bio
from .curve import build_bff, categorize, omega_grid
from .dep import dep_compare
from .distributions import StatFamily
from .engine import (
    Sidedness,
    TestStatistic,
    log_bf10,
    log_bf10_gprior,
    log_bf10_jzs,
    prior_for_effect,
)
from .errors import BFFError, DomainError, NumericalError, ParseError
from .meta import FIXTURES, combined_bff, ingest_studies, load_fixture
from .priors import (
    DEFAULT_NU,
    CauchyJZS,
    InverseGamma,
    InverseMoment,
    NormalG,
    Support,
    TestRow,
    nu_coverage,
    select_nu,
    smallest_nu,
)
from .sim import METHODS, SimConfig, run_sim

EXIT_USAGE = 1
EXIT_NUMERIC = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid(text: str):
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be start:stop:step") from None
    try:
        return omega_grid(start, stop, step)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _floats(text: str):
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str):
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_statistic_args(p, stat_required=True):
    p.add_argument("--family", required=True, choices=["z", "t", "chisq", "f"])
    p.add_argument("--stat", type=float, required=stat_required, help="observed statistic")
    p.add_argument("--df1", type=float, help="chi-squared df or F numerator df")
    p.add_argument("--df2", type=float, help="t df or F denominator df (default n - 1)")
    p.add_argument("--n", type=float, help="sample size")
    p.add_argument("--n1", type=float, help="first group size (two-sample rows)")
    p.add_argument("--n2", type=float, help="second group size (two-sample rows)")
    p.add_argument("--sided", default="two-sided", choices=[s.value for s in Sidedness])
    p.add_argument("--row", choices=[r.value for r in TestRow], help="calibration row (default by family)")


def _add_output_args(p):
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--output", "-o", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bff", description="Bayes factor functions for z, t, chi-squared and F statistics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bff", help="Bayes factor function of one statistic")
    _add_statistic_args(p)
    p.add_argument("--nu", type=float, default=DEFAULT_NU)
    p.add_argument("--grid", type=_grid, help="omega grid start:stop:step (default 0.01:1.0:0.005)")
    p.add_argument("--method", default="quad", choices=["quad", "series"])
    p.add_argument("--log10", action="store_true", help="show the summary on the log10 scale")
    _add_output_args(p)

    p = sub.add_parser("nu", help="choose nu from the prior coverage of medium effects")
    p.add_argument("--gamma", type=float, default=0.9)

    p = sub.add_parser("meta", help="combine correlation studies")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="CSV file of r,n rows")
    src.add_argument("--fixture", choices=sorted(FIXTURES))
    p.add_argument("--nu", type=float, default=DEFAULT_NU)
    p.add_argument("--grid", type=_grid)
    p.add_argument("--log10", action="store_true")
    _add_output_args(p)

    p = sub.add_parser("sim", help="operating characteristics by simulation")
    p.add_argument("--family", default="f", choices=["f", "chisq", "z", "t"])
    p.add_argument("--n", type=_ints, default=(50, 100, 150, 200), help="comma-separated sample sizes")
    p.add_argument("--omega", type=_floats, default=(0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6))
    p.add_argument("--methods", default=",".join(METHODS), help=f"comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scenario", default="alternative", choices=["alternative", "null"])
    p.add_argument("--nu", type=float, default=DEFAULT_NU)
    p.add_argument("--workers", type=int, help="worker processes (default $BFF_WORKERS or 1)")
    p.add_argument("--scatter", help="write per-replicate ideal/bff_max pairs to this CSV")
    _add_output_args(p)

    p = sub.add_parser("dep", help="discrepancy of two alternative priors against the null")
    _add_statistic_args(p, stat_required=False)
    p.add_argument("--prior-a", required=True, choices=["im", "ig", "normal", "jzs"])
    p.add_argument("--prior-b", required=True, choices=["im", "ig", "normal", "jzs"])
    idx = p.add_mutually_exclusive_group(required=True)
    idx.add_argument("--iqr", type=_floats, help="IQR value(s) for two-sided priors")
    idx.add_argument("--median", type=_floats, help="median value(s) for one-sided priors")
    p.add_argument("--nu", type=float, default=DEFAULT_NU)
    _add_output_args(p)

    p = sub.add_parser("bf", help="single Bayes factor for a statistic and prior")
    _add_statistic_args(p)
    p.add_argument("--prior", required=True, choices=["bff", "im", "ig", "gprior", "jzs"])
    p.add_argument("--omega", type=float, help="standardized effect (prior bff)")
    p.add_argument("--tau", type=float, help="inverse-moment tau (prior im)")
    p.add_argument("--shape", type=float, help="inverse-gamma shape (prior ig, default nu/2)")
    p.add_argument("--scale", type=float, help="inverse-gamma scale (prior ig)")
    p.add_argument("--g", type=float, help="g-prior variance")
    p.add_argument("--r", type=float, help="Cauchy scale")
    p.add_argument("--nu", type=float, default=DEFAULT_NU)
    p.add_argument("--method", default="quad", choices=["quad", "series"])
    p.add_argument("--log10", action="store_true")
    _add_output_args(p)
    return parser


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _sizes(args):
    if args.n1 is not None or args.n2 is not None:
        if args.n1 is None or args.n2 is None:
            raise UsageError("--n1 and --n2 go together")
        if args.n is not None:
            raise UsageError("give --n or --n1/--n2, not both")
        return (args.n1, args.n2)
    return args.n


def _family(args, sizes) -> StatFamily:
    total = sum(sizes) if isinstance(sizes, tuple) else sizes
    default_df = None
    if total is not None:
        default_df = total - 2 if isinstance(sizes, tuple) else total - 1
    if args.family == "z":
        return StatFamily.z()
    if args.family == "t":
        df = args.df2 if args.df2 is not None else default_df
        if df is None:
            raise UsageError("t needs --df2 or a sample size")
        return StatFamily.t(df)
    if args.df1 is None:
        raise UsageError(f"{args.family} needs --df1")
    if args.family == "chisq":
        return StatFamily.chisq(args.df1)
    df2 = args.df2 if args.df2 is not None else default_df
    if df2 is None:
        raise UsageError("f needs --df2 or a sample size")
    return StatFamily.f(args.df1, df2)


def _statistic(args) -> TestStatistic:
    sizes = _sizes(args)
    family = _family(args, sizes)
    row = args.row
    if row is None and isinstance(sizes, tuple):
        if args.family not in ("z", "t"):
            raise UsageError("--n1/--n2 apply to two-sample z and t tests")
        row = TestRow.TWO_SAMPLE_Z if args.family == "z" else TestRow.TWO_SAMPLE_T
    return TestStatistic(family, args.stat, n=sizes, sidedness=Sidedness(args.sided), row=row)


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _say(args, line: str):
    # summary on stdout only when the data went to a file
    print(line, file=sys.stdout if args.output else sys.stderr)


def _woe_text(value: float, log10: bool) -> str:
    if log10:
        return f"log10_bf10={value / math.log(10):.4f}"
    return f"log_bf10={value:.4f}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_bff(args):
    stat = _statistic(args)
    curve = build_bff(stat, args.nu, args.grid, method=args.method)
    _emit(args, bio.dump_curve(curve, args.format))
    _say(
        args,
        f"omega_min={curve.omega_min:.4f} max_omega={curve.max_omega:.4f} "
        f"max_{_woe_text(curve.max_log_bf10, args.log10)} evidence={curve.band.label}",
    )
    if curve.failures:
        _say(args, f"warning: {len(curve.failures)} grid points failed")


def cmd_nu(args):
    if not 0 < args.gamma < 1:
        raise UsageError("--gamma must lie in (0, 1)")
    root = select_nu(args.gamma)
    least = smallest_nu(args.gamma)
    print(
        f"nu={root!r} rounded={max(round(root), 1)} smallest_integer={least} "
        f"coverage_at_smallest={nu_coverage(least)!r}"
    )


def cmd_meta(args):
    studies = load_fixture(args.fixture) if args.fixture else ingest_studies(args.input)
    if not studies:
        raise UsageError("no studies in input")
    result = combined_bff(studies, args.nu, args.grid)
    _emit(args, bio.dump_meta(result, args.format))
    c = result.combined
    for i, cur in enumerate(result.per_study, start=1):
        _say(args, f"study {i}: omega_min={cur.omega_min:.4f} max_{_woe_text(cur.max_log_bf10, args.log10)} "
             f"evidence={cur.band.label}")
    _say(
        args,
        f"combined: total_n={result.total_n} omega_min={c.omega_min:.4f} max_omega={c.max_omega:.4f} "
        f"max_{_woe_text(c.max_log_bf10, args.log10)} evidence={c.band.label}",
    )


def cmd_sim(args):
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    cfg = SimConfig(
        family=args.family,
        n_values=args.n,
        omegas=args.omega,
        replicates=args.reps,
        methods=methods,
        seed=args.seed,
        scenario=args.scenario,
        nu=args.nu,
        scatter=args.scatter is not None,
    )
    report = run_sim(cfg, workers=args.workers)
    _emit(args, bio.dump_sim(report, args.format))
    if args.scatter:
        with open(args.scatter, "w", encoding="utf-8", newline="") as fh:
            fh.write(bio.dump_scatter(report))
    for r in report.rows:
        _say(args, f"{r.method} n={r.n} omega={r.omega:g}: mean_woe={r.mean_woe:.4f} se={r.se:.4f}")


def _dep_prior(kind, support, nu):
    if kind == "im":
        return InverseMoment(1.0, nu, support)
    if kind == "ig":
        return InverseGamma(nu / 2, 1.0)
    if kind == "normal":
        return NormalG(1.0, support)
    return CauchyJZS(1.0, support)


def cmd_dep(args):
    sizes = _sizes(args)
    family = _family(args, sizes)
    support = Sidedness(args.sided).support
    if args.iqr is not None and support is not Support.TWO_SIDED:
        raise UsageError("--iqr needs two-sided priors; use --median with --sided greater/less")
    if args.median is not None and support is Support.TWO_SIDED and not family.nonneg:
        raise UsageError("--median needs one-sided priors; use --iqr or --sided greater/less")
    values = args.iqr if args.iqr is not None else args.median
    prior_a = _dep_prior(args.prior_a, support, args.nu)
    prior_b = _dep_prior(args.prior_b, support, args.nu)
    # degrees of freedom already follow from --df2 or the sample size
    rows = []
    for v in values:
        a, b = dep_compare(family, prior_a, prior_b, v)
        rows.append((v, a, b))
    name = "iqr" if args.iqr is not None else "median"
    if args.format == "json":
        data = [{"index": name, "value": v, "dep_null_vs_a": a, "dep_null_vs_b": b} for v, a, b in rows]
        _emit(args, json.dumps({"prior_a": args.prior_a, "prior_b": args.prior_b, "rows": data}, indent=2) + "\n")
    else:
        _emit(args, bio.write_table(["index_value", "dep_null_vs_a", "dep_null_vs_b"], rows))
    for v, a, b in rows:
        _say(args, f"{name}={v:g}: dep_null_vs_{args.prior_a}={a:.6f} dep_null_vs_{args.prior_b}={b:.6f}")


def _need(value, flag):
    if value is None:
        raise UsageError(f"this prior needs {flag}")
    return value


def compute_bf(args) -> float:
    stat = _statistic(args)
    support = stat.sidedness.support
    if args.prior == "bff":
        return log_bf10(stat, prior_for_effect(stat, _need(args.omega, "--omega"), args.nu), args.method)
    if args.prior == "im":
        return log_bf10(stat, InverseMoment(_need(args.tau, "--tau"), args.nu, support), args.method)
    if args.prior == "ig":
        shape = args.shape if args.shape is not None else args.nu / 2
        return log_bf10(stat, InverseGamma(shape, _need(args.scale, "--scale")), args.method)
    if args.prior == "gprior":
        return log_bf10_gprior(stat, _need(args.g, "--g"), args.method)
    return log_bf10_jzs(stat, _need(args.r, "--r"), args.method)


def cmd_bf(args):
    woe = compute_bf(args)
    stat = _statistic(args)
    band = categorize(woe).label
    if args.format == "json":
        text = json.dumps(
            {"family": str(stat.family), "statistic": stat.value, "prior": args.prior, "log_bf10": woe, "evidence": band},
            indent=2,
        ) + "\n"
    else:
        text = bio.write_table(["family", "statistic", "prior", "log_bf10", "evidence"],
                               [(str(stat.family), stat.value, args.prior, woe, band)])
    _emit(args, text)
    _say(args, f"{_woe_text(woe, args.log10)} evidence={band}")


COMMANDS = {"bff": cmd_bff, "nu": cmd_nu, "meta": cmd_meta, "sim": cmd_sim, "dep": cmd_dep, "bf": cmd_bf}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"bff {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ParseError) as exc:
        print(f"bff {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"bff {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BFFError as exc:
        print(f"bff {args.command}: failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"bff {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
