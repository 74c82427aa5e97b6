"""Command-line front end.

Exit status: 0 success, 1 a verification failed, 2 bad usage or parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import checks, dense, exponents, numeric, sieve
from .exponents import InvalidPairError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# Column order for every CSV this tool writes.
SCHEMAS: dict[str, tuple[str, ...]] = {
    "bounds-table": ("a_lo", "a_hi", "slope", "intercept", "source", "needs_eps"),
    "bounds-best": ("a", "value", "value_decimal", "source", "needs_eps"),
    "pairs-apply": ("label", "k", "l", "k_decimal", "l_decimal", "needs_eps",
                    "b_intercept", "b_slope"),
    "sieve-psi": ("x", "y", "z", "count", "threshold", "ratio"),
    "sieve-interval": ("x", "y", "z", "count", "threshold", "ratio"),
    "sum-report": ("kind", "x", "y", "z", "n", "u", "value", "bound", "ratio"),
    "scan-cor5": ("x", "interval_lo", "count_A", "threshold", "pass"),
    "verify": ("suite", "name", "anchor", "expected", "actual", "passed"),
    "figure1": ("a", "envelope", "cor2_f", "one_minus_a", "half_one_minus_a"),
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # one-line diagnostic, exit 2
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def rational_arg(text: str) -> Fraction:
    try:
        return numeric.to_rational(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


_SQRT = re.compile(r"sqrt\((\d+)\)")


def real_arg(text: str) -> sieve.Real:
    """A rational, a decimal, or ``sqrt(N)``."""
    match = _SQRT.fullmatch(text.strip())
    if match:
        return sieve.Sqrt(int(match.group(1)))
    value = rational_arg(text)
    return int(value) if value.denominator == 1 else value


def int_arg(text: str) -> int:
    try:
        value = numeric.to_rational(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value.denominator != 1:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def seed_arg(text: str) -> exponents.ExponentPair:
    text = text.strip().lower()
    if text in ("bourgain", "trivial", "conjecture"):
        return exponents.seed_pair(text.upper())
    match = re.fullmatch(r"hb:(\d+)", text)
    if match:
        try:
            return exponents.heath_brown_pair(int(match.group(1)))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    raise argparse.ArgumentTypeError(f"seed must be bourgain, trivial or hb:<m>, got {text!r}")


def fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(command: str, rows: Iterable[dict], out: io.TextIOBase) -> None:
    writer = csv.DictWriter(out, fieldnames=SCHEMAS[command], lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: fmt(v) for k, v in row.items()})


def write_json(payload: Any, out: io.TextIOBase) -> None:
    json.dump(payload, out, indent=2, sort_keys=True, default=fmt)
    out.write("\n")


def emit(args: argparse.Namespace, command: str, rows: list[dict],
         summary: dict | None = None) -> None:
    buf = io.StringIO()
    if args.format == "json":
        payload = dict(summary or {})
        payload["rows"] = [{k: fmt(v) for k, v in row.items()} for row in rows]
        write_json(payload, buf)
    else:
        write_rows(command, rows, buf)
    if args.output in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(args.output).write_text(buf.getvalue())


# --- commands -------------------------------------------------------------

def _catalog(args: argparse.Namespace) -> list[exponents.ExponentPair]:
    return exponents.build_catalog(args.max_word_len, args.max_hb, conjecture=args.conjecture)


def _theta(args: argparse.Namespace) -> Fraction | None:
    if args.no_theta:
        return None
    return exponents.THETA_HUXLEY if args.huxley else args.theta


def cmd_bounds_table(args: argparse.Namespace) -> int:
    env = exponents.envelope(_catalog(args), _theta(args))
    rows = [{"a_lo": s.a_lo, "a_hi": s.a_hi, "slope": s.line.slope,
             "intercept": s.line.intercept, "source": s.line.label,
             "needs_eps": s.line.needs_eps} for s in env.segments]
    emit(args, "bounds-table", rows, {"theta": fmt(env.theta)})
    return EXIT_OK


def cmd_bounds_best(args: argparse.Namespace) -> int:
    value, line = exponents.best_bound(args.a, _catalog(args), _theta(args))
    rows = [{"a": args.a, "value": value, "value_decimal": float(value),
             "source": line.label, "needs_eps": line.needs_eps}]
    emit(args, "bounds-best", rows)
    return EXIT_OK


def cmd_pairs_apply(args: argparse.Namespace) -> int:
    try:
        pair = exponents.apply_word(args.word, args.seed)
    except InvalidPairError as exc:
        print(f"smoothgaps: {exc}", file=sys.stderr)
        return EXIT_FAIL
    line = exponents.LinearBound.from_pair(pair)
    rows = [{"label": pair.label, "k": pair.k, "l": pair.l, "k_decimal": float(pair.k),
             "l_decimal": float(pair.l), "needs_eps": pair.needs_eps,
             "b_intercept": line.intercept, "b_slope": line.slope}]
    emit(args, "pairs-apply", rows)
    return EXIT_OK


def cmd_sieve_psi(args: argparse.Namespace) -> int:
    rows = []
    for x in args.x:
        count = sieve.psi_count(x, args.y, workers=args.workers).count
        rows.append({"x": x, "y": args.y, "z": None, "count": count,
                     "threshold": None, "ratio": None})
    emit(args, "sieve-psi", rows)
    return EXIT_OK


def cmd_sieve_interval(args: argparse.Namespace) -> int:
    nu, _ = numeric.minimize_nu()
    rows = []
    for x in args.x:
        count = sieve.interval_smooth_count(x, args.z, args.y, workers=args.workers)
        threshold = float(args.z) / math.log(x) ** nu if x > 1 else None
        rows.append({"x": x, "y": args.y, "z": args.z, "count": count, "threshold": threshold,
                     "ratio": count / threshold if threshold else None})
    emit(args, "sieve-interval", rows)
    return EXIT_OK


def cmd_sum_report(args: argparse.Namespace) -> int:
    base = dict.fromkeys(SCHEMAS["sum-report"])
    if args.kind == "psi":
        if args.n is None:
            raise UsageError("--n is required for --kind psi")
        r = sieve.psi_sum(args.x, args.n, args.pair, args.theta)
        row = {**base, "kind": "psi", "x": args.x, "n": args.n, "value": float(r.value),
               "bound": r.bound, "ratio": r.ratio}
    elif args.kind == "s":
        if args.y is None or args.z is None:
            raise UsageError("--y and --z are required for --kind s")
        r = sieve.s_sum(args.x, args.y, args.z)
        if not r.agree:
            print(f"smoothgaps: S direct {r.direct} != floor form {r.floor_form}", file=sys.stderr)
            return EXIT_FAIL
        row = {**base, "kind": "s", "x": args.x, "y": args.y, "z": args.z, "value": r.direct,
               "bound": float(args.z) / 4, "ratio": r.direct / (float(args.z) / 4)}
    else:
        if args.z is None or args.u is None:
            raise UsageError("--z and --u are required for --kind tau")
        z = int(args.z) if not isinstance(args.z, sieve.Sqrt) else math.floor(args.z)
        r = sieve.tau_moment(args.x, z, args.u)
        row = {**base, "kind": "tau", "x": args.x, "z": z, "u": args.u, "value": r.total,
               "bound": z * math.log(args.x) ** (2**args.u - 1), "ratio": r.ratio}
    emit(args, "sum-report", [row])
    return EXIT_OK


def read_checkpoint(path: Path) -> int | None:
    if not path.exists():
        return None
    match = re.fullmatch(r"last_x=(\d+)", path.read_text().strip())
    if not match:
        raise UsageError(f"malformed checkpoint file {path}")
    return int(match.group(1))


def cmd_scan_cor5(args: argparse.Namespace) -> int:
    x_lo = args.x_lo
    checkpoint = Path(args.checkpoint) if args.checkpoint else None
    if checkpoint and args.resume:
        last = read_checkpoint(checkpoint)
        if last is not None:
            x_lo = last + 1
    if x_lo > args.x_hi:
        emit(args, "scan-cor5", [], {"range": [x_lo, args.x_hi], "failures": [],
                                     "largest_failure": None})
        return EXIT_OK

    def save(last_x: int) -> None:
        if checkpoint:
            checkpoint.write_text(f"last_x={last_x}\n")

    scan, rows = dense.scan_cor5(x_lo, args.x_hi, args.exponent, args.log_power,
                                 on_block=save, keep_all=args.all_rows)
    chosen = rows if args.all_rows else scan.failures
    out = [{"x": r.x, "interval_lo": r.interval_lo, "count_A": r.count_A,
            "threshold": r.threshold, "pass": r.passed} for r in chosen]
    emit(args, "scan-cor5", out, scan.summary())
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = checks.run_suite(args.suite, fl_limit=args.fl_limit, scan_limit=args.scan_limit,
                               subset_limit=args.subset_limit)
    rows = [{k: v for k, v in c.as_dict().items() if k != "seconds"} for c in results]
    failed = [c for c in results if not c.passed]
    emit(args, "verify", rows, {"suite": args.suite, "passed": not failed,
                                "failed": [f"{c.suite}/{c.name}" for c in failed]})
    for c in failed:
        print(c.line(), file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_figure1(args: argparse.Namespace) -> int:
    env = exponents.envelope(_catalog(args), _theta(args))
    conv = (lambda v: v) if args.exact else float
    rows = [{"a": conv(a), "envelope": conv(e), "cor2_f": conv(f), "one_minus_a": conv(t),
             "half_one_minus_a": conv(h)} for a, e, f, t, h in exponents.figure1_data(args.step, env)]
    emit(args, "figure1", rows)
    return EXIT_OK


# --- parser ---------------------------------------------------------------

def _positive(value: int, name: str) -> int:
    if value < 1:
        raise UsageError(f"{name} must be >= 1")
    return value


def build_parser() -> Parser:
    parser = Parser(prog="smoothgaps", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    def add(name: str, fn, help: str) -> Parser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=fn)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", help="file path, '-' for stdout")
        return p

    def catalog_opts(p: Parser) -> None:
        p.add_argument("--theta", type=rational_arg, default=exponents.THETA_BOURGAIN_WATT)
        p.add_argument("--huxley", action="store_true", help="use theta = 131/416")
        p.add_argument("--no-theta", action="store_true", help="drop the flat theta cap")
        p.add_argument("--max-word-len", type=int_arg, default=exponents.DEFAULT_WORD_LEN)
        p.add_argument("--max-hb", type=int_arg, default=exponents.DEFAULT_MAX_HB)
        p.add_argument("--conjecture", action="store_true",
                       help="include the conjectural pair (eps, 1/2 + eps)")

    p = add("bounds-table", cmd_bounds_table, "lower envelope of admissible b over [1/2, 1]")
    catalog_opts(p)
    p = add("bounds-best", cmd_bounds_best, "best b at one a")
    p.add_argument("--a", type=rational_arg, required=True)
    catalog_opts(p)
    p = add("pairs-apply", cmd_pairs_apply, "apply an A/B word to a seed pair")
    p.add_argument("--word", default="")
    p.add_argument("--seed", type=seed_arg, default=exponents.bourgain_pair())
    p = add("sieve-psi", cmd_sieve_psi, "Psi(x, y)")
    p.add_argument("--x", type=int_arg, nargs="+", required=True)
    p.add_argument("--y", type=real_arg, required=True)
    p.add_argument("--workers", type=int_arg)
    p = add("sieve-interval", cmd_sieve_interval, "y-smooth count in (x - z, x]")
    p.add_argument("--x", type=int_arg, nargs="+", required=True)
    p.add_argument("--z", type=real_arg, required=True)
    p.add_argument("--y", type=real_arg, required=True)
    p.add_argument("--workers", type=int_arg)
    p = add("sum-report", cmd_sum_report, "sawtooth sum, divisor double count, tau moments")
    p.add_argument("--kind", choices=("psi", "s", "tau"), required=True)
    p.add_argument("--x", type=int_arg, required=True)
    p.add_argument("--n", type=int_arg)
    p.add_argument("--y", type=real_arg)
    p.add_argument("--z", type=real_arg)
    p.add_argument("--u", type=float)
    p.add_argument("--pair", type=seed_arg, help="exponent pair for the psi bound")
    p.add_argument("--theta", type=rational_arg, default=exponents.THETA_BOURGAIN_WATT)
    p = add("scan-cor5", cmd_scan_cor5, "members of A in [x - x^e, x]")
    p.add_argument("--x-lo", type=int_arg, default=3)
    p.add_argument("--x-hi", type=int_arg, default=10**6)
    p.add_argument("--exponent", type=rational_arg, default=dense.COR5_EXPONENT)
    p.add_argument("--log-power", type=float, default=dense.COR5_LOG_POWER)
    p.add_argument("--all-rows", action="store_true", help="emit every x, not only failures")
    p.add_argument("--checkpoint", help="resume file, rewritten every 10^6 integers")
    p.add_argument("--resume", action="store_true")
    p = add("verify", cmd_verify, "run verification batteries")
    p.add_argument("--suite", choices=checks.SUITES + ("all",), default="all")
    p.add_argument("--fl-limit", type=int_arg, default=10**6)
    p.add_argument("--scan-limit", type=int_arg, default=10**6)
    p.add_argument("--subset-limit", type=int_arg, default=10**6)
    p = add("figure1", cmd_figure1, "curve data for the admissible-b plot")
    p.add_argument("--step", type=rational_arg, default=Fraction(1, 100))
    p.add_argument("--exact", action="store_true", help="write fractions instead of decimals")
    catalog_opts(p)
    return parser


def _validate(args: argparse.Namespace) -> None:
    if args.command == "verify":
        for name in ("fl_limit", "scan_limit", "subset_limit"):
            _positive(getattr(args, name), name.replace("_", "-"))
    if args.command == "scan-cor5" and not 3 <= args.x_lo <= args.x_hi:
        raise UsageError("need 3 <= --x-lo <= --x-hi")
    if args.command in ("bounds-table", "bounds-best", "figure1"):
        if args.max_word_len < 0 or args.max_hb < 2:
            raise UsageError("--max-word-len must be >= 0 and --max-hb >= 2")
    if args.command == "figure1" and args.step <= 0:
        raise UsageError("--step must be positive")
    if getattr(args, "workers", None) is not None:
        _positive(args.workers, "--workers")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        return args.func(args)
    except dense.VerificationError as exc:
        print(f"smoothgaps: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"smoothgaps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
