"""Command-line interface: ``verify``, ``takagi`` and ``suite``.

Exit codes: 0 pass, 1 verification failure, 2 input error,
3 environment or capability error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from svtakagi.exactgeom import CapabilityError, DimensionError, parse_rational
from svtakagi.scenario import ScenarioError, builtin_scenarios, load_scenario, report_text, run_scenario
from svtakagi.svmap import NonConvexValueError
from svtakagi.takagi import Dyadic, InexactError, takagi_alpha, takagi_alpha_dyadic

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_ENV = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"svtakagi: {msg}", file=sys.stderr)


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def cmd_verify(scenario_path, out_path, slack=None, depth: int | None = None) -> int:
    try:
        sc = load_scenario(scenario_path)
    except OSError as exc:
        _err(f"cannot read scenario: {exc}")
        return EXIT_INPUT
    except (DimensionError, CapabilityError) as exc:
        _err(str(exc))
        return EXIT_ENV
    except (ValueError, KeyError, TypeError) as exc:
        _err(f"bad scenario: {exc}")
        return EXIT_INPUT
    try:
        report = run_scenario(sc, slack=slack, depth=depth)
    except (DimensionError, CapabilityError, NonConvexValueError) as exc:
        _err(str(exc))
        return EXIT_ENV
    except (ScenarioError, ValueError) as exc:
        _err(f"bad scenario: {exc}")
        return EXIT_INPUT
    try:
        _write(Path(out_path), report_text(report))
    except OSError as exc:
        _err(f"cannot write report: {exc}")
        return EXIT_ENV
    s = report.summary()
    print(f"{sc.id}: pass={s['pass']} fail={s['fail']} skipped={s['skipped']}")
    return EXIT_OK if report.ok else EXIT_FAIL


def _cell(q: Fraction) -> str:
    scaled = round(q * 10**12)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**12)
    return f"{q.numerator}/{q.denominator} ({sign}{whole}.{frac:012d})"


def takagi_rows(alpha: Fraction, t_min: Fraction, t_max: Fraction, steps: int, tail: Fraction):
    """``(t, lower, upper)`` on the uniform grid; exact at dyadic ``t`` when possible."""
    exact_alpha = alpha in (1, 2)
    rows = []
    for i in range(steps):
        t = t_min + (t_max - t_min) * Fraction(i, steps - 1)
        if exact_alpha and t.denominator & (t.denominator - 1) == 0:
            v = takagi_alpha_dyadic(Dyadic.from_fraction(t), int(alpha))
            rows.append((t, v, v))
        else:
            b = takagi_alpha(t, alpha, tail)
            rows.append((t, b.lower, b.upper))
    return rows


def cmd_takagi(alpha, t_min, t_max, steps: int, tail_bound, out_path) -> int:
    try:
        alpha, t_min, t_max, tail = (parse_rational(v) for v in (alpha, t_min, t_max, tail_bound))
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    if steps < 2 or t_min > t_max or tail <= 0 or alpha <= 0:
        _err("need steps >= 2, t_min <= t_max, tail > 0 and alpha > 0")
        return EXIT_INPUT
    if alpha not in (1, 2):
        _err(f"alpha {alpha} has no exact mode; emitting interval enclosures")
    try:
        rows = takagi_rows(alpha, t_min, t_max, steps, tail)
    except (InexactError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    try:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "value_lower", "value_upper"])
            for row in rows:
                w.writerow([_cell(v) for v in row])
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return EXIT_ENV
    return EXIT_OK


def cmd_suite(out_dir) -> int:
    out = Path(out_dir)
    if not out.parent.is_dir():
        _err(f"parent of {out} does not exist")
        return EXIT_ENV
    try:
        out.mkdir(exist_ok=True)
    except OSError as exc:
        _err(f"cannot create {out}: {exc}")
        return EXIT_ENV
    index = []
    failed = False
    for sc in builtin_scenarios():
        try:
            report = run_scenario(sc)
        except (DimensionError, CapabilityError) as exc:
            _err(f"{sc.id}: {exc}")
            return EXIT_ENV
        name = f"{sc.id}.json"
        _write(out / name, report_text(report))
        s = report.summary()
        index.append({"id": sc.id, "report": name, "pass": s["pass"], "fail": s["fail"], "skipped": s["skipped"]})
        failed |= not report.ok
        print(f"{sc.id}: pass={s['pass']} fail={s['fail']} skipped={s['skipped']}")
    _write(out / "index.json", json.dumps({"scenarios": index}, indent=1) + "\n")
    return EXIT_FAIL if failed else EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _err(message)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="svtakagi", description="Exact Takagi-type checks for set-valued maps.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run one scenario and write a JSON report")
    v.add_argument("--scenario", required=True)
    v.add_argument("--out", required=True)
    v.add_argument("--slack", default=None, help="slack box radius, a rational like 1/8")
    v.add_argument("--depth", type=int, default=None, help="largest dyadic exponent m")

    t = sub.add_parser("takagi", help="tabulate T_alpha as CSV")
    t.add_argument("--alpha", required=True)
    t.add_argument("--from", dest="t_min", required=True)
    t.add_argument("--to", dest="t_max", required=True)
    t.add_argument("--steps", type=int, required=True)
    t.add_argument("--tail", default="1/1099511627776", help="tail bound for non-dyadic points (default 2^-40)")
    t.add_argument("--out", required=True)

    s = sub.add_parser("suite", help="run every built-in scenario")
    s.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        try:
            slack = None if args.slack is None else parse_rational(args.slack)
        except ValueError as exc:
            _err(str(exc))
            return EXIT_INPUT
        if (slack is not None and slack < 0) or (args.depth is not None and args.depth < 0):
            _err("slack and depth must be nonnegative")
            return EXIT_INPUT
        return cmd_verify(args.scenario, args.out, slack, args.depth)
    if args.command == "takagi":
        return cmd_takagi(args.alpha, args.t_min, args.t_max, args.steps, args.tail, args.out)
    return cmd_suite(args.out)


if __name__ == "__main__":
    sys.exit(main())
