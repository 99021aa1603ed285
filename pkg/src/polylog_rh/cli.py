"""Command-line front end.

Exit codes: 0 pass, 1 acceptance failure, 2 usage error, 3 domain error,
4 reconstruction aborted on the Liouville-defect ceiling.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass
from typing import Any, Sequence

from . import inversion, rh_engine, specialfn
from .domain import DomainError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_CEILING = 0, 1, 2, 3, 4

_UNUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    rf"^(?:(?P<re>[+-]?{_UNUM}(?=[+-]))?(?P<im>[+-]?(?:{_UNUM})?)i|(?P<real>[+-]?{_UNUM}))$"
)

EVAL_COLUMNS = ("function", "k", "z", "value_re", "value_im", "est_error")
ZETA_COLUMNS = ("function", "k", "value", "est_error")
INVERSION_COLUMNS = (
    "record", "k", "z", "lhs_re", "lhs_im", "residual_re", "residual_im", "abs_residual",
    "error", "max_abs_residual", "threshold", "passed",
)
RECONSTRUCT_COLUMNS = (
    "record", "k", "mode", "c_plus_re", "c_plus_im", "c_minus_re", "c_minus_im",
    "liouville_defect", "max_error_plus", "max_error_minus", "quadrature_error_estimate",
    "tail_estimate", "max_sample_error", "threshold", "passed",
)


class UsageError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Parse decimal literals such as "0.5", "-2i", "0.3+0.5i", "1 - 2.5e-3 i"."""
    m = _COMPLEX.match("".join(text.split()))
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r} (expected a+bi)")
    if m.group("real") is not None:
        return complex(float(m.group("real")), 0.0)
    im = m.group("im")
    im_part = float(im + "1") if im in ("", "+", "-") else float(im)
    return complex(float(m.group("re") or 0.0), im_part)


def _range(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("grid ranges need min <= max and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def parse_grid(text: str) -> list[complex]:
    """Parse "re_min:re_max:re_step,im_min:im_max:im_step" into a row-major grid."""
    try:
        re_spec, im_spec = text.split(",")
        re_vals = _range(*(float(x) for x in re_spec.split(":", 2)))
        im_vals = _range(*(float(x) for x in im_spec.split(":", 2)))
    except argparse.ArgumentTypeError:
        raise
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(
            f"cannot parse grid {text!r} (expected re_min:re_max:re_step,im_min:im_max:im_step)"
        ) from None
    return [complex(x, y) for x in re_vals for y in im_vals]


# --- formatting ------------------------------------------------------------


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0


def fmt_complex(z: complex) -> str:
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{fmt_float(z.real)}{sign}{fmt_float(abs(z.imag))}i"


def _json_value(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt_float(v) if math.isfinite(v) else "null"
    text = str(v).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{text}"'


def to_json(records: Sequence[dict]) -> str:
    rows = []
    for rec in records:
        body = ", ".join(f'"{k}": {_json_value(v)}' for k, v in rec.items())
        rows.append("  {" + body + "}")
    return "[\n" + ",\n".join(rows) + "\n]\n"


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    text = str(v)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def to_csv(records: Sequence[dict], columns: Sequence[str]) -> str:
    lines = [",".join(columns)]
    for rec in records:
        lines.append(",".join(_csv_cell(rec.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


@dataclass
class Output:
    records: list[dict]
    columns: tuple[str, ...]
    status: int = EXIT_OK


def _emit(out: Output, args: argparse.Namespace) -> None:
    text = to_json(out.records) if args.format == "json" else to_csv(out.records, out.columns)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- commands --------------------------------------------------------------


def cmd_eval(args: argparse.Namespace) -> Output:
    records = []
    for z in args.z:
        if args.fn == "li":
            value, err = specialfn.li_with_error(args.k, z)
        elif args.fn == "li1":
            value, err = specialfn.li_with_error(1, z)
        else:
            value, err = specialfn.li21n_with_error(args.k, z)
        records.append(
            {
                "function": args.fn,
                "k": 1 if args.fn == "li1" else args.k,
                "z": fmt_complex(z),
                "value_re": float(value.real),
                "value_im": float(value.imag),
                "est_error": float(err),
            }
        )
    return Output(records, EVAL_COLUMNS)


def cmd_zeta(args: argparse.Namespace) -> Output:
    records = []
    for k in args.k:
        if k < 2:
            raise UsageError("zeta(k) needs k >= 2")
        # the Euler-Maclaurin remainder after the last Bernoulli term is far
        # below double precision, so rounding dominates
        records.append({"function": "zeta", "k": k, "value": specialfn.zeta(k), "est_error": 2.2e-16 * 2})
    return Output(records, ZETA_COLUMNS)


def cmd_verify_inversion(args: argparse.Namespace) -> Output:
    if args.k_max < 2:
        raise UsageError("--k-max must be >= 2")
    grid = args.grid if args.grid is not None else inversion.default_grid()
    results = inversion.residual_grid(args.k_max, grid)
    records = []
    for r in results:
        rec: dict = {"record": "point", "k": r.k, "z": fmt_complex(r.z)}
        if r.ok:
            rec.update(
                lhs_re=r.lhs.real, lhs_im=r.lhs.imag, residual_re=r.residual.real,
                residual_im=r.residual.imag, abs_residual=abs(r.residual),
            )
        else:
            rec["error"] = r.error
        records.append(rec)
    worst = inversion.max_abs_residual(results)
    evaluated = any(r.ok for r in results)
    passed = evaluated and worst <= args.threshold
    records.append(
        {"record": "summary", "max_abs_residual": worst, "threshold": args.threshold, "passed": passed}
    )
    return Output(records, INVERSION_COLUMNS, EXIT_OK if passed else EXIT_FAIL)


def _level_record(rep: rh_engine.ReconstructionReport) -> dict:
    return {
        "record": "level",
        "k": rep.k,
        "mode": rep.mode,
        "c_plus_re": complex(rep.c_plus).real,
        "c_plus_im": complex(rep.c_plus).imag,
        "c_minus_re": complex(rep.c_minus).real,
        "c_minus_im": complex(rep.c_minus).imag,
        "liouville_defect": rep.liouville_defect,
        "max_error_plus": rep.max_error_plus,
        "max_error_minus": rep.max_error_minus,
        "quadrature_error_estimate": rep.quadrature_error_estimate,
        "tail_estimate": rep.tail_estimate,
        "max_sample_error": rep.max_sample_error,
    }


def cmd_reconstruct(args: argparse.Namespace) -> Output:
    if args.k_max < 2:
        raise UsageError("--k-max must be >= 2")
    if not args.a < args.b:
        raise UsageError("contour abscissas must satisfy a < b")
    try:
        left = rh_engine.ContourSpec(args.a, u_max=args.u_max, nodes=args.nodes)
        right = rh_engine.ContourSpec(args.b, u_max=args.u_max, nodes=args.nodes)
    except rh_engine.ContourError as exc:
        raise UsageError(str(exc)) from None
    status = EXIT_OK
    try:
        reports = rh_engine.reconstruct_all(args.k_max, (left, right), mode=args.mode, ceiling=args.ceiling)
    except rh_engine.LiouvilleCeilingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        reports, status = exc.reports, EXIT_CEILING
    records = [_level_record(r) for r in reports]
    worst = max((r.max_sample_error for r in reports), default=0.0)
    passed = status == EXIT_OK and worst <= args.threshold
    if status == EXIT_OK and not passed:
        status = EXIT_FAIL
    records.append(
        {"record": "summary", "k": args.k_max, "mode": args.mode, "max_sample_error": worst,
         "threshold": args.threshold, "passed": passed}
    )
    return Output(records, RECONSTRUCT_COLUMNS, status)


# --- parser ----------------------------------------------------------------


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polylog-rh",
        description=(
            "Polylogarithms, zeta values, the inversion identity and the recursive "
            "Riemann-Hilbert reconstruction of Li_k."
        ),
        epilog=(
            "Exit codes: 0 pass, 1 acceptance failure, 2 usage error, 3 domain error, "
            "4 Liouville-defect ceiling. Environment: POLYLOG_RH_THREADS caps worker threads."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format (default json)")
    common.add_argument("--out", default=None, help="output file (default standard output)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "eval", parents=[common], help="evaluate Li_k, Li_1 or Li_{2,1,...,1}",
        description="CSV columns: " + ", ".join(EVAL_COLUMNS),
    )
    p.add_argument("--fn", choices=("li", "li21n", "li1"), default="li")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--z", type=parse_complex, nargs="+", required=True, help='points written as "a+bi"')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser(
        "zeta", parents=[common], help="zeta(k) for integers k >= 2",
        description="CSV columns: " + ", ".join(ZETA_COLUMNS),
    )
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser(
        "verify-inversion", parents=[common], help="inversion-identity residuals over a strip grid",
        description="CSV columns: " + ", ".join(INVERSION_COLUMNS),
    )
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument(
        "--grid", type=parse_grid, default=None,
        help='"re_min:re_max:re_step,im_min:im_max:im_step" (default 0.1:0.9:0.1,-2:2:0.5)',
    )
    p.add_argument("--threshold", type=_positive_float, default=1e-9)
    p.set_defaults(func=cmd_verify_inversion)

    p = sub.add_parser(
        "reconstruct", parents=[common], help="recursive Riemann-Hilbert reconstruction of Li_k",
        description="CSV columns: " + ", ".join(RECONSTRUCT_COLUMNS),
    )
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--a", type=float, default=rh_engine.DEFAULT_LEFT.abscissa)
    p.add_argument("--b", type=float, default=rh_engine.DEFAULT_RIGHT.abscissa)
    p.add_argument("--u-max", type=float, default=rh_engine.DEFAULT_LEFT.u_max)
    p.add_argument("--nodes", type=int, default=rh_engine.DEFAULT_LEFT.nodes)
    p.add_argument("--mode", choices=[m.value for m in rh_engine.Mode], default=rh_engine.Mode.PURE_RECURSIVE.value)
    p.add_argument("--threshold", type=_positive_float, default=1e-5)
    p.add_argument("--ceiling", type=_positive_float, default=1e-4, help="abort when a Liouville defect exceeds this")
    p.set_defaults(func=cmd_reconstruct)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(out, args)
    return out.status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
