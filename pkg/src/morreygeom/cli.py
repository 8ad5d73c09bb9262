"""Command-line front end.

    morreygeom norm --d 1 --p 1 --q 2 --fn '[{"r_lo":0,"r_hi":1,"c":1,"alpha":-0.5}]'
    morreygeom quotient nj --d 1 --p 1 --q 2 --eps 1e-4
    morreygeom sweep dw --d 2 --p 1 --q 2 --eps-steps 20 --out dw.csv
    morreygeom oracle-check --d 2 --p 1 --q 3 --fn f.json --seed 7

Exit codes: 0 success, 2 validation or domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from .constants import QuotientKind, evaluate, sweep, write_csv
from .errors import DomainError, NumericalFailure, ToleranceNotMet
from .norm import Method, NormResult, centered_norm
from .oracle import offcenter_scan, oracle_norm
from .space import RadialFunction, SpaceParams

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


def _number(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(value):
        raise argparse.ArgumentTypeError("nan is not accepted")
    return value


def _global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--d", type=int, default=1, help="ambient dimension")
    parent.add_argument("--p", type=_number, default=1.0, help="integrability exponent")
    parent.add_argument("--q", type=_number, default=2.0, help="scaling exponent")
    parent.add_argument("--variant", choices=["classical", "small"], default="small")
    parent.add_argument("--format", choices=["json", "csv"], default="json")
    parent.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo paths")
    parent.add_argument("--tol", type=_number, default=1e-8, help="quadrature tolerance")
    return parent


def _space(args) -> SpaceParams:
    return SpaceParams(args.d, args.p, args.q, args.variant)


def _load_function(source: str) -> RadialFunction:
    text = source.strip()
    if not text.startswith("["):
        text = Path(source).read_text(encoding="utf-8")
    try:
        return RadialFunction.loads(text)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DomainError(f"cannot parse radial function: {exc}") from exc


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit_norm(result: NormResult, fmt: str) -> None:
    data = result.to_json()
    if fmt == "json":
        print(json.dumps(data))
    else:
        sys.stdout.write(_csv_text(list(data), [list(data.values())]))


def cmd_norm(args) -> int:
    sp = _space(args)
    f = _load_function(args.fn)
    if args.method == "oracle":
        result = oracle_norm(f, sp, args.tol)
    else:
        result = centered_norm(f, sp)
    _emit_norm(result, args.format)
    return EXIT_OK


def _method(name: str | None) -> Method | None:
    return {None: None, "closed": Method.CLOSED_FORM, "oracle": Method.QUADRATURE}[name]


def cmd_quotient(args) -> int:
    sp = _space(args)
    kind = QuotientKind(args.kind)
    if kind is QuotientKind.DW and args.delta is None:
        raise DomainError("dw needs --delta")
    report = evaluate(kind, sp, args.eps, args.delta, _method(args.method))
    if args.format == "json":
        print(json.dumps(report.to_json()))
    else:
        write_csv([report], sys.stdout)
    return EXIT_OK


def epsilon_grid(eps_from: float, eps_to: float, steps: int) -> list[float]:
    """Geometric grid of ``steps`` points from ``eps_from`` down to ``eps_to``."""
    if steps < 0:
        raise DomainError("--eps-steps must be non-negative")
    for name, value in (("--eps-from", eps_from), ("--eps-to", eps_to)):
        if not 0.0 < value < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {value}")
    if steps == 0:
        return []
    if steps == 1:
        return [eps_from]
    ratio = (eps_to / eps_from) ** (1.0 / (steps - 1))
    grid = [eps_from * ratio**i for i in range(steps)]
    grid[-1] = eps_to
    return grid


def cmd_sweep(args) -> int:
    sp = _space(args)
    kind = QuotientKind(args.kind)
    grid = epsilon_grid(args.eps_from, args.eps_to, args.eps_steps)
    deltas = None if args.delta is None else [args.delta]
    reports = sweep(kind, sp, grid, deltas, _method(args.method))
    if args.format == "json":
        payload = json.dumps([r.to_json() for r in reports], indent=1) + "\n"
    else:
        buf = io.StringIO()
        write_csv(reports, buf)
        payload = buf.getvalue()
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        summary_stream = sys.stdout
    else:
        sys.stdout.write(payload)
        summary_stream = sys.stderr
    final = f"{reports[-1].computed:.12g}" if reports else "n/a"
    print(
        f"{kind.value}: {len(reports)} rows, final computed {final}, target {kind.target:g}",
        file=summary_stream,
    )
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    sp = _space(args)
    f = _load_function(args.fn)
    closed = centered_norm(f, sp)
    quad = oracle_norm(f, sp, args.tol)
    scale = max(closed.value, 1e-300)
    rel = abs(closed.value - quad.value) / scale
    probe = offcenter_scan(f, sp, args.n_centers, args.n_samples, args.seed)
    agree = rel <= args.tol
    data = {
        "closed_form": closed.to_json(),
        "oracle": quad.to_json(),
        "relative_difference": rel,
        "agree": agree,
        "probe": {"value": probe.value, "stderr": probe.stderr, "center": probe.center, "radius": probe.radius},
    }
    if args.format == "json":
        print(json.dumps(data))
    else:
        header = ["closed_form", "oracle", "relative_difference", "agree", "probe", "probe_stderr"]
        row = [closed.value, quad.value, rel, agree, probe.value, probe.stderr]
        sys.stdout.write(_csv_text(header, [row]))
    if not agree:
        raise ToleranceNotMet(f"closed form and quadrature differ by {rel:g} (tol {args.tol:g})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parent = _global_flags()
    parser = argparse.ArgumentParser(prog="morreygeom", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", parents=[parent], help="centered norm of a radial function")
    p_norm.add_argument("--fn", required=True, help="inline JSON array of pieces, or a path to one")
    p_norm.add_argument("--method", choices=["closed", "oracle"], default="closed")
    p_norm.set_defaults(handler=cmd_norm)

    p_quot = sub.add_parser("quotient", parents=[parent], help="one witness quotient")
    p_quot.add_argument("kind", choices=[k.value for k in QuotientKind])
    p_quot.add_argument("--eps", type=_number, required=True)
    p_quot.add_argument("--delta", type=_number)
    p_quot.add_argument("--method", choices=["closed", "oracle"])
    p_quot.set_defaults(handler=cmd_quotient)

    p_sweep = sub.add_parser("sweep", parents=[parent], help="witness quotients over a geometric epsilon grid")
    p_sweep.add_argument("kind", choices=[k.value for k in QuotientKind])
    p_sweep.add_argument("--eps-from", type=_number, default=0.5)
    p_sweep.add_argument("--eps-to", type=_number, default=2.0**-20)
    p_sweep.add_argument("--eps-steps", type=int, default=20)
    p_sweep.add_argument("--delta", type=_number, help="fixed delta for dw (default: delta = epsilon)")
    p_sweep.add_argument("--method", choices=["closed", "oracle"])
    p_sweep.add_argument("--out", help="output file (default: stdout)")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_check = sub.add_parser("oracle-check", parents=[parent], help="closed form vs quadrature and off-center probe")
    p_check.add_argument("--fn", required=True)
    p_check.add_argument("--n-centers", type=int, default=16)
    p_check.add_argument("--n-samples", type=int, default=4096)
    p_check.set_defaults(handler=cmd_oracle_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (DomainError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
