"""Geometric-constant quotients and the radial witness families that drive them.

The two-point quotients (von Neumann-Jordan, James, Dunkl-Williams) and the
octahedral sign-pattern minimum are evaluated for concrete functions.  The
witness families push them to their extremal values 2, 2, 4 and 3 as
``epsilon`` (and ``delta``) shrink; ``witness_bound`` gives the exact
finite-``epsilon`` value each family attains (or, for the octahedral case,
is guaranteed to exceed).
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence, TextIO

from .errors import DomainError, IdenticalInputs, ZeroVector
from .norm import Method, centered_norm
from .oracle import oracle_norm
from .space import (
    INF,
    LinearCombination,
    RadialFunction,
    SpaceParams,
    Variant,
    combine,
    exponent_compatible,
    scale,
)

Profile = RadialFunction | LinearCombination

DEFAULT_ORACLE_TOL = 1e-10
# ||x - y|| below this fraction of ||x|| + ||y|| counts as x == y
IDENTICAL_RTOL = 1e-13


class QuotientKind(str, enum.Enum):
    NJ = "nj"
    JAMES = "james"
    DW = "dw"
    OCTAHEDRAL = "octa"

    @property
    def target(self) -> float:
        return {"nj": 2.0, "james": 2.0, "dw": 4.0, "octa": 3.0}[self.value]


@dataclass(frozen=True)
class WitnessSet:
    """Named witness functions for one ``epsilon`` (and ``delta``).

    The two-point family fills ``f, g, h, k, l``; the octahedral family
    fills ``f, k, u`` and the four slices ``g, h, v, w``.
    """

    epsilon: float
    delta: float | None = None
    f: RadialFunction | None = None
    g: RadialFunction | None = None
    h: RadialFunction | None = None
    k: RadialFunction | None = None
    l: RadialFunction | None = None  # noqa: E741
    u: RadialFunction | None = None
    v: RadialFunction | None = None
    w: RadialFunction | None = None

    def named(self) -> dict[str, RadialFunction]:
        return {
            name: getattr(self, name)
            for name in "fghkluvw"
            if getattr(self, name) is not None
        }


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value}")
    return value


def _check_strict(sp: SpaceParams) -> None:
    if not sp.p < sp.q:
        raise DomainError(f"the witness families need p < q, got p = q = {sp.p}")


def build_witnesses(epsilon: float, delta: float | None, sp: SpaceParams) -> WitnessSet:
    """Two-point witnesses with common exponent ``-d/q`` on the unit ball.

    ``g``/``h`` are ``f`` cut to ``(0, eps)``/``(eps, 1)``, ``k = g - h`` and
    ``l = (1 + delta) g + (1 - delta) h`` (only when ``delta`` is given).
    """
    eps = _check_unit_interval("epsilon", epsilon)
    _check_strict(sp)
    a = sp.critical_alpha
    rf = RadialFunction.from_pieces
    l = None  # noqa: E741
    if delta is not None:
        dl = _check_unit_interval("delta", delta)
        l = rf([(0.0, eps, 1.0 + dl, a), (eps, 1.0, 1.0 - dl, a)])  # noqa: E741
    return WitnessSet(
        epsilon=eps,
        delta=None if delta is None else float(delta),
        f=rf([(0.0, 1.0, 1.0, a)]),
        g=rf([(0.0, eps, 1.0, a)]),
        h=rf([(eps, 1.0, 1.0, a)]),
        k=rf([(0.0, eps, 1.0, a), (eps, 1.0, -1.0, a)]),
        l=l,
    )


def build_octahedral_witnesses(epsilon: float, sp: SpaceParams) -> WitnessSet:
    """Three equal-norm functions on all of ``R^d`` with no good sign pattern.

    ``f = r^(-d/q)``, ``k`` flips sign at ``1``, ``u`` flips at ``eps``,
    ``1`` and ``1/eps``.  ``g, h, v, w`` are ``f`` cut to the four slices.
    """
    eps = _check_unit_interval("epsilon", epsilon)
    _check_strict(sp)
    if sp.variant is not Variant.CLASSICAL:
        raise DomainError("the octahedral witnesses have unbounded support: classical variant only")
    a = sp.critical_alpha
    rf = RadialFunction.from_pieces
    cuts = (0.0, eps, 1.0, 1.0 / eps, INF)
    slices = [rf([(cuts[i], cuts[i + 1], 1.0, a)]) for i in range(4)]
    return WitnessSet(
        epsilon=eps,
        f=rf([(0.0, INF, 1.0, a)]),
        k=rf([(0.0, 1.0, 1.0, a), (1.0, INF, -1.0, a)]),
        u=rf([(cuts[i], cuts[i + 1], s, a) for i, s in enumerate((1.0, -1.0, 1.0, -1.0))]),
        g=slices[0],
        h=slices[1],
        v=slices[2],
        w=slices[3],
    )


def resolve_method(*functions: Profile) -> Method:
    """Closed form when every pair can be added exactly, quadrature otherwise."""
    if any(isinstance(f, LinearCombination) for f in functions):
        return Method.QUADRATURE
    for x, y in itertools.combinations(functions, 2):
        if not exponent_compatible(x, y):
            return Method.QUADRATURE
    return Method.CLOSED_FORM


def _norm(f: Profile, sp: SpaceParams, method: Method, tol: float) -> float:
    if method is Method.CLOSED_FORM and isinstance(f, RadialFunction):
        return centered_norm(f, sp).value
    return oracle_norm(f, sp, tol).value


def _nonzero_norm(f: Profile, sp: SpaceParams, method: Method, tol: float, name: str) -> float:
    n = 0.0 if f.is_zero else _norm(f, sp, method, tol)
    if n == 0.0:
        raise ZeroVector(f"{name} is the zero function")
    return n


def nj_quotient(
    x: Profile, y: Profile, sp: SpaceParams, method: Method | None = None, tol: float = DEFAULT_ORACLE_TOL
) -> float:
    """``(||x+y||^2 + ||x-y||^2) / (2 (||x||^2 + ||y||^2))``."""
    method = Method(method) if method else resolve_method(x, y)
    nx = _nonzero_norm(x, sp, method, tol, "x")
    ny = _nonzero_norm(y, sp, method, tol, "y")
    n_plus = _norm(combine((1.0, x), (1.0, y)), sp, method, tol)
    n_minus = _norm(combine((1.0, x), (-1.0, y)), sp, method, tol)
    return (n_plus**2 + n_minus**2) / (2.0 * (nx**2 + ny**2))


def james_quotient(
    x: Profile, y: Profile, sp: SpaceParams, method: Method | None = None, tol: float = DEFAULT_ORACLE_TOL
) -> float:
    """``min(||x^ + y^||, ||x^ - y^||)`` for the normalised ``x^, y^``."""
    method = Method(method) if method else resolve_method(x, y)
    nx = _nonzero_norm(x, sp, method, tol, "x")
    ny = _nonzero_norm(y, sp, method, tol, "y")
    n_plus = _norm(combine((1.0 / nx, x), (1.0 / ny, y)), sp, method, tol)
    n_minus = _norm(combine((1.0 / nx, x), (-1.0 / ny, y)), sp, method, tol)
    return min(n_plus, n_minus)


def dw_quotient(
    x: Profile, y: Profile, sp: SpaceParams, method: Method | None = None, tol: float = DEFAULT_ORACLE_TOL
) -> float:
    """``(||x|| + ||y||) / ||x - y|| * ||x/||x|| - y/||y||||``."""
    method = Method(method) if method else resolve_method(x, y)
    nx = _nonzero_norm(x, sp, method, tol, "x")
    ny = _nonzero_norm(y, sp, method, tol, "y")
    diff = combine((1.0, x), (-1.0, y))
    n_diff = 0.0 if diff.is_zero else _norm(diff, sp, method, tol)
    if n_diff < IDENTICAL_RTOL * (nx + ny):
        raise IdenticalInputs("x and y coincide to working precision")
    n_unit = _norm(combine((1.0 / nx, x), (-1.0 / ny, y)), sp, method, tol)
    return (nx + ny) / n_diff * n_unit


SIGN_PATTERNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def octahedral_norms(
    F: Profile, K: Profile, U: Profile, sp: SpaceParams, method: Method | None = None,
    tol: float = DEFAULT_ORACLE_TOL,
) -> dict[tuple[int, int], float]:
    """``||F + sk K + su U||`` for each sign pair ``(sk, su)``, after normalising each input.

    Zero ``K`` or ``U`` are left as zero; a zero ``F`` raises :class:`ZeroVector`.
    """
    if sp.variant is not Variant.CLASSICAL:
        raise DomainError("the octahedral check is defined for the classical variant only")
    method = Method(method) if method else resolve_method(F, K, U)
    nf = _nonzero_norm(F, sp, method, tol, "F")
    nk = 0.0 if K.is_zero else _norm(K, sp, method, tol)
    nu = 0.0 if U.is_zero else _norm(U, sp, method, tol)
    ck = 1.0 / nk if nk > 0.0 else 0.0
    cu = 1.0 / nu if nu > 0.0 else 0.0
    return {
        (sk, su): _norm(combine((1.0 / nf, F), (sk * ck, K), (su * cu, U)), sp, method, tol)
        for sk, su in SIGN_PATTERNS
    }


def octahedral_min(
    F: Profile, K: Profile, U: Profile, sp: SpaceParams, method: Method | None = None,
    tol: float = DEFAULT_ORACLE_TOL,
) -> float:
    """Smallest ``||F +- K +- U||`` over the four sign patterns (inputs normalised)."""
    return min(octahedral_norms(F, K, U, sp, method, tol).values())


def witness_bound(
    kind: QuotientKind | str, epsilon: float, delta: float | None, sp: SpaceParams
) -> float:
    """Closed-form value of the witness quotient at ``epsilon`` (and ``delta``).

    With ``t = (1 - eps^gamma)^(1/p)``, ``gamma = d(1 - p/q)``: NJ ``1 + t^2``,
    James ``2t``, DW ``(4 + 2 delta) t / (1 + delta)``, octahedral ``3t``
    (a lower bound there rather than the exact value).
    """
    kind = QuotientKind(kind)
    eps = _check_unit_interval("epsilon", epsilon)
    _check_strict(sp)
    one_minus = -math.expm1(sp.gamma * math.log(eps))
    t = one_minus ** (1.0 / sp.p)
    if kind is QuotientKind.NJ:
        return 1.0 + one_minus ** (2.0 / sp.p)
    if kind is QuotientKind.JAMES:
        return 2.0 * t
    if kind is QuotientKind.DW:
        if delta is None:
            raise DomainError("the Dunkl-Williams bound needs delta")
        dl = _check_unit_interval("delta", delta)
        return (4.0 + 2.0 * dl) / (1.0 + dl) * t
    return 3.0 * t


def witness_quotient(
    kind: QuotientKind | str, epsilon: float, delta: float | None, sp: SpaceParams,
    method: Method | None = None,
) -> tuple[float, Method]:
    """Evaluate one quotient on its witness family; returns the value and the norm path used."""
    kind = QuotientKind(kind)
    if kind is QuotientKind.OCTAHEDRAL:
        ws = build_octahedral_witnesses(epsilon, sp)
        method = method or resolve_method(ws.f, ws.k, ws.u)
        return octahedral_min(ws.f, ws.k, ws.u, sp, method), Method(method)
    if kind is QuotientKind.DW and delta is None:
        raise DomainError("the Dunkl-Williams quotient needs delta")
    ws = build_witnesses(epsilon, delta, sp)
    x, y = (ws.f, ws.l) if kind is QuotientKind.DW else (ws.f, ws.k)
    method = Method(method) if method else resolve_method(x, y)
    fn = {QuotientKind.NJ: nj_quotient, QuotientKind.JAMES: james_quotient, QuotientKind.DW: dw_quotient}[kind]
    return fn(x, y, sp, method), method


CSV_COLUMNS = (
    "kind", "d", "p", "q", "variant", "epsilon", "delta", "computed", "paper_value", "deviation", "method",
)


@dataclass(frozen=True)
class QuotientReport:
    """One sweep row: a witness quotient next to its closed-form value."""

    kind: QuotientKind
    sp: SpaceParams
    epsilon: float
    delta: float | None
    computed: float
    paper_value: float
    method: Method = Method.CLOSED_FORM

    @property
    def deviation(self) -> float:
        return abs(self.computed - self.paper_value)

    def to_row(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "d": self.sp.d,
            "p": self.sp.p,
            "q": self.sp.q,
            "variant": self.sp.variant.value,
            "epsilon": self.epsilon,
            "delta": "" if self.delta is None else self.delta,
            "computed": self.computed,
            "paper_value": self.paper_value,
            "deviation": self.deviation,
            "method": self.method.value,
        }

    def to_json(self) -> dict[str, Any]:
        row = self.to_row()
        row["delta"] = self.delta
        return row

    @classmethod
    def from_row(cls, row: dict[str, Any]) -> "QuotientReport":
        delta = row["delta"]
        return cls(
            kind=QuotientKind(row["kind"]),
            sp=SpaceParams(int(row["d"]), float(row["p"]), float(row["q"]), Variant(row["variant"])),
            epsilon=float(row["epsilon"]),
            delta=None if delta in ("", None) else float(delta),
            computed=float(row["computed"]),
            paper_value=float(row["paper_value"]),
            method=Method(row["method"]),
        )


def write_csv(reports: Iterable[QuotientReport], fh: TextIO) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        # repr keeps every float bit-exact through a text round trip
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in report.to_row().items()})


def read_csv(fh: TextIO) -> list[QuotientReport]:
    return [QuotientReport.from_row(row) for row in csv.DictReader(fh)]


def reports_to_csv(reports: Iterable[QuotientReport]) -> str:
    buf = io.StringIO()
    write_csv(reports, buf)
    return buf.getvalue()


def default_epsilon_grid(steps: int = 20) -> list[float]:
    """``2^-1, ..., 2^-steps``."""
    return [2.0**-k for k in range(1, steps + 1)]


def evaluate(
    kind: QuotientKind | str, sp: SpaceParams, epsilon: float, delta: float | None = None,
    method: Method | None = None,
) -> QuotientReport:
    kind = QuotientKind(kind)
    if kind is not QuotientKind.DW:
        delta = None
    computed, used = witness_quotient(kind, epsilon, delta, sp, method)
    return QuotientReport(kind, sp, float(epsilon), delta, computed, witness_bound(kind, epsilon, delta, sp), used)


def sweep(
    kind: QuotientKind | str,
    sp: SpaceParams,
    epsilon_grid: Sequence[float],
    delta_grid: Sequence[float] | None = None,
    method: Method | None = None,
) -> list[QuotientReport]:
    """One report per grid point, sorted by ``epsilon`` descending.

    For the Dunkl-Williams quotient ``delta`` follows ``epsilon`` unless a
    ``delta_grid`` is given, in which case every ``(epsilon, delta)`` pair is used.
    """
    kind = QuotientKind(kind)
    for eps in epsilon_grid:
        _check_unit_interval("epsilon", eps)
    if kind is QuotientKind.DW:
        if delta_grid is None:
            points = [(eps, eps) for eps in epsilon_grid]
        else:
            points = [(eps, dl) for eps in epsilon_grid for dl in delta_grid]
    else:
        points = [(eps, None) for eps in epsilon_grid]
    points.sort(key=lambda pt: (-pt[0], -(pt[1] or 0.0)))
    return [evaluate(kind, sp, eps, dl, method) for eps, dl in points]
