"""Closed-form centered Morrey norms of radial piecewise-power functions.

For a radial ``f`` with profile ``phi`` the centered ball functional is

    N(R) = |B(0,R)|^(1/q - 1/p) * (C_d * I(R))^(1/p),
    I(R) = int_0^R |phi(r)|^p r^(d-1) dr,

and the norm is ``sup N(R)`` over ``0 < R < 1`` (small variant) or ``R > 0``
(classical).  ``I`` is a sum of power (or log) terms, so on each interval
between breakpoints ``N(R)**p = K R^beta (A + E R^s)`` has at most one
interior critical point, which is found analytically.

Everything is evaluated in log space: ``log N**p`` is a sum of logs, and
each piece's contribution to ``I`` is formed with ``expm1``/``log1p`` so that
no intermediate power overflows even for large ``d``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

from .errors import DivergentAtOrigin, DomainError, NotInSpace, NumericalOverflow
from .space import (
    INF,
    PowerPiece,
    RadialFunction,
    SpaceParams,
    Variant,
    log_sphere_area,
    membership_problem,
    scaling_exponent,
)

NEG_INF = -math.inf
# two candidate values closer than this (in log N**p) are a tie
_TIE_LOG = 1e-13


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class NormResult:
    """A norm value and the ball radius realising it.

    ``attained=False`` means the supremum is only approached as ``R`` tends
    to ``r_star`` (``1`` from below in the small variant, ``inf`` in the
    classical one).
    """

    value: float
    r_star: float
    attained: bool
    method: Method = Method.CLOSED_FORM

    def to_json(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "r_star": "inf" if math.isinf(self.r_star) else self.r_star,
            "attained": self.attained,
            "method": self.method.value,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "NormResult":
        r = data["r_star"]
        if r == "inf":
            r = INF
        elif r == "limit":
            r = math.nan
        return cls(float(data["value"]), float(r), bool(data["attained"]), Method(data["method"]))


def _log_expm1_over(y: float, s: float) -> float:
    """``log(expm1(y) / s)`` for ``y = s*L`` with ``L > 0`` (so the ratio is positive)."""
    if y > 0.0:
        return y + math.log(-math.expm1(-y)) - math.log(s)
    return math.log(-math.expm1(y)) - math.log(-s)


@dataclass(frozen=True)
class Segment:
    """``I(R)`` on ``[lo, hi]``: ``I(lo)`` plus the local piece's contribution.

    ``piece`` is ``None`` on gaps, where ``I`` stays constant.  With
    ``s = p*alpha + d`` the local term is ``E (R^s - lo^s)``, ``E = |c|^p / s``,
    or ``|c|^p log(R/lo)`` when ``s == 0``.
    """

    lo: float
    hi: float
    log_base: float
    piece: PowerPiece | None
    log_cp: float = NEG_INF
    s: float = math.nan
    beta: float = 0.0
    # log(lo^beta I(lo)), kept separately so beta*log(R) never meets s*log(R)
    log_base_scaled: float = NEG_INF

    @property
    def I0(self) -> float:
        return math.exp(self.log_base)

    @property
    def log_term(self) -> bool:
        return self.piece is not None and self.s == 0.0

    @property
    def E(self) -> float:
        if self.piece is None or self.s == 0.0:
            return 0.0
        return math.exp(self.log_cp) / self.s

    def log_increment(self, R: float) -> float:
        """``log(I(R) - I(lo))`` for ``lo < R <= hi``."""
        if self.piece is None or R <= self.lo:
            return NEG_INF
        if self.lo == 0.0:
            return self.log_cp + self.s * math.log(R) - math.log(self.s)
        L = math.log(R / self.lo)
        if self.s == 0.0:
            return self.log_cp + math.log(L)
        return self.log_cp + self.s * math.log(self.lo) + _log_expm1_over(self.s * L, self.s)

    def log_value(self, R: float) -> float:
        return _logaddexp(self.log_base, self.log_increment(R))

    def log_scaled(self, R: float) -> float:
        """``log(R^beta I(R))`` for ``lo < R <= hi``.

        The exponents are combined before taking logs: at ``R = 1e-6`` the
        separate terms ``beta*log R`` and ``s*log R`` are ~20 in size and
        their cancellation would cost several ulps.
        """
        beta = self.beta
        if self.lo == 0.0:
            if self.piece is None:
                return NEG_INF
            return self.log_cp + (self.s + beta) * math.log(R) - math.log(self.s)
        L = math.log(R / self.lo)
        base = self.log_base_scaled + beta * L if self.log_base_scaled > NEG_INF else NEG_INF
        if self.piece is None or R <= self.lo:
            return base
        if self.s == 0.0:
            inc = self.log_cp + beta * math.log(R) + math.log(L)
        else:
            inc = (
                self.log_cp + (beta + self.s) * math.log(self.lo) + beta * L
                + _log_expm1_over(self.s * L, self.s)
            )
        return _logaddexp(base, inc)


def _logaddexp(a: float, b: float) -> float:
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


@dataclass(frozen=True)
class CumulativeIntegral:
    """Piecewise closed form of ``I(R) = int_0^R |phi|^p r^(d-1) dr``.

    Segments cover ``[0, inf)`` without gaps; zero regions of ``phi`` are
    segments with ``piece=None``.
    """

    segments: tuple[Segment, ...]

    @property
    def breakpoints(self) -> list[float]:
        return [seg.lo for seg in self.segments] + [self.segments[-1].hi]

    def segment_at(self, R: float) -> Segment:
        for seg in self.segments:
            if seg.lo < R <= seg.hi:
                return seg
        return self.segments[0]

    def log_value(self, R: float) -> float:
        if R <= 0.0:
            return NEG_INF
        return self.segment_at(R).log_value(R)

    def __call__(self, R: float) -> float:
        return math.exp(self.log_value(R))


def cumulative_integral(f: RadialFunction, sp: SpaceParams) -> CumulativeIntegral:
    p, d = sp.p, sp.d
    if f.pieces and f.pieces[0].r_lo == 0.0 and p * f.pieces[0].alpha + d <= 0.0:
        raise DivergentAtOrigin(f"p*alpha + d = {p * f.pieces[0].alpha + d:g} <= 0 at the origin")
    beta = sp.beta
    segments: list[Segment] = []
    log_base = scaled = NEG_INF
    cursor = 0.0
    for piece in f.pieces:
        if piece.r_lo > cursor:
            gap = Segment(cursor, piece.r_lo, log_base, None, beta=beta, log_base_scaled=scaled)
            segments.append(gap)
            scaled = gap.log_scaled(piece.r_lo)
        s = p * piece.alpha + d
        if abs(s) <= 1e-14 * max(p * abs(piece.alpha), d):
            s = 0.0
        seg = Segment(piece.r_lo, piece.r_hi, log_base, piece, p * math.log(abs(piece.c)), s, beta, scaled)
        segments.append(seg)
        if math.isinf(piece.r_hi):
            break
        log_base = seg.log_value(piece.r_hi)
        scaled = seg.log_scaled(piece.r_hi)
        cursor = piece.r_hi
    if not segments or not math.isinf(segments[-1].hi):
        segments.append(Segment(cursor, INF, log_base, None, beta=beta, log_base_scaled=scaled))
    return CumulativeIntegral(tuple(segments))


def _log_K(sp: SpaceParams) -> float:
    """``log`` of ``K`` in ``N(R)**p = K R^beta I(R)``: ``C_d (C_d/d)^(p/q - 1)``."""
    log_cd = log_sphere_area(sp.d)
    return log_cd + (sp.p / sp.q - 1.0) * (log_cd - math.log(sp.d))


def _value_from_log(log_np: float, p: float) -> float:
    if log_np == NEG_INF:
        return 0.0
    log_n = log_np / p
    if log_n > 709.0:
        raise NumericalOverflow(f"norm exceeds the float range (log value {log_n:g})")
    return math.exp(log_n)


def ball_norm(f: RadialFunction, sp: SpaceParams, R: float) -> float:
    """Closed-form ``N(R)`` for the centered ball of radius ``R``."""
    if R <= 0.0:
        raise DomainError("radius must be positive")
    seg = cumulative_integral(f, sp).segment_at(R)
    return _value_from_log(_log_K(sp) + seg.log_scaled(R), sp.p)


@dataclass(frozen=True)
class _Candidate:
    log_np: float
    r: float
    attained: bool


def _segment_candidates(seg: Segment, sp: SpaceParams, log_k: float, r_max: float):
    beta = sp.beta
    lo, hi = seg.lo, min(seg.hi, r_max)

    def at(R: float, attained: bool = True) -> _Candidate:
        return _Candidate(log_k + seg.log_scaled(R), R, attained)

    piece = seg.piece
    # left end
    if lo > 0.0:
        yield at(lo)
    elif piece is not None and scaling_exponent(piece.alpha, sp) == 0.0:
        # N constant on (0, hi]: profile is c r^(-d/q) from the origin
        if hi < r_max:
            r = hi
        else:
            r = 0.5 if r_max == 1.0 else 1.0
        yield _Candidate(log_k + seg.log_cp - math.log(seg.s), r, True)
    # right end
    if math.isinf(hi):
        yield _Candidate(_log_limit_at_infinity(seg, sp, log_k), INF, False)
    else:
        yield at(hi, attained=hi < r_max)
    # interior critical point, a maximum only when beta + s < 0
    if piece is None or lo == 0.0 or beta == 0.0:
        return
    # beta + s = p (alpha + d/q), snapped so a rounding residue never counts as negative
    if seg.s != 0.0 and scaling_exponent(piece.alpha, sp) >= 0.0:
        return
    r_crit = _critical_radius(seg, beta)
    if r_crit is not None and lo < r_crit < hi:
        yield at(r_crit)


def _critical_radius(seg: Segment, beta: float) -> float | None:
    """Zero of ``d/dR [R^beta I(R)]`` inside a power or log segment, if any."""
    if seg.s == 0.0:
        # beta (I0 + cp L) + cp = 0
        ratio = math.exp(seg.log_base - seg.log_cp) if seg.log_base > NEG_INF else 0.0
        L = -1.0 / beta - ratio
        return seg.lo * math.exp(L) if L > 0.0 else None
    s = seg.s
    log_e_lo = seg.log_cp + s * math.log(seg.lo) - math.log(abs(s))  # log |E lo^s|
    ratio = math.copysign(math.exp(seg.log_base - log_e_lo), s) if seg.log_base > NEG_INF else 0.0
    x = beta / (beta + s) * (1.0 - ratio)  # (R/lo)^s at the critical point
    if not x > 0.0:
        return None
    log_r = math.log(seg.lo) + math.log(x) / s
    if log_r >= math.log(seg.hi):
        return None
    return math.exp(log_r)


def _log_limit_at_infinity(seg: Segment, sp: SpaceParams, log_k: float) -> float:
    beta = sp.beta
    piece = seg.piece
    if piece is None:
        return log_k + seg.log_base if beta == 0.0 else NEG_INF
    t = scaling_exponent(piece.alpha, sp)
    if t == 0.0 and seg.s > 0.0:
        return log_k + seg.log_cp - math.log(seg.s)
    if seg.s < 0.0 and beta == 0.0:
        # I(inf) is finite, |B|^0 = 1
        log_tail = seg.log_cp + seg.s * math.log(seg.lo) - math.log(-seg.s)
        return log_k + _logaddexp(seg.log_base, log_tail)
    return NEG_INF


def centered_norm(f: RadialFunction, sp: SpaceParams) -> NormResult:
    """Supremum of the centered ball functional ``N(R)`` over admissible radii.

    Ties between candidate radii prefer attained radii, then the smaller radius.
    """
    problem = membership_problem(f, sp)
    if problem is not None:
        if problem.startswith("DivergentAtOrigin"):
            raise DivergentAtOrigin(problem)
        raise NotInSpace(problem)
    r_max = sp.r_max
    if f.is_zero:
        return NormResult(0.0, 0.5 if r_max == 1.0 else 1.0, True)
    log_k = _log_K(sp)
    candidates = [
        cand
        for seg in cumulative_integral(f, sp).segments
        if seg.lo < r_max
        for cand in _segment_candidates(seg, sp, log_k, r_max)
    ]
    best = max(c.log_np for c in candidates)
    if best == NEG_INF:
        return NormResult(0.0, 0.5 if r_max == 1.0 else 1.0, True)
    tied = [c for c in candidates if c.log_np >= best - _TIE_LOG * max(1.0, abs(best))]
    choice = min(tied, key=lambda c: (not c.attained, c.r))
    return NormResult(_value_from_log(best, sp.p), choice.r, choice.attained)


def norm(f: RadialFunction, sp: SpaceParams) -> float:
    return centered_norm(f, sp).value


__all__ = [
    "CumulativeIntegral",
    "Method",
    "NormResult",
    "Segment",
    "ball_norm",
    "centered_norm",
    "cumulative_integral",
    "norm",
    "Variant",
]
