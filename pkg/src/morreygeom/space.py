"""Space parameters and radial piecewise-power functions.

A radial function is stored as its profile ``phi(r)``, a sorted list of
pieces ``c * r**alpha`` on disjoint radial intervals ``[r_lo, r_hi)``.
Outside the pieces the function is zero.  Every function used to probe the
geometric constants is of this form, which is what makes closed-form norms
possible.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DomainError, MismatchedExponents

INF = math.inf

# relative size below which a combined coefficient counts as cancelled
_CANCEL_RTOL = 8 * np.finfo(float).eps
# relative tolerance for exponent comparisons (alpha == -d/q, alpha_f == alpha_g)
_EXPONENT_RTOL = 1e-13


class Variant(str, enum.Enum):
    CLASSICAL = "classical"
    SMALL = "small"


@dataclass(frozen=True)
class SpaceParams:
    """The exponents ``(d, p, q)`` and which radii the supremum runs over.

    ``CLASSICAL`` takes every radius ``R > 0``; ``SMALL`` only ``0 < R < 1``.
    """

    d: int
    p: float
    q: float
    variant: Variant = Variant.SMALL

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "variant", Variant(self.variant))
        if not (1.0 <= self.p <= self.q < INF):
            raise DomainError(f"need 1 <= p <= q < inf, got p={self.p}, q={self.q}")

    @property
    def gamma(self) -> float:
        """Decay exponent ``d(1 - p/q)``; positive iff ``p < q``."""
        return self.d * (1.0 - self.p / self.q)

    @property
    def beta(self) -> float:
        """Exponent of ``R`` in ``|B(0,R)|^(p/q - 1)``, i.e. ``d(p/q - 1) <= 0``."""
        return -self.gamma

    @property
    def critical_alpha(self) -> float:
        """The scale-invariant exponent ``-d/q``."""
        return -(self.d / self.q)

    @property
    def r_max(self) -> float:
        return 1.0 if self.variant is Variant.SMALL else INF

    def with_variant(self, variant: Variant | str) -> "SpaceParams":
        return SpaceParams(self.d, self.p, self.q, Variant(variant))

    def to_dict(self) -> dict[str, Any]:
        return {"d": self.d, "p": self.p, "q": self.q, "variant": self.variant.value}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SpaceParams":
        return cls(data["d"], data["p"], data["q"], Variant(data.get("variant", "small")))


@dataclass(frozen=True)
class PowerPiece:
    r_lo: float
    r_hi: float
    c: float
    alpha: float

    def __post_init__(self):
        for name in ("r_lo", "r_hi", "c", "alpha"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (0.0 <= self.r_lo < self.r_hi) or math.isnan(self.r_hi):
            raise DomainError(f"invalid interval [{self.r_lo}, {self.r_hi})")
        if math.isinf(self.r_lo) or not math.isfinite(self.c) or not math.isfinite(self.alpha):
            raise DomainError(f"non-finite piece data {self}")
        if self.c == 0.0:
            raise DomainError("zero pieces must be omitted")

    def to_dict(self) -> dict[str, Any]:
        return {
            "r_lo": self.r_lo,
            "r_hi": "inf" if math.isinf(self.r_hi) else self.r_hi,
            "c": self.c,
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PowerPiece":
        return cls(_radius(data["r_lo"]), _radius(data["r_hi"]), data["c"], data["alpha"])


def _radius(value: Any) -> float:
    if isinstance(value, str):
        if value.strip().lower() == "inf":
            return INF
        raise DomainError(f"'inf' is the only non-numeric radius token, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class RadialFunction:
    """Radial profile made of power pieces on sorted, disjoint intervals."""

    pieces: tuple[PowerPiece, ...] = field(default_factory=tuple)

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        for left, right in zip(pieces, pieces[1:]):
            if right.r_lo < left.r_hi:
                raise DomainError("pieces must be sorted by r_lo and pairwise disjoint")

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple[float, float, float, float]]) -> "RadialFunction":
        """Build from ``(r_lo, r_hi, c, alpha)`` tuples, dropping zero coefficients."""
        return cls(tuple(PowerPiece(*t) for t in pieces if t[2] != 0.0))

    @classmethod
    def zero(cls) -> "RadialFunction":
        return cls(())

    @property
    def is_zero(self) -> bool:
        return not self.pieces

    def breakpoints(self) -> list[float]:
        """Sorted distinct interval endpoints, ``0`` and ``inf`` included if present."""
        pts = {p.r_lo for p in self.pieces} | {p.r_hi for p in self.pieces}
        return sorted(pts)

    def __call__(self, r):
        """Evaluate the profile at radius (or array of radii) ``r``."""
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        for piece in self.pieces:
            mask = (r >= piece.r_lo) & (r < piece.r_hi) & (r > 0)
            if np.any(mask):
                out[mask] = piece.c * np.power(r[mask], piece.alpha)
        return out if out.ndim else float(out)

    def intervals(self) -> list[tuple[float, float, float, float]]:
        """``(lo, hi, alpha_min, alpha_max)`` for each interval where ``f`` may be nonzero."""
        return [(p.r_lo, p.r_hi, p.alpha, p.alpha) for p in self.pieces]

    def __neg__(self) -> "RadialFunction":
        return negate(self)

    def __add__(self, other: "RadialFunction") -> "RadialFunction":
        return add(self, other)

    def __sub__(self, other: "RadialFunction") -> "RadialFunction":
        return add(self, negate(other))

    def __mul__(self, s: float) -> "RadialFunction":
        return scale(self, s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "RadialFunction":
        return scale(self, 1.0 / s)

    def to_json(self) -> list[dict[str, Any]]:
        return [p.to_dict() for p in self.pieces]

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: Sequence[dict[str, Any]]) -> "RadialFunction":
        pieces = [PowerPiece.from_dict(item) for item in data]
        return cls(tuple(sorted(pieces, key=lambda p: p.r_lo)))

    @classmethod
    def loads(cls, text: str) -> "RadialFunction":
        data = json.loads(text)
        if not isinstance(data, list):
            raise DomainError("a radial function is a JSON array of pieces")
        return cls.from_json(data)


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def _sphere_area_coefficient(d: int) -> tuple[Fraction, int]:
    """``C_d = coef * pi**m`` with rational ``coef``.

    Even ``d = 2m``: ``Gamma(m) = (m-1)!``.  Odd ``d = 2m + 1``:
    ``Gamma(m + 1/2) = (2m-1)!! sqrt(pi) / 2**m``, the ``sqrt(pi)`` cancels.
    """
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DomainError(f"sphere_area needs a positive integer dimension, got {d!r}")
    d = int(d)
    m = d // 2
    if d % 2 == 0:
        return Fraction(2, math.factorial(m - 1)), m
    return Fraction(2 ** (m + 1), _double_factorial(2 * m - 1)), m


def sphere_area(d: int) -> float:
    """Surface measure ``2 pi^(d/2) / Gamma(d/2)`` of the unit sphere in R^d."""
    coef, m = _sphere_area_coefficient(d)
    if m > 100:
        return math.exp(log_sphere_area(d))
    return float(coef) * math.pi**m


def log_sphere_area(d: int) -> float:
    """Natural log of :func:`sphere_area`, safe for large ``d``."""
    coef, m = _sphere_area_coefficient(d)
    # math.log accepts arbitrarily large ints without overflowing
    return math.log(coef.numerator) - math.log(coef.denominator) + m * math.log(math.pi)


def negate(f: RadialFunction) -> RadialFunction:
    return scale(f, -1.0)


def scale(f: RadialFunction, s: float) -> RadialFunction:
    s = float(s)
    if s == 0.0:
        return RadialFunction.zero()
    return RadialFunction(tuple(PowerPiece(p.r_lo, p.r_hi, s * p.c, p.alpha) for p in f.pieces))


def same_exponent(a: float, b: float) -> bool:
    return a == b or math.isclose(a, b, rel_tol=_EXPONENT_RTOL, abs_tol=_EXPONENT_RTOL)


def _piece_at(pieces: Sequence[PowerPiece], lo: float, hi: float) -> PowerPiece | None:
    for p in pieces:
        if p.r_lo <= lo and hi <= p.r_hi:
            return p
    return None


def add(f: RadialFunction, g: RadialFunction) -> RadialFunction:
    """Pointwise sum on the common refinement of both partitions.

    Coefficients that cancel to within a few ulps of the summands are
    dropped, adjacent pieces with equal ``(c, alpha)`` are merged.

    Raises :class:`MismatchedExponents` when pieces with different exponents
    overlap; such sums have no single-power representation.
    """
    if f.is_zero:
        return g
    if g.is_zero:
        return f
    cuts = sorted(set(f.breakpoints()) | set(g.breakpoints()))
    out: list[list[float]] = []
    for lo, hi in zip(cuts, cuts[1:]):
        pf = _piece_at(f.pieces, lo, hi)
        pg = _piece_at(g.pieces, lo, hi)
        if pf is None and pg is None:
            continue
        if pf is None or pg is None:
            c, alpha = (pf or pg).c, (pf or pg).alpha
        else:
            if not same_exponent(pf.alpha, pg.alpha):
                raise MismatchedExponents(
                    f"exponents {pf.alpha} and {pg.alpha} overlap on [{lo}, {hi})"
                )
            c, alpha = pf.c + pg.c, pf.alpha
            if abs(c) <= _CANCEL_RTOL * max(abs(pf.c), abs(pg.c)):
                continue
        if out and out[-1][1] == lo and out[-1][2] == c and out[-1][3] == alpha:
            out[-1][1] = hi
        else:
            out.append([lo, hi, c, alpha])
    return RadialFunction(tuple(PowerPiece(*row) for row in out))


@dataclass(frozen=True)
class LinearCombination:
    """Lazy ``sum(coef * f)`` for summands whose exponents clash.

    Supports pointwise evaluation only, which is all the quadrature oracle
    needs.
    """

    terms: tuple[tuple[float, RadialFunction], ...]

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 or f.is_zero for c, f in self.terms)

    def breakpoints(self) -> list[float]:
        return sorted({b for _, f in self.terms for b in f.breakpoints()})

    def intervals(self) -> list[tuple[float, float, float, float]]:
        cuts = self.breakpoints()
        out = []
        for lo, hi in zip(cuts, cuts[1:]):
            alphas = [
                p.alpha
                for c, f in self.terms
                if c != 0.0
                for p in f.pieces
                if p.r_lo <= lo and hi <= p.r_hi
            ]
            if alphas:
                out.append((lo, hi, min(alphas), max(alphas)))
        return out

    def __call__(self, r):
        return sum(c * np.asarray(f(r)) for c, f in self.terms)

    def __neg__(self) -> "LinearCombination":
        return LinearCombination(tuple((-c, f) for c, f in self.terms))


def combine(*terms: tuple[float, RadialFunction]) -> "RadialFunction | LinearCombination":
    """``sum(coef * f)`` as a :class:`RadialFunction` when exponents allow, else lazily."""
    total = RadialFunction.zero()
    try:
        for c, f in terms:
            total = add(total, scale(f, c))
    except MismatchedExponents:
        return LinearCombination(tuple((float(c), f) for c, f in terms))
    return total


def exponent_compatible(f: RadialFunction, g: RadialFunction) -> bool:
    """True when :func:`add` can combine ``f`` and ``g`` without mixing powers."""
    for pf in f.pieces:
        for pg in g.pieces:
            if max(pf.r_lo, pg.r_lo) < min(pf.r_hi, pg.r_hi) and not same_exponent(pf.alpha, pg.alpha):
                return False
    return True


def scaling_exponent(alpha: float, sp: SpaceParams) -> float:
    """``p*alpha + d*p/q``: the power of ``R`` in ``N(R)**p`` for one piece at the origin or tail.

    Snapped to zero when ``alpha`` is the critical exponent ``-d/q`` up to rounding.
    """
    if math.isclose(alpha, sp.critical_alpha, rel_tol=_EXPONENT_RTOL):
        return 0.0
    return sp.p * (alpha - sp.critical_alpha)


def membership_problem(f: RadialFunction | LinearCombination, sp: SpaceParams) -> str | None:
    """Describe why the centered norm of ``f`` is infinite, or ``None`` if finite."""
    if isinstance(f, LinearCombination):
        # finite if every summand is (triangle inequality)
        for _, term in f.terms:
            problem = membership_problem(term, sp)
            if problem is not None:
                return problem
        return None
    if f.is_zero:
        return None
    first = f.pieces[0]
    if first.r_lo == 0.0:
        if sp.p * first.alpha + sp.d <= 0.0:
            return (
                f"DivergentAtOrigin: p*alpha + d = {sp.p * first.alpha + sp.d:g} <= 0, "
                "|f|^p r^(d-1) is not integrable at 0"
            )
        if scaling_exponent(first.alpha, sp) < 0.0:
            return (
                f"NotInSpace: alpha = {first.alpha:g} < -d/q = {sp.critical_alpha:g}, "
                "ball averages blow up as R -> 0"
            )
    last = f.pieces[-1]
    if sp.variant is Variant.CLASSICAL and math.isinf(last.r_hi):
        t = scaling_exponent(last.alpha, sp)
        if t > 0.0 or (t == 0.0 and sp.p == sp.q):
            return (
                f"NotInSpace: tail exponent alpha = {last.alpha:g} is too large for "
                f"R -> inf (need alpha <= -d/q = {sp.critical_alpha:g}, strictly if p = q)"
            )
    return None


def validate_membership(f: RadialFunction, sp: SpaceParams) -> bool:
    """Whether the centered norm of ``f`` in the space ``sp`` is finite."""
    return membership_problem(f, sp) is None
