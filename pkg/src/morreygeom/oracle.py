"""Numerical cross-checks for the closed-form engine.

``oracle_norm`` integrates ``|phi(r)|^p r^(d-1)`` by adaptive quadrature,
evaluating the profile pointwise, and locates the supremum over ``R`` with a
geometric grid followed by golden-section refinement.  It shares nothing with
:mod:`morreygeom.norm` beyond the function representation.

``offcenter_probe`` samples balls ``B(a, R)`` with ``a != 0`` by Monte Carlo,
as a statistical check that the origin-centered balls dominate.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DivergentAtOrigin, DomainError, NotInSpace, ToleranceNotMet
from .norm import Method, NormResult
from .space import (
    INF,
    LinearCombination,
    RadialFunction,
    SpaceParams,
    Variant,
    membership_problem,
    scaling_exponent,
    sphere_area,
)

Profile = RadialFunction | LinearCombination

GRID_PER_DECADE = 512
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    func: Callable[[float], float], a: float, b: float, xtol: float, max_iter: int = 200
) -> tuple[float, float]:
    """Maximise a unimodal ``func`` on ``[a, b]``; returns ``(x, func(x))``."""
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = func(x1), func(x2)
    for _ in range(max_iter):
        if abs(b - a) <= xtol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = func(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = func(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _scalar_profile(f: Profile) -> Callable[[float], float]:
    if isinstance(f, LinearCombination):
        return lambda r: float(f(r))
    los = [p.r_lo for p in f.pieces]

    def phi(r: float) -> float:
        i = bisect.bisect_right(los, r) - 1
        if i < 0 or r <= 0.0:
            return 0.0
        piece = f.pieces[i]
        if r >= piece.r_hi:
            return 0.0
        return piece.c * r**piece.alpha

    return phi


class _Quadrature:
    """``I(R)`` by adaptive quadrature, cell by cell, with cached full cells."""

    def __init__(self, f: Profile, sp: SpaceParams, rtol: float):
        self.sp, self.rtol = sp, rtol
        self.cells = f.intervals()
        self.phi = _scalar_profile(f)
        self._full: dict[int, tuple[float, float]] = {}

    def _piece(self, i: int, upper: float) -> tuple[float, float]:
        r_lo, r_hi, alpha_min, _ = self.cells[i]
        p, d = self.sp.p, self.sp.d
        phi = self.phi
        b = min(upper, r_hi)
        if b <= r_lo:
            return 0.0, 0.0
        if r_lo == 0.0:
            # r = t^(2/s) removes the algebraic singularity at the origin
            s = p * alpha_min + d
            m = 2.0 / s

            def integrand(t: float) -> float:
                if t <= 0.0:
                    return 0.0
                r = t**m
                return abs(phi(r)) ** p * r ** (d - 1) * m * t ** (m - 1.0)

            lo, hi = 0.0, b ** (1.0 / m)
        else:
            def integrand(u: float) -> float:
                r = math.exp(u)
                # keep the piece's own value at its half-open ends
                r = min(max(r, r_lo), math.nextafter(r_hi, 0.0))
                return abs(phi(r)) ** p * r**d

            lo, hi = math.log(r_lo), math.log(b)
        # full_output silences IntegrationWarning; the error is checked by the caller
        value, err, *_ = integrate.quad(
            integrand, lo, hi, epsabs=0.0, epsrel=self.rtol, limit=500, full_output=1
        )
        return value, err

    def __call__(self, R: float) -> float:
        total = err = 0.0
        for i, (r_lo, r_hi, _, _) in enumerate(self.cells):
            if r_lo >= R:
                break
            if r_hi <= R:
                if i not in self._full:
                    self._full[i] = self._piece(i, r_hi)
                v, e = self._full[i]
            else:
                v, e = self._piece(i, R)
            total += v
            err += e
        if err > 10.0 * self.rtol * total + 1e-300:
            raise ToleranceNotMet(f"quadrature error {err:g} exceeds tolerance for I({R:g}) = {total:g}")
        return total


def _grid_integrals(f: Profile, sp: SpaceParams, radii: np.ndarray, start: float) -> np.ndarray:
    """``I`` at sorted ``radii`` by composite 8-point Gauss-Legendre in ``log r``.

    Cells must not straddle breakpoints; ``start`` is ``I(radii[0])``.
    """
    u = np.log(radii)
    lo, hi = u[:-1], u[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_NODES[None, :]
    r = np.exp(nodes)
    vals = np.abs(f(r)) ** sp.p * r**sp.d
    cells = half * (vals @ _GL_WEIGHTS)
    return start + np.concatenate(([0.0], np.cumsum(cells)))


def _ball_values(radii: np.ndarray, integrals: np.ndarray, vol: float, sp: SpaceParams) -> np.ndarray:
    # log space: |B(0,R)| overflows long before N does
    with np.errstate(divide="ignore"):
        log_vol = math.log(vol) + sp.d * np.log(radii)
        log_n = (1.0 / sp.q - 1.0 / sp.p) * log_vol + np.log(sp.d * vol * integrals) / sp.p
    return np.exp(log_n)


def _neville_at_zero(w: list[float], g: list[float]) -> float:
    """Polynomial extrapolation of ``g(w)`` to ``w = 0``."""
    table = list(g)
    n = len(w)
    for k in range(1, n):
        for i in range(n - k):
            table[i] = (w[i + k] * table[i] - w[i] * table[i + 1]) / (w[i + k] - w[i])
    return table[0]


def oracle_norm(f: Profile, sp: SpaceParams, tol: float = 1e-8) -> NormResult:
    """Centered norm by quadrature and grid search; ``method=QUADRATURE``."""
    if not 0.0 < tol <= 1e-4:
        raise DomainError(f"tol must lie in (0, 1e-4], got {tol}")
    problem = membership_problem(f, sp)
    if problem is not None:
        raise (DivergentAtOrigin if problem.startswith("DivergentAtOrigin") else NotInSpace)(problem)
    r_max = sp.r_max
    fallback_r = 0.5 if r_max == 1.0 else 1.0
    cells = f.intervals()
    if not cells or cells[0][0] >= r_max:
        return NormResult(0.0, fallback_r, True, Method.QUADRATURE)

    p, d = sp.p, sp.d
    vol = sphere_area(d) / d
    quad = _Quadrature(f, sp, tol / 10.0)

    def n_at(R: float) -> float:
        integral = quad(R)
        if integral <= 0.0:
            return 0.0
        log_vol = math.log(vol) + d * math.log(R)
        return math.exp((1.0 / sp.q - 1.0 / p) * log_vol + math.log(d * vol * integral) / p)

    finite = [b for b in f.breakpoints() if 0.0 < b < INF]
    r_lo_bp = min(finite) if finite else 1.0
    r_hi_bp = max(finite) if finite else 1.0
    g_lo, g_hi = 1e-6 * r_lo_bp, 1e3 * r_hi_bp
    if r_max == 1.0:
        g_hi = 1.0
        g_lo = min(g_lo, 1e-6)
    decades = math.log10(g_hi / g_lo)
    grid = np.geomspace(g_lo, g_hi, int(math.ceil(GRID_PER_DECADE * decades)) + 1)
    grid = np.unique(np.concatenate((grid, [b for b in finite if g_lo < b < g_hi])))
    integrals = _grid_integrals(f, sp, grid, quad(grid[0]))
    # an unbounded tail can peak far beyond the last breakpoint: extend while rising.
    # A critical tail rises forever towards its limit, which is extrapolated instead.
    critical_tail = scaling_exponent(cells[-1][3], sp) == 0.0
    while r_max == INF and math.isinf(cells[-1][1]) and not critical_tail and grid[-1] < 1e150:
        n_tail = _ball_values(grid[-2:], integrals[-2:], vol, sp)
        if not n_tail[1] > n_tail[0]:
            break
        ext = np.geomspace(grid[-1], grid[-1] * 1e3, 3 * GRID_PER_DECADE + 1)
        integrals = np.concatenate((integrals, _grid_integrals(f, sp, ext, integrals[-1])[1:]))
        grid = np.concatenate((grid, ext[1:]))
        g_hi = grid[-1]
    n_grid = _ball_values(grid, integrals, vol, sp)

    i_best = int(np.argmax(n_grid))
    # (value, radius, attained, is_breakpoint)
    candidates: list[tuple[float, float, bool, bool]] = [(n_at(float(grid[i_best])), float(grid[i_best]), True, False)]
    for R in finite:
        if R < r_max:
            candidates.append((n_at(R), R, True, True))
    lo = float(grid[max(i_best - 1, 0)])
    hi = float(grid[min(i_best + 1, len(grid) - 1)])
    if hi > lo:
        u_star, _ = golden_section_max(lambda u: n_at(math.exp(u)), math.log(lo), math.log(hi), tol)
        r_star = math.exp(u_star)
        attained = r_star < r_max
        candidates.append((n_at(r_star), r_star, attained, False))
    if r_max == 1.0:
        candidates.append((n_at(1.0), 1.0, False, True))
    else:
        candidates.append((_limit_at_infinity(f, sp, n_at, g_hi), INF, False, True))

    origin = _limit_at_origin(f, sp, n_at)
    if origin is not None:
        candidates.append((origin, 0.0, False, False))

    best = max(c[0] for c in candidates)
    tied = [c for c in candidates if c[0] >= best * (1.0 - tol)]
    _, r_star, attained, _ = min(tied, key=lambda c: (not c[3], not c[2], c[1]))
    return NormResult(float(best), float(r_star), attained, Method.QUADRATURE)


def _limit_at_infinity(f: Profile, sp: SpaceParams, n_at, r_top: float) -> float:
    """Extrapolate ``N(R)**p`` to ``R = inf`` in a compactified variable."""
    _, r_hi, _, alpha_max = f.intervals()[-1]
    if math.isfinite(r_hi) and sp.beta < 0.0:
        return 0.0
    rate = sp.beta if sp.beta < 0.0 else sp.p * alpha_max + sp.d
    if not rate < 0.0:
        return n_at(r_top)
    radii = [r_top * 10.0**j for j in range(4)]
    w = [R**rate for R in radii]
    g = [n_at(R) ** sp.p for R in radii]
    return max(_neville_at_zero(w, g), 0.0) ** (1.0 / sp.p)


def _limit_at_origin(f: Profile, sp: SpaceParams, n_at) -> float | None:
    """``lim N(R)`` as ``R -> 0`` when terms with different exponents share the first cell.

    Near the origin ``N(R)**p`` is a series in ``w = R**(alpha_max - alpha_min)``;
    a single exponent gives a power of ``R`` that the grid already resolves.
    """
    r_lo, r_hi, alpha_min, alpha_max = f.intervals()[0]
    gap = alpha_max - alpha_min
    if r_lo > 0.0 or gap <= 0.0:
        return None
    w0 = min(1e-2, (0.5 * r_hi) ** gap)
    w = [w0 * 0.5**j for j in range(5)]
    radii = [wj ** (1.0 / gap) for wj in w]
    if radii[-1] < 1e-280:
        return None
    g = [n_at(R) ** sp.p for R in radii]
    return max(_neville_at_zero(w, g), 0.0) ** (1.0 / sp.p)


@dataclass(frozen=True)
class ProbeResult:
    value: float
    stderr: float
    center: float
    radius: float


def offcenter_scan(
    f: Profile,
    sp: SpaceParams,
    n_centers: int = 16,
    n_samples: int = 4096,
    seed: int = 0,
    n_radii: int = 24,
) -> ProbeResult:
    """Best Monte Carlo ball estimate over off-center balls, with its standard error.

    Center magnitudes ``|a|`` run over ``[0, 2 * max breakpoint]`` along the
    first axis (``f`` is radial, so the direction is irrelevant).  All balls
    share one set of unit-ball samples (common random numbers), stratified
    in the radial coordinate.  The generator is numpy's PCG64.
    """
    if n_centers < 1 or n_samples < 1:
        raise DomainError("n_centers and n_samples must be at least 1")
    problem = membership_problem(f, sp)
    if problem is not None:
        raise NotInSpace(problem)
    if f.is_zero:
        return ProbeResult(0.0, 0.0, 0.0, 0.5 if sp.variant is Variant.SMALL else 1.0)

    d, p = sp.d, sp.p
    rng = np.random.Generator(np.random.PCG64(seed))
    strata = (np.arange(n_samples) + rng.random(n_samples)) / n_samples
    rho = strata ** (1.0 / d)
    directions = rng.standard_normal((n_samples, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    unit = rho[:, None] * directions

    finite = [b for b in f.breakpoints() if 0.0 < b < INF]
    top = max(finite) if finite else 1.0
    bottom = min(finite) if finite else 1.0
    centers = np.linspace(0.0, 2.0 * top, n_centers)
    r_hi = 1.0 - 1e-9 if sp.variant is Variant.SMALL else 4.0 * top
    radii = np.geomspace(min(1e-3 * bottom, 0.5 * r_hi), r_hi, n_radii)
    # centered peaks of piecewise powers often sit exactly on a breakpoint
    radii = np.unique(np.concatenate((radii, [b for b in finite if b < r_hi])))
    vol = sphere_area(d) / d

    best = ProbeResult(0.0, 0.0, 0.0, float(radii[0]))
    for a in centers:
        for R in radii:
            pts = R * unit
            pts[:, 0] += a
            vals = np.abs(f(np.linalg.norm(pts, axis=1))) ** p
            mean = float(vals.mean())
            if mean <= 0.0:
                continue
            sem = float(vals.std(ddof=1)) / math.sqrt(n_samples) if n_samples > 1 else mean
            est = (vol * R**d) ** (1.0 / sp.q) * mean ** (1.0 / p)
            if est > best.value:
                best = ProbeResult(float(est), float(est * sem / (p * mean)), float(a), float(R))
    return best


def offcenter_probe(
    f: Profile, sp: SpaceParams, n_centers: int = 16, n_samples: int = 4096, seed: int = 0
) -> float:
    """Statistical lower bound on the full (all centers) norm of ``f``."""
    return offcenter_scan(f, sp, n_centers, n_samples, seed).value
