"""Projective structures from the diagonal jet of a kernel.

In a chart with coordinate s, a normalized kernel expands along the diagonal
as ``1/t^2 + h(s) + O(t)`` (t = s1 - s2). The projective connection is
``S = 6 h``. Under a change of coordinate s = f(w),

    S_w(w) = S_s(f(w)) f'(w)^2 + Schw(f)(w),

the sign being fixed by the expansion
``f'(w1) f'(w2) / (f(w1) - f(w2))^2 = 1/(w1 - w2)^2 + Schw(f)(w)/6 + O(w1 - w2)``.
Differences of two connections are quadratic differentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from etahat.curves import (
    FLAT,
    Chart,
    Curve,
    SurfacePoint,
    chart_coordinate,
    chart_derivative,
    chart_point,
    elliptic_curve,
    point,
)
from etahat.errors import ChartDomain, CriticalPoint, IllConditionedFit
from etahat.kernels import Kernel, eval_kernel

JET_DELTA = 1e-3
JET_TOL = 1e-7
JET_CLEARANCE = 1e-2
_OFFSETS = np.array([1, -1, 2, -2, 1j, -1j, 2j, -2j])


@dataclass(frozen=True)
class DiagonalJet:
    biresidue: complex
    residue_term: complex
    h: complex
    error: float

    @property
    def connection(self) -> complex:
        return 6 * self.h


@dataclass
class ConnectionSample:
    chart: Chart
    points: list = field(repr=False)
    coords: np.ndarray
    values: np.ndarray
    errors: np.ndarray


@dataclass
class QuadraticDifferentialSample:
    chart: Chart
    points: list = field(repr=False)
    values: np.ndarray


def laurent_fit(f, delta: float) -> np.ndarray:
    """Coefficients (c_-2, c_-1, c_0) of f(t) = c_-2/t^2 + c_-1/t + c_0 + ...

    t^2 f(t) is interpolated by a degree-7 polynomial on the 8-point star
    delta * {+-1, +-2, +-i, +-2i}.
    """
    u = _OFFSETS
    vals = np.array([complex(f(delta * ui)) for ui in u]) * (delta * u) ** 2
    V = np.vander(u, 8, increasing=True)
    a = np.linalg.solve(V, vals)
    return a[:3] / delta ** np.arange(3)


def _richardson(f, delta: float) -> tuple[np.ndarray, float]:
    """Fit at delta and delta/2; returns the delta fit and the discrepancy.

    The fit's truncation error is O(delta^6), far below the O(eps/delta^2)
    rounding floor, so extrapolating would only amplify rounding; the
    half-step fit serves as the error estimate.
    """
    c1 = laurent_fit(f, delta)
    c2 = laurent_fit(f, delta / 2)
    return c1, float(np.max(np.abs(c2 - c1)))


def _check_clearance(c: Curve, ch: Chart, p: SurfacePoint) -> None:
    if c.is_elliptic:
        return
    if ch.kind in ("affine", "inverse"):
        if min(abs(p.x - e) for e in c.roots) < JET_CLEARANCE:
            raise ChartDomain("jet base point too close to a branch point")


def coordinate_offset(ch: Chart, s0: complex, t: complex) -> complex:
    """x(s0 + t) - x(s0) for the chart's coordinate s, without cancellation."""
    if ch.kind in ("flat", "affine"):
        return t
    if ch.kind == "inverse":
        return -t / ((s0 + t) * s0)
    return t * (2 * s0 + t)


def diagonal_jet(k: Kernel, ch: Chart, p: SurfacePoint, delta: float = JET_DELTA, tol: float = JET_TOL) -> DiagonalJet:
    c = k.curve
    _check_clearance(c, ch, p)
    s0 = chart_coordinate(c, ch, p)

    def f(t):
        return eval_kernel(k, chart_point(c, ch, s0 + t, near=p), p, ch, dx=coordinate_offset(ch, s0, t))

    coef, err = _richardson(f, delta)
    err = err / (1 + abs(coef[2]))
    if not np.isfinite(err) or err > tol:
        raise IllConditionedFit(f"jet extraction error estimate {err:.3g} exceeds {tol:g}")
    return DiagonalJet(complex(coef[0]), complex(coef[1]), complex(coef[2]), err)


# -- Schwarzian -----------------------------------------------------------------


@dataclass(frozen=True)
class Mobius:
    a: complex
    b: complex
    c: complex
    d: complex

    def __call__(self, w):
        return (self.a * w + self.b) / (self.c * w + self.d)

    def difference(self, w1, w2):
        det = self.a * self.d - self.b * self.c
        return det * (w1 - w2) / ((self.c * w1 + self.d) * (self.c * w2 + self.d))

    def derivatives(self, w):
        det = self.a * self.d - self.b * self.c
        den = self.c * w + self.d
        return (det / den**2, -2 * self.c * det / den**3, 6 * self.c**2 * det / den**4)


def stencil_derivatives(f, w: complex, r: float = 0.05, n: int = 32):
    """f', f'', f''' at w from samples on a circle (discrete Cauchy formula)."""
    k = np.arange(n)
    roots = np.exp(2j * np.pi * k / n)
    vals = np.array([complex(f(w + r * z)) for z in roots])
    return tuple(math.factorial(m) * np.mean(vals * roots ** (-m)) / r**m for m in (1, 2, 3))


def schwarzian(f, w: complex, r: float = 0.05) -> complex:
    """f'''/f' - (3/2) (f''/f')^2; exact derivatives if ``f.derivatives`` exists."""
    d1, d2, d3 = f.derivatives(w) if hasattr(f, "derivatives") else stencil_derivatives(f, w, r)
    if abs(d1) < 1e-10:
        raise CriticalPoint(f"f'({w}) vanishes")
    return complex(d3 / d1 - 1.5 * (d2 / d1) ** 2)


def expansion_identity_check(f, x: complex, delta: float = 0.05, r: float = 0.05) -> dict:
    """Compare the diagonal expansion of f'(x1) f'(x2) / (f(x1) - f(x2))^2
    with 1/(x1 - x2)^2 + Schw(f)(x)/6.

    ``f.difference(w1, w2)``, when present, replaces f(w1) - f(w2).
    The default step 0.05 balances rounding (about 1e-16 / delta^2) against
    aliasing of high Taylor terms, which for maps analytic on a disc of
    radius well above delta stays below 1e-12.
    """

    def deriv(w):
        return f.derivatives(w)[0] if hasattr(f, "derivatives") else stencil_derivatives(f, w, r)[0]

    d0 = deriv(x)
    if abs(d0) < 1e-10:
        raise CriticalPoint(f"f'({x}) vanishes")
    fx = f(x)

    def lhs(t):
        diff = f.difference(x + t, x) if hasattr(f, "difference") else f(x + t) - fx
        return deriv(x + t) * d0 / diff**2

    coef, err = _richardson(lhs, delta)
    S = schwarzian(f, x, r)
    return {
        "biresidue": complex(coef[0]),
        "residue_term": complex(coef[1]),
        "finite_part": complex(coef[2]),
        "schwarzian": S,
        "residual": float(max(abs(coef[0] - 1), abs(coef[1]), abs(coef[2] - S / 6))),
        "fit_error": err,
    }


# -- connections ------------------------------------------------------------------


def connection_from_kernel(k: Kernel, ch: Chart, pts) -> ConnectionSample:
    c = k.curve
    jets = [diagonal_jet(k, ch, p) for p in pts]
    return ConnectionSample(
        chart=ch,
        points=list(pts),
        coords=np.array([chart_coordinate(c, ch, p) for p in pts]),
        values=np.array([j.connection for j in jets]),
        errors=np.array([j.error * 6 for j in jets]),
    )


def transition_schwarzian(c: Curve, frm: Chart, to: Chart, p: SurfacePoint, r: float | None = None) -> complex:
    """Schwarzian of the map (to-coordinate) -> (from-coordinate) at p,
    from stencil samples of the actual coordinate change."""
    w0 = chart_coordinate(c, to, p)
    if r is None:
        r = 0.1 * min(1.0, abs(w0)) if to.kind == "branch" else 0.05 * max(abs(w0), 1e-3) if to.kind == "inverse" else 0.05

    def f(w):
        return chart_coordinate(c, frm, chart_point(c, to, w, near=p))

    return schwarzian(f, w0, r)


def cocycle_residual(k: Kernel, frm: Chart, to: Chart, p: SurfacePoint) -> dict:
    """Check S_to = S_from * f'^2 + Schw(f) with f: to-coord -> from-coord."""
    c = k.curve
    s_from = diagonal_jet(k, frm, p).connection
    s_to = diagonal_jet(k, to, p).connection
    fp = chart_derivative(c, to, frm, p)
    schw = transition_schwarzian(c, frm, to, p)
    predicted = s_from * fp**2 + schw
    return {
        "S_from": s_from,
        "S_to": s_to,
        "schwarzian": schw,
        "residual": float(abs(s_to - predicted) / (1 + abs(s_to))),
    }


def difference_residual(k1: Kernel, k2: Kernel, frm: Chart, to: Chart, p: SurfacePoint) -> dict:
    """Weight-2 law for q = S(k1) - S(k2): q_to = q_from * f'^2, no Schwarzian."""
    c = k1.curve
    q_from = diagonal_jet(k1, frm, p).connection - diagonal_jet(k2, frm, p).connection
    q_to = diagonal_jet(k1, to, p).connection - diagonal_jet(k2, to, p).connection
    fp = chart_derivative(c, to, frm, p)
    return {"q_from": q_from, "q_to": q_to, "residual": float(abs(q_to - q_from * fp**2) / (1 + abs(q_to)))}


def uniformization_genus1(m, pts=None) -> ConnectionSample:
    """The flat structure of the torus: S = 0 in the z chart."""
    c = elliptic_curve(m.tau if hasattr(m, "tau") else m)
    pts = pts if pts is not None else [point(c, 0.25 + 0.25 * c.tau)]
    n = len(pts)
    return ConnectionSample(FLAT, list(pts), np.array([p.x for p in pts]), np.zeros(n, dtype=complex), np.zeros(n))
