"""Curve models, points, charts and holomorphic differentials.

Two models are supported: the flat torus C / (Z + tau Z) with coordinate z,
and the odd-degree hyperelliptic curve y^2 = P(x), deg P = 2g + 1, which has a
single branch point at infinity.

Sheets are labelled against the reference branch
``y_plus(x) = sqrt(lead) * prod_m sqrt(x - e_m)`` (principal square roots),
which is the positive root of P on the real ray to the right of every branch
point when the leading coefficient is positive.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from etahat.errors import BadModulus, ChartDomain, DegenerateCurve, InputError
from etahat.special_functions import Modulus

ROOT_SEPARATION = 1e-8
BRANCH_CLEARANCE = 1e-6


@dataclass(frozen=True)
class Curve:
    kind: str
    genus: int
    modulus: Modulus | None = None
    coeffs: tuple = ()
    roots: tuple = ()

    @property
    def is_elliptic(self) -> bool:
        return self.kind == "elliptic"

    @property
    def tau(self) -> complex:
        return self.modulus.tau

    @property
    def lead(self) -> complex:
        return self.coeffs[-1]

    def P(self, x):
        return np.polyval(self.coeffs[::-1], x)

    def dP(self, x):
        return np.polyval(np.polyder(np.array(self.coeffs[::-1])), x)

    def y_plus(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.full(x.shape, np.sqrt(complex(self.lead)))
        for e in self.roots:
            out = out * np.sqrt(x - e)
        return out[()] if out.ndim == 0 else out

    def to_spec(self) -> dict:
        if self.is_elliptic:
            return {"kind": "elliptic", "tau": [self.tau.real, self.tau.imag]}
        return {"kind": "hyperelliptic", "coeffs": [[c.real, c.imag] for c in self.coeffs]}


@dataclass(frozen=True)
class SurfacePoint:
    """A point on a curve. For the torus ``x`` holds z and ``y`` is None."""

    x: complex
    y: complex | None = None
    branch: int | None = None

    def swapped_sheet(self) -> "SurfacePoint":
        return SurfacePoint(self.x, None if self.y is None else -self.y, self.branch)


@dataclass(frozen=True)
class Chart:
    """Coordinate chart.

    kind: ``flat`` (torus z), ``affine`` (x), ``inverse`` (1/x) or ``branch``
    (s with x = e + s^2 at branch point ``root``).
    """

    kind: str
    sheet: int = 1
    root: int | None = None

    def __post_init__(self):
        if self.kind not in ("flat", "affine", "inverse", "branch"):
            raise InputError(f"unknown chart kind {self.kind!r}")
        if self.sheet not in (1, -1):
            raise InputError("sheet must be +1 or -1")
        if self.kind == "branch" and self.root is None:
            raise InputError("branch chart needs a root index")

    @property
    def label(self) -> str:
        if self.kind == "branch":
            return f"branch{self.root}"
        if self.kind == "flat":
            return "flat"
        return f"{self.kind}{'+' if self.sheet > 0 else '-'}"


FLAT = Chart("flat")


@dataclass(frozen=True)
class Differential:
    """Meromorphic one-form ``n(x) dx / y`` (hyperelliptic) or ``n0 dz`` (torus).

    ``numerator`` holds polynomial coefficients in ascending degree.
    """

    curve: Curve = field(repr=False)
    numerator: tuple

    poles = ()

    def n(self, x):
        return np.polyval(np.asarray(self.numerator, dtype=complex)[::-1], x)

    odd_numerator = n

    def torus_coefficient(self, z):
        return np.full(np.shape(z), complex(self.numerator[0]))


def _parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InputError(f"complex numbers are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _polish_roots(coeffs_desc: np.ndarray, roots: np.ndarray) -> np.ndarray:
    d = np.polyder(coeffs_desc)
    for _ in range(3):
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.polyval(coeffs_desc, roots) / np.polyval(d, roots)
        roots = roots - np.where(np.isfinite(step), step, 0)
    return roots


def elliptic_curve(tau) -> Curve:
    try:
        m = Modulus(complex(tau))
    except (TypeError, ValueError) as exc:
        raise BadModulus(str(exc)) from exc
    return Curve(kind="elliptic", genus=1, modulus=m)


def hyperelliptic_curve(coeffs) -> Curve:
    """Curve y^2 = sum coeffs[k] x^k with deg = 2g + 1 >= 5."""
    c = [complex(v) for v in coeffs]
    if not c or c[-1] == 0:
        raise DegenerateCurve("leading coefficient must be nonzero")
    deg = len(c) - 1
    if deg < 5 or deg % 2 == 0:
        raise DegenerateCurve(f"need odd degree 2g+1 >= 5, got degree {deg}")
    desc = np.array(c[::-1])
    roots = _polish_roots(desc, np.roots(desc))
    for i in range(deg):
        for j in range(i + 1, deg):
            if abs(roots[i] - roots[j]) <= ROOT_SEPARATION:
                raise DegenerateCurve("P has a repeated root")
    roots = sorted((complex(r) for r in roots), key=lambda r: (round(r.real, 12), r.imag))
    return Curve(kind="hyperelliptic", genus=(deg - 1) // 2, coeffs=tuple(c), roots=tuple(roots))


def curve_from_roots(roots, lead: complex = 1.0) -> Curve:
    coeffs = np.poly(np.asarray(roots, dtype=complex))[::-1] * lead
    return hyperelliptic_curve(coeffs)


def make_curve(spec) -> Curve:
    """Build a curve from a JSON-style spec.

    ``{"kind": "elliptic", "tau": [re, im]}`` or
    ``{"kind": "hyperelliptic", "coeffs": [[re, im], ...]}`` (ascending degree).
    A ``"roots"`` list may replace ``"coeffs"`` for a monic model.
    """
    if isinstance(spec, Curve):
        return spec
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InputError("curve spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "elliptic":
        if "tau" not in spec:
            raise InputError("elliptic curve spec needs 'tau'")
        return elliptic_curve(_parse_complex(spec["tau"]))
    if kind == "hyperelliptic":
        if "coeffs" in spec:
            return hyperelliptic_curve([_parse_complex(v) for v in spec["coeffs"]])
        if "roots" in spec:
            return curve_from_roots([_parse_complex(v) for v in spec["roots"]])
        raise InputError("hyperelliptic curve spec needs 'coeffs' or 'roots'")
    raise InputError(f"unknown curve kind {kind!r}")


# -- points -----------------------------------------------------------------


def point(c: Curve, x: complex, sheet: int = 1) -> SurfacePoint:
    if c.is_elliptic:
        return SurfacePoint(complex(x))
    y = sheet * complex(c.y_plus(x))
    return SurfacePoint(complex(x), y)


def branch_point(c: Curve, i: int) -> SurfacePoint:
    return SurfacePoint(c.roots[i], 0j, branch=i)


def continue_y(c: Curve, x: complex, y_ref: complex) -> complex:
    """The root of y^2 = P(x) closest to ``y_ref``."""
    y = complex(c.y_plus(x))
    return y if abs(y - y_ref) <= abs(y + y_ref) else -y


def point_near(c: Curve, x: complex, ref: SurfacePoint) -> SurfacePoint:
    if c.is_elliptic:
        return SurfacePoint(complex(x))
    return SurfacePoint(complex(x), continue_y(c, x, ref.y))


def on_curve_residual(c: Curve, p: SurfacePoint) -> float:
    px = complex(c.P(p.x))
    return abs(p.y * p.y - px) / (1 + abs(px))


# -- charts -------------------------------------------------------------------


def _min_root_distance(c: Curve, x: complex) -> float:
    return min(abs(x - e) for e in c.roots)


def _branch_q(c: Curve, i: int, s):
    """Q(s) with y = s Q(s) on the branch chart at root i."""
    e = c.roots[i]
    s = np.asarray(s, dtype=complex)
    q2 = np.full(s.shape, complex(c.lead))
    for j, ej in enumerate(c.roots):
        if j != i:
            q2 = q2 * (e + s * s - ej)
    q0 = cmath.sqrt(complex(c.dP(e)))
    return q0 * np.sqrt(q2 / q0**2)


def _branch_radius(c: Curve, i: int) -> float:
    e = c.roots[i]
    gap = min(abs(e - ej) for j, ej in enumerate(c.roots) if j != i)
    return float(np.sqrt(0.5 * gap))


def check_domain(c: Curve, ch: Chart, p: SurfacePoint) -> None:
    if c.is_elliptic:
        if ch.kind != "flat":
            raise ChartDomain("torus points only live in the flat chart")
        return
    if ch.kind == "flat":
        raise ChartDomain("flat chart is only defined on the torus")
    if ch.kind == "affine":
        if _min_root_distance(c, p.x) <= BRANCH_CLEARANCE:
            raise ChartDomain("affine chart too close to a branch point")
    elif ch.kind == "inverse":
        if abs(p.x) < 1e-12 or _min_root_distance(c, p.x) <= BRANCH_CLEARANCE:
            raise ChartDomain("inverse chart needs x away from 0 and branch points")
    else:
        s2 = p.x - c.roots[ch.root]
        if abs(s2) >= _branch_radius(c, ch.root) ** 2:
            raise ChartDomain("point outside the branch chart disc")


def chart_coordinate(c: Curve, ch: Chart, p: SurfacePoint) -> complex:
    check_domain(c, ch, p)
    if ch.kind in ("flat", "affine"):
        return p.x
    if ch.kind == "inverse":
        return 1.0 / p.x
    s = cmath.sqrt(p.x - c.roots[ch.root])
    if p.y is not None and s != 0:
        if abs(s * complex(_branch_q(c, ch.root, s)) - p.y) > abs(-s * complex(_branch_q(c, ch.root, -s)) - p.y):
            s = -s
    return s


def chart_point(c: Curve, ch: Chart, s: complex, near: SurfacePoint | None = None) -> SurfacePoint:
    """Point with chart coordinate ``s``.

    For the x-type charts the sheet comes from ``near`` (continuation) when
    given, else from the chart's sheet label.
    """
    s = complex(s)
    if ch.kind == "flat":
        return SurfacePoint(s)
    if ch.kind == "branch":
        x = c.roots[ch.root] + s * s
        p = SurfacePoint(x, s * complex(_branch_q(c, ch.root, s)))
    else:
        x = s if ch.kind == "affine" else 1.0 / s
        p = point_near(c, x, near) if near is not None else point(c, x, ch.sheet)
    check_domain(c, ch, p)
    return p


def dx_dcoord(c: Curve, ch: Chart, p: SurfacePoint) -> complex:
    """Derivative of the curve's base coordinate (z or x) w.r.t. the chart coordinate."""
    if ch.kind in ("flat", "affine"):
        return 1.0 + 0j
    if ch.kind == "inverse":
        return -p.x * p.x
    return 2.0 * chart_coordinate(c, ch, p)


def chart_derivative(c: Curve, frm: Chart, to: Chart, p: SurfacePoint) -> complex:
    """d(to-coordinate)/d(from-coordinate) at p."""
    check_domain(c, frm, p)
    check_domain(c, to, p)
    if frm == to:
        return 1.0 + 0j
    return dx_dcoord(c, frm, p) / dx_dcoord(c, to, p)


def form_factor(c: Curve, ch: Chart, p: SurfacePoint) -> complex:
    """Chart coefficient of dx/y (hyperelliptic) or dz (torus) at p."""
    check_domain(c, ch, p)
    if c.is_elliptic:
        return 1.0 + 0j
    if ch.kind == "branch":
        s = chart_coordinate(c, ch, p)
        return 2.0 / complex(_branch_q(c, ch.root, s))
    return dx_dcoord(c, ch, p) / p.y


# -- differentials ------------------------------------------------------------


def holomorphic_basis(c: Curve) -> list[Differential]:
    if c.is_elliptic:
        return [Differential(c, (1.0,))]
    return [Differential(c, tuple([0.0] * i + [1.0])) for i in range(c.genus)]


def eval_differential(d: Differential, p: SurfacePoint, ch: Chart) -> complex:
    c = d.curve
    if c.is_elliptic:
        check_domain(c, ch, p)
        return complex(d.numerator[0])
    return complex(d.n(p.x)) * form_factor(c, ch, p)
