"""Homology cycles, contour integrals and period matrices.

Hyperelliptic cycles are built from the polyline through the sorted finite
branch points e_1, ..., e_{2g+1}. Each segment s_j = [e_j, e_{j+1}] carries a
closed lift gamma_j (out along s_j on one sheet, back on the other); for a
form whose odd part is ``g(x) dx / y`` the integral over gamma_j is
``2 int_{s_j} g dx / y``. The even part of every form we integrate is exact on
the x-plane, so it never contributes. Branches are fixed so that
gamma_j . gamma_{j+1} = +1; then a_i = gamma_{2i-1} and
b_i = gamma_{2i} + gamma_{2i+2} + ... + gamma_{2g} is a symplectic basis
with a_i . b_i = +1.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from etahat.curves import Curve, Differential, holomorphic_basis
from etahat.errors import BadConfiguration, ContractViolation, PoleOnPath, SingularPiA
from etahat.quadrature import adaptive, chebyshev_rule, legendre_rule

QUAD_RTOL = 1e-11
POLE_CLEARANCE = 1e-3


@dataclass(frozen=True)
class Segment:
    """Straight segment between consecutive branch points with a fixed y-branch.

    On the segment, y = sign * half * sqrt(1 - t^2) * R(x) with
    x = mid + half * t.
    """

    index: int
    start: complex
    end: complex
    others: tuple
    lead: complex
    sign: int = 1

    @property
    def mid(self) -> complex:
        return (self.start + self.end) / 2

    @property
    def half(self) -> complex:
        return (self.end - self.start) / 2

    def x(self, t):
        return self.mid + self.half * t

    def R(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.full(x.shape, cmath.sqrt(-self.lead))
        for e in self.others:
            out = out * cmath.sqrt(self.mid - e) * np.sqrt((x - e) / (self.mid - e))
        return out

    def y(self, t):
        t = np.asarray(t, dtype=float)
        return self.sign * self.half * np.sqrt(1 - t * t) * self.R(self.x(t))

    def end_direction(self, at_end: bool) -> complex:
        """Direction of y approaching an endpoint along the segment."""
        x = self.end if at_end else self.start
        return self.sign * self.half * complex(self.R(x))

    def with_sign(self, sign: int) -> "Segment":
        return Segment(self.index, self.start, self.end, self.others, self.lead, sign)

    def distance(self, p: complex) -> float:
        d = self.end - self.start
        t = ((p - self.start) * d.conjugate()).real / abs(d) ** 2
        t = min(1.0, max(0.0, t))
        return abs(p - (self.start + t * d))


@dataclass(frozen=True)
class TorusSegment:
    start: complex
    end: complex
    lattice: tuple  # integer coordinates (m, n) of end - start in the basis (1, tau)


@dataclass(frozen=True)
class Cycle:
    label: str
    terms: tuple  # ((segment, multiplicity), ...)
    chain: tuple = ()  # coefficients over gamma_1..gamma_2g (hyperelliptic)

    @property
    def support(self):
        return [s for s, _ in self.terms]


@dataclass
class PeriodData:
    curve: Curve = field(repr=False)
    cycles: list = field(repr=False)
    Pi_a: np.ndarray
    Pi_b: np.ndarray
    tau: np.ndarray

    @property
    def genus(self) -> int:
        return self.curve.genus

    @property
    def im_tau(self) -> np.ndarray:
        return self.tau.imag

    @property
    def a_cycles(self):
        return self.cycles[: self.genus]

    @property
    def b_cycles(self):
        return self.cycles[self.genus :]

    def normalized_basis(self) -> list[Differential]:
        inv = np.linalg.inv(self.Pi_a)
        if self.curve.is_elliptic:
            return [Differential(self.curve, (complex(inv[0, 0]),))]
        return [Differential(self.curve, tuple(inv[j])) for j in range(self.genus)]

    def to_normalized(self, u_vals) -> np.ndarray:
        """Values of v = Pi_a^{-1} u from values of the raw basis u."""
        return np.linalg.solve(self.Pi_a, np.asarray(u_vals, dtype=complex))


@dataclass(frozen=True)
class PeriodVector:
    A: np.ndarray
    B: np.ndarray


# -- cycles -------------------------------------------------------------------


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        v = ((b - a).conjugate() * (c - a)).imag
        return 0 if abs(v) < 1e-14 else (1 if v > 0 else -1)

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == o2 == o3 == o4 == 0:
        # collinear: overlap test on the common line
        d = p2 - p1
        ts = sorted((((q - p1) * d.conjugate()).real / abs(d) ** 2) for q in (q1, q2))
        return ts[1] > 1e-12 and ts[0] < 1 - 1e-12
    return False


def _raw_segments(c: Curve) -> list[Segment]:
    e = c.roots
    segs = []
    for j in range(len(e) - 1):
        others = tuple(r for k, r in enumerate(e) if k not in (j, j + 1))
        segs.append(Segment(j, e[j], e[j + 1], others, c.lead))
    for i in range(len(segs)):
        for k in range(i + 1, len(segs)):
            s, t = segs[i], segs[k]
            if k == i + 1:
                # adjacent: may only share the common endpoint
                d1 = s.start - s.end
                d2 = t.end - t.start
                if abs((d1.conjugate() * d2).imag) < 1e-14 * abs(d1) * abs(d2) and (d1.conjugate() * d2).real > 0:
                    raise BadConfiguration("adjacent cuts overlap")
            elif _segments_cross(s.start, s.end, t.start, t.end):
                raise BadConfiguration("straight cuts between consecutive branch points intersect")
    return segs


def _raw_chain_sign(s: Segment, t: Segment) -> int:
    """Intersection number gamma_s . gamma_t of adjacent lifts (shared point s.end).

    In the local coordinate w = y / C at the shared branch point, gamma_s
    crosses the origin with velocity -dir(s) and gamma_t with velocity +dir(t).
    """
    u1 = s.end_direction(at_end=True)
    u2 = t.end_direction(at_end=False)
    return -1 if (u1.conjugate() * u2).imag > 0 else 1


def _normalize_chain(segs: list[Segment]) -> list[Segment]:
    out = [segs[0]]
    for t in segs[1:]:
        rho = _raw_chain_sign(out[-1], t)
        out.append(t.with_sign(rho))
    return out


def chain_intersections(segs: list[Segment]) -> np.ndarray:
    n = len(segs)
    G = np.zeros((n, n), dtype=int)
    for j in range(n - 1):
        s = _raw_chain_sign(segs[j], segs[j + 1])
        G[j, j + 1] = s
        G[j + 1, j] = -s
    return G


def cycle_basis(c: Curve) -> list[Cycle]:
    """Symplectic basis [a_1..a_g, b_1..b_g] with a_i . b_i = +1."""
    if c.is_elliptic:
        return [
            Cycle("a1", ((TorusSegment(0j, 1 + 0j, (1, 0)), 1),)),
            Cycle("b1", ((TorusSegment(0j, c.tau, (0, 1)), 1),)),
        ]
    g = c.genus
    segs = _normalize_chain(_raw_segments(c))
    n = 2 * g
    cycles = []
    for i in range(1, g + 1):
        chain = [0] * n
        chain[2 * i - 2] = 1
        cycles.append(Cycle(f"a{i}", ((segs[2 * i - 2], 1),), tuple(chain)))
    for i in range(1, g + 1):
        chain = [0] * n
        terms = []
        for m in range(i, g + 1):
            chain[2 * m - 1] = 1
            terms.append((segs[2 * m - 1], 1))
        cycles.append(Cycle(f"b{i}", tuple(terms), tuple(chain)))
    return cycles


def intersection_matrix(c: Curve, cycles: list[Cycle]) -> np.ndarray:
    """Intersection pairing of the given cycles, computed from the construction."""
    if c.is_elliptic:
        vecs = [np.array(cy.terms[0][0].lattice) for cy in cycles]
        return np.array([[int(u[0] * v[1] - u[1] * v[0]) for v in vecs] for u in vecs])
    segs = [None] * (2 * c.genus)
    for cy in cycles:
        for s, _ in cy.terms:
            segs[s.index] = s
    G = chain_intersections(segs)
    C = np.array([cy.chain for cy in cycles])
    return C @ G @ C.T


def symplectic_form(g: int) -> np.ndarray:
    J = np.zeros((2 * g, 2 * g), dtype=int)
    J[:g, g:] = np.eye(g, dtype=int)
    J[g:, :g] = -np.eye(g, dtype=int)
    return J


# -- integration --------------------------------------------------------------


def _torus_distance(c: Curve, seg: TorusSegment, p: complex) -> float:
    tau = c.tau
    n0 = round(p.imag / tau.imag)
    best = np.inf
    d = seg.end - seg.start
    for n in range(n0 - 2, n0 + 3):
        for m in range(-3, 4):
            q = p - n * tau - m
            t = ((q - seg.start) * d.conjugate()).real / abs(d) ** 2
            t = min(1.0, max(0.0, t))
            best = min(best, abs(q - (seg.start + t * d)))
    return best


def segment_integral(c: Curve, form, seg, rtol: float = QUAD_RTOL):
    """Integral of the form's odd part g(x) dx/y along a hyperelliptic segment,
    or of its coefficient along a torus segment. Returns (value, nodes, residual)."""
    if isinstance(seg, TorusSegment):
        for p in getattr(form, "poles", ()):
            if _torus_distance(c, seg, p) < POLE_CLEARANCE:
                raise PoleOnPath(f"pole at {p} within {POLE_CLEARANCE} of a cycle")
        half = (seg.end - seg.start) / 2
        mid = (seg.end + seg.start) / 2

        def f(t):
            return form.torus_coefficient(mid + half * t) * half

        return adaptive(f, legendre_rule, rtol)
    for p in getattr(form, "poles", ()):
        if seg.distance(p) < POLE_CLEARANCE:
            raise PoleOnPath(f"pole at {p} within {POLE_CLEARANCE} of a cycle")

    def f(t):
        x = seg.x(t)
        return form.odd_numerator(x) / (seg.sign * seg.R(x))

    return adaptive(f, chebyshev_rule, rtol)


def integrate_over_cycle(c: Curve, d, cy: Cycle, rtol: float = QUAD_RTOL, diagnostics: list | None = None) -> complex:
    """Contour integral of a one-form over a cycle.

    ``d`` needs ``odd_numerator(x)`` (hyperelliptic) or
    ``torus_coefficient(z)`` (torus) and an optional ``poles`` sequence.
    """
    total = 0j
    factor = 1.0 if c.is_elliptic else 2.0
    for seg, mult in cy.terms:
        val, n, resid = segment_integral(c, d, seg, rtol)
        if diagnostics is not None:
            diagnostics.append({"cycle": cy.label, "nodes": n, "residual": resid})
        total += factor * mult * val
    return total


def cycle_periods(c: Curve, d, cycles, rtol: float = QUAD_RTOL) -> PeriodVector:
    g = c.genus
    vals = np.array([integrate_over_cycle(c, d, cy, rtol) for cy in cycles])
    return PeriodVector(vals[:g], vals[g:])


def continue_along(c: Curve, xs, y0: complex) -> np.ndarray:
    """Analytic continuation of y along the sampled path xs starting from y0."""
    ys = np.empty(len(xs), dtype=complex)
    y = complex(y0)
    for k, x in enumerate(xs):
        cand = complex(c.y_plus(x))
        y = cand if abs(cand - y) <= abs(cand + y) else -cand
        ys[k] = y
    return ys


def integrate_closed_path(c: Curve, d, path, dpath, y0: complex, n: int = 2048) -> complex:
    """Integral of ``d`` over the closed loop t -> path(t), t in [0, 1), with y
    continued from y0 (periodic trapezoid rule)."""
    t = np.arange(n) / n
    xs = path(t)
    dx = dpath(t)
    if c.is_elliptic:
        return complex(np.sum(d.torus_coefficient(xs) * dx) / n)
    ys = continue_along(c, xs, y0)
    even = d.even_part(xs) if hasattr(d, "even_part") else 0.0
    return complex(np.sum((d.odd_numerator(xs) / ys + even) * dx) / n)


# -- period matrices ------------------------------------------------------------


def period_matrices(c: Curve, rtol: float = QUAD_RTOL, sym_tol: float = 1e-8) -> PeriodData:
    cycles = cycle_basis(c)
    basis = holomorphic_basis(c)
    g = c.genus
    Pi = np.array([[integrate_over_cycle(c, u, cy, rtol) for cy in cycles] for u in basis])
    Pi_a, Pi_b = Pi[:, :g], Pi[:, g:]
    if np.linalg.cond(Pi_a) > 1e12:
        raise SingularPiA("a-period matrix is numerically singular")
    tau = np.linalg.solve(Pi_a, Pi_b)
    asym = np.max(np.abs(tau - tau.T))
    if asym > sym_tol:
        raise ContractViolation(f"period matrix not symmetric (|tau - tau^T| = {asym:.3g})")
    try:
        np.linalg.cholesky((tau.imag + tau.imag.T) / 2)
    except np.linalg.LinAlgError as exc:
        raise ContractViolation("Im(tau) is not positive definite") from exc
    return PeriodData(c, cycles, Pi_a, Pi_b, tau)


def cup_product(u: PeriodVector, w: PeriodVector) -> complex:
    """Riemann bilinear pairing sum_i (u.A_i w.B_i - u.B_i w.A_i)."""
    return complex(np.sum(np.asarray(u.A) * np.asarray(w.B) - np.asarray(u.B) * np.asarray(w.A)))


def holomorphic_class(pd: PeriodData, k: int) -> PeriodVector:
    g = pd.genus
    return PeriodVector(np.eye(g, dtype=complex)[k], pd.tau[:, k].copy())


def antiholomorphic_class(pd: PeriodData, k: int) -> PeriodVector:
    g = pd.genus
    return PeriodVector(np.eye(g, dtype=complex)[k], pd.tau.conj()[:, k].copy())
