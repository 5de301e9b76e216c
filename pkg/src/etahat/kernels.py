"""Symmetric second-kind bidifferentials on C x C.

A kernel is ``base(p, q) + sum_jk M_jk u_j(p) u_k(q)`` with ``u`` the raw
holomorphic basis (dz, or x^j dx / y) and ``M`` symmetric. Three stages:

* ``raw``           the closed-form base (Klein's formula for y^2 = P(x))
* ``a-normalized``  all a-periods of every slice vanish (Bergman kernel)
* ``hodge``         every slice class lies in H^{0,1}: the intrinsic kernel

The last step subtracts ``pi * v(p)^T (Im tau)^{-1} v(q)``, which is the unique
symmetric holomorphic correction killing the obstruction ``B - conj(tau) A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from etahat.curves import (
    Chart,
    Curve,
    SurfacePoint,
    check_domain,
    dx_dcoord,
    point,
)
from etahat.errors import (
    AsymmetricInput,
    AsymmetricSolution,
    ContractViolation,
    DiagonalPole,
    InputError,
    PoleOnPath,
    SingularImTau,
)
from etahat.periods import PeriodData, PeriodVector, cycle_periods
from etahat.special_functions import quasi_periods, weierstrass_p

RAW = "raw"
A_NORMALIZED = "a-normalized"
HODGE = "hodge"

SLICE_CLEARANCE = 1e-2
CONTRACT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Kernel:
    curve: Curve = field(repr=False)
    base: str
    correction: np.ndarray
    stage: str
    eta1: complex | None = None

    @property
    def genus(self) -> int:
        return self.curve.genus


@dataclass(frozen=True)
class ObstructionVector:
    O: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self.O)))


def raw_basis_values(c: Curve, p: SurfacePoint) -> np.ndarray:
    """u_j(p) as coefficients of dz or dx (not of a chart coordinate)."""
    if c.is_elliptic:
        return np.ones(1, dtype=complex)
    return np.array([p.x**j / p.y for j in range(c.genus)], dtype=complex)


def klein_F(c: Curve, x1, x2):
    lam = list(c.coeffs) + [0j]
    out = 0j
    for k in range(c.genus + 1):
        out = out + (x1 * x2) ** k * (2 * lam[2 * k] + lam[2 * k + 1] * (x1 + x2))
    return out


def _same_point(c: Curve, p: SurfacePoint, q: SurfacePoint) -> bool:
    if c.is_elliptic:
        d = p.x - q.x
        tau = c.tau
        d -= round(d.imag / tau.imag) * tau
        d -= round(d.real)
        return abs(d) < 1e-12
    return abs(p.x - q.x) < 1e-12 and abs(p.y - q.y) <= abs(p.y + q.y)


def base_value(k: Kernel, p: SurfacePoint, q: SurfacePoint, dx: complex | None = None) -> complex:
    c = k.curve
    t = p.x - q.x if dx is None else dx
    if c.is_elliptic:
        return complex(weierstrass_p(t, c.modulus)) + k.eta1
    if p.y == 0 or q.y == 0:
        raise InputError("kernel evaluation at a branch point needs the branch chart formula")
    return (2 * p.y * q.y + klein_F(c, p.x, q.x)) / (4 * t * t * p.y * q.y)


def kernel_value(k: Kernel, p: SurfacePoint, q: SurfacePoint, dx: complex | None = None) -> complex:
    """Coefficient of dz dw or dx1 dx2.

    ``dx`` may supply p.x - q.x computed without cancellation (near the
    diagonal the subtraction loses most digits).
    """
    if (dx is None or dx == 0) and _same_point(k.curve, p, q):
        raise DiagonalPole("kernel evaluated on the diagonal")
    up = raw_basis_values(k.curve, p)
    uq = raw_basis_values(k.curve, q)
    return base_value(k, p, q, dx) + complex(up @ k.correction @ uq)


def eval_kernel(k: Kernel, p: SurfacePoint, q: SurfacePoint, ch: Chart, dx: complex | None = None) -> complex:
    """Chart coefficient of the bidifferential at (p, q), both in chart ``ch``."""
    c = k.curve
    check_domain(c, ch, p)
    check_domain(c, ch, q)
    return kernel_value(k, p, q, dx) * dx_dcoord(c, ch, p) * dx_dcoord(c, ch, q)


class SliceForm:
    """The one-form q -> kernel(p, q) split into an exact even part and the
    odd part ``odd_numerator(x) dx / y``."""

    def __init__(self, k: Kernel, p: SurfacePoint):
        self.kernel = k
        self.p = p
        self.poles = (p.x,)
        c = k.curve
        self._coef = raw_basis_values(c, p) @ k.correction

    def odd_numerator(self, x):
        c = self.kernel.curve
        p = self.p
        x = np.asarray(x, dtype=complex)
        t = p.x - x
        val = klein_F(c, p.x, x) / (4 * t * t * p.y)
        for j, cj in enumerate(self._coef):
            val = val + cj * x**j
        return val

    def even_part(self, x):
        t = self.p.x - np.asarray(x, dtype=complex)
        return 1.0 / (2 * t * t)

    def torus_coefficient(self, w):
        k = self.kernel
        return weierstrass_p(self.p.x - np.asarray(w, dtype=complex), k.curve.modulus) + k.eta1 + self._coef[0]


# -- construction -------------------------------------------------------------


def _contract_points(c: Curve) -> list[SurfacePoint]:
    if c.is_elliptic:
        tau = c.tau
        return [point(c, 0.31 + 0.27 * tau), point(c, 0.62 + 0.55 * tau)]
    return [point(c, x) for x in _sample_xs(c, 3)]


def check_contract(k: Kernel, points=None, tol: float = CONTRACT_TOL) -> list:
    """Verify biresidue 1 and no residue term at sample points; raise on failure."""
    from etahat.projstruct import diagonal_jet

    c = k.curve
    ch = Chart("flat") if c.is_elliptic else Chart("affine")
    jets = []
    for p in points or _contract_points(c):
        jet = diagonal_jet(k, ch, p)
        if abs(jet.biresidue - 1) > tol or abs(jet.residue_term) > tol:
            raise ContractViolation(
                f"diagonal expansion at x={p.x}: biresidue={jet.biresidue}, residue term={jet.residue_term}"
            )
        jets.append(jet)
    return jets


def base_kernel(c: Curve, check: bool = True) -> Kernel:
    g = c.genus
    zero = np.zeros((g, g), dtype=complex)
    if c.is_elliptic:
        k = Kernel(c, "weierstrass", zero, A_NORMALIZED, eta1=quasi_periods(c.modulus).eta1)
    else:
        k = Kernel(c, "klein", zero, RAW)
    if check:
        check_contract(k)
    return k


def _sample_xs(c: Curve, n: int) -> list[complex]:
    """Generic points well away from the cycle supports."""
    roots = np.array(c.roots)
    centre = roots.mean()
    radius = np.max(np.abs(roots - centre))
    angles = np.deg2rad([63.0, 117.0, -71.0, -109.0, 84.0, -93.0, 40.0, 140.0, -40.0, -140.0])
    out = []
    for r in (0.6 * radius + 0.3, radius + 0.7):
        for a in angles:
            x = complex(centre + r * np.exp(1j * a))
            gap = min(abs(x - e) for e in roots)
            seg_gap = min(_dist_segment(x, roots[j], roots[j + 1]) for j in range(len(roots) - 1))
            if gap > 0.1 and seg_gap > 0.1:
                out.append(x)
            if len(out) == n:
                return out
    return out


def _dist_segment(p, a, b) -> float:
    d = b - a
    t = ((p - a) * np.conj(d)).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


def _support_distance(pd: PeriodData, p: SurfacePoint) -> float:
    from etahat.periods import Segment, _torus_distance

    best = np.inf
    for cy in pd.cycles:
        for seg in cy.support:
            if isinstance(seg, Segment):
                best = min(best, seg.distance(p.x))
            else:
                best = min(best, _torus_distance(pd.curve, seg, p.x))
    return best


def slice_periods(k: Kernel, p: SurfacePoint, pd: PeriodData, rtol: float | None = None) -> PeriodVector:
    """a- and b-periods of the slice q -> k(p, q)."""
    if _support_distance(pd, p) < SLICE_CLEARANCE:
        raise PoleOnPath(f"slice point {p.x} lies within {SLICE_CLEARANCE} of a cycle")
    kw = {} if rtol is None else {"rtol": rtol}
    return cycle_periods(k.curve, SliceForm(k, p), pd.cycles, **kw)


def a_normalize(k: Kernel, pd: PeriodData, points=None, sym_tol: float = 1e-6, rtol: float | None = None) -> Kernel:
    """Add the holomorphic correction making every slice's a-periods vanish.

    The a-periods of a slice are a holomorphic differential in the slice
    point: alpha(p) = u(p)^T N. Sampling N at a few points and cancelling it
    with M = -N Pi_a^{-1} gives the Bergman kernel.
    """
    if k.stage not in (RAW, A_NORMALIZED):
        raise InputError(f"a_normalize needs a raw or a-normalized kernel, got stage {k.stage!r}")
    c = k.curve
    g = c.genus
    if points is None:
        points = _contract_points(c) if c.is_elliptic else [point(c, x) for x in _sample_xs(c, g + 2)]
    U = np.array([raw_basis_values(c, p) for p in points])
    alpha = np.array([slice_periods(k, p, pd, rtol).A for p in points])
    N, *_ = np.linalg.lstsq(U, alpha, rcond=None)
    dM = -N @ np.linalg.inv(pd.Pi_a)
    M = k.correction + dM
    asym = float(np.max(np.abs(M - M.T)))
    if asym > sym_tol:
        raise AsymmetricSolution(f"a-normalizing correction asymmetric by {asym:.3g}")
    return replace(k, correction=(M + M.T) / 2, stage=A_NORMALIZED)


def hodge_correction_matrix(pd: PeriodData) -> np.ndarray:
    """-pi Pi_a^{-T} (Im tau)^{-1} Pi_a^{-1}: the correction in the raw basis."""
    Y = (pd.tau.imag + pd.tau.imag.T) / 2
    if np.linalg.cond(Y) > 1e12:
        raise SingularImTau("Im(tau) is numerically singular")
    inv_a = np.linalg.inv(pd.Pi_a)
    return -math.pi * inv_a.T @ np.linalg.inv(Y) @ inv_a


def hodge_correct(bergman: Kernel, pd: PeriodData) -> Kernel:
    if bergman.stage != A_NORMALIZED:
        raise InputError("hodge_correct needs an a-normalized kernel")
    M = bergman.correction + hodge_correction_matrix(pd)
    return replace(bergman, correction=(M + M.T) / 2, stage=HODGE)


def perturb(k: Kernel, M) -> Kernel:
    M = np.asarray(M, dtype=complex)
    g = k.genus
    if M.shape != (g, g):
        raise InputError(f"perturbation must be {g}x{g}")
    if np.max(np.abs(M - M.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(M))):
        raise AsymmetricInput("perturbation matrix must be symmetric")
    return replace(k, correction=k.correction + M)


def obstruction(pv: PeriodVector, pd: PeriodData) -> ObstructionVector:
    return ObstructionVector(np.asarray(pv.B) - pd.tau.conj().T @ np.asarray(pv.A))


def build_kernels(c: Curve, pd: PeriodData | None = None):
    """(period data, base, Bergman, intrinsic) for a curve."""
    from etahat.periods import period_matrices

    pd = pd or period_matrices(c)
    base = base_kernel(c)
    bergman = a_normalize(base, pd)
    return pd, base, bergman, hodge_correct(bergman, pd)


def symmetric_basis(g: int) -> list[np.ndarray]:
    out = []
    for j in range(g):
        for k in range(j, g):
            E = np.zeros((g, g), dtype=complex)
            E[j, k] = E[k, j] = 1.0
            out.append(E)
    return out


def response_matrix(k: Kernel, pd: PeriodData, probes) -> np.ndarray:
    """Linear response of slice obstructions to symmetric perturbations.

    Column m holds the stacked obstruction change at every probe point when
    the kernel is perturbed by the m-th symmetric basis matrix.
    """
    base_obs = [obstruction(slice_periods(k, p, pd), pd).O for p in probes]
    cols = []
    for E in symmetric_basis(k.genus):
        kp = perturb(k, E)
        col = [obstruction(slice_periods(kp, p, pd), pd).O - o for p, o in zip(probes, base_obs)]
        cols.append(np.concatenate(col))
    return np.array(cols).T


def kernel_dump(k: Kernel, pd: PeriodData, diagnostics: dict | None = None) -> dict:
    M = k.correction
    return {
        "curve": k.curve.to_spec(),
        "stage": k.stage,
        "base": k.base,
        "genus": k.genus,
        "correction": [[float(v.real), float(v.imag)] for v in M.ravel()],
        "correction_shape": list(M.shape),
        "tau": [[float(v.real), float(v.imag)] for v in pd.tau.ravel()],
        "diagnostics": diagnostics or {},
    }
