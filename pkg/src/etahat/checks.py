"""Invariant checks on a curve's kernels, shared by ``verify`` and the tests.

Every check reduces to one number compared against one tolerance. Most
are upper bounds (residuals); the uniqueness margin and the positivity of
Im tau are lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from etahat.config import Tolerances
from etahat.curves import FLAT, Chart, Curve, SurfacePoint, point
from etahat.kernels import (
    Kernel,
    _sample_xs,
    a_normalize,
    base_kernel,
    hodge_correct,
    kernel_value,
    obstruction,
    perturb,
    raw_basis_values,
    response_matrix,
    slice_periods,
)
from etahat.periods import PeriodData, cup_product, holomorphic_class, period_matrices
from etahat.projstruct import cocycle_residual, diagonal_jet, difference_residual
from etahat.special_functions import quasi_periods

TORUS_SAMPLE = ((0.37, 0.21), (0.62, 0.44), (0.18, 0.77), (0.83, 0.58), (0.45, 0.12))


@dataclass(frozen=True)
class Check:
    name: str
    curve: str
    value: float
    tol: float
    bound: str = "max"

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value < self.tol if self.bound == "max" else self.value > self.tol

    def row(self) -> dict:
        return {
            "check": self.name,
            "curve": self.curve,
            "value": self.value,
            "tol": self.tol,
            "bound": self.bound,
            "passed": self.passed,
        }


@dataclass
class CurveKernels:
    curve: Curve
    pd: PeriodData
    base: Kernel
    bergman: Kernel
    etahat: Kernel


def curve_label(c: Curve) -> str:
    if c.is_elliptic:
        return f"genus1 tau={c.tau:.6g}"
    return f"genus{c.genus} deg{len(c.coeffs) - 1}"


def sample_points(c: Curve, xs=None, n: int = 5) -> list[SurfacePoint]:
    if xs:
        return [point(c, complex(x)) for x in xs]
    if c.is_elliptic:
        return [point(c, a + b * c.tau) for a, b in TORUS_SAMPLE[:n]]
    return [point(c, x) for x in _sample_xs(c, n)]


def build_pipeline(c: Curve, tol: Tolerances = Tolerances(), perturbation=None) -> CurveKernels:
    pd = period_matrices(c, rtol=tol.quad_rtol)
    base = base_kernel(c, check=False)
    bergman = a_normalize(base, pd, rtol=tol.quad_rtol)
    eta = hodge_correct(bergman, pd)
    if perturbation is not None:
        eta = perturb(eta, perturbation)
    return CurveKernels(c, pd, base, bergman, eta)


def _jet_chart(c: Curve) -> Chart:
    return FLAT if c.is_elliptic else Chart("affine")


def contract_residual(k: Kernel, pts, tol: Tolerances) -> float:
    ch = _jet_chart(k.curve)
    worst = 0.0
    for p in pts:
        j = diagonal_jet(k, ch, p, tol=tol.jet_tol)
        worst = max(worst, abs(j.biresidue - 1), abs(j.residue_term))
    return worst


def symmetry_residual(k: Kernel, pts) -> float:
    c = k.curve
    qs = list(pts)
    if not c.is_elliptic:
        qs += [SurfacePoint(p.x, -p.y) for p in pts]
    worst = 0.0
    for i, p in enumerate(qs):
        for q in qs[i + 1 :]:
            if abs(p.x - q.x) < 1e-3:
                continue
            a, b = kernel_value(k, p, q), kernel_value(k, q, p)
            worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst


def obstruction_norm(ck: CurveKernels, k: Kernel, pts, tol: Tolerances) -> float:
    return max(obstruction(slice_periods(k, p, ck.pd, rtol=tol.quad_rtol), ck.pd).norm for p in pts)


def cup_ratios(ck: CurveKernels, k: Kernel, pts, tol: Tolerances) -> np.ndarray:
    """cup(slice class at x, v_k) / (2 pi i v_k(x)) for every x and k."""
    pd = ck.pd
    out = []
    for p in pts:
        pv = slice_periods(k, p, pd, rtol=tol.quad_rtol)
        v = pd.to_normalized(raw_basis_values(ck.curve, p))
        out.append([cup_product(pv, holomorphic_class(pd, j)) / (2j * math.pi * v[j]) for j in range(pd.genus)])
    return np.array(out)


def cup_residual(ratios: np.ndarray) -> tuple[float, int]:
    sign = 1 if np.mean(ratios.real) >= 0 else -1
    return float(np.max(np.abs(ratios - sign))), sign


def uniqueness_margin(ck: CurveKernels, k: Kernel, pts) -> float:
    R = response_matrix(k, ck.pd, pts)
    s = np.linalg.svd(R, compute_uv=False)
    return float(s[-1] / s[0])


def verify_curve(c: Curve, tol: Tolerances = Tolerances(), xs=None, perturbation=None) -> list[Check]:
    label = curve_label(c)
    ck = build_pipeline(c, tol, perturbation)
    pts = sample_points(c, xs)
    checks = []
    add = checks.append
    if c.is_elliptic:
        add(Check("legendre", label, quasi_periods(c.modulus).legendre_residual(c.tau), tol.legendre))
        closed = -math.pi / c.tau.imag
        add(Check("hodge_correction_closed_form", label, float(abs(ck.etahat.correction[0, 0] - closed)), tol.riemann))
    else:
        tau = ck.pd.tau
        add(Check("riemann_symmetry", label, float(np.max(np.abs(tau - tau.T))), tol.riemann))
        add(Check("riemann_positivity", label, float(np.min(np.linalg.eigvalsh(tau.imag))), 0.0, "min"))
    for name, k in (("base", ck.base), ("bergman", ck.bergman), ("etahat", ck.etahat)):
        add(Check(f"contract_{name}", label, contract_residual(k, pts, tol), tol.contract))
    add(Check("symmetry", label, symmetry_residual(ck.etahat, pts), tol.symmetry))
    add(Check("obstruction", label, obstruction_norm(ck, ck.etahat, pts, tol), tol.obstruction))
    add(Check("cup_identity", label, cup_residual(cup_ratios(ck, ck.etahat, pts, tol))[0], tol.cup))
    add(Check("uniqueness_margin", label, uniqueness_margin(ck, ck.etahat, pts), tol.uniqueness, "min"))
    if not c.is_elliptic:
        far = point(c, complex(max(abs(e) for e in c.roots) + 2.0))
        add(Check("cocycle_affine_inverse", label, cocycle_residual(ck.etahat, Chart("affine"), Chart("inverse"), far)["residual"], tol.cocycle))
        add(Check("difference_law", label, difference_residual(ck.etahat, ck.bergman, Chart("affine"), Chart("inverse"), far)["residual"], tol.cocycle))
    return checks
