"""Variation of the intrinsic projective structure over moduli.

At genus 1 the intrinsic kernel is ``(p(z - w) + eta1 - pi / Im tau) dz dw``,
so in the flat chart its connection is the constant
``c(tau) = 6 (eta1(tau) - pi / Im tau)``. Since eta1 is holomorphic in tau,
``d c / d conj(tau) = 3 pi i / (Im tau)^2``: a constant multiple of the
invariant density of the upper half-plane. ``dbar_scan`` recovers this from
finite differences of the jet-extracted coefficient.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from etahat.curves import FLAT, Chart, curve_from_roots, elliptic_curve, point, point_near
from etahat.errors import BadConfiguration, ContourTopologyChanged, ContractViolation, InputError, StepTooLarge
from etahat.kernels import build_kernels
from etahat.projstruct import JET_TOL, diagonal_jet
from etahat.special_functions import quasi_periods

KAPPA_EXACT = 3j * math.pi
MODULI_JET_DELTA = 0.02
DBAR_STEP = 2e-4
RICHARDSON_RTOL = 1e-6


@dataclass(frozen=True)
class ModuliSample:
    tau: complex
    c: complex
    dbar_c: complex
    d_c: complex
    kappa: complex
    richardson_residual: float


@dataclass(frozen=True)
class SiegelReference:
    """Invariant density (Im tau)^-2 of the upper half-plane."""

    def density(self, tau: complex) -> float:
        return 1.0 / complex(tau).imag ** 2


@dataclass(frozen=True)
class TraceSample:
    eps: complex
    S: complex
    dbar: complex | None
    dbar_err: float | None
    inconclusive: bool


def closed_form_coefficient(tau: complex) -> complex:
    tau = complex(tau)
    return 6 * (quasi_periods(tau).eta1 - math.pi / tau.imag)


def eta_coefficient_genus1(tau: complex, delta: float = MODULI_JET_DELTA, check_tol: float = 1e-7, jet_tol: float = JET_TOL) -> complex:
    """Flat-chart connection of the intrinsic kernel, by jet extraction.

    The result is compared with ``closed_form_coefficient``; a disagreement
    beyond ``check_tol`` (relative to 1 + |c|) raises ContractViolation.
    """
    tau = complex(tau)
    c = elliptic_curve(tau)
    _, _, _, eta = build_kernels(c)
    val = diagonal_jet(eta, FLAT, point(c, 0.4 + 0.3 * tau), delta=delta, tol=jet_tol).connection
    ref = closed_form_coefficient(tau)
    if abs(val - ref) > check_tol * (1 + abs(ref)):
        raise ContractViolation(f"jet coefficient {val} disagrees with closed form {ref} at tau={tau}")
    return val


def uniformization_coefficient(tau: complex) -> complex:
    return 0j


def _wirtinger(f, tau: complex, h: float) -> tuple[complex, complex]:
    fx = f(tau + h) - f(tau - h)
    fy = f(tau + 1j * h) - f(tau - 1j * h)
    return (fx + 1j * fy) / (4 * h), (fx - 1j * fy) / (4 * h)


def moduli_sample(tau: complex, h: float = DBAR_STEP, section=eta_coefficient_genus1, rtol: float = RICHARDSON_RTOL) -> ModuliSample:
    tau = complex(tau)
    if h > 1e-3:
        raise StepTooLarge(f"finite-difference step {h} exceeds 1e-3")
    if tau.imag <= 2 * h:
        raise InputError(f"tau={tau} too close to the real axis for step {h}")
    dbar1, d1 = _wirtinger(section, tau, h)
    dbar2, d2 = _wirtinger(section, tau, h / 2)
    resid = abs(dbar1 - dbar2) / max(abs(dbar2), 1.0)
    if resid > rtol:
        raise StepTooLarge(f"dbar estimates at h and h/2 differ by {resid:.3g} (relative) at tau={tau}")
    dbar = (4 * dbar2 - dbar1) / 3
    dc = (4 * d2 - d1) / 3
    return ModuliSample(tau, section(tau), dbar, dc, dbar * tau.imag**2, float(resid))


def dbar_scan(tau_grid, h: float = DBAR_STEP, section=eta_coefficient_genus1, threads: int = 1, rtol: float = RICHARDSON_RTOL) -> list[ModuliSample]:
    grid = [complex(t) for t in tau_grid]
    if not grid:
        raise InputError("empty tau grid")
    for t in grid:
        if t.imag <= 0:
            raise InputError(f"grid point {t} not in the upper half-plane")

    def run(t):
        return moduli_sample(t, h, section, rtol)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(run, grid))
    return [run(t) for t in grid]


def kappa_spread(samples) -> float:
    k = np.array([s.kappa for s in samples])
    ref = np.mean(k)
    return float(np.max(np.abs(k - ref)) / abs(ref))


# -- genus 2 (qualitative) -------------------------------------------------------------


def _perturbed_curve(roots, root: int, eps: complex):
    new = list(roots)
    new[root] = new[root] + eps
    try:
        c = curve_from_roots(new)
    except Exception as exc:
        raise ContourTopologyChanged(str(exc)) from exc
    if any(abs(a - b) > 0.25 * abs(eps) + 1e-9 and i != root for i, (a, b) in enumerate(zip(c.roots, new))):
        raise ContourTopologyChanged("perturbation reorders the branch points")
    try:
        from etahat.periods import cycle_basis

        cycle_basis(c)
    except BadConfiguration as exc:
        raise ContourTopologyChanged(str(exc)) from exc
    return c


def section_value_genus2(roots, root: int, eps: complex, x: complex, y_ref: complex) -> complex:
    c = _perturbed_curve(roots, root, eps)
    _, _, _, eta = build_kernels(c)
    p = point_near(c, x, type("P", (), {"y": y_ref})())
    return diagonal_jet(eta, Chart("affine"), p).connection


def genus2_section_trace(curve, root: int, x: complex, eps_values, h: float = 1e-3, complex_path: bool = True, rel_tol: float = 0.1):
    """Track the intrinsic connection at a fixed x while branch point ``root`` moves.

    With a real path only the real derivative is available, so dbar cannot
    be separated from the holomorphic derivative and the sample is flagged
    inconclusive.
    """
    roots = list(curve.roots)
    y_ref = complex(curve.y_plus(x))
    out = []
    for eps in eps_values:
        eps = complex(eps)

        def f(e):
            return section_value_genus2(roots, root, e, x, y_ref)

        S = f(eps)
        if not complex_path:
            out.append(TraceSample(eps, S, None, None, True))
            continue
        d1 = _wirtinger(f, eps, h)[0]
        d2 = _wirtinger(f, eps, h / 2)[0]
        err = abs(d1 - d2)
        out.append(TraceSample(eps, S, (4 * d2 - d1) / 3, err, err > rel_tol * max(abs(d2), 1e-12)))
    return out
