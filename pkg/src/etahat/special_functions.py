"""Genus-1 special functions for the lattice Z + tau Z.

The odd theta function is normalized as ``theta1(z) = sum 2 (-1)^n q^{(n+1/2)^2}
sin((2n+1) pi z)`` with ``q = exp(i pi tau)``, so ``theta1(z + 1) = -theta1(z)``.
Quasi-periods follow ``eta1 = zeta(z + 1) - zeta(z)`` and
``eta2 = zeta(z + tau) - zeta(z)``; with Im tau > 0 the Legendre relation reads
``eta1 * tau - eta2 = 2 pi i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from etahat.errors import BadModulus, NoConvergence, PoleError

SERIES_RTOL = 1e-16
MAX_TERMS = 400
POLE_TOL = 1e-12


@dataclass(frozen=True)
class Modulus:
    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not np.isfinite(tau) or tau.imag <= 0:
            raise BadModulus(f"Im(tau) must be positive, got tau={tau}")
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class QuasiPeriods:
    eta1: complex
    eta2: complex

    def legendre_residual(self, tau: complex) -> float:
        return abs(self.eta1 * tau - self.eta2 - 2j * math.pi)


def _as_modulus(m) -> Modulus:
    return m if isinstance(m, Modulus) else Modulus(m)


def reduce_modulus(tau: complex) -> tuple[complex, tuple[int, int, int, int]]:
    """Move tau into the standard fundamental domain.

    Returns ``(tau_r, (a, b, c, d))`` with ``tau_r = (a tau + b) / (c tau + d)``.
    """
    tau = complex(tau)
    a, b, c, d = 1, 0, 0, 1
    t = tau
    for _ in range(200):
        n = -round(t.real)
        if n:
            t += n
            a, b = a + n * c, b + n * d
        if abs(t) < 1.0 - 1e-14:
            t = -1.0 / t
            a, b, c, d = -c, -d, a, b
        else:
            return t, (a, b, c, d)
    raise NoConvergence(f"modulus reduction did not terminate for tau={tau}")


def _theta_derivs(z, tau: complex, order: int = 3):
    """theta1 and its z-derivatives up to ``order`` (vectorized over z)."""
    if tau.imag <= 0:
        raise NoConvergence(f"theta series diverges for Im(tau) <= 0 (tau={tau})")
    z = np.asarray(z, dtype=complex)
    out = [np.zeros_like(z) for _ in range(order + 1)]
    scale = np.zeros(z.shape)
    growth = np.exp(math.pi * np.abs(z.imag))
    for n in range(MAX_TERMS):
        k = (2 * n + 1) * math.pi
        coef = 2.0 * (-1) ** n * np.exp(1j * math.pi * tau * (n + 0.5) ** 2)
        s = np.sin(k * z)
        c = np.cos(k * z)
        terms = (s, k * c, -k * k * s, -(k**3) * c)
        for j in range(order + 1):
            out[j] = out[j] + coef * terms[j]
        bound = abs(coef) * growth ** (2 * n + 1) * max(k, 1.0) ** order
        scale = scale + bound
        if np.all(bound < SERIES_RTOL * scale):
            return out
    raise NoConvergence(f"theta series did not converge (tau={tau})")


def theta1(z, m) -> complex:
    m = _as_modulus(m)
    val = _theta_derivs(z, m.tau, order=0)[0]
    return val[()] if val.ndim == 0 else val


def _eta1_direct(tau: complex) -> complex:
    _, d1, _, d3 = _theta_derivs(0.0, tau)
    return complex(-d3 / (3.0 * d1))


def _eta2_direct(tau: complex, eta1: complex) -> complex:
    th, d1 = _theta_derivs(tau / 2, tau, order=1)
    return complex(eta1 * tau + 2.0 * d1 / th)


def quasi_periods(m) -> QuasiPeriods:
    """Quasi-periods (eta1, eta2) of the lattice Z + tau Z."""
    m = _as_modulus(m)
    tau_r, (a, b, c, d) = reduce_modulus(m.tau)
    e1 = _eta1_direct(tau_r)
    e2 = _eta2_direct(tau_r, e1)
    # Z + tau Z = lam * (Z + tau_r Z), lam = c tau + d; the period 1 equals
    # a*lam - c*(lam*tau_r) in the reduced basis.
    lam = c * m.tau + d
    eta1 = (a * e1 - c * e2) / lam
    # tau = d*(lam*tau_r) - b*lam
    eta2 = (d * e2 - b * e1) / lam
    return QuasiPeriods(complex(eta1), complex(eta2))


def _reduce_to_cell(z, tau: complex):
    z = np.asarray(z, dtype=complex)
    n = np.round(z.imag / tau.imag)
    z = z - n * tau
    return z - np.round(z.real)


def weierstrass_p(z, m):
    """Weierstrass p-function of the lattice Z + tau Z."""
    m = _as_modulus(m)
    tau_r, (a, b, c, d) = reduce_modulus(m.tau)
    lam = c * m.tau + d
    w = _reduce_to_cell(np.asarray(z, dtype=complex) / lam, tau_r)
    if np.any(np.abs(w) < POLE_TOL / abs(lam)):
        raise PoleError("weierstrass_p evaluated at a lattice point")
    th, d1, d2 = _theta_derivs(w, tau_r, order=2)
    e1 = _eta1_direct(tau_r)
    val = (-e1 - (d2 * th - d1 * d1) / (th * th)) / lam**2
    return val[()] if val.ndim == 0 else val


def weierstrass_zeta(z, m):
    """Weierstrass zeta for the lattice Z + tau Z (no z-reduction; quasi-periodic)."""
    m = _as_modulus(m)
    z = np.asarray(z, dtype=complex)
    eta1 = quasi_periods(m).eta1
    th, d1 = _theta_derivs(z, m.tau, order=1)
    if np.any(np.abs(th) < POLE_TOL):
        raise PoleError("weierstrass_zeta evaluated at a lattice point")
    val = eta1 * z + d1 / th
    return val[()] if val.ndim == 0 else val


def _parallelogram_tail(z: complex, tau: complex, radius: float, nodes: int = 96) -> complex:
    """(1/area) * integral of 1/(z-w)^2 - 1/w^2 over the exterior of the
    parallelogram {s + t tau : |s|, |t| <= radius}, via Green's theorem."""
    x, wts = np.polynomial.legendre.leggauss(nodes)
    corners = radius * np.array([-1 - tau, 1 - tau, 1 + tau, -1 + tau])
    total = 0j
    for k in range(4):
        p0, p1 = corners[k], corners[(k + 1) % 4]
        half = (p1 - p0) / 2
        w = (p0 + p1) / 2 + half * x
        f = 1.0 / (z - w) ** 2 - 1.0 / w**2
        total += np.sum(wts * np.conj(w) * f) * half
    # exterior integral = -(1/2i) * counterclockwise boundary integral
    return -total / (2j) / tau.imag


def lattice_sum_oracle(z: complex, m, shells: int = 400) -> complex:
    """p(z) by direct lattice summation over ``shells`` square shells.

    The truncated sum is completed by the continuum tail over the cells
    outside the summed block, which brings the O(1/shells^2) truncation
    error down to O(1/shells^4).
    """
    if shells < 50:
        raise ValueError("lattice_sum_oracle needs at least 50 shells")
    m = _as_modulus(m)
    tau = m.tau
    z = complex(z)
    zr = complex(_reduce_to_cell(z, tau))
    if abs(zr) < POLE_TOL:
        raise PoleError("lattice_sum_oracle evaluated at a lattice point")
    total = 1.0 / z**2
    ms = np.arange(-shells, shells + 1, dtype=float)
    for n in range(-shells, shells + 1):
        w = ms + n * tau
        if n == 0:
            w = w[ms != 0]
        diff = z - w
        if np.any(np.abs(diff) < POLE_TOL):
            raise PoleError("lattice_sum_oracle evaluated at a lattice point")
        # sum small terms first within a row for reproducibility
        total += np.sum(1.0 / diff**2 - 1.0 / w**2)
    return complex(total + _parallelogram_tail(z, tau, shells + 0.5))
