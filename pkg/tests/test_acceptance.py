"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line with the measured value
and the pinned tolerance. The lines are also collected and repeated in the
pytest terminal summary. Run this file directly for the lines alone:

    python3 tests/test_acceptance.py
"""

import math
import sys

import numpy as np

from etahat.checks import build_pipeline, contract_residual, cup_ratios, sample_points, symmetry_residual, uniqueness_margin
from etahat.config import Tolerances
from etahat.curves import Chart, chart_point, curve_from_roots, elliptic_curve, point
from etahat.kernels import kernel_value, obstruction, slice_periods
from etahat.moduli import KAPPA_EXACT, dbar_scan, eta_coefficient_genus1, kappa_spread, uniformization_coefficient
from etahat.periods import period_matrices
from etahat.projstruct import Mobius, cocycle_residual, difference_residual, schwarzian
from etahat.special_functions import lattice_sum_oracle, quasi_periods, weierstrass_p

GENUS2 = [-2, -1, 0, 1, 2]
GENUS3 = [-3, -2, -1, 0, 1, 2, 3]
GRID = [1.1j, 2j, 0.4 + 1.3j, -0.3 + 0.9j, 0.1 + 2.5j]
RESULTS: list[str] = []


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _pipelines():
    if "p" not in _CACHE:
        _CACHE["p"] = {
            "g1": build_pipeline(elliptic_curve(0.3 + 1.2j)),
            "g1i": build_pipeline(elliptic_curve(1j)),
            "g2": build_pipeline(curve_from_roots(GENUS2)),
        }
    return _CACHE["p"]


_CACHE: dict = {}


def test_criterion_01_special_functions():
    rng = np.random.default_rng(1)
    worst_p = 0.0
    for tau in (1j, 0.3 + 1.2j):
        for _ in range(10):
            z = rng.uniform(0.05, 0.95) + rng.uniform(0.05, 0.95) * tau
            worst_p = max(worst_p, abs(weierstrass_p(z, tau) - lattice_sum_oracle(z, tau, 400)))
    taus = rng.uniform(-0.5, 0.5, 20) + 1j * rng.uniform(0.87, 3.0, 20)
    worst_l = max(quasi_periods(t).legendre_residual(t) for t in taus)
    report(1, "special functions", worst_p < 1e-10 and worst_l < 1e-10, f"max |p - lattice sum| = {worst_p:.2e} (<1e-10), max Legendre residual = {worst_l:.2e} (<1e-10)")


def test_criterion_02_riemann_relations():
    sym, pos, inv = 0.0, np.inf, 0.0
    for roots in (GENUS2, GENUS3):
        pd = period_matrices(curve_from_roots(roots))
        sym = max(sym, float(np.max(np.abs(pd.tau - pd.tau.T))))
        pos = min(pos, float(np.min(np.linalg.eigvalsh(pd.tau.imag))))
        for alpha, beta in ((2.0, 0.0), (0.7, 1.3), (1.9, -0.4)):
            moved = period_matrices(curve_from_roots([alpha * r + beta for r in roots]))
            inv = max(inv, float(np.max(np.abs(moved.tau - pd.tau))))
    report(2, "Riemann relations", sym < 1e-8 and pos > 0 and inv < 1e-8, f"|tau - tau^T| = {sym:.2e} (<1e-8), min eig Im tau = {pos:.3f} (>0), affine drift = {inv:.2e} (<1e-8)")


def test_criterion_03_kernel_contract():
    worst = 0.0
    for key in ("g1", "g2"):
        ck = _pipelines()[key]
        pts = sample_points(ck.curve)
        for k in (ck.base, ck.bergman, ck.etahat):
            worst = max(worst, contract_residual(k, pts, Tolerances()))
    report(3, "2-diagonal contract", worst < 1e-8, f"max(|biresidue - 1|, |residue term|) = {worst:.2e} (<1e-8), base/Bergman/intrinsic, genus 1 and 2")


def test_criterion_04_symmetry():
    rng = np.random.default_rng(4)
    worst = 0.0
    ck2 = _pipelines()["g2"]
    c2 = ck2.curve
    ck1 = _pipelines()["g1"]
    tau = ck1.curve.tau
    for _ in range(25):
        p, q = [point(c2, complex(rng.uniform(-3, 3), rng.uniform(0.3, 2)) * (1 if rng.uniform() > 0.5 else -1), int(rng.choice([-1, 1]))) for _ in range(2)]
        a = kernel_value(ck2.etahat, p, q)
        worst = max(worst, abs(a - kernel_value(ck2.etahat, q, p)) / abs(a))
        z, w = [point(ck1.curve, rng.uniform(0, 1) + rng.uniform(0, 1) * tau) for _ in range(2)]
        a = kernel_value(ck1.etahat, z, w)
        worst = max(worst, abs(a - kernel_value(ck1.etahat, w, z)) / abs(a))
    report(4, "swap symmetry", worst < 1e-10, f"max relative swap residual over 25 pairs per genus = {worst:.2e} (<1e-10)")


def test_criterion_05_pure_11():
    ck2 = _pipelines()["g2"]
    pts = sample_points(ck2.curve, n=6)
    O2 = max(obstruction(slice_periods(ck2.etahat, p, ck2.pd), ck2.pd).norm for p in pts)
    ck1 = _pipelines()["g1"]
    O1 = max(obstruction(slice_periods(ck1.etahat, p, ck1.pd), ck1.pd).norm for p in sample_points(ck1.curve))
    corr = abs(ck1.etahat.correction[0, 0] + math.pi / ck1.curve.tau.imag)
    ok = len(pts) >= 5 and O2 < 1e-6 and O1 < 1e-10 and corr < 1e-12
    report(5, "pure (1,1)", ok, f"genus 2 max |B - conj(tau)^T A| over {len(pts)} points = {O2:.2e} (<1e-6); genus 1 obstruction {O1:.2e}, correction + pi/Im tau = {corr:.1e}")


def test_criterion_06_uniqueness():
    margins = []
    for key in ("g1", "g2"):
        ck = _pipelines()[key]
        g = ck.curve.genus
        margins.append(uniqueness_margin(ck, ck.etahat, sample_points(ck.curve, n=g * (g + 1) // 2)))
    ck3 = build_pipeline(curve_from_roots(GENUS3))
    margins.append(uniqueness_margin(ck3, ck3.etahat, sample_points(ck3.curve, n=6)))
    m = min(margins)
    report(6, "uniqueness", m > 1e-8, f"min sigma_min / sigma_max of the response matrix (g = 1, 2, 3) = {m:.3e} (>1e-8)")


def test_criterion_07_cup_identity():
    ratios = []
    for key in ("g1", "g2"):
        ck = _pipelines()[key]
        ratios.append(cup_ratios(ck, ck.etahat, sample_points(ck.curve), Tolerances()).ravel())
    r = np.concatenate(ratios)
    sign = 1 if np.mean(r.real) > 0 else -1
    resid = float(np.max(np.abs(r - sign)))
    report(7, "cup identity", resid < 1e-6, f"cup(eta_x, v_k) = {'+' if sign > 0 else '-'}2 pi i v_k(x), single sign, max deviation {resid:.2e} (<1e-6)")


def test_criterion_08_projective_laws():
    ck = _pipelines()["g2"]
    c = ck.curve
    br = Chart("branch", root=4)
    cases = [(Chart("inverse"), point(c, 5.0)), (Chart("inverse"), point(c, 2.5 + 2j, -1)), (br, chart_point(c, br, 0.45))]
    coc = max(cocycle_residual(ck.etahat, Chart("affine"), to, p)["residual"] for to, p in cases)
    diff = max(difference_residual(ck.etahat, ck.bergman, Chart("affine"), to, p)["residual"] for to, p in cases)
    mob = max(abs(schwarzian(Mobius(2, 1, 1, 3), w)) for w in (0.7, -0.4 + 1j, 2.0))
    ok = coc < 1e-6 and diff < 1e-6 and mob < 1e-12
    report(8, "projective laws", ok, f"cocycle {coc:.2e}, weight-2 law {diff:.2e} (<1e-6), Mobius Schwarzian {mob:.1e} (<1e-12)")


def test_criterion_09_dbar_siegel():
    samples = dbar_scan(GRID)
    rel = max(abs(s.kappa / KAPPA_EXACT - 1) for s in samples)
    spread = kappa_spread(samples)
    kappa = np.mean([s.kappa for s in samples])
    ok = rel < 1e-4 and spread < 1e-4 and abs(kappa) > 1 and len(samples) >= 5
    report(9, "dbar = kappa x Siegel (genus-1 analogue)", ok, f"kappa = {kappa.real:.2e}{kappa.imag:+.10f}i vs 3 pi i, max rel error {rel:.2e}, spread {spread:.2e} (<1e-4)")


def test_criterion_10_not_uniformization():
    off = min(abs(eta_coefficient_genus1(t)) for t in GRID)
    at_i = abs(eta_coefficient_genus1(1j))
    unif = max(abs(s.dbar_c) for s in dbar_scan(GRID, section=uniformization_coefficient))
    eta_dbar = min(abs(s.dbar_c) for s in dbar_scan(GRID[:2]))
    ok = off > 1e-6 and at_i < 1e-7 and unif == 0 and eta_dbar > 1e-3
    report(10, "intrinsic vs uniformization", ok, f"min |c| off tau = i: {off:.3f} (>1e-6), |c(i)| = {at_i:.1e} (<1e-7), dbar uniformization = {unif:g}, min |dbar c| = {eta_dbar:.3f}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((n, f) for n, f in globals().items() if n.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
