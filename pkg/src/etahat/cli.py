"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 invariant failure,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import functools
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from etahat import __version__
from etahat.checks import build_pipeline, cup_ratios, cup_residual, curve_label, obstruction_norm, sample_points, verify_curve
from etahat.config import RunConfig, TraceConfig, load_config
from etahat.curves import Chart, holomorphic_basis, make_curve
from etahat.errors import BadConfiguration, ContractViolation, EtaHatError
from etahat.kernels import kernel_dump
from etahat.moduli import dbar_scan, eta_coefficient_genus1, genus2_section_trace, kappa_spread
from etahat.periods import integrate_over_cycle
from etahat.projstruct import connection_from_kernel, diagonal_jet

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_CURVES = (
    {"kind": "elliptic", "tau": [0.3, 1.2]},
    {"kind": "hyperelliptic", "roots": [-2, -1, 0, 1, 2]},
)


def _header() -> dict:
    return {"generated": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"), "version": __version__}


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps({"header": _header(), **payload}, indent=2, sort_keys=False) + "\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _curves(cfg: RunConfig):
    return [make_curve(s) for s in (cfg.curves or DEFAULT_CURVES)]


def _perturbation(cfg: RunConfig, c):
    """The configured test perturbation, applied to curves of matching genus."""
    if not cfg.perturb:
        return None
    M = np.array(cfg.perturb, dtype=complex)
    return M if M.shape == (c.genus, c.genus) else None


# -- commands -------------------------------------------------------------------------


def cmd_compute_eta(cfg: RunConfig, out: Path) -> int:
    tol = cfg.tolerances
    curves = _curves(cfg)

    def run(c):
        ck = build_pipeline(c, tol, _perturbation(cfg, c))
        pts = sample_points(c, cfg.points)
        quad = []
        for j, u in enumerate(holomorphic_basis(c)):
            for cy in ck.pd.cycles:
                rows = []
                integrate_over_cycle(c, u, cy, tol.quad_rtol, rows)
                quad += [(f"u{j}", r["cycle"], r["nodes"], r["residual"]) for r in rows]
        ch = Chart("flat") if c.is_elliptic else Chart("affine")
        conn = connection_from_kernel(ck.etahat, ch, pts)
        checks = verify_curve(c, tol, cfg.points, _perturbation(cfg, c))
        jets = {}
        for name, k in (("base", ck.base), ("bergman", ck.bergman), ("etahat", ck.etahat)):
            j = diagonal_jet(k, ch, pts[0], tol=tol.jet_tol)
            jets[name] = {"biresidue": _pair(j.biresidue), "residue_term": _pair(j.residue_term), "connection": _pair(j.connection)}
        diag = {
            "obstruction_norm": obstruction_norm(ck, ck.etahat, pts, tol),
            "cup_sign": cup_residual(cup_ratios(ck, ck.etahat, pts, tol))[1],
            "jets_at": _pair(pts[0].x),
            "jets": jets,
            "checks": [x.row() for x in checks],
        }
        return c, ck, quad, conn, diag, checks

    results = _map(run, curves, cfg.threads)
    failed = []
    for i, (c, ck, quad, conn, diag, checks) in enumerate(results):
        stem = f"curve{i}"
        _write_json(out / f"{stem}.kernel.json", kernel_dump(ck.etahat, ck.pd, diag))
        _write_csv(out / f"{stem}.quadrature.csv", ["form", "cycle", "nodes", "residual"], quad)
        _write_csv(
            out / f"{stem}.connection.csv",
            ["chart", "x_re", "x_im", "S_re", "S_im", "error"],
            [(conn.chart.kind, float(x.real), float(x.imag), float(s.real), float(s.imag), float(e)) for x, s, e in zip(conn.coords, conn.values, conn.errors)],
        )
        failed += [f"{curve_label(c)}: {x.name}" for x in checks if not x.passed]
        print(f"{stem}: {curve_label(c)}  obstruction {diag['obstruction_norm']:.3g}")
    if failed:
        raise ContractViolation("kernel invariants failed: " + "; ".join(failed))
    return EXIT_OK


def _table(rows) -> str:
    lines = [f"{'curve':<22} {'check':<30} {'value':>12} {'tol':>10}  result"]
    for r in rows:
        cmp = "<" if r["bound"] == "max" else ">"
        lines.append(f"{r['curve']:<22} {r['check']:<30} {r['value']:>12.3e} {cmp}{r['tol']:>9.1e}  {'PASS' if r['passed'] else 'FAIL'}")
    return "\n".join(lines)


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    curves = _curves(cfg)
    per_curve = _map(lambda c: verify_curve(c, cfg.tolerances, cfg.points, _perturbation(cfg, c)), curves, cfg.threads)
    rows = [ch.row() for checks in per_curve for ch in checks]
    ok = all(r["passed"] for r in rows)
    _write_json(out / "verify.report.json", {"all_passed": ok, "checks": rows})
    text = _table(rows)
    (out / "verify.report.txt").write_text(text + "\n")
    print(text)
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_moduli_scan(cfg: RunConfig, out: Path) -> int:
    tol = cfg.tolerances
    section = functools.partial(eta_coefficient_genus1, jet_tol=tol.jet_tol)
    samples = dbar_scan(cfg.grid, h=cfg.h, section=section, threads=cfg.threads, rtol=tol.richardson)
    rows = []
    for s in samples:
        rows.append([*_pair(s.tau), *_pair(s.c), *_pair(s.dbar_c), *_pair(s.kappa), s.richardson_residual])
        print(f"tau={s.tau:.4g}  c={s.c:.6g}  kappa={s.kappa:.10g}")
    _write_csv(
        out / "moduli.scan.csv",
        ["tau_re", "tau_im", "c_re", "c_im", "dbar_c_re", "dbar_c_im", "kappa_re", "kappa_im", "richardson_residual"],
        rows,
    )
    if len(samples) > 1:
        spread = kappa_spread(samples)
        print(f"kappa spread {spread:.3g} (tol {tol.kappa:g})")
        if spread > tol.kappa:
            raise ContractViolation(f"kappa not constant across the grid (spread {spread:.3g})")
    return EXIT_OK


def cmd_genus2_trace(cfg: RunConfig, out: Path) -> int:
    t = cfg.trace
    if t is None:
        t = TraceConfig(curve={"kind": "hyperelliptic", "roots": [-2, -1, 0, 1, 2]})
    c = make_curve(t.curve)
    samples = genus2_section_trace(c, t.root, t.x, t.eps, h=t.h, complex_path=t.complex_path)
    rows = []
    for s in samples:
        dbar = s.dbar if s.dbar is not None else complex("nan")
        err = s.dbar_err if s.dbar_err is not None else float("nan")
        rows.append([*_pair(s.eps), *_pair(s.S), *_pair(dbar), err, int(s.inconclusive)])
        print(f"eps={s.eps:.3g}  S={s.S:.10g}  dbar={dbar:.4g} +- {err:.2g}{'  (inconclusive)' if s.inconclusive else ''}")
    _write_csv(out / "genus2.trace.csv", ["eps_re", "eps_im", "S_re", "S_im", "dbar_re", "dbar_im", "dbar_err", "inconclusive"], rows)
    return EXIT_OK


COMMANDS = {
    "compute-eta": cmd_compute_eta,
    "verify": cmd_verify,
    "moduli-scan": cmd_moduli_scan,
    "genus2-trace": cmd_genus2_trace,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="etahat", description="Intrinsic second-kind bidifferential and its projective structure.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--tol-override", action="append", default=[], metavar="KEY=VALUE")
    ap.add_argument("--threads", type=int, default=1)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.threads < 1:
            raise BadConfiguration("--threads must be at least 1")
        cfg = replace(cfg, tolerances=cfg.tolerances.override(args.tol_override), threads=args.threads)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out)
    except EtaHatError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"error (linear algebra): {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
