"""Scan kappa = (Im tau)^2 dbar c over a grid of genus-1 moduli.

    python3 scripts/moduli_scan.py --rows 4 --cols 5 --out scan.csv
"""

import argparse
import csv
from dataclasses import dataclass

import numpy as np

from etahat.moduli import KAPPA_EXACT, dbar_scan, kappa_spread


@dataclass(frozen=True)
class ScanConfig:
    re_range: tuple = (-0.5, 0.5)
    im_range: tuple = (0.8, 2.5)
    rows: int = 4
    cols: int = 5
    h: float = 2e-4
    threads: int = 4

    def grid(self):
        re = np.linspace(*self.re_range, self.cols)
        im = np.linspace(*self.im_range, self.rows)
        return [complex(a, b) for b in im for a in re]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=ScanConfig.rows)
    ap.add_argument("--cols", type=int, default=ScanConfig.cols)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    cfg = ScanConfig(rows=args.rows, cols=args.cols)
    samples = dbar_scan(cfg.grid(), h=cfg.h, threads=cfg.threads)
    for s in samples:
        print(f"tau = {s.tau:.3f}   c = {s.c:10.6f}   kappa / (3 pi i) - 1 = {abs(s.kappa / KAPPA_EXACT - 1):.2e}")
    print(f"spread of kappa over {len(samples)} points: {kappa_spread(samples):.2e}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau_re", "tau_im", "kappa_re", "kappa_im"])
            for s in samples:
                w.writerow([repr(s.tau.real), repr(s.tau.imag), repr(s.kappa.real), repr(s.kappa.imag)])


if __name__ == "__main__":
    main()
