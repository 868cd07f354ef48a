"""Validate the sequential-adsorption simulator against its analytic formulas.

Three checks, mirroring the test suite but with adjustable sizes:
  1. ghost-process ensemble in d=1: mean density against the exact saturation
     value and a pooled chi-square on the pair histogram;
  2. standard-RSA saturation density in d=1;
  3. one d=2 ghost run compared with the finite-time density formula.
"""

import argparse
import math
import sys

import numpy as np
from scipy.stats import chi2

from packbound.matern import MaternConfig, phi_of_t, saturation_time, simulate


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--L", type=float, default=200.0)
    ap.add_argument("--rsa-L", type=float, default=5000.0)
    args = ap.parse_args()

    T = saturation_time(1, deficit=1e-4)
    phis = []
    edges = np.linspace(0.999, 3.0, 51)
    pooled_C = np.zeros(50)
    pooled_E = np.zeros(50)
    for seed in range(1, args.seeds + 1):
        res = simulate(MaternConfig(d=1, L=args.L, T=T, kappa=1, seed=seed))
        phis.append(res.phi_hat)
        pooled_C += res.pair_counts
        pooled_E += res.pair_norm * res.g2_analytic
    mean_phi = float(np.mean(phis))
    keep = (edges[:-1] >= 1.0) & (pooled_E > 5.0)
    x2 = float(((pooled_C[keep] - pooled_E[keep]) ** 2 / pooled_E[keep]).sum())
    dof = int(keep.sum())
    thr = float(chi2.ppf(0.95, dof))
    ok1 = abs(mean_phi - 0.5) <= 0.005
    ok2 = x2 < thr
    print(f"ghost d=1 x{args.seeds}: mean phi = {mean_phi:.5f} "
          f"(sd {np.std(phis, ddof=1):.5f}) vs 0.5 -> {'PASS' if ok1 else 'FAIL'}")
    print(f"  pair histogram chi2 = {x2:.1f}, dof = {dof}, 95% threshold {thr:.1f} "
          f"-> {'PASS' if ok2 else 'FAIL'}")

    res0 = simulate(MaternConfig(d=1, L=args.rsa_L, T=500.0, kappa=0, seed=1))
    ok3 = abs(res0.phi_hat - 0.7476) <= 0.01
    print(f"rsa d=1 L={args.rsa_L:g}: phi = {res0.phi_hat:.4f} vs 0.7476 "
          f"-> {'PASS' if ok3 else 'FAIL'}")

    res2 = simulate(MaternConfig(d=2, L=40.0, T=50.0, kappa=1, seed=7))
    n = len(res2.accepted_centers)
    se = res2.phi_hat / math.sqrt(n)
    dev = (res2.phi_hat - phi_of_t(2, 50.0)) / se
    ok4 = abs(dev) <= 3.0
    print(f"ghost d=2 T=50: phi_hat = {res2.phi_hat:.5f} vs "
          f"{phi_of_t(2, 50.0):.5f} ({dev:+.2f} se) -> {'PASS' if ok4 else 'FAIL'}")

    return 0 if (ok1 and ok2 and ok3 and ok4) else 1


if __name__ == "__main__":
    sys.exit(main())
