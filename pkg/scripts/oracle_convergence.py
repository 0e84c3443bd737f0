#!/usr/bin/env python
"""Finite-difference oracle vs the dispersion relation as the mesh is refined."""

import argparse

import numpy as np

from hexbands.dispersion import DIRAC_MOMENTA, Quasimomentum
from hexbands.oracle import compare_dispersion
from hexbands.potential import parse_potential
from hexbands.transfer import Params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappa-inv", type=float, default=0.5)
    ap.add_argument("--mass", type=float, default=1.0)
    ap.add_argument("--potential", default="zero")
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--nodes", type=int, nargs="+", default=[50, 100, 200, 400])
    args = ap.parse_args()
    params = Params(1.0, args.kappa_inv, args.mass)
    pot = parse_potential(args.potential)

    for theta in ((0.0, 0.0), DIRAC_MOMENTA[0], (1.0, -1.0)):
        q = Quasimomentum(*theta)
        errs = [compare_dispersion(pot, params, q, n, args.levels) for n in args.nodes]
        print(f"theta = ({theta[0]:+.4f}, {theta[1]:+.4f})")
        for i, (n, e) in enumerate(zip(args.nodes, errs)):
            rate = "" if i == 0 else f"  observed order {np.log(errs[i - 1] / e) / np.log((n - 1) / (args.nodes[i - 1] - 1)):.2f}"
            print(f"  n = {n:4d}  max rel. error {e:.3e}{rate}")


if __name__ == "__main__":
    main()
