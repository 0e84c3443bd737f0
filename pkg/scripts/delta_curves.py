#!/usr/bin/env python
"""Delta(lam) curves for the free operator with band/gap shading data.

Writes one CSV per parameter set (lam, T1, T2, Delta, inside_band) and,
if matplotlib is available, a PNG with the strip |Delta| <= 1 marked.
"""

import argparse
from pathlib import Path

import numpy as np

from hexbands.cli import RunConfig, emit_delta_curve, read_csv
from hexbands.potential import parse_potential
from hexbands.spectrum import scan_bands
from hexbands.transfer import Params

CASES = {
    "graphene": Params(1.0, 0.0, 0.0),
    "mass3": Params(1.0, 0.0, 3.0),
    "semirigid": Params(1.0, 0.5, 0.0),
    "both": Params(1.0, 0.5, 1.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="delta_curves")
    ap.add_argument("--lmax", type=float, default=60.0)
    ap.add_argument("--potential", default="zero")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    pot = parse_potential(args.potential)

    curves = {}
    for name, params in CASES.items():
        cfg = RunConfig("delta", params, args.potential, (0.0, args.lmax), 4000, output_path=str(out / f"{name}.csv"))
        print(name, emit_delta_curve(cfg, pot))
        rep = scan_bands(pot, params, (0.0, args.lmax))
        for g in rep.gaps:
            print(f"   gap [{g.lo:.6f}, {g.hi:.6f}]  width {g.width:.4g}")
        _, header, rows = read_csv(out / f"{name}.csv")
        cols = list(zip(*rows))
        curves[name] = {h: np.array(cols[i], dtype=float) for i, h in enumerate(header[:4])}

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(len(curves), 1, figsize=(7, 2.2 * len(curves)), sharex=True)
        for ax, (name, d) in zip(axes, curves.items()):
            ax.plot(d["lambda"], np.clip(d["delta"], -3, 3), lw=0.8)
            ax.axhspan(-1, 1, color="0.9")
            ax.set_ylabel(name)
        axes[-1].set_xlabel("lambda")
        fig.tight_layout()
        fig.savefig(out / "delta_curves.png", dpi=150)
        print("wrote", out / "delta_curves.png")


if __name__ == "__main__":
    main()
