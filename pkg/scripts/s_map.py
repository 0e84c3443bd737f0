#!/usr/bin/env python
"""|S(theta1, theta2)| over the Brillouin zone, with level curves."""

import argparse

import numpy as np

from hexbands.dispersion import DIRAC_MOMENTA, s_abs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=601)
    ap.add_argument("--out", default="s_map.png")
    args = ap.parse_args()
    ts = np.linspace(-np.pi, np.pi, args.grid)
    T1, T2 = np.meshgrid(ts, ts, indexing="ij")
    S = s_abs(T1, T2)
    print(f"grid {args.grid}: max {S.max():.12g}, min {S.min():.3e}")
    for t in DIRAC_MOMENTA:
        print(f"  |S| at ({t[0]:+.4f}, {t[1]:+.4f}) = {s_abs(*t):.2e}")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4.3))
    im = ax.pcolormesh(ts, ts, S.T, shading="auto", cmap="viridis")
    ax.contour(ts, ts, S.T, levels=[0.5, 1, 1.5, 2, 2.5], colors="w", linewidths=0.6)
    ax.plot(*zip(*DIRAC_MOMENTA), "r.", ms=6)
    ax.set_xlabel("theta1")
    ax.set_ylabel("theta2")
    fig.colorbar(im, ax=ax, label="|S|")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print("wrote", args.out)


if __name__ == "__main__":
    main()
