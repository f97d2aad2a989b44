"""Render three return plots and the exceptional sets behind them.

Writes pixmaps into the chosen directory: a block-structured plot for
(45, 45), a nearly full one for (57, 32.75), and the diagonal lines of
the (90, 90) tiling, plus the coloured exceptional set of each.
"""

import argparse
from pathlib import Path

import numpy as np

from hemipwi import density, io, returnplot
from hemipwi.pwi import Protocol


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="demo_out")
    ap.add_argument("--bins", type=int, default=400)
    ap.add_argument("--iters", type=int, default=20_000)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    for deg in ((45, 45), (57, 32.75), (90, 90)):
        prot = Protocol.from_degrees(*deg)
        tag = f"{deg[0]:g}_{deg[1]:g}"
        h = returnplot.build(prot, 1e-3, 1e-6, args.bins, 5, args.iters)
        io.write_ppm(out / f"return_{tag}.ppm", returnplot.log_render(h))
        img, grid = density.render_exceptional_set(prot, 1e-3, args.iters, 256)
        io.write_ppm(out / f"set_{tag}.ppm", img)
        hue_sd = np.nanstd(grid.hue())
        print(f"{deg}: empty fraction {returnplot.empty_fraction(h):.3f}, hue spread {hue_sd:.3f}")


if __name__ == "__main__":
    main()
