"""Distance between the same-cell projection of the band state and the cell singlet.

Scans the band radius for two equal cells of [0, 1] at a few grid sizes.
Writes CSV: m, epsilon, deviation.
"""
import argparse
import csv
import sys

import numpy as np

from minentlab.discretize import Discretization, uniform_grid
from minentlab.entfrac import Grid, grid_identity_deviation


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cells", type=int, default=2)
    ap.add_argument("--grids", type=int, nargs="+", default=[100, 200, 400])
    args = ap.parse_args()

    k = args.cells
    sp = uniform_grid([[0, 1]], [k], midpoints=True)
    w = csv.writer(sys.stdout)
    w.writerow(["m", "epsilon", "deviation"])
    for m in args.grids:
        for eps in np.linspace(0.05, 1.0, 20):
            disc = Discretization(sp, np.arange(k), max(eps, 0.5 / k), "both")
            w.writerow([m, f"{eps:.4f}", repr(grid_identity_deviation(Grid(0, 1, m), disc, float(eps)))])


if __name__ == "__main__":
    main()
