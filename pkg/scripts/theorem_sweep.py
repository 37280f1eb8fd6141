"""Slack of both entanglement-fraction theorems across depolarizing strength.

Writes plot-ready CSV: size, lambda, thm, lhs, rhs, slack.
"""
import argparse
import csv
import sys

import numpy as np

from minentlab.discretize import Discretization, uniform_grid
from minentlab.entfrac import verify_thm1, verify_thm2
from minentlab.quantum_core import depolarizing


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--steps", type=int, default=21)
    args = ap.parse_args()

    w = csv.writer(sys.stdout)
    w.writerow(["size", "lambda", "thm", "lhs", "rhs", "slack"])
    for k in args.sizes:
        disc = Discretization(uniform_grid([[0, 1]], [k], midpoints=True), np.arange(k), 1 / k, "both")
        for lam in np.linspace(0, 1, args.steps):
            ch = depolarizing(k, float(lam))
            for name, check in (("thm1", verify_thm1), ("thm2", verify_thm2)):
                r = check(disc, ch)
                w.writerow([k, f"{lam:.4f}", name, repr(r.lhs), repr(r.rhs), repr(r.slack)])


if __name__ == "__main__":
    main()
