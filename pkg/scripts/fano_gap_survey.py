"""How loose are Fano and the min-entropy guarantee on random joint tables?

Prints per-alphabet-size quantiles of the slack of both inequalities.
"""
import argparse

import numpy as np

from minentlab.bounds import fano_check, guarantee_check
from minentlab.entropy import random_joint_table
from minentlab.learning_sim import map_decoder_success, substream


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("n_a  fano_q10  fano_q50  fano_q90  guar_q10  guar_q50  guar_q90")
    for n_a in range(2, 7):
        fano, guar = [], []
        for i in range(args.n):
            rng = substream(args.seed, n_a * args.n + i)
            t = random_joint_table(n_a, int(rng.integers(2, 7)), rng)
            fano.append(fano_check(t, map_decoder_success(t)[0]).slack)
            guar.append(guarantee_check(t).slack)
        fq, gq = np.quantile(fano, [0.1, 0.5, 0.9]), np.quantile(guar, [0.1, 0.5, 0.9])
        print(f"{n_a:3d}  " + "  ".join(f"{x:8.4f}" for x in (*fq, *gq)))


if __name__ == "__main__":
    main()
