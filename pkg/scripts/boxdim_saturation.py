"""Regression slope of the disc box count against sample size.

Small clouds saturate at the finest scales and drag the slope below 2.
"""
import argparse
import time
import warnings
from dataclasses import dataclass

import numpy as np

from holoentropy.boxdim import SaturationWarning, dim_estimate
from holoentropy.metric import BallSpec, sample_ball


@dataclass
class Config:
    sizes: tuple = (10 ** 3, 10 ** 4, 10 ** 5, 3 * 10 ** 5, 10 ** 6)
    n_min: int = 2
    n_max: int = 8
    seeds: int = 3


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=Config.seeds)
    ap.add_argument("--n-max", type=int, default=Config.n_max)
    args = ap.parse_args()
    cfg = Config(seeds=args.seeds, n_max=args.n_max)
    print("size,seed,slope,saturated,seconds")
    for size in cfg.sizes:
        for seed in range(cfg.seeds):
            cloud = sample_ball(BallSpec(np.zeros(1), 1.0, 2.0), size, seed)
            t0 = time.perf_counter()
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", SaturationWarning)
                est = dim_estimate(cloud, cfg.n_min, cfg.n_max)
            sat = any(issubclass(w.category, SaturationWarning) for w in caught)
            print(f"{size},{seed},{est.slope:.4f},{sat},{time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    main()
