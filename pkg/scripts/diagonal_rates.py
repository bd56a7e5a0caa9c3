"""Root rate of the diagonal-model entropy profile as the truncation N grows.

A finite-dimensional set has e_n^(1/n) bounded away from 1; the diagonal
model's lower brackets creep towards 1 as N and n grow.
"""
import argparse
from dataclasses import dataclass

from holoentropy.boxdim import entropy_dim_bridge
from holoentropy.diagonal import example_K_profile


@dataclass
class Config:
    epsilon: float = 0.5
    truncations: tuple = (4, 8, 16, 32, 64)
    n_max: int = 24


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epsilon", type=float, default=Config.epsilon)
    ap.add_argument("--n-max", type=int, default=Config.n_max)
    args = ap.parse_args()
    cfg = Config(epsilon=args.epsilon, n_max=args.n_max)
    print("N,lower_rate,upper_rate,classification")
    for N in cfg.truncations:
        rep = entropy_dim_bridge(example_K_profile(cfg.epsilon, N, cfg.n_max))
        print(f"{N},{rep.lower_rate:.4f},{rep.upper_rate:.4f},{rep.classification}")


if __name__ == "__main__":
    main()
