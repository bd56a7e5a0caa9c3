"""Numerical rank of power-curve image clouds as the truncation length grows.

Distinct points z_j give a Vandermonde matrix, so the rank tracks d exactly.
"""
import argparse
from dataclasses import dataclass

import numpy as np

from holoentropy.taylor import image_cloud, power_curve


@dataclass
class Config:
    lengths: tuple = (2, 4, 8, 12, 16)
    count: int = 200
    radius: float = 0.9
    tol: float = 1e-9
    seed: int = 0


def numerical_rank(A: np.ndarray, tol: float) -> int:
    s = np.linalg.svd(A, compute_uv=False)
    return int((s > tol * s[0]).sum()) if s.size and s[0] > 0 else 0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=Config.count)
    ap.add_argument("--seed", type=int, default=Config.seed)
    args = ap.parse_args()
    cfg = Config(count=args.count, seed=args.seed)
    print("d,rank,smallest_kept_sv_ratio")
    for d in cfg.lengths:
        pts = image_cloud(power_curve(d, cfg.radius), cfg.count, cfg.seed).points
        s = np.linalg.svd(pts, compute_uv=False)
        k = numerical_rank(pts, cfg.tol)
        print(f"{d},{k},{s[k - 1] / s[0]:.3e}")


if __name__ == "__main__":
    main()
