"""Entropy numbers, covering numbers and box dimension of point clouds, with
exact tools for homogeneous polynomial families and Taylor parts of
holomorphic maps."""

__version__ = "0.1.0"
