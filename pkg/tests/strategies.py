import math

import numpy as np
from hypothesis import strategies as st

NORMS = st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf])
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)


def vectors(dim):
    return st.lists(complexes, min_size=dim, max_size=dim).map(
        lambda v: np.array(v, dtype=np.complex128))


@st.composite
def clouds(draw, max_points=12, max_dim=2):
    d = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_points))
    pts = draw(st.lists(vectors(d), min_size=n, max_size=n))
    return np.stack(pts), draw(st.sampled_from([1.0, 2.0, math.inf]))
