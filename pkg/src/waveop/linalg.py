"""Small dense linear-algebra helpers: commutators and a matrix exponential."""

import math

import numpy as np
from numpy.typing import NDArray

#: Scaled-norm ceiling before the Taylor series is evaluated.
EXPM_SCALED_NORM = 0.5
#: Absolute bound on the Taylor truncation remainder of the scaled matrix.
EXPM_REMAINDER = 1e-14


def commutator(a: NDArray, b: NDArray) -> NDArray:
    """Return ``a @ b - b @ a``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"commutator needs equal square matrices, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def expm(a: NDArray) -> NDArray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series.

    The matrix is scaled by ``2**-s`` until its 1-norm is at most 0.5, the
    series is summed until the tail bound drops below 1e-14, and the result
    is squared ``s`` times.  A zero matrix returns the identity exactly.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    norm = float(np.linalg.norm(a, 1)) if n else 0.0
    if not math.isfinite(norm):
        raise ValueError("expm input contains non-finite entries")

    squarings = 0
    if norm > EXPM_SCALED_NORM:
        squarings = math.ceil(math.log2(norm / EXPM_SCALED_NORM))
    x = a / 2.0**squarings
    xnorm = norm / 2.0**squarings

    result = np.eye(n)
    term = np.eye(n)
    bound = 1.0  # xnorm**k / k!
    for k in range(1, 60):
        term = term @ x / k
        result = result + term
        bound *= xnorm / k
        # tail sum_{j>k} xnorm**j / j! <= bound * r / (1 - r), r = xnorm / (k + 1)
        r = xnorm / (k + 1)
        if bound * r / (1.0 - r) < EXPM_REMAINDER:
            break

    for _ in range(squarings):
        result = result @ result
    return result
