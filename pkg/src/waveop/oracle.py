"""Independent reference computations.

Nothing in here calls into :mod:`waveop.core` for the quantities it checks:
the eigensolver is a self-contained cyclic Jacobi iteration and the energy
corrections are the textbook sum-over-states expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from waveop.core import PerturbationProblem, is_symmetric

#: Jacobi stops when the off-diagonal Frobenius norm falls below this times ||A||_F.
JACOBI_TOL = 1e-13
#: Default coupling grid for series extraction.
FIT_GRID = (1e-3, 3e-2, 8)


@dataclass(frozen=True)
class EigenDecomposition:
    values: NDArray
    vectors: NDArray

    def reconstruct(self) -> NDArray:
        return (self.vectors * self.values) @ self.vectors.T


def diagonalize_symmetric(a: ArrayLike, max_sweeps: int = 64) -> EigenDecomposition:
    """Cyclic Jacobi eigen-decomposition of a real symmetric matrix.

    The first three sweeps only rotate away elements above a threshold of
    ``0.2 * S / n**2`` (``S`` the sum of absolute off-diagonal entries);
    later sweeps rotate everything and zero out elements that are negligible
    next to both diagonal entries.  Eigenvalues come back ascending.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not is_symmetric(a):
        raise ValueError("diagonalize_symmetric needs a symmetric matrix")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)

    for sweep in range(max_sweeps):
        off = a - np.diag(np.diag(a))
        if np.linalg.norm(off) <= JACOBI_TOL * scale:
            break
        thresh = 0.2 * np.abs(off).sum() / n**2 if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = 100.0 * abs(apq)
                if sweep > 3 and abs(a[p, p]) + g == abs(a[p, p]) and abs(a[q, q]) + g == abs(a[q, q]):
                    a[p, q] = a[q, p] = 0.0
                    continue
                if abs(apq) <= thresh or apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app = a[p, p] - t * apq
                aqq = a[q, q] + t * apq
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p], a[q, q] = app, aqq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values[order], v[:, order])


def track_states(vectors: NDArray, n_states: int | None = None) -> NDArray:
    """For basis indices ``0 .. n_states-1``, the eigenvector column with largest weight on ``e_n``.

    Raises if two basis states claim the same eigenvector, which happens only
    when the perturbation is far too strong for state tracking to mean much.
    """
    rows = vectors if n_states is None else vectors[:n_states]
    idx = np.argmax(np.abs(rows), axis=1)
    if len(set(idx.tolist())) != idx.size:
        raise ValueError("eigenvectors cannot be matched one-to-one to basis states")
    return idx


def sum_over_states_corrections(p: PerturbationProblem) -> tuple[NDArray, NDArray, NDArray]:
    """Textbook first-, second- and third-order corrections by explicit sums."""
    p.h0.check_nondegenerate()
    eps = p.h0.values
    h = p.h
    dim = p.dim
    eps1 = np.array([h[n, n] for n in range(dim)])
    eps2 = np.zeros(dim)
    eps3 = np.zeros(dim)
    for n in range(dim):
        others = [m for m in range(dim) if m != n]
        s2 = 0.0
        s2sq = 0.0
        for m in others:
            s2 += h[n, m] ** 2 / (eps[n] - eps[m])
            s2sq += h[n, m] ** 2 / (eps[n] - eps[m]) ** 2
        s3 = 0.0
        for m in others:
            for l in others:
                s3 += h[n, m] * h[m, l] * h[l, n] / ((eps[n] - eps[m]) * (eps[n] - eps[l]))
        eps2[n] = s2
        eps3[n] = s3 - eps1[n] * s2sq
    return eps1, eps2, eps3


def geometric_grid(lo: float = FIT_GRID[0], hi: float = FIT_GRID[1], num: int = FIT_GRID[2]) -> NDArray:
    return np.geomspace(lo, hi, num)


def mirrored_grid(lo: float = FIT_GRID[0], hi: float = FIT_GRID[1], num: int = FIT_GRID[2]) -> NDArray:
    """The geometric grid at both signs of the coupling.

    Sampling ``+lam`` and ``-lam`` decouples the even and odd parts of the
    series, so a fit of the same total order is far less contaminated by the
    truncated high-order tail.
    """
    g = geometric_grid(lo, hi, num)
    return np.concatenate([-g[::-1], g])


def hellmann_feynman_slopes(p: PerturbationProblem, vectors: NDArray) -> NDArray:
    """``dE_n/dlam = <psi_n|h|psi_n>`` for the exact eigenvector columns of ``vectors``."""
    return np.einsum("in,ij,jn->n", vectors, p.h, vectors)


def fit_series_coefficients(samples, order: int, intercept: float | None = None, slopes=None) -> NDArray:
    """Least-squares polynomial coefficients ``c_0 .. c_order`` of ``E(lam)``.

    ``samples`` is an iterable of ``(lam, E)`` pairs.  The abscissae are
    rescaled by their largest magnitude before solving.  A known
    ``intercept`` is held fixed and only ``c_1 .. c_order`` are fitted, which
    buys roughly one extra order of accuracy near ``lam = 0``.  When
    ``slopes`` (``dE/dlam`` at each sample) are given the fit is of Hermite
    type and every sample contributes two equations, which roughly doubles
    the usable order on a short grid.
    """
    pts = np.asarray(list(samples), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("samples must be (lam, E) pairs")
    if order < 0:
        raise ValueError("order must be non-negative")
    lam, e = pts[:, 0], pts[:, 1]
    n_eq = lam.size if slopes is None else 2 * lam.size
    n_free = order if intercept is not None else order + 1
    if n_eq < n_free + 1:
        raise ValueError(f"need at least {n_free + 1} equations for order {order}, got {n_eq}")
    if np.unique(lam).size != lam.size:
        raise ValueError("sample abscissae must be distinct")
    scale = float(np.max(np.abs(lam)))
    powers = np.arange(order + 1)
    if intercept is not None:
        e = e - intercept
        powers = powers[1:]
    x = lam[:, None] / scale
    design = x**powers
    rhs = e
    if slopes is not None:
        slopes = np.asarray(slopes, dtype=float)
        if slopes.shape != lam.shape:
            raise ValueError("need one slope per sample")
        design = np.vstack([design, powers * x ** np.maximum(powers - 1, 0)])
        rhs = np.concatenate([e, slopes * scale])
    coef, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
    if rank < powers.size:
        raise ValueError(f"rank-deficient fit (rank {rank} < {powers.size})")
    coef = coef / scale**powers
    if intercept is not None:
        coef = np.concatenate([[intercept], coef])
    return coef


def radial_oscillator_levels(
    l: int,
    n_levels: int,
    *,
    mu: float = 1.0,
    hbar: float = 1.0,
    spring: float = 1.0,
    points: int = 4000,
    extrapolate: bool = True,
) -> NDArray:
    """Lowest levels of ``p**2/(2 mu) + spring * r**2`` in partial wave ``l``.

    Solved on a uniform radial grid with a three-point Laplacian for ``u(r) =
    r R(r)`` and Dirichlet walls; with ``extrapolate`` the grid is doubled and
    the O(h**2) error removed by Richardson extrapolation.  This never touches
    the ladder-operator algebra, so it independently pins the oscillator
    level formula.
    """
    from scipy.linalg import eigh_tridiagonal

    omega = math.sqrt(2.0 * spring / mu)
    length = math.sqrt(hbar / (mu * omega))
    r_max = length * (math.sqrt(4.0 * n_levels + 2.0 * l + 3.0) + 8.0)

    def solve(npts: int) -> NDArray:
        h = r_max / (npts + 1)
        r = h * np.arange(1, npts + 1)
        kin = hbar**2 / (2.0 * mu * h**2)
        diag = 2.0 * kin + hbar**2 * l * (l + 1) / (2.0 * mu * r**2) + spring * r**2
        off = -kin * np.ones(npts - 1)
        return eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1), eigvals_only=True)

    coarse = solve(points)
    if not extrapolate:
        return coarse
    fine = solve(2 * points + 1)  # same r_max, half the spacing
    return (4.0 * fine - coarse) / 3.0
