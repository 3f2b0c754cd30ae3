"""Truncated SU(1,1) ladder matrices in the ``|k, m>`` basis.

States are ``m = k, k+1, ..., k+D-1`` (positive discrete series, Bargmann
index ``k``).  Products of ladder matrices are only faithful away from the
top of the truncated ladder, so identities are checked on :func:`interior`
rows and columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray

from waveop.linalg import commutator

if TYPE_CHECKING:
    from waveop.deep import DeepPotentialModel

MIN_DIM = 4
__all__ = [
    "Su11Basis",
    "LadderMatrices",
    "basis_from_angular_momentum",
    "build_ladders",
    "casimir_matrix",
    "commutator",
    "build_a_operators",
    "build_r_squared",
    "build_h_matrix",
    "build_f_analytic",
    "interior",
]


@dataclass(frozen=True)
class Su11Basis:
    k: float
    dim: int

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0.5):
            raise ValueError(f"Bargmann index must satisfy k > 1/2, got {self.k}")
        if int(self.dim) != self.dim or self.dim < MIN_DIM:
            raise ValueError(f"basis dimension must be an integer >= {MIN_DIM}, got {self.dim}")

    @property
    def labels(self) -> NDArray:
        """``K0`` eigenvalues ``m`` in basis order."""
        return self.k + np.arange(self.dim)

    @property
    def casimir(self) -> float:
        return self.k * (self.k - 1.0)


def basis_from_angular_momentum(l: int, dim: int) -> Su11Basis:
    """Radial ladder at orbital angular momentum ``l``: ``k = (l + 3/2) / 2``."""
    if int(l) != l or l < 0:
        raise ValueError(f"angular momentum must be a non-negative integer, got {l}")
    return Su11Basis(k=(l + 1.5) / 2.0, dim=dim)


@dataclass(frozen=True)
class LadderMatrices:
    k0: NDArray
    kplus: NDArray
    kminus: NDArray
    basis: Su11Basis


def build_ladders(b: Su11Basis) -> LadderMatrices:
    m = b.labels
    k = b.k
    kplus = np.zeros((b.dim, b.dim))
    i = np.arange(b.dim - 1)
    # K+ |k,m> = sqrt((m + k)(m - k + 1)) |k,m+1>
    kplus[i + 1, i] = np.sqrt((m[:-1] + k) * (m[:-1] - k + 1.0))
    return LadderMatrices(k0=np.diag(m), kplus=kplus, kminus=kplus.T.copy(), basis=b)


def interior(dim: int) -> slice:
    """Indices ``2 .. dim-3``, untouched by truncation for up to two ladder steps."""
    return slice(2, dim - 2)


def casimir_matrix(lm: LadderMatrices) -> NDArray:
    """``K0^2 - (K+ K- + K- K+) / 2``; equals ``k(k-1)`` on interior rows."""
    k0, kp, km = lm.k0, lm.kplus, lm.kminus
    return k0 @ k0 - 0.5 * (kp @ km + km @ kp)


def build_a_operators(lm: LadderMatrices) -> tuple[NDArray, NDArray]:
    """``A+ = K+ K0 + K0 K+`` and its transpose ``A-``."""
    aplus = lm.kplus @ lm.k0 + lm.k0 @ lm.kplus
    return aplus, aplus.T.copy()


def _position_shape(lm: LadderMatrices) -> NDArray:
    return lm.kplus + lm.kminus + 2.0 * lm.k0


def build_r_squared(lm: LadderMatrices, length_scale: float) -> NDArray:
    """``r**2 = length_scale * (K+ + K- + 2 K0)`` with ``length_scale = hbar / (mu omega)``."""
    if not (math.isfinite(length_scale) and length_scale > 0):
        raise ValueError(f"length scale must be positive, got {length_scale}")
    return length_scale * _position_shape(lm)


def build_h_matrix(lm: LadderMatrices, model: DeepPotentialModel) -> NDArray:
    """Quartic perturbation ``-V0 beta r**4`` as a pentadiagonal matrix.

    Computed by squaring the ``r**2`` ladder combination, which is exact on
    every row where the square does not reach past the truncation.
    """
    x = _position_shape(lm)
    h = -model.quartic_prefactor * (x @ x)
    return 0.5 * (h + h.T)


def build_f_analytic(lm: LadderMatrices, model: DeepPotentialModel) -> NDArray:
    """Closed-form first-order generator of the quartic perturbation.

    ``F = -(hbar beta / (2 alpha sqrt(2 alpha mu V0))) [2A- - 2A+ + (K-^2 - K+^2)/2]``.

    Note: with the oscillator levels ``2 hbar omega m`` this is exactly twice
    the ``F`` that solves ``[F, H0] = h_ND``; it corresponds to a level
    spacing of ``hbar omega`` per unit of ``m``.  Use
    :func:`waveop.core.build_f_operator` on :func:`waveop.deep.assemble_problem`
    for the generator consistent with the assembled spectrum.
    """
    aplus, aminus = build_a_operators(lm)
    kp2 = lm.kplus @ lm.kplus
    km2 = kp2.T
    bracket = 2.0 * aminus - 2.0 * aplus + 0.5 * (km2 - kp2)
    pref = model.hbar * model.beta / (2.0 * model.alpha * math.sqrt(2.0 * model.alpha * model.mu * model.v0))
    return -pref * bracket
