"""Operator form of non-degenerate Rayleigh-Schroedinger perturbation theory.

Everything here works in the eigenbasis of the unperturbed Hamiltonian
``H0``, which is therefore carried as a :class:`Spectrum` (its diagonal).
Operators are dense real ``numpy`` arrays.

For ``H = H0 + lam * h`` the perturbed states are generated by a single
state-independent wave operator

    S(lam) = exp(lam * F + lam**2 * G + O(lam**3)),

where ``F`` solves ``[F, H0] = h_ND`` and ``G`` solves the second-order
commutator condition.  Energy corrections through third order follow from
diagonal matrix elements of products of ``F`` and ``h``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from waveop.linalg import commutator, expm

#: Relative gap threshold below which a spectrum counts as degenerate.
DEGENERACY_RTOL = 1e-8
#: Relative tolerance of the symmetry check on perturbation matrices.
SYMMETRY_RTOL = 1e-12


class DegenerateSpectrum(ValueError):
    """Two unperturbed levels are closer than the degeneracy tolerance."""

    def __init__(self, i: int, j: int, gap: float, tol: float):
        self.i, self.j, self.gap, self.tol = i, j, gap, tol
        super().__init__(
            f"degenerate spectrum: levels {i} and {j} differ by {gap:.3e} "
            f"(tolerance {tol:.3e})"
        )


def _frozen(a: ArrayLike, ndim: int) -> NDArray:
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("array contains NaN or Inf")
    arr.setflags(write=False)
    return arr


def max_abs(a: NDArray) -> float:
    """Largest absolute entry, 0 for an empty array."""
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def is_symmetric(m: NDArray, rtol: float = SYMMETRY_RTOL) -> bool:
    m = np.asarray(m)
    return bool(max_abs(m - m.T) <= rtol * max(1.0, max_abs(m)))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of ``H0`` in basis order (not necessarily sorted)."""

    values: NDArray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, 1))
        if self.values.size == 0:
            raise ValueError("spectrum must contain at least one level")

    def __len__(self) -> int:
        return self.values.size

    @property
    def degeneracy_tol(self) -> float:
        spread = float(self.values.max() - self.values.min())
        return DEGENERACY_RTOL * max(1.0, spread)

    def check_nondegenerate(self) -> None:
        """Raise :class:`DegenerateSpectrum` for the closest offending pair."""
        if len(self) < 2:
            return
        order = np.argsort(self.values, kind="stable")
        gaps = np.diff(self.values[order])
        k = int(np.argmin(gaps))
        if gaps[k] <= self.degeneracy_tol:
            i, j = sorted((int(order[k]), int(order[k + 1])))
            raise DegenerateSpectrum(i, j, float(gaps[k]), self.degeneracy_tol)

    def differences(self) -> NDArray:
        """Matrix ``d[m, n] = eps[n] - eps[m]`` with ones on the diagonal."""
        d = self.values[None, :] - self.values[:, None]
        np.fill_diagonal(d, 1.0)
        return d

    def as_matrix(self) -> NDArray:
        return np.diag(self.values)


@dataclass(frozen=True)
class PerturbationProblem:
    """``H = H0 + lam * h`` with ``H0`` diagonal and ``h`` real symmetric."""

    h0: Spectrum
    h: NDArray
    lam: float = 1.0

    def __post_init__(self):
        if not isinstance(self.h0, Spectrum):
            object.__setattr__(self, "h0", Spectrum(self.h0))
        h = _frozen(self.h, 2)
        if h.shape != (len(self.h0), len(self.h0)):
            raise ValueError(f"h has shape {h.shape}, spectrum has {len(self.h0)} levels")
        if not is_symmetric(h):
            raise ValueError("perturbation matrix h must be symmetric")
        object.__setattr__(self, "h", h)
        lam = float(self.lam)
        if not np.isfinite(lam):
            raise ValueError("coupling lam must be finite")
        object.__setattr__(self, "lam", lam)

    @property
    def dim(self) -> int:
        return len(self.h0)

    def hamiltonian(self, lam: float | None = None) -> NDArray:
        lam = self.lam if lam is None else lam
        return self.h0.as_matrix() + lam * self.h

    def with_coupling(self, lam: float) -> PerturbationProblem:
        return replace(self, lam=lam)


def split_diagonal(h: NDArray) -> tuple[NDArray, NDArray]:
    """Split ``h`` into its diagonal and off-diagonal parts."""
    h = np.asarray(h, dtype=float)
    h_d = np.diag(np.diag(h))
    h_nd = h.copy()
    np.fill_diagonal(h_nd, 0.0)
    return h_d, h_nd


def first_order_corrections(p: PerturbationProblem) -> NDArray:
    return np.diag(p.h).copy()


def build_f_operator(p: PerturbationProblem) -> NDArray:
    """``F[m, n] = h[m, n] / (eps[n] - eps[m])`` off the diagonal, zero on it.

    This is the unique zero-diagonal solution of ``[F, H0] = h_ND``.
    """
    p.h0.check_nondegenerate()
    f = p.h / p.h0.differences()
    np.fill_diagonal(f, 0.0)
    return f


def second_order_corrections(p: PerturbationProblem, f: NDArray | None = None) -> NDArray:
    """``eps2[n] = -1/2 <n|[F, h_ND]|n>``."""
    if f is None:
        f = build_f_operator(p)
    _, h_nd = split_diagonal(p.h)
    return -0.5 * np.diag(commutator(f, h_nd))


def build_g_operator(p: PerturbationProblem, f: NDArray | None = None) -> NDArray:
    """Second-order generator ``G`` of the wave operator, zero diagonal.

    Off-diagonal elements follow from projecting the second-order condition
    ``-[G, H0] - [F, h_D] - 1/2 [F, h_ND] = eps2`` onto ``<m| . |n>``.
    """
    if f is None:
        f = build_f_operator(p)
    p.h0.check_nondegenerate()
    d = p.h0.differences()
    eps1 = np.diag(p.h)
    _, h_nd = split_diagonal(p.h)
    de1 = eps1[None, :] - eps1[:, None]
    g = -(de1 / d) * f - 0.5 * commutator(f, h_nd) / d
    np.fill_diagonal(g, 0.0)
    return g


def third_order_corrections(p: PerturbationProblem, f: NDArray | None = None) -> NDArray:
    """``eps3[n] = <n| 1/2 (F^2 h_D + h_D F^2) - F h F |n>``."""
    if f is None:
        f = build_f_operator(p)
    h_d, _ = split_diagonal(p.h)
    f2 = f @ f
    op = 0.5 * (f2 @ h_d + h_d @ f2) - f @ p.h @ f
    return np.diag(op).copy()


@dataclass(frozen=True)
class EnergyExpansion:
    """Per-state energy coefficients of ``lam**0 .. lam**3``."""

    eps0: Spectrum
    eps1: NDArray
    eps2: NDArray
    eps3: NDArray

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3"):
            arr = _frozen(getattr(self, name), 1)
            if arr.size != len(self.eps0):
                raise ValueError(f"{name} has {arr.size} entries, expected {len(self.eps0)}")
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.eps0)

    def coefficients(self, n: int) -> tuple[float, float, float, float]:
        return (
            float(self.eps0.values[n]),
            float(self.eps1[n]),
            float(self.eps2[n]),
            float(self.eps3[n]),
        )

    def evaluate(self, n: int, lam: float, order: int = 3) -> float:
        """Partial sum of the series for state ``n`` through ``lam**order``."""
        if not 0 <= order <= 3:
            raise ValueError("order must be between 0 and 3")
        coeffs = self.coefficients(n)[: order + 1]
        return float(sum(c * lam**k for k, c in enumerate(coeffs)))


def energy_expansion(p: PerturbationProblem, f: NDArray | None = None) -> EnergyExpansion:
    if f is None:
        f = build_f_operator(p)
    return EnergyExpansion(
        eps0=p.h0,
        eps1=first_order_corrections(p),
        eps2=second_order_corrections(p, f),
        eps3=third_order_corrections(p, f),
    )


@dataclass(frozen=True)
class WaveOperator:
    """Generators ``F`` and ``G`` of ``S(lam) = exp(lam F + lam**2 G)``."""

    f: NDArray
    g: NDArray

    def __post_init__(self):
        f = _frozen(self.f, 2)
        g = _frozen(self.g, 2)
        if f.shape != g.shape or f.shape[0] != f.shape[1]:
            raise ValueError(f"F and G must be equal square matrices, got {f.shape}, {g.shape}")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)

    @classmethod
    def from_problem(cls, p: PerturbationProblem) -> WaveOperator:
        f = build_f_operator(p)
        return cls(f, build_g_operator(p, f))

    @property
    def dim(self) -> int:
        return self.f.shape[0]

    def generator(self, lam: float) -> NDArray:
        return lam * self.f + lam**2 * self.g

    def matrix(self, lam: float) -> NDArray:
        """The full operator ``S(lam)``."""
        return expm(self.generator(lam))


def apply_wave_operator(w: WaveOperator, lam: float, n: int) -> NDArray:
    """Perturbed (unnormalized) state ``S(lam) e_n``."""
    if not 0 <= n < w.dim:
        raise IndexError(f"state index {n} out of range for dimension {w.dim}")
    return w.matrix(lam)[:, n].copy()


def eigenvalue_residual(
    p: PerturbationProblem, w: WaveOperator, e: EnergyExpansion, n: int
) -> float:
    """``||(H0 + lam h - E_n(lam)) psi|| / ||psi||`` with ``psi = S(lam) e_n``."""
    psi = apply_wave_operator(w, p.lam, n)
    r = p.hamiltonian() @ psi - e.evaluate(n, p.lam) * psi
    return float(np.linalg.norm(r) / np.linalg.norm(psi))
