"""Deep attractive potentials ``V(r^2) = -V0 (1 - alpha r^2 + beta r^4)``.

The oscillator part ``p^2/2mu + alpha V0 r^2`` is solved exactly by the
SU(1,1) ladder (levels ``-V0 + 2 hbar omega m``) and ``-V0 beta r^4`` is
treated as the perturbation with coupling folded to 1.  In units of ``V0``
the resulting series runs in the dimensionless parameter
``delta = hbar sqrt(alpha / (mu V0))``:

    E_m / V0 = -1 + 2 sqrt(2) m delta
               + (C2 - 3 m^2) (beta/alpha^2) delta^2
               - (sqrt(2)/8) (34 m^3 - 18 C2 m + 5 m) (beta/alpha^2)^2 delta^3 + ...

The ``delta`` and ``delta^2`` terms come from the exact oscillator levels and
the first-order correction, the ``delta^3`` term from second order, and the
third-order correction contributes at ``delta^4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from waveop.core import PerturbationProblem, Spectrum, energy_expansion
from waveop.su11 import basis_from_angular_momentum, build_h_matrix, build_ladders

DEFAULT_DIM = 40
#: States whose corrections are requested must sit this far below the truncation.
PADDING = 10
MIN_PROBLEM_DIM = 8

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class DeepPotentialModel:
    """Physical parameters; defaults are the ``hbar = mu = V0 = 1`` unit system."""

    v0: float = 1.0
    alpha: float = 1.0
    beta: float = 0.0
    mu: float = 1.0
    hbar: float = 1.0
    l: int = 0

    def __post_init__(self):
        for name in ("v0", "alpha", "mu", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta}")
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(f"l must be a non-negative integer, got {self.l}")
        object.__setattr__(self, "l", int(self.l))

    @classmethod
    def from_dimensionless(
        cls,
        delta: float,
        beta_ratio: float,
        l: int = 0,
        *,
        v0: float = 1.0,
        alpha: float = 1.0,
        mu: float = 1.0,
    ) -> DeepPotentialModel:
        """Model with the given ``delta`` and ``beta / alpha**2``."""
        return cls(
            v0=v0,
            alpha=alpha,
            beta=beta_ratio * alpha**2,
            mu=mu,
            hbar=delta * math.sqrt(mu * v0 / alpha),
            l=l,
        )

    def with_l(self, l: int) -> DeepPotentialModel:
        return replace(self, l=l)

    @property
    def omega(self) -> float:
        # 1/2 mu omega^2 = alpha V0
        return math.sqrt(2.0 * self.alpha * self.v0 / self.mu)

    @property
    def hbar_omega(self) -> float:
        return self.hbar * self.omega

    @property
    def delta(self) -> float:
        return self.hbar * math.sqrt(self.alpha / (self.mu * self.v0))

    @property
    def length_scale(self) -> float:
        """``hbar / (mu omega)``, the prefactor of ``r**2`` in ladder operators."""
        return self.hbar / (self.mu * self.omega)

    @property
    def quartic_prefactor(self) -> float:
        """``hbar^2 beta / (2 mu alpha)``: ``h = -quartic_prefactor * (K+ + K- + 2K0)^2``."""
        return self.hbar**2 * self.beta / (2.0 * self.mu * self.alpha)

    @property
    def beta_ratio(self) -> float:
        return self.beta / self.alpha**2

    @property
    def bargmann_index(self) -> float:
        return (self.l + 1.5) / 2.0

    @property
    def casimir(self) -> float:
        k = self.bargmann_index
        return k * (k - 1.0)


def assemble_problem(model: DeepPotentialModel, dim: int = DEFAULT_DIM) -> PerturbationProblem:
    """Oscillator spectrum plus quartic perturbation at fixed ``l``, coupling 1."""
    if dim < MIN_PROBLEM_DIM:
        raise ValueError(f"dim must be at least {MIN_PROBLEM_DIM}, got {dim}")
    basis = basis_from_angular_momentum(model.l, dim)
    levels = -model.v0 + 2.0 * model.hbar_omega * basis.labels
    h = build_h_matrix(build_ladders(basis), model)
    return PerturbationProblem(Spectrum(levels), h, lam=1.0)


# closed forms in units of V0 -------------------------------------------------


def oscillator_linear_coefficient(m):
    """Coefficient of ``delta`` in ``E/V0``: ``2 hbar omega m / V0 = 2 sqrt(2) m delta``."""
    return 2.0 * SQRT2 * np.asarray(m, dtype=float)


def candidate_linear_coefficient(m):
    """Candidate ``(m + 1/2) sqrt(2)`` form; it disagrees with the oscillator levels."""
    return SQRT2 * (np.asarray(m, dtype=float) + 0.5)


def delta2_coefficient(m, c2: float, beta_ratio: float):
    """First-order correction ``(C2 - 3 m^2) beta / alpha^2``."""
    m = np.asarray(m, dtype=float)
    return (c2 - 3.0 * m**2) * beta_ratio


def delta3_coefficient(m, c2: float, beta_ratio: float):
    """Second-order correction ``-(sqrt2/8)(34 m^3 - 18 C2 m + 5 m)(beta/alpha^2)^2``."""
    m = np.asarray(m, dtype=float)
    return -(SQRT2 / 8.0) * (34.0 * m**3 - 18.0 * c2 * m + 5.0 * m) * beta_ratio**2


def candidate_delta3_coefficient(m, c2: float, model: DeepPotentialModel):
    """Candidate ``-(7 m C2 - 15 m^3 - 3m/2) sqrt(2) beta^2 V0 / alpha^4``."""
    m = np.asarray(m, dtype=float)
    return -(7.0 * m * c2 - 15.0 * m**3 - 1.5 * m) * SQRT2 * model.beta**2 * model.v0 / model.alpha**4


# band spectra ------------------------------------------------------------------


@dataclass(frozen=True)
class BandEntry:
    n_r: int
    m: float
    e0: float
    e1: float
    e2: float
    e3: float
    e4: float

    def coefficients(self, order: int = 3) -> tuple[float, ...]:
        return (self.e0, self.e1, self.e2, self.e3, self.e4)[: order + 1]


@dataclass(frozen=True)
class BandSpectrum:
    """Coefficients of ``E/V0`` in powers of ``delta`` for the lowest states at one ``l``.

    ``e4`` is the third-order perturbative correction; the fourth power also
    receives contributions from fourth order, so it is reported but not
    summed by default.
    """

    l: int
    c2: float
    delta: float
    v0: float
    entries: tuple[BandEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def energy_over_v0(self, i: int, delta: float | None = None, order: int = 3) -> float:
        d = self.delta if delta is None else delta
        return float(sum(c * d**p for p, c in enumerate(self.entries[i].coefficients(order))))

    def evaluate(self, i: int, delta: float | None = None, order: int = 3) -> float:
        return self.v0 * self.energy_over_v0(i, delta, order)

    def column(self, name: str) -> NDArray:
        return np.array([getattr(e, name) for e in self.entries])


def band_spectrum(model: DeepPotentialModel, n_states: int, dim: int | None = None) -> BandSpectrum:
    if n_states < 1:
        raise ValueError("n_states must be positive")
    if dim is None:
        dim = max(DEFAULT_DIM, n_states + PADDING)
    if n_states > dim - PADDING:
        raise ValueError(f"n_states={n_states} exceeds dim - {PADDING} = {dim - PADDING}")
    p = assemble_problem(model, dim)
    exp = energy_expansion(p)
    d, v0 = model.delta, model.v0
    labels = basis_from_angular_momentum(model.l, dim).labels
    entries = []
    for n in range(n_states):
        entries.append(
            BandEntry(
                n_r=n,
                m=float(labels[n]),
                e0=-1.0,
                e1=float((exp.eps0.values[n] + v0) / (v0 * d)),
                e2=float(exp.eps1[n] / (v0 * d**2)),
                e3=float(exp.eps2[n] / (v0 * d**3)),
                e4=float(exp.eps3[n] / (v0 * d**4)),
            )
        )
    return BandSpectrum(l=model.l, c2=model.casimir, delta=d, v0=v0, entries=tuple(entries))


@dataclass(frozen=True)
class BandFit:
    """Fit across ``l`` at fixed radial index.

    ``rotational`` is the coefficient of ``C2`` (equivalently of ``L^2 / 4``)
    in the ``delta^2`` term after the ``m^2`` dependence is regressed out
    with ``m = n_r + (l + 3/2)/2``.  ``cubic`` holds the ``(m^3, C2 m, m)``
    coefficients of the ``delta^3`` term when at least three ``l`` values are
    available.
    """

    n_r: int
    rotational: float
    m2_coefficient: float
    residual: float
    cubic: tuple[float, float, float] | None
    cubic_residual: float | None


@dataclass(frozen=True)
class BandReport:
    l_values: tuple[int, ...]
    delta: float
    bands: tuple[BandFit, ...]


def _relative_lstsq(design: NDArray, y: NDArray) -> tuple[NDArray, float]:
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise ValueError("band regression is rank deficient")
    resid = float(np.linalg.norm(design @ coef - y))
    norm = float(np.linalg.norm(y))
    return coef, (resid / norm if norm > 0 else resid)


def rotational_band_report(spectra) -> BandReport:
    spectra = sorted(spectra, key=lambda s: s.l)
    l_values = tuple(s.l for s in spectra)
    if len(set(l_values)) != len(l_values):
        raise ValueError(f"duplicate l values in band input: {l_values}")
    if len(l_values) < 2:
        raise ValueError("a rotational band report needs at least two l values")
    n_bands = min(len(s) for s in spectra)
    bands = []
    for n_r in range(n_bands):
        rows = [s.entries[n_r] for s in spectra]
        c2 = np.array([s.c2 for s in spectra])
        m = np.array([e.m for e in rows])
        e2 = np.array([e.e2 for e in rows])
        e3 = np.array([e.e3 for e in rows])
        coef, resid = _relative_lstsq(np.column_stack([c2, m**2]), e2)
        cubic = cubic_resid = None
        if len(spectra) >= 3:
            ccoef, cubic_resid = _relative_lstsq(np.column_stack([m**3, c2 * m, m]), e3)
            cubic = tuple(float(x) for x in ccoef)
        bands.append(
            BandFit(
                n_r=n_r,
                rotational=float(coef[0]),
                m2_coefficient=float(coef[1]),
                residual=resid,
                cubic=cubic,
                cubic_residual=cubic_resid,
            )
        )
    return BandReport(l_values=l_values, delta=spectra[0].delta, bands=tuple(bands))
