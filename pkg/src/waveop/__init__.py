"""Wave-operator (Dalgarno-Lewis) perturbation theory with an SU(1,1) deep-potential model."""

from waveop.core import (
    DegenerateSpectrum,
    EnergyExpansion,
    PerturbationProblem,
    Spectrum,
    WaveOperator,
    apply_wave_operator,
    build_f_operator,
    build_g_operator,
    eigenvalue_residual,
    energy_expansion,
    first_order_corrections,
    second_order_corrections,
    split_diagonal,
    third_order_corrections,
)
from waveop.deep import BandSpectrum, DeepPotentialModel, assemble_problem, band_spectrum, rotational_band_report
from waveop.linalg import commutator, expm

__version__ = "0.1.0"
