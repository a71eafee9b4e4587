"""Adiabatic and counterdiabatic population transfer in spin-orbit mixed
three- and four-level systems with Autler-Townes splitting."""
from .counterdiabatic import CdScheme, h_cd, mask_terms, total_hamiltonian
from .model import (
    DressedPair,
    DriveParams,
    Hamiltonian,
    ManifoldParams,
    build_h3,
    build_h4,
    dressed_basis,
    light_shift,
    manifold_from_mixing,
    to_dressed_frame,
)
from .propagator import Trajectory, evolve, fidelity, infidelity, measure_bare
from .protocols import (
    Arctan,
    Linear,
    RolandCerf,
    clamp_after,
    split_diabatic_cd,
    sweep_rate,
    sweep_value,
)
from .spectral import SpectralFlow, eigensystem, min_gap, spectral_flow

__version__ = "0.1.0"
