"""Quadrature noise spectra of light transmitted through multilevel atoms.

Linearized Heisenberg-Langevin + Maxwell propagation of the 4x4 field
spectral-density matrix (two polarization modes and their adjoints) through
an optically thick medium of Zeeman-degenerate atoms, including the full
atomic quantum fluctuations via the generalized Einstein relation.
"""

__version__ = "0.1.0"

from .atomic import (
    AtomSpec,
    DipoleSet,
    X_POL,
    Y_POL,
    build_dipole_operators,
    build_zeeman_hamiltonian,
)
from .liouville import (
    DriveSpec,
    LiouvilleIndex,
    LiouvilleSystem,
    SteadyState,
    build_V,
    build_system,
    steady_state,
)
from .diffusion import DiffusionMatrix, diffusion_matrix
from .propagation import (
    DopplerSpec,
    MediumSpec,
    PropagationResult,
    VelocityFamily,
    doppler_scan_converged,
    doppler_spectrum,
    output_spectrum,
    response_G,
    sylvester_solve,
    vacuum_input,
    velocity_quadrature,
)
from .spectra import (
    AnalysisBasis,
    NoiseRecord,
    cross_correlation,
    duan_witness,
    noise_powers,
    record_from_spectrum,
    rotate,
)
from .engine import ConfigError, ScanConfig, run_scan, validate_config

__all__ = [
    "__version__",
    "AtomSpec",
    "DipoleSet",
    "X_POL",
    "Y_POL",
    "build_dipole_operators",
    "build_zeeman_hamiltonian",
    "DriveSpec",
    "LiouvilleIndex",
    "LiouvilleSystem",
    "SteadyState",
    "build_system",
    "steady_state",
    "build_V",
    "DiffusionMatrix",
    "diffusion_matrix",
    "MediumSpec",
    "DopplerSpec",
    "PropagationResult",
    "VelocityFamily",
    "vacuum_input",
    "response_G",
    "sylvester_solve",
    "output_spectrum",
    "doppler_spectrum",
    "doppler_scan_converged",
    "velocity_quadrature",
    "AnalysisBasis",
    "NoiseRecord",
    "rotate",
    "noise_powers",
    "cross_correlation",
    "record_from_spectrum",
    "duan_witness",
    "ConfigError",
    "ScanConfig",
    "validate_config",
    "run_scan",
]
