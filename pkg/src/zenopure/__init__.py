"""Purification of qubits through repeated (Zeno-like) probe confirmations."""

from .errors import (
    DimensionMismatch,
    InvalidSpec,
    NoFeasiblePoint,
    NotHermitian,
    NotOptimalWarning,
    NoUniqueTarget,
    NoUniqueTargetWarning,
    NumericallyDefective,
    ParseError,
    ValidationError,
    ZenoError,
    ZeroProjectionProbability,
)
from .linalg import (
    GeneralEigenSystem,
    HermitianEigenSystem,
    general_eigendecompose,
    hermitian_eigendecompose,
    nullspace,
    unitary_evolution,
)
from .protocols import (
    InitialPreset,
    PurificationTrace,
    RunConfig,
    TauGrid,
    asymptotic_probability,
    optimize_tau,
    run_purification,
)
from .qubits import (
    DensityMatrix,
    HamiltonianSpec,
    ProbeState,
    build_hamiltonian,
    probe_orthogonal,
    probe_vector,
    standard_states,
    thermal_state,
)
from .scenario import ScenarioFile, load_scenario
from .spectral import (
    SpectralReport,
    perpendicular_projection,
    power_via_spectrum,
    projected_evolution,
    spectral_report,
    verify_bound,
)

__version__ = "0.1.0"
