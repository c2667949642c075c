"""Simulation of Molmer-Sorensen gates on coherently displaced thermal
motion: gate channels, error metrics, trap-frequency noise averaging, and
blue-sideband thermometry fits."""

from .channel import (
    ChoiMatrix,
    channel_from_propagator,
    error_channel,
    gate_channel,
    ideal_gate_choi,
    mix_channels,
)
from .fock import (
    MotionalDensityMatrix,
    MotionalSpec,
    TruncationError,
    choose_truncation,
    displaced_fock_coefficients,
    displacement_matrix,
    laguerre,
    motional_density_matrix,
    thermal_occupation,
    thermal_weights,
)
from .metrics import (
    DIAMOND_DISTANCE_FACTOR,
    ErrorReport,
    diamond_distance,
    diamond_norm,
    process_infidelity,
    sdp_solve,
)
from .msgate import (
    FrequencyOffset,
    GateParams,
    brute_force_propagator,
    calibrate_gate,
    geometric_phase,
    propagator,
    trajectory,
)
from .noise import (
    NoiseModel,
    averaged_gate_error,
    drift_sweep,
    error_surface,
    optimize_phase,
    phase_scan,
    spec_for_gate,
)
from .sideband import (
    FitResult,
    RabiDataset,
    RabiModel,
    SearchBox,
    excited_probability,
    fit_mle,
    likelihood_contour,
    log_likelihood,
    population_distribution,
    predict_gate_error,
)

__version__ = "0.1.0"
