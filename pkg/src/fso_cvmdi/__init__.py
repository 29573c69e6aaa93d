"""Free-space optical channel model and composable CV-MDI QKD rate engine."""

__version__ = "0.1.0"

from .atmosphere import (
    CONSTANTS,
    LinkGeometry,
    PhysicalConstants,
    RegimeReport,
    TurbulenceProfile,
    classify_regime,
    cn2_at_altitude,
    extinction_transmissivity,
    fried_length,
    rytov_variance,
    scintillation_index,
    slant_length,
)
from .beam_optics import (
    BeamParams,
    FadingState,
    PointingError,
    ReceiverAperture,
    average_over_deflection,
    deflection_params,
    diffraction_transmissivity,
    fading_cdf,
    fading_pdf,
    instantaneous_transmissivity,
    spot_size,
    weibull_pdf,
    wandering_variances,
    yura_broadening,
)
from .errors import (
    ConfigError,
    DegenerateLinkError,
    FsoCvmdiError,
    InsufficientStatisticsError,
    ModelError,
    NonConvergenceError,
)
from .finite_size import (
    BlockAccounting,
    EpsilonBudget,
    PilotConfig,
    RatePoint,
    composable_rate,
    pe_rate,
    pilot_bin_probability,
    pilot_estimator_stats,
    postselect_thresholds,
    worst_case_params,
)
from .mc_oracle import RngStream, mc_average_rate, sample_deflection, simulate_pilots
from .mdi_security import (
    ProtocolParams,
    RateBreakdown,
    TwoModeCM,
    asymptotic_rate,
    conditional_cm,
    conditioned_single_mode,
    entropy_g,
    excess_noise,
    gmax_default,
    holevo_bound,
    mutual_information,
    symplectic_spectrum,
)
from .noise_budget import (
    DetectorParams,
    ReceiverEnvironment,
    ThermalBudget,
    assemble_thermal,
    background_photons,
    calibration_photons,
    effective_filter,
    receiver_photons,
)
from .numerics import (
    DEFAULT_QUADRATURE,
    IntegrationResult,
    QuadratureSpec,
    integrate,
    inverse_erf,
    maximize_1d,
    scaled_bessel_lambda,
)
from .pipeline import end_to_end_rate, evaluate, slant_rate
from .scenario import Scenario, load_config
