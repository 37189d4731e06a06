"""Detector response to one-particle field wavepackets.

Closed-form adiabatic transition probabilities for pointlike two-level
detectors coupled to real scalar, vector, spin-1/2 and complex scalar fields
prepared in Gaussian wavepackets, together with an independent
finite-switching-time quadrature evaluator that cross-checks every formula.
"""

from .detectors import (
    ClosedFormResult,
    gamma_plus,
    prob_complex,
    prob_fermion,
    prob_real_scalar,
    prob_real_scalar_3d,
    prob_real_scalar_peak,
    prob_vector_general,
    prob_vector_parallel,
    prob_vector_perp,
)
from .fieldmodes import (
    DetectorSpec,
    FieldModel,
    PolarizationPair,
    Statistics,
    WavepacketSpec,
    dispersion,
    gaussian_spectrum,
    polarization_basis,
    spinor_mode_u,
    spinor_mode_v,
)
from .oracle import (
    AdiabaticDiagnostics,
    ConvergenceError,
    ProbabilityBreakdown,
    QuadratureConfig,
    QuadratureError,
    SwitchingSpec,
    adiabatic_limit,
    angular_integral_numeric,
    default_start_T,
    finite_t_complex,
    finite_t_fermion,
    finite_t_real_scalar,
    finite_t_vector,
    vacuum_probability_fermion,
    vacuum_probability_scalar,
)
from .specfun import (
    LogValue,
    PrecisionLossWarning,
    angular_exp_integral,
    gaussian_window,
    log_bessel_i,
    pole_removed_coth,
)

__version__ = "0.1.0"
