"""Numerical bracketing of point-configuration ratio constants and the
ionization bound tables built on them."""

__version__ = "0.1.0"

from .alpha import (
    AlphaEstimate,
    OptimizerSettings,
    alpha_sandwich,
    estimate_alpha,
    local_minimize,
    normalize_config,
)
from .beta import (
    BetaBracket,
    BetaSettings,
    RadialMeasure,
    beta_bracket,
    g_of_lambda,
    maximize_g,
    minimize_radial_ratio,
    radial_ratio,
    trial_measure_value,
    w_maximin,
)
from .bounds import (
    BoundInputs,
    LemmaGrid,
    LemmaReport,
    PhysicalConstants,
    bound_row,
    crossover_z,
    derived_constants,
    ionization_lemma_margin,
    magnetic_bound,
    mean_radius_lower,
    relativistic_or_bosonic_bound,
    verify_lemma,
)
from .kernels import (
    ParticleConfiguration,
    ProbeReport,
    RatioValue,
    inequality_probe,
    pair_energy,
    radial_kernel_triple,
    ratio_gradient,
    ratio_value,
    sphere_average_dipole,
    sphere_average_inverse_distance,
    w_lambda_reduced,
)

__all__ = [
    "__version__",
    "AlphaEstimate",
    "BetaBracket",
    "BetaSettings",
    "BoundInputs",
    "LemmaGrid",
    "LemmaReport",
    "OptimizerSettings",
    "ParticleConfiguration",
    "PhysicalConstants",
    "ProbeReport",
    "RadialMeasure",
    "RatioValue",
    "alpha_sandwich",
    "beta_bracket",
    "bound_row",
    "crossover_z",
    "derived_constants",
    "estimate_alpha",
    "g_of_lambda",
    "inequality_probe",
    "ionization_lemma_margin",
    "local_minimize",
    "magnetic_bound",
    "maximize_g",
    "mean_radius_lower",
    "minimize_radial_ratio",
    "normalize_config",
    "pair_energy",
    "radial_kernel_triple",
    "radial_ratio",
    "ratio_gradient",
    "ratio_value",
    "relativistic_or_bosonic_bound",
    "sphere_average_dipole",
    "sphere_average_inverse_distance",
    "trial_measure_value",
    "verify_lemma",
    "w_lambda_reduced",
    "w_maximin",
]
