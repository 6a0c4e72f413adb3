"""Resonance lineshapes, Gamow states, and decay-law pipelines."""

from ._core import (
    GamowKet,
    RationalHardyFunction,
    ResonanceParams,
    SMatrixModel,
    SpectralDensity,
    bw_amplitude,
    catastrophe_probe,
    decay_probability_gamow,
    eigenvalue_residual,
    evolved_pairing,
    fit_decay_events,
    fit_lineshape_events,
    gamow_pairing,
    hardy_membership_check,
    laurent_coefficients,
    mean_lifetime,
    normalize_density,
    sample_decays,
    sample_lineshape,
    survival_probability,
    width_lifetime_product,
    ww_deviation,
)

__all__ = [
    "GamowKet",
    "RationalHardyFunction",
    "ResonanceParams",
    "SMatrixModel",
    "SpectralDensity",
    "bw_amplitude",
    "catastrophe_probe",
    "decay_probability_gamow",
    "eigenvalue_residual",
    "evolved_pairing",
    "fit_decay_events",
    "fit_lineshape_events",
    "gamow_pairing",
    "hardy_membership_check",
    "laurent_coefficients",
    "mean_lifetime",
    "normalize_density",
    "sample_decays",
    "sample_lineshape",
    "survival_probability",
    "width_lifetime_product",
    "ww_deviation",
]
