"""Bearing-only source localization: estimators, bounds and Monte Carlo campaigns."""

from ._core import (
    AoaError,
    estimate_2d,
    estimate_3d,
    preset,
    preset_names,
    rcrlb_2d,
    rcrlb_3d,
    run_campaign,
    sigma_from_var_sin,
    synthesize_2d,
    synthesize_3d,
    var_sin,
)

__all__ = [
    "AoaError",
    "estimate_2d",
    "estimate_3d",
    "preset",
    "preset_names",
    "rcrlb_2d",
    "rcrlb_3d",
    "run_campaign",
    "sigma_from_var_sin",
    "synthesize_2d",
    "synthesize_3d",
    "var_sin",
]
