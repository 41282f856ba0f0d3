"""Numerical toolkit for the response of a uniformly accelerated detector.

Modules
-------
switching   smooth compactly supported windows and their rescalings
spectral    Fourier transforms, spectral norms and decay envelopes
response    Planck kernel, Rindler two-point function, detector response
thermality  detailed-balance temperature, error bands and scan verdicts
cli         experiment runner writing CSV tables and run manifests
"""

__version__ = "0.1.0"

from .switching import (  # noqa: E402
    BumpProduct,
    InvalidParameterError,
    Plateau,
    Rescaled,
    SwitchingFunction,
    adiabatic_rescale,
    bump_factor,
    bump_product_switch,
    plateau_switch,
)
from .spectral import (  # noqa: E402
    EnvelopeFitError,
    QuadratureError,
    decay_envelope_fit,
    fourier_transform,
    spectral_norms,
    spectral_profile,
)
from .response import (  # noqa: E402
    ResponseResult,
    ln_planck_factor,
    planck_factor,
    response_frequency,
    response_infinite_time_limit,
    response_time,
    rindler_wightman,
)
from .thermality import (  # noqa: E402
    ScalingSchedule,
    ThermalityBounds,
    ThermalityReport,
    bounds,
    plateau_scan,
    schedule_lambda,
    temperature_estimate,
    thermality_scan,
)
