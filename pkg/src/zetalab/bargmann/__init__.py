"""Discretized Bargmann-transform laboratory.

Wave packets, the Bargmann transform and its projector, lifts of affine
transfer operators, trapped-set coordinates, anisotropic weights, the
rank-one origin projector, and the spectral-splitting check for the
linear model.
"""

from .grids import PhaseGrid
from .transform import (
    BargmannTransform,
    bargmann_normalization,
    projector_kernel,
    wave_packet,
)
from .lifts import AffineMapSpec, dilation_factor, lift_affine
from .t0 import t0_lift, t0_project
from .coords import (
    bracket,
    coord_change_phi,
    mirror_point,
    symplectic_scaling_defect,
    trapped_point,
)
from .weights import WeightSpec, ord_sigma, weight_w
from .linmodel import LinearModelSpec, linear_model_operator, spectral_split_check
from .partial import PartialBargmann
from .verify import verification_report

__all__ = [
    "PhaseGrid",
    "BargmannTransform",
    "bargmann_normalization",
    "projector_kernel",
    "wave_packet",
    "AffineMapSpec",
    "dilation_factor",
    "lift_affine",
    "t0_lift",
    "t0_project",
    "bracket",
    "coord_change_phi",
    "mirror_point",
    "symplectic_scaling_defect",
    "trapped_point",
    "WeightSpec",
    "ord_sigma",
    "weight_w",
    "LinearModelSpec",
    "linear_model_operator",
    "spectral_split_check",
    "PartialBargmann",
    "verification_report",
]
