"""Anisotropic phase-space weights W^{r,sigma}.

A point of R^{2k} splits into an unstable-like first half and a
stable-like second half. The order function interpolates from -1 where
the first half dominates (the cone C+) to +1 where the second half
dominates (C-), through the projective angle of the ratio
|second| / |first|; sigma biases the comparison by 2^sigma without
rescaling the magnitude.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError, DimensionError
from .coords import bracket

THETA_PLUS = math.atan(0.5)
THETA_MINUS = math.atan(2.0)
SIGMA_RANGE = (-2, -1, 0, 1, 2)


@dataclass(frozen=True)
class WeightSpec:
    r: float = 8.0
    sigma: int = 0

    def validate(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise ArgumentError("anisotropy exponent r must be positive", r=self.r)
        if self.sigma not in SIGMA_RANGE:
            raise ArgumentError(
                "sigma must lie in %s" % (SIGMA_RANGE,), sigma=self.sigma
            )
        return self


def _split_halves(point):
    pt = np.asarray(point, dtype=float)
    if pt.shape[-1] % 2 != 0:
        raise DimensionError("points must have even length", shape=pt.shape)
    k = pt.shape[-1] // 2
    return pt, np.linalg.norm(pt[..., :k], axis=-1), np.linalg.norm(pt[..., k:], axis=-1)


def ord_sigma(point, sigma=0):
    """Order function in [-1, 1]; -1 on C+(1/2), +1 on C-(1/2) at sigma=0."""
    _, first, second = _split_halves(point)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (2.0**sigma) * second / first
    ratio = np.where(first > 0, ratio, np.where(second > 0, np.inf, 0.0))
    t = np.clip((np.arctan(ratio) - THETA_PLUS) / (THETA_MINUS - THETA_PLUS), 0.0, 1.0)
    val = -np.cos(np.pi * t)
    return float(val[()]) if val.ndim == 0 else val


def weight_w(point, spec):
    """W^{r,sigma}(point) = bracket(|point|)^(r * ord_sigma(point))."""
    spec.validate()
    pt, _, _ = _split_halves(point)
    mag = np.linalg.norm(pt, axis=-1)
    val = bracket(mag) ** (spec.r * ord_sigma(point, spec.sigma))
    return float(val) if np.ndim(val) == 0 else val
