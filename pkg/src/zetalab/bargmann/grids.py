"""Uniform phase-space grids for the transform laboratory.

Node-centered convention: axis points x_j = -L + j*h with h = 2L/M and M
even, so the origin is an exact grid node and the axis matches the
periodic-DFT layout. Position axes carry a margin of a few packet widths
beyond the phase window so that packets centered at the window edge are
still integrated over their full support.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError

BOUNDARY_FRACTION = 0.9
BOUNDARY_MASS_TOL = 1e-8


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform grid on [-L, L)^dimension with M points per axis."""

    dimension: int = 1
    half_width: float = 8.0
    points_per_axis: int = 128

    def validate(self):
        if self.dimension < 1:
            raise ArgumentError("dimension must be >= 1", dimension=self.dimension)
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise ArgumentError("half_width must be positive", half_width=self.half_width)
        if self.points_per_axis < 4 or self.points_per_axis % 2 != 0:
            raise ArgumentError(
                "points_per_axis must be an even integer >= 4",
                points_per_axis=self.points_per_axis,
            )
        return self

    @property
    def spacing(self):
        return 2.0 * self.half_width / self.points_per_axis

    def axis(self):
        return -self.half_width + self.spacing * np.arange(self.points_per_axis)

    def position_axis(self, hbar, margin_sigmas=6.0):
        """Axis extended by ceil(margin_sigmas*sqrt(hbar)/h) points per side."""
        if hbar <= 0:
            raise ArgumentError("hbar must be positive", hbar=hbar)
        h = self.spacing
        mpts = int(math.ceil(margin_sigmas * math.sqrt(hbar) / h))
        n = self.points_per_axis + 2 * mpts
        half = self.half_width + mpts * h
        return -half + h * np.arange(n), mpts

    def phase_volume(self, hbar):
        """Volume element h^2/(2 pi hbar) per (w, xi_w) node pair."""
        return self.spacing**2 / (2.0 * math.pi * hbar)


def warn_boundary_mass(u, axis, half_width, label="input"):
    """Warn when u carries relative mass above 1e-8 outside 0.9*half_width."""
    u = np.asarray(u)
    peak = float(np.max(np.abs(u)))
    if peak == 0.0:
        return 0.0
    outer = np.broadcast_to(np.abs(axis) > BOUNDARY_FRACTION * half_width, u.shape)
    if not outer.any():
        return 0.0
    mass = float(np.max(np.abs(u[outer]))) / peak
    if mass > BOUNDARY_MASS_TOL:
        warnings.warn(
            f"{label} has relative magnitude {mass:.2e} beyond 0.9*L; "
            "results may be polluted by the grid boundary",
            stacklevel=3,
        )
    return mass
