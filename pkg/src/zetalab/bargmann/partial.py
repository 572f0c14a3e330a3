"""Partial Bargmann transform: Fourier in z, packet transform transverse.

The z-window is [-Z, Z) with Mz equispaced samples, so the discrete
frequencies are xi_z = pi*k/Z for integer k in FFT order; each frequency
gets its own packet scale hbar(xi_z) = 1/bracket(xi_z), all sharing the
hbar = 1 position margins. The volume convention is
dm = (2 pi)^{-1} (2 pi hbar)^{-D} dw dxi_w dxi_z, which on the grid makes
the transform an exact isometry mode by mode:

    sum_m |u_m|^2 h^D hz  =  (1/(2Z)) sum_k |V_k|^2 vol_k^D.

Supports the d = 1, d' = 0 model, where the transverse space is the
plane (D = 2) and the per-mode transform is a tensor square of the 1d
one.
"""

import math
import warnings

import numpy as np

from ..errors import DimensionError
from .coords import bracket
from .grids import PhaseGrid, warn_boundary_mass
from .transform import BargmannTransform

RESOLUTION_FACTOR = 0.75
RESOLUTION_MASS_TOL = 1e-8
NYQUIST_SAFETY = 0.95
SHELL_MASS_TOL = 1e-5


class PartialBargmann:
    """Grid partial Bargmann transform on (x1, x2, z), z periodic."""

    def __init__(self, grid, z_points=16, z_half_width=math.pi):
        if not isinstance(grid, PhaseGrid):
            grid = PhaseGrid(*grid)
        self.grid = grid.validate()
        if grid.dimension != 2:
            raise DimensionError(
                "transverse space must be two-dimensional (d = 1, d' = 0)",
                dimension=grid.dimension,
            )
        if z_points < 4 or z_points % 2 != 0:
            raise DimensionError("z_points must be even and >= 4", z_points=z_points)
        if not z_half_width > 0.0:
            raise DimensionError("z window must have positive length",
                                 z_half_width=z_half_width)
        self.z_points = int(z_points)
        self.z_half_width = float(z_half_width)
        self.z_width = 2.0 * self.z_half_width
        self.hz = self.z_width / self.z_points
        self.z_axis = -self.z_half_width + self.hz * np.arange(self.z_points)
        # frequencies pi*k/Z in FFT order; the left-edge phase e^{-i xi z_0}
        # reduces to (-1)^k for any window length
        self._kz = np.fft.fftfreq(self.z_points, 1.0 / self.z_points).astype(int)
        self.xi_z = (math.pi / self.z_half_width) * self._kz
        self.hbar_z = 1.0 / bracket(self.xi_z)
        self._offset = (-1.0) ** np.abs(self._kz)

        axis1d = PhaseGrid(1, grid.half_width, grid.points_per_axis).validate()
        self.position_axis, _ = axis1d.position_axis(1.0)
        self._reps = [
            BargmannTransform(axis1d, hb, position_axis=self.position_axis)
            for hb in self.hbar_z
        ]
        self._fwd = []
        self._adj = []
        for rep in self._reps:
            pts = rep.phase_points()
            bmat = rep.packet_rows(pts[:, 0], pts[:, 1])
            self._fwd.append(bmat)
            self._adj.append(bmat.conj().T * (rep.vol / rep.h))
        self.h = axis1d.spacing
        self._xi_pts = self._reps[0].phase_points()[:, 1]
        # phase rows asking for packet frequency |xi|/hbar beyond the
        # position-grid Nyquist pi/h would hold pure aliasing junk; clamp
        # each mode to its resolvable band and zero the rest
        nyq = NYQUIST_SAFETY * math.pi / self.h
        self._xi_cut = np.minimum(grid.half_width, nyq * self.hbar_z)
        self._row_bad = [np.abs(self._xi_pts) > cut for cut in self._xi_cut]
        self._undersampled = self.h > RESOLUTION_FACTOR * np.sqrt(self.hbar_z)

    @property
    def n_modes(self):
        return self.z_points

    def _check_shape(self, u):
        n = len(self.position_axis)
        if np.shape(u) != (self.z_points, n, n):
            raise DimensionError(
                "expected samples on (z, x1, x2)",
                expected=(self.z_points, n, n),
                got=np.shape(u),
            )

    def z_slices(self, u):
        """hat u_k = hz * sum_m exp(-i xi_k z_m) u(z_m, .), FFT order."""
        self._check_shape(u)
        return self.hz * self._offset[:, None, None] * np.fft.fft(
            np.asarray(u, dtype=complex), axis=0
        )

    def forward(self, u, check_boundary=True):
        """V[k] = tensor-square packet transform of hat u_k at hbar(k)."""
        self._check_shape(u)
        if check_boundary:
            absx = np.abs(self.position_axis)
            warn_boundary_mass(
                np.asarray(u),
                np.maximum(absx[None, :, None], absx[None, None, :]),
                self.position_axis[-1], label="partial transform input",
            )
        slices = self.z_slices(u)
        m2 = self.grid.points_per_axis ** 2
        out = np.empty((self.z_points, m2, m2), dtype=complex)
        for k in range(self.z_points):
            out[k] = self._fwd[k] @ slices[k] @ self._fwd[k].T
            bad = self._row_bad[k]
            if bad.any() and not self._undersampled[k]:
                out[k][bad, :] = 0.0
                out[k][:, bad] = 0.0
        self._warn_resolution(out)
        return out

    def adjoint(self, v):
        """u(z_m, .) = (1/(2Z)) sum_k exp(i xi_k z_m) B*_k V_k."""
        v = np.asarray(v, dtype=complex)
        n = len(self.position_axis)
        slices = np.empty((self.z_points, n, n), dtype=complex)
        for k in range(self.z_points):
            slices[k] = self._adj[k] @ v[k] @ self._adj[k].T
        return np.fft.ifft(self._offset[:, None, None] * slices, axis=0) / self.hz

    def mode_masses(self, v):
        """Per-frequency squared mass (1/(2Z)) |V_k|^2 vol_k^2, FFT order."""
        v = np.asarray(v)
        vols = np.array([rep.vol for rep in self._reps])
        return np.sum(np.abs(v) ** 2, axis=(1, 2)) * vols**2 / self.z_width

    def phase_norm(self, v):
        return math.sqrt(float(np.sum(self.mode_masses(v))))

    def position_norm(self, u):
        self._check_shape(u)
        return math.sqrt(float(np.sum(np.abs(u) ** 2)) * self.h * self.h * self.hz)

    def _warn_resolution(self, v):
        """Warn when mass sits where the position grid cannot resolve it.

        Two regimes per mode: the packet envelope itself is under-sampled
        (h > 0.75*sqrt(hbar)), or the mode is clamped below the full xi
        window and mass piles up against the clamp, signalling content the
        dropped rows would have carried.
        """
        masses = self.mode_masses(v)
        total = float(np.sum(masses))
        if total == 0.0:
            return
        coarse_mass = float(np.sum(masses[self._undersampled]))
        shell_mass = 0.0
        for k in range(self.z_points):
            if self._undersampled[k] or not self._row_bad[k].any():
                continue
            cut = self._xi_cut[k]
            shell = np.abs(self._xi_pts) > 0.85 * cut
            m = np.abs(v[k]) ** 2
            sel = (m[shell, :].sum() + m[:, shell].sum()
                   - m[np.ix_(shell, shell)].sum())
            shell_mass += float(sel) * self._reps[k].vol ** 2 / self.z_width
        if (coarse_mass / total > RESOLUTION_MASS_TOL
                or shell_mass / total > SHELL_MASS_TOL):
            worst = max(coarse_mass, shell_mass) / total
            warnings.warn(
                "fraction %.2e of the mass sits at frequencies the grid "
                "cannot resolve" % worst,
                RuntimeWarning,
                stacklevel=3,
            )
