"""Bargmann transform on a grid: packets, forward/adjoint, projector.

The D=1 transform exploits the separable structure of the packet,

    conj(packet(w_i, xi_j, x)) = aD * e^{i xi_j w_i / (2 hbar)}
                                    * e^{-i xi_j x / hbar}
                                    * e^{-(x - w_i)^2 / (2 hbar)},

so forward and adjoint are two thin matrix products instead of one dense
(M^2 x Mpos) operator. Phase functions are kept as (M, M) arrays indexed
(w, xi).
"""

import math

import numpy as np

from ..errors import ArgumentError, DimensionError
from .grids import PhaseGrid, warn_boundary_mass


def bargmann_normalization(hbar, dimension=1):
    """a_D(hbar) = (pi*hbar)^(-D/4)."""
    if hbar <= 0:
        raise ArgumentError("hbar must be positive", hbar=hbar)
    return (math.pi * hbar) ** (-dimension / 4.0)


def wave_packet(w, xi_w, hbar, wprime, dimension=None):
    """Gaussian packet a_D(hbar) exp(i xi_w (w'-w/2)/hbar - |w'-w|^2/(2 hbar)).

    With dimension=None the arguments broadcast elementwise as D = 1
    coordinates; pass dimension=D to treat the last axis as the space
    dimension (it is then contracted).
    """
    w = np.asarray(w, dtype=float)
    xi = np.asarray(xi_w, dtype=float)
    wp = np.asarray(wprime, dtype=float)
    if dimension is None:
        diff = wp - w
        val = bargmann_normalization(hbar, 1) * np.exp(
            1j * xi * (wp - 0.5 * w) / hbar - diff * diff / (2.0 * hbar)
        )
        return complex(val[()]) if val.ndim == 0 else val
    dim = int(dimension)
    for arr in (w, xi, wp):
        if arr.ndim == 0 or arr.shape[-1] != dim:
            raise DimensionError(
                "last axis must carry the space dimension",
                dimension=dim,
                shapes=(w.shape, xi.shape, wp.shape),
            )
    diff = wp - w
    phase = np.sum(xi * (wp - 0.5 * w), axis=-1)
    return bargmann_normalization(hbar, dim) * np.exp(
        1j * phase / hbar - np.sum(diff * diff, axis=-1) / (2.0 * hbar)
    )


def projector_kernel(p, pprime, hbar):
    """K_P(p, p') = exp(-i Omega(p,p')/(2 hbar) - |p-p'|^2/(4 hbar)).

    Points are (w, xi_w) concatenations of even length 2D; Omega is the
    standard symplectic pairing xi . w' - w . xi'.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(pprime, dtype=float)
    n = p.shape[-1]
    if n % 2 != 0 or q.shape[-1] != n:
        raise DimensionError("phase points need matching even length", shapes=(p.shape, q.shape))
    d = n // 2
    omega = np.sum(
        p[..., d:] * q[..., :d] - p[..., :d] * q[..., d:], axis=-1
    )
    dist2 = np.sum((p - q) ** 2, axis=-1)
    return np.exp(-1j * omega / (2.0 * hbar) - dist2 / (4.0 * hbar))


class BargmannTransform:
    """D=1 grid Bargmann transform with fast separable applies.

    Position functions live on the extended axis `xpos`; phase functions
    are (M, M) arrays over the (w, xi_w) product grid. The adjoint uses
    the volume element h^2/(2 pi hbar) per phase node.
    """

    def __init__(self, grid, hbar, *, w_axis=None, xi_axis=None, position_axis=None):
        if not isinstance(grid, PhaseGrid):
            grid = PhaseGrid(*grid)
        self.grid = grid.validate()
        if grid.dimension != 1:
            raise DimensionError(
                "grid transform route is one-dimensional; use tensor "
                "contraction for products",
                dimension=grid.dimension,
            )
        self.hbar = float(hbar)
        self.w = grid.axis() if w_axis is None else np.asarray(w_axis, dtype=float)
        self.xi = grid.axis() if xi_axis is None else np.asarray(xi_axis, dtype=float)
        if position_axis is None:
            self.xpos, self.margin_points = grid.position_axis(self.hbar)
        else:
            self.xpos = np.asarray(position_axis, dtype=float)
            self.margin_points = 0
        # quadrature weights follow the actual axes so that refined or
        # rescaled windows keep the Riemann sums consistent
        self.h = abs(float(self.xpos[1] - self.xpos[0]))
        self.vol = abs(float((self.w[1] - self.w[0]) * (self.xi[1] - self.xi[0]))) / (
            2.0 * math.pi * self.hbar
        )
        self.aD = bargmann_normalization(self.hbar, 1)
        diff = self.xpos[None, :] - self.w[:, None]
        self._G = np.exp(-(diff**2) / (2.0 * self.hbar))
        self._E = np.exp(-1j * np.outer(self.xi, self.xpos) / self.hbar)
        self._phase = np.exp(1j * np.outer(self.w, self.xi) / (2.0 * self.hbar))

    @property
    def n_phase(self):
        return len(self.w) * len(self.xi)

    def position_norm(self, u):
        return math.sqrt(float(np.sum(np.abs(u) ** 2)) * self.h)

    def phase_norm(self, v):
        return math.sqrt(float(np.sum(np.abs(v) ** 2)) * self.vol)

    def forward(self, u, check_boundary=True):
        """B u as an (M, M) phase array; warns on boundary mass."""
        u = np.asarray(u, dtype=complex)
        if u.shape != self.xpos.shape:
            raise DimensionError(
                "position function must live on the extended axis",
                expected=self.xpos.shape,
                got=u.shape,
            )
        if check_boundary:
            warn_boundary_mass(u, self.xpos, self.xpos[-1], label="transform input")
        t = self._E * u[None, :]
        return (self.aD * self.h) * self._phase * (self._G @ t.T)

    def adjoint(self, v):
        """B* v as a position function on the extended axis."""
        v = np.asarray(v, dtype=complex)
        if v.shape != (len(self.w), len(self.xi)):
            raise DimensionError(
                "phase function must be (M, M) over (w, xi)",
                expected=(len(self.w), len(self.xi)),
                got=v.shape,
            )
        t = np.conj(self._phase) * v
        return (self.aD * self.vol) * np.sum((self._G.T @ t) * np.conj(self._E).T, axis=1)

    def project(self, v):
        """P v = B B* v on the phase grid."""
        return self.forward(self.adjoint(v), check_boundary=False)

    def packet_rows(self, w_centers, xi_centers):
        """Explicit forward-matrix rows conj(packet)*h for given centers."""
        wc = np.asarray(w_centers, dtype=float).reshape(-1, 1)
        xc = np.asarray(xi_centers, dtype=float).reshape(-1, 1)
        return np.conj(wave_packet(wc, xc, self.hbar, self.xpos[None, :])) * self.h

    def phase_points(self):
        """Raveled (w, xi) coordinates of the phase grid, shape (M*M, 2)."""
        W, XI = np.meshgrid(self.w, self.xi, indexing="ij")
        return np.stack([W.ravel(), XI.ravel()], axis=1)
