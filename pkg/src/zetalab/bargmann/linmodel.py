"""Middle tensor factor of the linear-model transfer operator.

The full operator factorizes into a unitary part, a scalar phase
e^{i xi_z t}, and the middle factor acting on R^(d+d') as

    (det ratio) * L_{A (+) A_hat^{-1}} u
        = |det A|^{1/2} |det A_hat|^{-1/2} |det(A (+) A_hat^{-1})|^{-1/2}
          * u((A (+) A_hat^{-1})^{-1} .)
        = u(A^{-1} x, A_hat y),

the scalar coefficients cancelling exactly. The split check measures
its weighted operator norm on the constants and on the band-limited
complement of the origin-value direction.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError, DimensionError, ModelError
from .grids import PhaseGrid
from .lifts import trig_interp_matrix
from .transform import BargmannTransform, wave_packet
from .weights import WeightSpec, weight_w

NORM_SLACK = 1.0 + 1e-12
MATRIX_MAX_SIDE = 4096
CHUNK_ROWS = 4096


@dataclass(frozen=True)
class LinearModelSpec:
    """Expanding block a (d x d), contracting block a_hat (d' x d'),
    declared rate lam >= 1, and flow time t (a phase e^{i xi_z t})."""

    a: np.ndarray
    a_hat: np.ndarray = field(default=None)
    lam: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", np.atleast_2d(np.asarray(self.a, dtype=float)))
        ah = self.a_hat
        ah = np.zeros((0, 0)) if ah is None else np.atleast_2d(np.asarray(ah, dtype=float))
        if ah.size == 0:
            ah = ah.reshape(0, 0)
        object.__setattr__(self, "a_hat", ah)

    @property
    def d(self):
        return self.a.shape[0]

    @property
    def dprime(self):
        return self.a_hat.shape[0]

    def validate(self):
        if self.a.ndim != 2 or self.a.shape[0] != self.a.shape[1]:
            raise DimensionError("expanding block must be square", shape=self.a.shape)
        if self.a_hat.ndim != 2 or self.a_hat.shape[0] != self.a_hat.shape[1]:
            raise DimensionError("contracting block must be square", shape=self.a_hat.shape)
        if not (math.isfinite(self.lam) and self.lam >= 1.0):
            raise ArgumentError("lam must be a real number >= 1", lam=self.lam)
        if abs(np.linalg.det(self.a)) == 0.0:
            raise ModelError("expanding block is singular")
        inv_norm = np.linalg.norm(np.linalg.inv(self.a), 2)
        if inv_norm > NORM_SLACK / self.lam:
            raise ModelError(
                "expanding block violates |A^-1| <= 1/lam",
                norm=float(inv_norm),
                bound=1.0 / self.lam,
            )
        if self.dprime:
            hat_norm = np.linalg.norm(self.a_hat, 2)
            if hat_norm > NORM_SLACK / self.lam:
                raise ModelError(
                    "contracting block violates |A_hat| <= 1/lam",
                    norm=float(hat_norm),
                    bound=1.0 / self.lam,
                )
        return self

    def phase_factor(self, xi_z):
        return np.exp(1j * np.asarray(xi_z, dtype=float) * self.t)


class MiddleFactorOperator:
    """u -> u(A^-1 x, A_hat y) on a periodic position grid (d = 1, d' <= 1)."""

    def __init__(self, spec, grid, position_axis=None, support_radius=2.0):
        self.spec = spec.validate()
        if spec.d != 1 or spec.dprime > 1:
            raise DimensionError(
                "grid route supports d = 1 and d' in {0, 1}",
                d=spec.d,
                dprime=spec.dprime,
            )
        if not isinstance(grid, PhaseGrid):
            grid = PhaseGrid(*grid)
        self.grid = grid.validate()
        if grid.dimension != spec.d + spec.dprime:
            raise DimensionError(
                "grid dimension must match d + d'",
                grid=grid.dimension,
                model=spec.d + spec.dprime,
            )
        self.axis = grid.axis() if position_axis is None else np.asarray(position_axis, dtype=float)
        a = float(spec.a[0, 0])
        self._interp_x = trig_interp_matrix(self.axis, self.axis / a)
        self._interp_y = None
        if spec.dprime:
            ahat = float(spec.a_hat[0, 0])
            self._interp_y = trig_interp_matrix(self.axis, ahat * self.axis)
        det_a = abs(np.linalg.det(spec.a))
        det_hat = abs(np.linalg.det(spec.a_hat)) if spec.dprime else 1.0
        self.det_ratio = math.sqrt(det_a / det_hat)
        self.l2_normalizer = math.sqrt(det_hat / det_a)
        self.coefficient = self.det_ratio * self.l2_normalizer
        if abs(a) * support_radius > 0.9 * grid.half_width:
            warnings.warn(
                "expanding block carries the reference support (radius %.2f) "
                "outside 0.9 of the position window" % support_radius,
                RuntimeWarning,
                stacklevel=2,
            )

    def apply(self, u):
        u = np.asarray(u, dtype=complex)
        n = len(self.axis)
        if self._interp_y is None:
            if u.shape != (n,):
                raise DimensionError("expected a 1d grid function", shape=u.shape)
            return self._interp_x @ u
        if u.shape != (n, n):
            raise DimensionError("expected a 2d grid function", shape=u.shape)
        return self._interp_x @ u @ self._interp_y.T

    def matrix(self):
        if self._interp_y is None:
            return self._interp_x.copy()
        side = len(self.axis) ** 2
        if side > MATRIX_MAX_SIDE:
            raise ArgumentError(
                "dense middle-factor matrices are limited to %d points" % MATRIX_MAX_SIDE,
                points=side,
            )
        return np.kron(self._interp_x, self._interp_y)


def linear_model_operator(spec, grid, position_axis=None, support_radius=2.0):
    return MiddleFactorOperator(spec, grid, position_axis, support_radius)


def _weighted_rows(rep, weight, pts, rhs_list):
    """Accumulate products C @ rhs for C = sqrt(vol) W(p) conj(packet) h."""
    scale = math.sqrt(rep.vol) * rep.h
    wvals = weight_w(pts, weight)
    outs = [np.empty((len(pts), r.shape[1]), dtype=complex) for r in rhs_list]
    for lo in range(0, len(pts), CHUNK_ROWS):
        hi = min(lo + CHUNK_ROWS, len(pts))
        rows = np.conj(
            wave_packet(pts[lo:hi, 0:1], pts[lo:hi, 1:2], rep.hbar, rep.xpos[None, :])
        )
        rows *= (scale * wvals[lo:hi])[:, None]
        for out, rhs in zip(outs, rhs_list):
            out[lo:hi] = rows @ rhs
    return outs


def _split_once(spec, grid, weight, band_fraction, svtol):
    rep = BargmannTransform(grid, 1.0)
    xpos = rep.xpos
    a = float(spec.a[0, 0])
    transfer = trig_interp_matrix(xpos, xpos / a)

    lpos = -xpos[0]
    dxi = math.pi / lpos
    kmax = int(math.floor(band_fraction * grid.half_width / dxi))
    ks = np.arange(-kmax, kmax + 1)
    phi = np.exp(1j * np.outer(xpos, ks * dxi)) / math.sqrt(len(xpos))

    i0 = int(np.argmin(np.abs(xpos)))
    row = phi[i0, :]
    _, _, vh = np.linalg.svd(row[None, :])
    null = vh[1:].conj().T
    phin = phi @ null
    tphin = transfer @ phin

    pts = rep.phase_points()
    ones = np.ones((len(xpos), 1))
    a1, a2, c1, ct1 = _weighted_rows(
        rep, weight, pts, [phin, tphin, ones, transfer @ ones]
    )
    norm_h0 = float(np.linalg.norm(ct1) / np.linalg.norm(c1))

    u1, s1, v1h = np.linalg.svd(a1, full_matrices=False)
    nk = int(np.sum(s1 >= svtol * s1[0]))
    yk = a2 @ (v1h[:nk].conj().T / s1[:nk])
    norm_h1 = float(np.linalg.norm(yk, 2))
    return {
        "norm_on_H0": norm_h0,
        "norm_on_H1": norm_h1,
        "band_modes": len(ks),
        "svd_rank": nk,
        "lam": float(spec.lam),
    }


def spectral_split_check(
    spec, grid, weight=None, band_fraction=0.9, svtol=1e-8, refine=False
):
    """Weighted norms of the middle factor on constants and on ker T0.

    The H1 norm is the weighted operator norm restricted to band-limited
    grid functions vanishing at the origin; plain windowed norms diverge
    with resolution because frequencies just outside the window map into
    it, so the band restriction is part of the estimator's definition.
    """
    spec = spec.validate()
    if weight is None:
        weight = WeightSpec(8.0, 0)
    weight.validate()
    if spec.d != 1 or spec.dprime != 0:
        raise DimensionError(
            "split check supports d = 1, d' = 0", d=spec.d, dprime=spec.dprime
        )
    if not isinstance(grid, PhaseGrid):
        grid = PhaseGrid(*grid)
    grid.validate()
    report = _split_once(spec, grid, weight, band_fraction, svtol)
    if refine:
        fine = PhaseGrid(
            grid.dimension, grid.half_width, 2 * grid.points_per_axis
        )
        refined = _split_once(spec, fine, weight, band_fraction, svtol)
        report["refined_norm_on_H1"] = refined["norm_on_H1"]
        drift = abs(refined["norm_on_H1"] - report["norm_on_H1"]) / max(
            report["norm_on_H1"], 1e-300
        )
        report["refinement_drift"] = float(drift)
        if drift > 0.1:
            warnings.warn(
                "norm estimate unstable under grid refinement "
                "(drift %.1f%%); discretization dominates" % (100 * drift),
                RuntimeWarning,
                stacklevel=2,
            )
    return report
