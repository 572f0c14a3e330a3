"""Lifts of affine transfer operators to the phase grid.

Two independent constructions of the lifted operator are kept side by
side: the direct conjugation B (L_Q) B*, and the closed form

    d(Q) e^{-i xi_w q0 / (2 hbar)} P L_{(D+Q)} P,

with the scalar phase attached at the output frequency inside the outer
projector. Both routes share one enlarged position axis so the mapped
packet centers stay inside the quadrature window.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError, DimensionError
from .grids import PhaseGrid
from .transform import BargmannTransform

MATRIX_MAX_POINTS = 64


@dataclass(frozen=True)
class AffineMapSpec:
    """Invertible affine map w -> Q0 w + q0 on position space."""

    linear_part: np.ndarray
    translation: np.ndarray = field(default=None)

    def __post_init__(self):
        q0 = np.atleast_2d(np.asarray(self.linear_part, dtype=float))
        object.__setattr__(self, "linear_part", q0)
        t = self.translation
        t = np.zeros(q0.shape[0]) if t is None else np.atleast_1d(np.asarray(t, dtype=float))
        object.__setattr__(self, "translation", t)

    def validate(self):
        q0, t = self.linear_part, self.translation
        if q0.ndim != 2 or q0.shape[0] != q0.shape[1]:
            raise DimensionError("linear part must be square", shape=q0.shape)
        if t.shape != (q0.shape[0],):
            raise DimensionError(
                "translation length must match the linear part",
                linear=q0.shape,
                translation=t.shape,
            )
        if not np.all(np.isfinite(q0)) or not np.all(np.isfinite(t)):
            raise ArgumentError("affine map entries must be finite")
        if abs(np.linalg.det(q0)) == 0.0:
            raise ArgumentError("linear part must be invertible", det=0.0)
        return self

    @property
    def dimension(self):
        return self.linear_part.shape[0]


def dilation_factor(spec):
    """d(Q) = sqrt|det((Q0 + transpose(Q0^-1)) / 2)|, any dimension."""
    q0 = spec.validate().linear_part
    mid = 0.5 * (q0 + np.linalg.inv(q0).T)
    return math.sqrt(abs(np.linalg.det(mid)))


def trig_interp_matrix(xgrid, xq):
    """Cardinal (Dirichlet kernel) rows: periodic values at xq from xgrid."""
    n = len(xgrid)
    period = (xgrid[1] - xgrid[0]) * n
    t = 2.0 * np.pi * (np.asarray(xq)[:, None] - xgrid[None, :]) / period
    with np.errstate(divide="ignore", invalid="ignore"):
        mat = np.sin(n * t / 2.0) / (n * np.tan(t / 2.0))
    mat[~np.isfinite(mat)] = 1.0
    return mat


class LiftedOperator:
    """Lift of a scalar affine map to the (w, xi_w) phase grid."""

    def __init__(self, spec, grid, hbar, support_radius=2.0):
        self.spec = spec.validate()
        if spec.dimension != 1:
            raise DimensionError(
                "grid lift route is one-dimensional", dimension=spec.dimension
            )
        if not isinstance(grid, PhaseGrid):
            grid = PhaseGrid(*grid)
        self.grid = grid.validate()
        self.hbar = float(hbar)
        self.a = float(spec.linear_part[0, 0])
        self.b = float(spec.translation[0])
        self.dilation = dilation_factor(spec)

        L, h = grid.half_width, grid.spacing
        stretch = max(abs(self.a), 1.0 / abs(self.a), 1.0)
        extent = stretch * L + abs(self.b) + 6.0 * math.sqrt(self.hbar)
        mext = int(math.ceil((extent - L) / h))
        self.xpos = -(L + mext * h) + h * np.arange(grid.points_per_axis + 2 * mext)
        self.rep = BargmannTransform(grid, self.hbar, position_axis=self.xpos)
        # the intermediate L_{D+Q}(Pv) carries mass stretched by the map, so
        # it lives on an enlarged phase window; the outer projector then
        # quadratures over that window before evaluation on the output grid.
        # strong stretches push its oscillation rates toward the Nyquist
        # rate of the h-spaced window, hence the refinement
        nref = 2 if stretch > 1.5 else 1
        h2 = h / nref
        w_enl = self.xpos[0] + h2 * np.arange(len(self.xpos) * nref)
        # mapped frequencies a*xi beyond the position-axis Nyquist rate
        # cannot be evaluated by quadrature (their rows are pure aliasing);
        # the true mass there is O(exp(-(pi/h - L)^2)), so clamp the axis
        xi_extent = min(-self.xpos[0], 0.9 * math.pi / (h * abs(self.a)))
        nxi = int(math.ceil(xi_extent / h2))
        xi_enl = h2 * np.arange(-nxi, nxi)
        self.enl = BargmannTransform(
            grid, self.hbar, w_axis=w_enl, xi_axis=xi_enl, position_axis=self.xpos
        )
        # mapped centers under (D+Q)^{-1}: w' = (w - q0)/a, xi' = a xi
        self.mapped = BargmannTransform(
            grid,
            self.hbar,
            w_axis=(w_enl - self.b) / self.a,
            xi_axis=self.a * xi_enl,
            position_axis=self.xpos,
        )
        self._interp = None
        self._phase = np.exp(-1j * xi_enl[None, :] * self.b / (2.0 * self.hbar))
        core = 0.9 * L
        if abs(self.a) * support_radius + abs(self.b) > core or (
            support_radius / abs(self.a) > core
        ):
            warnings.warn(
                "affine map carries the reference support (radius %.2f) "
                "outside 0.9 of the phase window" % support_radius,
                RuntimeWarning,
                stacklevel=2,
            )

    def _transfer(self, u):
        if self._interp is None:
            self._interp = trig_interp_matrix(self.xpos, (self.xpos - self.b) / self.a)
        return abs(self.a) ** -0.5 * (self._interp @ u)

    def apply_direct(self, v):
        """B L_Q B* v with L_Q u = |a|^{-1/2} u((x - q0)/a)."""
        return self.rep.forward(self._transfer(self.rep.adjoint(v)), check_boundary=False)

    def apply_formula(self, v):
        """d(Q) e^{-i xi q0/(2 hbar)} P L_{(D+Q)} P v, phase inside the outer P."""
        up = self.rep.adjoint(v)
        moved = self.mapped.forward(up, check_boundary=False)
        inner = self.dilation * self._phase * moved
        return self.rep.forward(self.enl.adjoint(inner), check_boundary=False)

    def discrepancy(self, n_seeds=10, seed=20260814):
        """Max relative gap between the two routes on a seeded packet class."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        x = self.xpos
        for _ in range(n_seeds):
            wc, xic = rng.uniform(-1.2, 1.2, size=2)
            k = int(rng.integers(0, 2))
            u = x**k * np.exp(
                1j * xic * (x - wc / 2.0) / self.hbar - (x - wc) ** 2 / (2.0 * self.hbar)
            )
            v = self.rep.forward(u, check_boundary=False)
            direct = self.apply_direct(v)
            formula = self.apply_formula(v)
            worst = max(
                worst,
                float(np.max(np.abs(direct - formula)) / np.max(np.abs(direct))),
            )
        return worst

    def matrix(self, route="direct"):
        """Dense (M^2, M^2) matrix of the chosen route; M <= 64 only."""
        m = self.grid.points_per_axis
        if m > MATRIX_MAX_POINTS:
            raise ArgumentError(
                "dense lift matrices are limited to M <= %d" % MATRIX_MAX_POINTS,
                points_per_axis=m,
            )
        apply = {"direct": self.apply_direct, "formula": self.apply_formula}.get(route)
        if apply is None:
            raise ArgumentError("route must be direct or formula", route=route)
        out = np.empty((m * m, m * m), dtype=complex)
        basis = np.zeros((m, m), dtype=complex)
        for idx in range(m * m):
            basis[idx // m, idx % m] = 1.0
            out[:, idx] = apply(basis).ravel()
            basis[idx // m, idx % m] = 0.0
        return out


def lift_affine(spec, grid, hbar, support_radius=2.0):
    """Lift operator exposing apply_direct / apply_formula / discrepancy."""
    return LiftedOperator(spec, grid, hbar, support_radius=support_radius)
