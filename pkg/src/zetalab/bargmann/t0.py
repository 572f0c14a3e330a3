"""The rank-one origin projector T0 and its lift to the phase grid.

T0 u = u(0) * constant function. Every valid grid carries the origin as
an exact node (the axis is edge anchored with L/h = M/2); if a custom
axis misses it, the origin value is taken from the cardinal (Dirichlet
kernel) trigonometric interpolant, which is exact for functions band
limited to the axis.
"""

import numpy as np

from .grids import PhaseGrid
from .lifts import trig_interp_matrix
from .transform import BargmannTransform


def origin_row(position_axis):
    """Evaluation row for u(0): exact node when present, else cardinal."""
    x = np.asarray(position_axis, dtype=float)
    h = abs(x[1] - x[0])
    hit = np.flatnonzero(np.abs(x) <= 1e-12 * h)
    if hit.size:
        row = np.zeros(len(x))
        row[hit[0]] = 1.0
        return row
    return trig_interp_matrix(x, np.array([0.0]))[0]


def t0_project(u, position_axis):
    """T0 u = u(0) * ones, with u sampled on the given axis."""
    u = np.asarray(u)
    return (origin_row(position_axis) @ u) * np.ones_like(u)


def t0_lift(grid, hbar):
    """Dense matrix of B T0 B* on the raveled (w, xi) phase grid."""
    if not isinstance(grid, PhaseGrid):
        grid = PhaseGrid(*grid)
    rep = BargmannTransform(grid, hbar)
    pts = rep.phase_points()
    bmat = rep.packet_rows(pts[:, 0], pts[:, 1])
    bstar = bmat.conj().T * (rep.vol / rep.h)
    t0mat = np.zeros((len(rep.xpos), len(rep.xpos)))
    t0mat[:, :] = origin_row(rep.xpos)[None, :]
    return bmat @ (t0mat @ bstar)
