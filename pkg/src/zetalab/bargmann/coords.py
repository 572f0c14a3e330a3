"""Adapted phase-space coordinates around the trapped set.

The change of variables mixes (q, p) with (xi_q, xi_p) at a rate set by
the frequency xi_z through the smoothed modulus bracket(s), splitting
the transverse directions into an expanding block (zeta_p, xi_y-tilde),
a contracting block (zeta_q, y-tilde) and a neutral pair nu. For
xi_z < 0 the components zeta_p and nu_q carry an extra sign so that a
mirror in (x, xi_z) maps branch to branch.
"""

import numpy as np

from ..errors import DimensionError


def _psi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = t < 4.0
    out[inside] = np.exp(1.0 - 4.0 / (4.0 - t[inside]))
    return out


def bracket(s):
    """Smoothed modulus: sqrt(s^2 + psi(s^2)); equals |s| for |s| >= 2,
    is smooth, and stays >= 1 everywhere (bracket(0) = 1)."""
    s = np.asarray(s, dtype=float)
    val = np.sqrt(s * s + _psi(s * s))
    return float(val[()]) if val.ndim == 0 else val


def _unpack(point):
    x, y, xi_x, xi_y, xi_z = point
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float)) if np.size(y) else np.zeros(0)
    xi_x = np.atleast_1d(np.asarray(xi_x, dtype=float))
    xi_y = np.atleast_1d(np.asarray(xi_y, dtype=float)) if np.size(xi_y) else np.zeros(0)
    if x.size % 2 != 0 or xi_x.shape != x.shape:
        raise DimensionError("x and xi_x must be matching even-length vectors",
                             x=x.shape, xi_x=xi_x.shape)
    if xi_y.shape != y.shape:
        raise DimensionError("y and xi_y must match", y=y.shape, xi_y=xi_y.shape)
    d = x.size // 2
    return x[:d], x[d:], y, xi_x[:d], xi_x[d:], xi_y, float(xi_z)


def coord_change_phi(point):
    """Map (x, y, xi_x, xi_y, xi_z) to (nu, (zeta_p, xi_y~), (zeta_q, y~), xi_z).

    nu concatenates (nu_q, nu_p). All blocks scale like bracket(xi_z)^(1/2).
    """
    q, p, y, xi_q, xi_p, xi_y, xi_z = _unpack(point)
    br = bracket(xi_z)
    root = 1.0 / np.sqrt(2.0 * br)
    sign = -1.0 if xi_z < 0 else 1.0
    zeta_p = sign * root * (br * xi_p + xi_z * q)
    zeta_q = root * (br * xi_q - xi_z * p)
    nu_q = sign * root * (xi_z * q - br * xi_p)
    nu_p = root * (xi_z * p + br * xi_q)
    scale = np.sqrt(br)
    return (
        np.concatenate([nu_q, nu_p]),
        (zeta_p, scale * xi_y),
        (zeta_q, scale * y),
        xi_z,
    )


def trapped_point(q, p, xi_z):
    """Point of the trapped set over (q, p) at frequency xi_z: y = xi_y = 0,
    xi_q = xi_z p / bracket(xi_z), xi_p = -xi_z q / bracket(xi_z)."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if q.shape != p.shape:
        raise DimensionError("q and p must match", q=q.shape, p=p.shape)
    br = bracket(xi_z)
    x = np.concatenate([q, p])
    xi_x = np.concatenate([xi_z * p / br, -xi_z * q / br])
    return (x, np.zeros(0), xi_x, np.zeros(0), float(xi_z))


def mirror_point(point):
    """Mirror x -> -x, xi_z -> -xi_z with (xi_x, y, xi_y) fixed."""
    x, y, xi_x, xi_y, xi_z = point
    return (-np.asarray(x, dtype=float), y, xi_x, xi_y, -float(xi_z))


def _flat_output(point):
    nu, (zp, xyt), (zq, yt), _ = coord_change_phi(point)
    return np.concatenate([nu, zp, xyt, zq, yt])


def symplectic_scaling_defect(d, dprime, xi_z):
    """Residuals of the two scaling identities of the coordinate change.

    At fixed xi_z the map is linear in (q, p, y, xi_q, xi_p, xi_y); its
    Jacobian J (columns from basis vectors) must satisfy
    J' Omega_out J = |xi_z| Omega_in and J' J = |xi_z| Id for |xi_z| >= 2.
    Returns {"symplectic": ..., "metric": ...} max-abs residuals.
    """
    n = 4 * d + 2 * dprime
    cols = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        q, p = e[:d], e[d : 2 * d]
        y, xi_q = e[2 * d : 2 * d + dprime], e[2 * d + dprime : 3 * d + dprime]
        xi_p = e[3 * d + dprime : 4 * d + dprime]
        xi_y = e[4 * d + dprime :]
        pt = (np.concatenate([q, p]), y, np.concatenate([xi_q, xi_p]), xi_y, xi_z)
        cols.append(_flat_output(pt))
    jac = np.stack(cols, axis=1)

    def pairing(npts, pairs):
        om = np.zeros((npts, npts))
        for i, j in pairs:
            om[i, j] = 1.0
            om[j, i] = -1.0
        return om

    # inputs ordered (q, p, y, xi_q, xi_p, xi_y): dq^dxi_q + dp^dxi_p + dy^dxi_y
    om_in = pairing(
        n,
        [(k, 2 * d + dprime + k) for k in range(2 * d)]
        + [(2 * d + k, 4 * d + dprime + k) for k in range(dprime)],
    )
    # outputs ordered (nu_q, nu_p, zeta_p, xi_y~, zeta_q, y~):
    # dzeta_p^dzeta_q + dnu_q^dnu_p + dy~^dxi_y~
    om_out = pairing(
        n,
        [(2 * d + k, 3 * d + dprime + k) for k in range(d)]
        + [(k, d + k) for k in range(d)]
        + [(4 * d + dprime + k, 3 * d + k) for k in range(dprime)],
    )
    lam = abs(float(xi_z))
    sym = np.max(np.abs(jac.T @ om_out @ jac - lam * om_in))
    met = np.max(np.abs(jac.T @ jac - lam * np.eye(n)))
    return {"symplectic": float(sym), "metric": float(met)}
