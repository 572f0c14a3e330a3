"""Numeric and serialization helpers shared across the package."""

import hashlib
import json
import math
from itertools import combinations

import numpy as np

from .errors import ArgumentError


class KahanAccumulator:
    """Compensated complex summation; deterministic for a fixed add order."""

    def __init__(self):
        self.total = 0.0 + 0.0j
        self._c = 0.0 + 0.0j

    def add(self, term):
        y = term - self._c
        t = self.total + y
        self._c = (t - self.total) - y
        self.total = t
        return self

    def extend(self, terms):
        for t in terms:
            self.add(t)
        return self


def kahan_sum(terms):
    return KahanAccumulator().extend(terms).total


def aitken(seq):
    """One pass of the Aitken delta-squared transform of a 1-d sequence."""
    x = np.asarray(seq)
    if x.size < 3:
        raise ArgumentError("aitken needs at least 3 terms", n=x.size)
    d1 = x[1:-1] - x[:-2]
    d2 = x[2:] - 2.0 * x[1:-1] + x[:-2]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x[:-2] - d1 * d1 / d2
    # fall back to the raw value where the denominator vanished
    bad = ~np.isfinite(out)
    out[bad] = x[2:][bad]
    return out


def divisors(n):
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def mobius(n):
    if n < 1:
        raise ArgumentError("mobius undefined", n=n)
    if n == 1:
        return 1
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def elementary_symmetric(values):
    """All elementary symmetric polynomials e_0..e_n of the given values."""
    values = np.asarray(values)
    e = np.zeros(values.size + 1, dtype=complex)
    e[0] = 1.0
    for v in values:
        e[1:] = e[1:] + v * e[:-1]
    return e


def log_elementary_symmetric(log_values, k):
    """log(e_k) of values given by their complex logs; stable for huge values.

    Returns a complex log (real part log-modulus). Intended for the small
    dimensions used here (sums over explicit index combinations).
    """
    log_values = np.asarray(log_values, dtype=complex)
    n = log_values.size
    if k == 0:
        return 0.0 + 0.0j
    if k < 0 or k > n:
        raise ArgumentError("elementary symmetric index out of range", k=k, n=n)
    logs = [np.sum(log_values[list(ix)]) for ix in combinations(range(n), k)]
    logs = np.array(logs, dtype=complex)
    shift = np.max(logs.real)
    total = np.sum(np.exp(logs - shift))
    return shift + np.log(total)


def log_abs_one_minus(log_mod, phase):
    """log|1 - z| for z = exp(log_mod + i*phase), safe for huge |z|."""
    if log_mod > 60.0:
        # |1 - z| = |z| |1 - 1/z|
        winv = np.exp(-log_mod - 1j * phase)
        return log_mod + 0.5 * np.log1p(-2.0 * winv.real + abs(winv) ** 2)
    z = np.exp(log_mod + 1j * phase)
    return 0.5 * np.log1p(-2.0 * z.real + abs(z) ** 2)


def log_abs_one_minus_arr(log_mod, phase):
    """Vectorized log|1 - z|; branches on |z| like the scalar version."""
    log_mod = np.asarray(log_mod, dtype=float)
    phase = np.asarray(phase, dtype=float)
    big = log_mod > 60.0
    z = np.exp(np.where(big, -100.0, log_mod) + 1j * phase)
    small_val = 0.5 * np.log1p(-2.0 * z.real + np.abs(z) ** 2)
    winv = np.exp(np.where(big, -log_mod, -100.0) - 1j * phase)
    big_val = log_mod + 0.5 * np.log1p(-2.0 * winv.real + np.abs(winv) ** 2)
    return np.where(big, big_val, small_val)


def float_repr(x):
    """Shortest decimal that round-trips to the same float."""
    return repr(float(x))


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def content_hash(data):
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def trig_interp_matrix(xgrid, xq):
    """Cardinal (Dirichlet-kernel) interpolation from a uniform periodic grid.

    xgrid must be uniformly spaced with an even number of points; the implied
    period is n*spacing. Rows give the interpolated values at xq. At exact
    grid points (mod period) the matrix row is a unit vector, so composition
    maps that permute the grid are represented exactly.
    """
    xgrid = np.asarray(xgrid, dtype=float)
    xq = np.atleast_1d(np.asarray(xq, dtype=float))
    n = len(xgrid)
    period = (xgrid[1] - xgrid[0]) * n
    t = 2.0 * np.pi * (xq[:, None] - xgrid[None, :]) / period
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(n * t / 2.0) / (n * np.tan(t / 2.0))
    out[~np.isfinite(out)] = 1.0
    return out


def standard_symplectic_form(d):
    """Block form [[0, I], [-I, 0]] on R^{2d}."""
    J = np.zeros((2 * d, 2 * d))
    J[:d, d:] = np.eye(d)
    J[d:, :d] = -np.eye(d)
    return J


def random_symplectic(rng, d, scale=0.35):
    """Seeded random symplectic matrix exp(J S) with S symmetric."""
    from scipy.linalg import expm

    A = rng.normal(0.0, scale, size=(2 * d, 2 * d))
    S = 0.5 * (A + A.T)
    return expm(standard_symplectic_form(d) @ S)


def parse_complex(text):
    """Parse '2+0i', '0.3+2j', '1.5', '-2i' into a complex number."""
    s = str(text).strip().replace(" ", "").replace("i", "j")
    if not s:
        raise ArgumentError("empty complex literal")
    try:
        return complex(s)
    except ValueError as exc:
        raise ArgumentError(f"bad complex literal {text!r}") from exc


def format_complex(z):
    z = complex(z)
    sign = "+" if z.imag >= 0 else "-"
    return f"{float_repr(z.real)}{sign}{float_repr(abs(z.imag))}i"


def factorial(n):
    return math.factorial(n)
