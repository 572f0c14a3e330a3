"""Zeta functions and dynamical Fredholm determinants from orbit catalogs.

Everything here is an exponent sum exp(-S) with S accumulated over
(orbit, repetition) pairs. Summation order is fixed: orbits by increasing
period, repetitions increasing, with exactly rounded accumulation (fsum),
so results are reproducible bit-for-bit per policy. Weights that mix huge
and tiny eigenvalue powers are composed in the log domain.
"""

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ModelError
from .model import grassmann_fiber_jacobian
from .util import log_abs_one_minus_arr, log_elementary_symmetric


@dataclass
class EvalPolicy:
    m_max: int = 32  # repetition cap
    k_cutoff: int = 64  # product depth (inclusive upper shift index)
    pressure_estimate: float = None  # None -> observed growth rate

    def validate(self):
        if int(self.m_max) != self.m_max or self.m_max < 1:
            raise ArgumentError("m_max must be a positive integer", m_max=self.m_max)
        if int(self.k_cutoff) != self.k_cutoff or self.k_cutoff < 1:
            raise ArgumentError(
                "k_cutoff must be a positive integer", k_cutoff=self.k_cutoff
            )


@dataclass
class ZetaValue:
    value: complex
    truncation_bound: float


def pressure_default(catalog):
    """Log growth rate of unstable eigenvalues per unit period, maximized
    over the catalog."""
    best = None
    for orbit in catalog.orbits:
        split = catalog.split_of(orbit)
        rate = float(
            np.sum(np.log(np.abs(split.unstable_eigenvalues))) / orbit.period
        )
        best = rate if best is None else max(best, rate)
    return 0.0 if best is None else best


def _resolve(policy, catalog):
    policy = policy if policy is not None else EvalPolicy()
    policy.validate()
    pressure = (
        policy.pressure_estimate
        if policy.pressure_estimate is not None
        else pressure_default(catalog)
    )
    return policy, float(pressure)


def _horizon_tail(decay, pressure, horizon):
    # orbit counts grow like e^{P t}/t; the discarded-period tail of the
    # exponent integrates e^{-(decay - P) t} dt/t beyond the horizon
    a = decay - pressure
    if a <= 0.0:
        return math.inf
    return math.exp(-a * horizon) / (a * horizon)


def _fsum_complex(re_parts, im_parts):
    return complex(math.fsum(re_parts), math.fsum(im_parts))


class _ExponentSum:
    """Ordered accumulation of exponent terms plus geometric tail bounds."""

    def __init__(self):
        self.re = []
        self.im = []
        self.m_tail = 0.0

    def add_orbit(self, terms, rho):
        self.re.extend(terms.real)
        self.im.extend(terms.imag)
        last = abs(terms[-1])
        if rho < 1.0:
            self.m_tail += last * rho / (1.0 - rho)
        elif last > 0.0:
            self.m_tail = math.inf

    def total(self):
        return _fsum_complex(self.re, self.im)


def _gv_log_weights(catalog, orbit, m):
    """log of 1/sqrt|det(Id - D^m)| per repetition, from the full spectrum."""
    eig = catalog.full_spectrum_of(orbit)
    with np.errstate(divide="ignore"):
        # a zero eigenvalue gives log_mod = -inf, which correctly yields
        # log|1 - 0| = 0 downstream
        log_mod = np.outer(m, np.log(np.abs(eig)))
    phase = np.outer(m, np.angle(eig))
    return -0.5 * np.sum(log_abs_one_minus_arr(log_mod, phase), axis=1)


def _stable_decay(catalog, orbit):
    """Per-unit-period decay gained from the stable determinant factor."""
    split = catalog.split_of(orbit)
    return -math.log(split.det_stable) / (2.0 * orbit.period)


def smale_zeta(s, catalog, policy=None):
    """Z(s) = exp(-sum_gamma sum_{k<=k_cutoff} sum_{m<=m_max}
    e^{-(s+k) m |gamma|}/m)."""
    policy, pressure = _resolve(policy, catalog)
    if not catalog.orbits:
        return ZetaValue(value=1.0 + 0.0j, truncation_bound=0.0)
    if s.real <= pressure - 1.0:
        warnings.warn(
            "outside the declared convergence region; truncation bound "
            "may be infinite",
            stacklevel=2,
        )
    m = np.arange(1, policy.m_max + 1, dtype=float)
    ks = np.arange(0, policy.k_cutoff + 1, dtype=float)
    acc = _ExponentSum()
    k_tail = 0.0
    ell_min = min(o.period for o in catalog.orbits)
    for orbit in catalog.orbits:
        ell = orbit.period
        shift_sum = np.exp(-np.outer(m * ell, ks)).sum(axis=1)
        terms = orbit.multiplicity * np.exp(-s * ell * m) * shift_sum / m
        acc.add_orbit(terms, math.exp(-s.real * ell))
        layer = orbit.multiplicity * np.sum(
            np.exp(-(s.real + policy.k_cutoff) * ell * m) / m
        )
        rho_k = math.exp(-ell)
        k_tail += layer * rho_k / (1.0 - rho_k)
    bound = acc.m_tail + k_tail + _horizon_tail(s.real, pressure, catalog.max_period)
    return ZetaValue(value=cmath.exp(-acc.total()), truncation_bound=bound)


def _gv_exponent(s, catalog, policy):
    policy, pressure = _resolve(policy, catalog)
    if not catalog.orbits:
        return 0.0 + 0.0j, 0.0
    m = np.arange(1, policy.m_max + 1, dtype=float)
    acc = _ExponentSum()
    kappa_min = math.inf
    for orbit in catalog.orbits:
        ell = orbit.period
        kappa = _stable_decay(catalog, orbit)
        kappa_min = min(kappa_min, kappa)
        log_w = _gv_log_weights(catalog, orbit, m)
        terms = orbit.multiplicity * np.exp(-s * ell * m + log_w) / m
        acc.add_orbit(terms, math.exp(-(s.real + kappa) * ell))
    bound = acc.m_tail + _horizon_tail(
        s.real + kappa_min, pressure, catalog.max_period
    )
    return acc.total(), bound


def gv_zeta(s, catalog, policy=None):
    """Z_sc(s) = exp(-sum_{gamma,m} e^{-s m |gamma|} /
    (m sqrt|det(Id - D^m)|)), denominator from the full spectrum."""
    exponent, bound = _gv_exponent(s, catalog, policy)
    return ZetaValue(value=cmath.exp(-exponent), truncation_bound=bound)


def gv_zeta_exponent(s, catalog, policy=None):
    """The exponent sum S with Z_sc = exp(-S), plus its truncation bound.

    Useful where the value itself underflows (divergence scans near the
    critical line)."""
    exponent, bound = _gv_exponent(s, catalog, policy)
    return -exponent, bound


def _det_log_weights(catalog, orbit, m, k, ell_index=None):
    """Complex log of the determinant weight per repetition.

    Base (k) part:  |det D^s|^{m/2} Tr Lambda^k (D^s)^{-m}
                    / |det(Id - D^{-m})|
    Fiber (ell) part, when ell_index is not None:
                    Tr Lambda^ell (D_perp)^m
                    / (|det D_perp|^m |det(Id - D_perp^{-m})|)
    """
    split = catalog.split_of(orbit)
    log_det_s = math.log(split.det_stable)
    ls = np.log(split.stable_eigenvalues.astype(complex))
    lu = np.log(split.unstable_eigenvalues.astype(complex))
    lfull = np.concatenate([lu, ls])
    # |det(Id - D^{-m})| from the split spectrum, in logs
    log_mod = np.outer(-m, lfull.real)
    phase = np.outer(-m, lfull.imag)
    log_den = np.sum(log_abs_one_minus_arr(log_mod, phase), axis=1)
    out = np.empty(m.size, dtype=complex)
    for i, mi in enumerate(m):
        log_ek = log_elementary_symmetric(-mi * ls, k)
        out[i] = (mi / 2.0) * log_det_s + log_ek - log_den[i]
    if ell_index is None:
        return out
    fiber = grassmann_fiber_jacobian(split)
    lnu = np.log(fiber.eigenvalues.astype(complex))
    log_det_perp = float(np.sum(lnu.real))
    log_mod_p = np.outer(-m, lnu.real)
    phase_p = np.outer(-m, lnu.imag)
    log_den_perp = np.sum(log_abs_one_minus_arr(log_mod_p, phase_p), axis=1)
    for i, mi in enumerate(m):
        log_el = log_elementary_symmetric(mi * lnu, ell_index)
        out[i] += log_el - mi * log_det_perp - log_den_perp[i]
    return out


def _det_exponent(s, catalog, policy, k, ell_index=None):
    policy, pressure = _resolve(policy, catalog)
    if not catalog.orbits:
        return 0.0 + 0.0j, 0.0
    m = np.arange(1, policy.m_max + 1, dtype=float)
    acc = _ExponentSum()
    kappa_min = math.inf
    for orbit in catalog.orbits:
        ell = orbit.period
        kappa = _stable_decay(catalog, orbit)
        kappa_min = min(kappa_min, kappa)
        log_w = _det_log_weights(catalog, orbit, m, k, ell_index)
        terms = orbit.multiplicity * np.exp(-s * ell * m + log_w) / m
        acc.add_orbit(terms, math.exp(-(s.real + kappa) * ell))
    bound = acc.m_tail + _horizon_tail(
        s.real + kappa_min, pressure, catalog.max_period
    )
    return acc.total(), bound


def _check_k(k, d):
    if int(k) != k or not 0 <= k <= d:
        raise ArgumentError("k must be an integer in [0, d]", k=k, d=d)


def fredholm_det(k, s, catalog, policy=None):
    """d_k(s) = exp(-sum_{gamma,m} e^{-s m |gamma|} |det D^s|^{m/2}
    Tr Lambda^k (D^s)^{-m} / (m |det(Id - D^{-m})|))."""
    _check_k(k, catalog.d)
    exponent, bound = _det_exponent(s, catalog, policy, int(k))
    return ZetaValue(value=cmath.exp(-exponent), truncation_bound=bound)


def grassmann_fredholm_det(k, ell, s, catalog, policy=None):
    """d_{k,ell}(s): fredholm_det weight times the Grassmann fiber factor
    Tr Lambda^ell (D_perp)^m / (|det D_perp|^m |det(Id - D_perp^{-m})|)."""
    d = catalog.d
    _check_k(k, d)
    ell_max = d * (d + 1)
    if int(ell) != ell or not 0 <= ell <= ell_max:
        raise ArgumentError(
            "ell must be an integer in [0, d(d+1)]", ell=ell, ell_max=ell_max
        )
    exponent, bound = _det_exponent(s, catalog, policy, int(k), int(ell))
    return ZetaValue(value=cmath.exp(-exponent), truncation_bound=bound)


def product_identity_check(catalog, s_samples, policy=None, ell_range=None):
    """Compare Z_sc against both alternating determinant products.

    Reports the max over samples of the relative errors of
    prod_k d_k^{(-1)^{d-k}} and prod_{k,ell} d_{k,ell}^{(-1)^{(d-k)+ell}},
    with ell running over 0..ell_range inclusive.
    """
    d = catalog.d
    ell_range = d * (d + 1) if ell_range is None else int(ell_range)
    if not 0 <= ell_range <= d * (d + 1):
        raise ArgumentError("ell_range out of [0, d(d+1)]", ell_range=ell_range)
    err_alt = 0.0
    err_grass = 0.0
    for s in s_samples:
        s = complex(s)
        zsc = -_gv_exponent(s, catalog, policy)[0]
        alt = 0.0 + 0.0j
        grass = 0.0 + 0.0j
        for k in range(d + 1):
            sign_k = (-1) ** (d - k)
            alt += sign_k * -_det_exponent(s, catalog, policy, k)[0]
            for ell in range(ell_range + 1):
                sign = sign_k * (-1) ** ell
                grass += sign * -_det_exponent(s, catalog, policy, k, ell)[0]
        z = cmath.exp(zsc)
        if z == 0:
            raise ModelError("zeta value underflowed in identity check", s=str(s))
        err_alt = max(err_alt, abs(cmath.exp(alt) - z) / abs(z))
        err_grass = max(err_grass, abs(cmath.exp(grass) - z) / abs(z))
    return {
        "d": d,
        "ell_range": ell_range,
        "samples": len(list(s_samples)),
        "alternating_max_rel_err": err_alt,
        "grassmann_max_rel_err": err_grass,
    }


def log_derivative(k, s, catalog, policy=None):
    """(log d_k)'(s) as the orbit sum sum_{gamma,m} |gamma| e^{-s m |gamma|}
    times the d_k weight (the 1/m cancels against d/ds)."""
    _check_k(k, catalog.d)
    policy, _ = _resolve(policy, catalog)
    if not catalog.orbits:
        return 0.0 + 0.0j
    m = np.arange(1, policy.m_max + 1, dtype=float)
    re, im = [], []
    for orbit in catalog.orbits:
        ell = orbit.period
        log_w = _det_log_weights(catalog, orbit, m, int(k))
        terms = orbit.multiplicity * ell * np.exp(-s * ell * m + log_w)
        re.extend(terms.real)
        im.extend(terms.imag)
    return _fsum_complex(re, im)


def trace_moment(s0, n, catalog, policy=None):
    """M_n = (1/(n-1)!) sum_{gamma,m} |gamma| (m|gamma|)^{n-1} e^{-s0 m|gamma|}
    / sqrt|det(Id - D^m)|."""
    if int(n) != n or n < 1:
        raise ArgumentError("n must be a positive integer", n=n)
    policy, pressure = _resolve(policy, catalog)
    if complex(s0).real <= pressure:
        warnings.warn("moment sum outside the convergence region", stacklevel=2)
    if not catalog.orbits:
        return 0.0 + 0.0j
    s0 = complex(s0)
    m = np.arange(1, policy.m_max + 1, dtype=float)
    re, im = [], []
    for orbit in catalog.orbits:
        ell = orbit.period
        log_w = _gv_log_weights(catalog, orbit, m)
        terms = (
            orbit.multiplicity
            * ell
            * (m * ell) ** (n - 1)
            * np.exp(-s0 * ell * m + log_w)
        )
        re.extend(terms.real)
        im.extend(terms.imag)
    return _fsum_complex(re, im) / math.factorial(n - 1)


def moment_series_coefficient(s0, n, catalog, policy=None):
    """a_n = (-1)^{n-1} M_n / n, the Taylor coefficient of log d at s0."""
    return (-1) ** (n - 1) * trace_moment(s0, n, catalog, policy) / n


# ---------------------------------------------------------------------------
# cycle expansion for constant-roof catalogs


def constant_roof(catalog, tol=1e-9):
    """Common period unit c with every period an integer multiple of c,
    or None if the catalog is not arithmetic in that sense."""
    if not catalog.orbits:
        return None
    c = min(o.period for o in catalog.orbits)
    for o in catalog.orbits:
        ratio = o.period / c
        if abs(ratio - round(ratio)) > tol or round(ratio) < 1:
            return None
    return c


class CyclePolynomial:
    """Z_sc as a polynomial in u = e^{-s c} for constant-roof catalogs."""

    def __init__(self, c, coefficients):
        self.c = float(c)
        self.coefficients = np.asarray(coefficients, dtype=float)

    def evaluate(self, s):
        u = cmath.exp(-s * self.c)
        return complex(np.polyval(self.coefficients[::-1], u))

    def derivative(self, s):
        u = cmath.exp(-s * self.c)
        n = np.arange(len(self.coefficients))
        dpdu = complex(np.polyval((self.coefficients * n)[:0:-1], u))
        return dpdu * (-self.c) * u

    def roots_in_u(self):
        return np.roots(self.coefficients[::-1])


def gv_cycle_polynomial(catalog, policy=None):
    """Power-series coefficients of Z_sc(u), u = e^{-s c}.

    The exponent sum is a polynomial-degree-capped series sum_n A_n u^n;
    exponentiating term by term gives c_0..c_N with the standard
    exp-of-series recurrence. Valid only for constant-roof catalogs.
    """
    c = constant_roof(catalog)
    if c is None:
        raise ModelError("cycle polynomial needs a constant-roof catalog")
    policy, _ = _resolve(policy, catalog)
    n_cap = max(int(round(o.period / c)) for o in catalog.orbits)
    A = np.zeros(n_cap + 1)
    m_all = np.arange(1, policy.m_max + 1, dtype=float)
    for orbit in catalog.orbits:
        p = int(round(orbit.period / c))
        m_top = min(policy.m_max, n_cap // p)
        if m_top < 1:
            continue
        m = m_all[:m_top]
        log_w = _gv_log_weights(catalog, orbit, m)
        weights = orbit.multiplicity * np.exp(log_w) / m
        for mi, w in zip(m.astype(int), weights):
            A[p * mi] += w
    a = -A
    coef = np.zeros(n_cap + 1)
    coef[0] = 1.0
    for k in range(1, n_cap + 1):
        coef[k] = sum(j * a[j] * coef[k - j] for j in range(1, k + 1)) / k
    return CyclePolynomial(c, coef)
