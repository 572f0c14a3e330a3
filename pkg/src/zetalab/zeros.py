"""Zero location in complex rectangles and resonance extraction from moments.

Counting uses phase accumulation of f along the rectangle boundary (the
argument principle), with adaptive refinement until every phase step stays
below pi/2. Location refines counts by quadrisection and polishes isolated
zeros with Newton iteration on a numerical derivative. Independently of any
function handle, resonances near a base point s0 are pulled out of the trace
moment sequence M_n, which behaves like sum_i (s0 - chi_i)^(-n) plus a
geometrically small remainder.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ConfidenceError, GeometryError
from .util import aitken, float_repr
from .zeta import EvalPolicy, pressure_default, trace_moment

MAX_DILATIONS = 10
MAX_REFINE_ROUNDS = 24
MAX_BOUNDARY_POINTS = 200_000
NEWTON_MAX_ITER = 60


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned closed rectangle in the complex s plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def validate(self):
        vals = (self.re_min, self.re_max, self.im_min, self.im_max)
        if not all(math.isfinite(v) for v in vals):
            raise GeometryError("rectangle corners must be finite", corners=vals)
        if self.re_min >= self.re_max or self.im_min >= self.im_max:
            raise GeometryError(
                "rectangle must have positive width and height", corners=vals
            )
        return self

    @property
    def center(self):
        return complex(
            0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max)
        )

    @property
    def diameter(self):
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z, pad=0.0):
        return (
            self.re_min - pad <= z.real <= self.re_max + pad
            and self.im_min - pad <= z.imag <= self.im_max + pad
        )

    def dilated(self, factor):
        c = self.center
        hw = 0.5 * (self.re_max - self.re_min) * factor
        hh = 0.5 * (self.im_max - self.im_min) * factor
        return Rectangle(c.real - hw, c.real + hw, c.imag - hh, c.imag + hh)

    def quadrants(self, split=None):
        """Four sub-rectangles cut at `split` (default: the center)."""
        s = self.center if split is None else split
        x, y = s.real, s.imag
        return [
            Rectangle(self.re_min, x, self.im_min, y),
            Rectangle(x, self.re_max, self.im_min, y),
            Rectangle(self.re_min, x, y, self.im_max),
            Rectangle(x, self.re_max, y, self.im_max),
        ]

    def corners(self):
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]


@dataclass
class UnresolvedCluster:
    """A sub-rectangle whose zeros could not be separated or polished."""

    rect: Rectangle
    count: int
    residual: float


@dataclass
class ResonanceSet:
    """Located zeros/resonances with multiplicities and a method tag."""

    zeros: list
    multiplicities: list
    method: str
    residuals: list = field(default_factory=list)
    clusters: list = field(default_factory=list)
    degraded: bool = False

    def __post_init__(self):
        if len(self.zeros) != len(self.multiplicities):
            raise ArgumentError(
                "zeros and multiplicities must have equal length",
                zeros=len(self.zeros),
                multiplicities=len(self.multiplicities),
            )
        if any(m < 1 for m in self.multiplicities):
            raise ArgumentError("multiplicities must be >= 1")

    @property
    def total_count(self):
        return int(sum(self.multiplicities)) + sum(c.count for c in self.clusters)

    def to_json_obj(self):
        out = []
        res = self.residuals or [0.0] * len(self.zeros)
        for z, m, r in zip(self.zeros, self.multiplicities, res):
            out.append(
                {
                    "re": float_repr(z.real),
                    "im": float_repr(z.imag),
                    "multiplicity": int(m),
                    "residual": float_repr(r),
                    "method": self.method,
                }
            )
        return out


def _boundary_path(rect, n_per_side):
    """Counterclockwise closed polygon through the rectangle boundary."""
    t = np.linspace(0.0, 1.0, n_per_side, endpoint=False)
    bottom = rect.re_min + t * (rect.re_max - rect.re_min) + 1j * rect.im_min
    right = rect.re_max + 1j * (rect.im_min + t * (rect.im_max - rect.im_min))
    top = rect.re_max - t * (rect.re_max - rect.re_min) + 1j * rect.im_max
    left = rect.re_min + 1j * (rect.im_max - t * (rect.im_max - rect.im_min))
    pts = np.concatenate([bottom, right, top, left])
    return np.concatenate([pts, pts[:1]])


def _winding_once(f, rect, n_per_side):
    """Phase-accumulation winding; None signals a (near-)boundary zero.

    Magnitude is irrelevant to the winding, so only an exact floating-point
    zero or a phase step that refuses to settle under refinement (a zero
    sitting on or hugging the path) asks the caller to perturb the box.
    """
    pts = _boundary_path(rect, n_per_side)
    vals = np.array([f(z) for z in pts], dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise GeometryError("function returned non-finite boundary values")
    if np.any(vals == 0.0):
        return None

    def phase_steps(v):
        # wrapped phase differences; ratios would overflow when |f| swings
        # hundreds of orders of magnitude along an edge
        ang = np.angle(v)
        return np.remainder(np.diff(ang) + math.pi, 2.0 * math.pi) - math.pi

    def winding_of(steps):
        total = float(np.sum(steps)) / (2.0 * math.pi)
        n = int(round(total))
        if abs(total - n) > 0.25:
            raise GeometryError(
                "phase accumulation did not close to an integer", winding=total
            )
        return n

    def insert(mask):
        nonlocal pts, vals
        mids = 0.5 * (pts[:-1][mask] + pts[1:][mask])
        mid_vals = np.array([f(z) for z in mids], dtype=complex)
        if not np.all(np.isfinite(mid_vals)):
            raise GeometryError("function returned non-finite boundary values")
        if np.any(mid_vals == 0.0):
            return False
        order = np.nonzero(mask)[0]
        pts = np.insert(pts, order + 1, mids)
        vals = np.insert(vals, order + 1, mid_vals)
        return True

    settled = None
    for _ in range(MAX_REFINE_ROUNDS):
        steps = phase_steps(vals)
        # a large modulus jump means log f moved a lot, so the wrapped
        # phase step may alias; refine those segments as well
        dlog = np.abs(np.diff(np.log(np.abs(vals))))
        bad = np.hypot(steps, dlog) >= 0.5 * math.pi
        if not bad.any():
            n = winding_of(steps)
            if settled == n:
                return n
            # certify against unresolved oscillation: the winding must
            # survive one uniform doubling of every segment
            settled = n
            bad = np.ones(len(pts) - 1, dtype=bool)
        else:
            settled = None
        if len(pts) > MAX_BOUNDARY_POINTS:
            return None
        if not insert(bad):
            return None
    return None


def argument_principle_count(f, rect, n_boundary=64):
    """Number of zeros of f inside rect, counted with multiplicity.

    The boundary is sampled counterclockwise and refined until adjacent
    phase steps stay below pi/2, making the rounded winding number exact.
    A zero sitting on the boundary triggers dilation by 1 + j*1e-4; after
    MAX_DILATIONS failed attempts the geometry is reported as bad.
    """
    rect = rect.validate()
    if n_boundary < 4:
        raise ArgumentError("need at least 4 boundary points per side", n_boundary=n_boundary)
    box = rect
    for attempt in range(MAX_DILATIONS + 1):
        n = _winding_once(f, box, n_boundary)
        if n is not None:
            return n
        box = rect.dilated(1.0 + (attempt + 1) * 1e-4)
    raise GeometryError(
        "function vanishes on every perturbed boundary",
        rect=(rect.re_min, rect.re_max, rect.im_min, rect.im_max),
        attempts=MAX_DILATIONS,
    )


def _numeric_derivative(f, z, h):
    return (f(z + h) - f(z - h)) / (2.0 * h)


def _newton_polish(f, z0, tol, scale, multiplicity=1):
    """Newton iteration with a central-difference derivative.

    The step is scaled by the target multiplicity so that m-fold zeros
    still converge quadratically. Returns (zero, |f(zero)|) or None.
    """
    z = z0
    h = max(1e-7, 1e-9 * scale)
    for _ in range(NEWTON_MAX_ITER):
        fz = f(z)
        if abs(fz) <= tol:
            return z, abs(fz)
        dz = _numeric_derivative(f, z, h)
        if dz == 0:
            return None
        step = multiplicity * fz / dz
        if not (math.isfinite(step.real) and math.isfinite(step.imag)):
            return None
        z = z - step
        if abs(step) > 10.0 * scale:
            return None
    fz = f(z)
    if abs(fz) <= tol:
        return z, abs(fz)
    return None


def _jittered_split(rect, attempt):
    """Quadrisection point near the center, nudged to dodge zeros on cuts."""
    if attempt == 0:
        return None
    frac = 0.08 * attempt
    w = rect.re_max - rect.re_min
    h = rect.im_max - rect.im_min
    return rect.center + complex(frac * 0.5 * w, -frac * 0.5 * h)


def find_zeros(f, rect, tol=1e-10, n_boundary=64, max_depth=48):
    """Locate all zeros of f in rect by quadrisection plus Newton polish.

    Each accepted zero satisfies |f(zero)| <= tol and is cross-validated
    by a recount in a small box around it. Boxes whose zeros cannot be
    separated or polished are reported as unresolved clusters instead of
    being dropped.
    """
    rect = rect.validate()
    if tol <= 0:
        raise ArgumentError("tolerance must be positive", tol=tol)
    total = argument_principle_count(f, rect, n_boundary)
    zeros, mults, residuals, clusters = [], [], [], []
    scale = max(rect.diameter, 1e-6)
    floor = max(64.0 * np.finfo(float).eps * scale, 1e-12)

    def validate_zero(z, expected):
        size = max(floor * 8.0, 1e-7 * scale)
        box = Rectangle(z.real - size, z.real + size, z.imag - size, z.imag + size)
        try:
            return argument_principle_count(f, box, 16) == expected
        except GeometryError:
            return False

    def accept(z, count, res):
        zeros.append(z)
        mults.append(count)
        residuals.append(res)

    stack = [(rect, total, 0)]
    while stack:
        box, count, depth = stack.pop()
        if count == 0:
            continue
        polished = _newton_polish(f, box.center, tol, scale, multiplicity=count)
        if polished is not None:
            z, res = polished
            pad = max(floor, 1e-9 * scale)
            if box.contains(z, pad=pad) and validate_zero(z, count):
                accept(z, count, res)
                continue
        if depth >= max_depth or box.diameter <= floor:
            clusters.append(UnresolvedCluster(box, count, abs(f(box.center))))
            continue
        for attempt in range(5):
            parts = box.quadrants(_jittered_split(box, attempt))
            try:
                sub = [argument_principle_count(f, q, n_boundary) for q in parts]
            except GeometryError:
                continue
            if sum(sub) == count:
                stack.extend(
                    (q, c, depth + 1) for q, c in zip(parts, sub) if c > 0
                )
                break
        else:
            clusters.append(UnresolvedCluster(box, count, abs(f(box.center))))

    order = np.argsort([(z.imag, z.real) for z in zeros], axis=0)[:, 0] if zeros else []
    result = ResonanceSet(
        zeros=[zeros[i] for i in order],
        multiplicities=[mults[i] for i in order],
        method="argument-principle",
        residuals=[residuals[i] for i in order],
        clusters=clusters,
    )
    return result


def resonances_from_moments(s0, n_min, n_max, catalog, policy=None, count=1):
    """Dominant resonances chi_i near s0 from the moment sequence M_n.

    M_n tends to sum_i (s0 - chi_i)^(-n) up to a remainder decaying like
    r0^(-n), so the chi_i are recovered from a linear recurrence of order
    `count` (a ratio-plus-extrapolation shortcut when count = 1).
    """
    policy = EvalPolicy() if policy is None else policy
    policy.validate()
    s0 = complex(s0)
    if not 1 <= count <= 4:
        raise ArgumentError("resonance count must be between 1 and 4", count=count)
    if not (isinstance(n_min, int) and isinstance(n_max, int)):
        raise ArgumentError("moment orders must be integers", n_min=n_min, n_max=n_max)
    if n_min < 1 or n_max < n_min + 2 * count:
        raise ArgumentError(
            "need at least 2*count + 1 moment orders",
            n_min=n_min,
            n_max=n_max,
            count=count,
        )
    if len(catalog.orbits) == 0:
        raise ConfidenceError(
            "catalog is empty; every moment vanishes and no resonance "
            "can be extracted"
        )
    pressure = (
        policy.pressure_estimate
        if policy.pressure_estimate is not None
        else pressure_default(catalog)
    )
    if s0.real <= pressure:
        raise ArgumentError(
            "moment base point must satisfy Re s0 > pressure",
            s0=s0,
            pressure=pressure,
        )
    moments = np.array(
        [trace_moment(s0, n, catalog, policy) for n in range(n_min, n_max + 1)],
        dtype=complex,
    )
    return fit_resonances(s0, moments, count)


def fit_resonances(s0, moments, count=1):
    """Extract chi_i from a raw moment sequence M_n ~ sum_i (s0-chi_i)^(-n).

    Ratio method with one extrapolation pass when count = 1; otherwise a
    linear-prediction fit of order `count` whose companion roots give the
    resonances. An ill-conditioned fit sets the degraded flag rather than
    failing silently.
    """
    s0 = complex(s0)
    moments = np.asarray(moments, dtype=complex)
    if np.max(np.abs(moments), initial=0.0) == 0.0:
        raise ConfidenceError("all moments vanish; no resonance information")
    if len(moments) < 2 * count + 1:
        raise ArgumentError(
            "need at least 2*count + 1 moments", available=len(moments), count=count
        )

    degraded = False
    if count == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = s0 - moments[:-1] / moments[1:]
        ratios = ratios[np.isfinite(ratios)]
        if len(ratios) < 3:
            raise ConfidenceError("too few finite moment ratios", available=len(ratios))
        accel = aitken(list(ratios))
        chi = accel[-1] if len(accel) else ratios[-1]
        residual = abs(chi - ratios[-1])
        chis = [complex(chi)]
        fit_residuals = [float(residual)]
    else:
        # linear prediction: M_{n+K} + a_1 M_{n+K-1} + ... + a_K M_n = 0
        K = count
        rows = len(moments) - K
        H = np.empty((rows, K), dtype=complex)
        for j in range(K):
            H[:, j] = moments[K - 1 - j : K - 1 - j + rows]
        rhs = -moments[K:]
        cond = np.linalg.cond(H)
        if cond > 1e8:
            degraded = True
        coeffs, *_ = np.linalg.lstsq(H, rhs, rcond=None)
        roots = np.roots(np.concatenate([[1.0], coeffs]))
        fit = H @ coeffs - rhs
        rel = float(np.linalg.norm(fit) / max(np.linalg.norm(rhs), 1e-300))
        chis, fit_residuals = [], []
        for y in roots:
            if y == 0:
                degraded = True
                continue
            chis.append(s0 - 1.0 / y)
            fit_residuals.append(rel)
        if not chis:
            raise ConfidenceError("recurrence fit produced no usable roots")
        order = np.argsort([abs(c - s0) for c in chis])
        chis = [chis[i] for i in order]
        fit_residuals = [fit_residuals[i] for i in order]

    return ResonanceSet(
        zeros=chis,
        multiplicities=[1] * len(chis),
        method="moments",
        residuals=fit_residuals,
        degraded=degraded,
    )


def weyl_strip_count(resonances, strip_re, window):
    """Zeros with Re in [strip_re] (inclusive) and Im in [w0, w1) (half-open)."""
    lo, hi = float(strip_re[0]), float(strip_re[1])
    w0, w1 = float(window[0]), float(window[1])
    if lo > hi or w0 >= w1:
        raise ArgumentError("empty strip or window", strip_re=strip_re, window=window)
    total = 0
    for z, m in zip(resonances.zeros, resonances.multiplicities):
        if lo <= z.real <= hi and w0 <= z.imag < w1:
            total += int(m)
    return total
