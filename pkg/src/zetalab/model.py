"""Core algebra of prime periodic orbits.

A prime orbit enters only through its flow period and the transversal
Jacobian of its Poincare map, a 2d x 2d symplectic matrix with no spectrum
on the unit circle. From that we derive the stable/unstable splitting, the
repetition weights behind the zeta denominators, exterior-power traces, and
the spectrum of the induced map on the Grassmann fiber.
"""

import io
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DimensionError, HyperbolicityError, IOFormatError, SpecError
from .util import (
    elementary_symmetric,
    float_repr,
    log_abs_one_minus,
    standard_symplectic_form,
)

PAIRING_TOL = 1e-8
UNIT_CIRCLE_TOL = 1e-9


def validate_symplectic(M, tol):
    """True iff max|M^T J M - J| <= tol for the standard block form J."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError("matrix must be square", shape=M.shape)
    if M.shape[0] % 2 != 0:
        raise DimensionError("symplectic matrices have even size", shape=M.shape)
    if tol <= 0:
        raise ArgumentError("tolerance must be positive", tol=tol)
    if not np.all(np.isfinite(M)):
        raise SpecError("matrix has non-finite entries")
    J = standard_symplectic_form(M.shape[0] // 2)
    return float(np.max(np.abs(M.T @ J @ M - J))) <= tol


@dataclass
class PrimeOrbit:
    """One prime periodic orbit: label, flow period, transversal Jacobian.

    multiplicity counts distinct prime orbits sharing this period and a
    conjugate Jacobian; sources that aggregate orbit classes (the toral
    suspension, where counts grow exponentially) emit one entry per class.
    """

    label: str
    period: float
    jacobian: np.ndarray
    multiplicity: int = 1

    def __post_init__(self):
        self.jacobian = np.asarray(self.jacobian, dtype=float)

    @property
    def d(self):
        return self.jacobian.shape[0] // 2

    def validate(self, symplectic_tol=1e-8, unit_tol=UNIT_CIRCLE_TOL):
        if self.period <= 0:
            raise SpecError("orbit period must be positive", label=self.label)
        if self.multiplicity < 1:
            raise SpecError("orbit multiplicity must be >= 1", label=self.label)
        if not validate_symplectic(self.jacobian, symplectic_tol):
            raise SpecError("orbit jacobian is not symplectic", label=self.label)
        mods = np.abs(np.linalg.eigvals(self.jacobian))
        if np.any(np.abs(mods - 1.0) <= unit_tol):
            raise HyperbolicityError(
                "orbit jacobian has spectrum on the unit circle", label=self.label
            )


@dataclass
class SymplecticSplit:
    """Spectrum of a hyperbolic symplectic matrix split by modulus.

    stable_eigenvalues[i] pairs with unstable_eigenvalues[i] as 1/mu within
    tolerance; det_stable is the product of stable moduli, in (0, 1).
    """

    unstable_eigenvalues: np.ndarray
    stable_eigenvalues: np.ndarray
    det_stable: float

    @property
    def d(self):
        return len(self.unstable_eigenvalues)

    @property
    def full_spectrum(self):
        return np.concatenate([self.unstable_eigenvalues, self.stable_eigenvalues])


@dataclass
class GrassmannFiberData:
    """Spectrum of the fiber derivative of the Grassmann-bundle action.

    The attracting fixed subspace gives eigenvalues {mu_s/mu_u} on
    Hom(E_u, E_s) plus {1/mu_u} on Hom(E_u, E_0); all moduli < 1.
    """

    eigenvalues: np.ndarray

    @property
    def size(self):
        return len(self.eigenvalues)


def hyperbolic_split(D, unit_tol=UNIT_CIRCLE_TOL, pairing_tol=PAIRING_TOL):
    """Partition the spectrum of a hyperbolic symplectic matrix by modulus."""
    D = np.asarray(D, dtype=float)
    if D.shape[0] % 2 != 0 or D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DimensionError("jacobian must be square of even size", shape=D.shape)
    d = D.shape[0] // 2
    eig = np.linalg.eigvals(D)
    mods = np.abs(eig)
    if np.any(np.abs(mods - 1.0) <= unit_tol):
        raise HyperbolicityError("spectrum touches the unit circle", moduli=sorted(mods))
    unstable = eig[mods > 1.0]
    stable = eig[mods < 1.0]
    if len(unstable) != d or len(stable) != d:
        raise HyperbolicityError(
            "spectrum does not split d/d across the unit circle",
            n_unstable=len(unstable),
            n_stable=len(stable),
        )
    # deterministic order: unstable by (|mu| desc, angle); stable as partners
    order = np.lexsort((np.angle(unstable), -np.abs(unstable)))
    unstable = unstable[order]
    # the computed small eigenvalues carry absolute error ~eps*|D|, which can
    # dwarf their true size for strongly expanding jacobians; the pairing
    # check allows that floor, and the stored stable values are the exact
    # partner inverses guaranteed by symplecticity
    eps_floor = 64.0 * np.finfo(float).eps * 2 * d * np.max(np.abs(D))
    stable = list(stable)
    paired = []
    for mu in unstable:
        target = 1.0 / mu
        dists = [abs(v - target) for v in stable]
        j = int(np.argmin(dists))
        if dists[j] > pairing_tol * max(1.0, abs(target)) + eps_floor:
            raise HyperbolicityError(
                "stable spectrum does not pair with 1/mu", mu=mu, best=stable[j]
            )
        stable.pop(j)
        paired.append(target)
    stable = np.array(paired)
    det_stable = float(np.prod(np.abs(stable)))
    if not 0.0 < det_stable < 1.0:
        raise HyperbolicityError("det of stable part not in (0,1)", det_stable=det_stable)
    return SymplecticSplit(unstable, stable, det_stable)


@dataclass
class RepetitionWeight:
    full_sqrt: float
    stable_det_pow: float
    stable_factor: float


def _log_abs_det_one_minus_inverse_powers(eigenvalues, m):
    """log|det(Id - E^{-m})| from the eigenvalue list E, overflow safe."""
    total = 0.0
    for mu in np.asarray(eigenvalues, dtype=complex):
        log_mod = -m * np.log(abs(mu))
        phase = -m * np.angle(mu)
        total += log_abs_one_minus(log_mod, phase)
    return total


def repetition_weight(split, m):
    """The three factors of the d-alpha determinant identity at repetition m.

    full_sqrt = sqrt|det(Id - D^{-m})| from the full spectrum;
    stable_det_pow = det_stable^{m/2}; stable_factor = |det(Id - (D^s)^{-m})|.
    For real positive spectra full_sqrt = stable_det_pow * stable_factor.
    """
    if m <= 0 or int(m) != m:
        raise ArgumentError("repetition count must be a positive integer", m=m)
    m = int(m)
    log_full = _log_abs_det_one_minus_inverse_powers(split.full_spectrum, m)
    log_stable = _log_abs_det_one_minus_inverse_powers(split.stable_eigenvalues, m)
    return RepetitionWeight(
        full_sqrt=float(np.exp(0.5 * log_full)),
        stable_det_pow=float(split.det_stable ** (m / 2.0)),
        stable_factor=float(np.exp(log_stable)),
    )


def exterior_trace(split, m, k):
    """Tr of the k-th exterior power of (D^s)^{-m}: e_k of the inverse powers.

    Direct elementary-symmetric evaluation; suited to moderate magnitudes
    (the zeta engine uses a log-domain path for deep repetitions).
    """
    if m <= 0 or int(m) != m:
        raise ArgumentError("repetition count must be a positive integer", m=m)
    d = split.d
    if k < 0 or k > d:
        raise ArgumentError("exterior power index out of range", k=k, d=d)
    values = np.asarray(split.stable_eigenvalues, dtype=complex) ** (-int(m))
    ek = elementary_symmetric(values)[k]
    if abs(ek.imag) < 1e-12 * max(1.0, abs(ek.real)):
        ek = complex(ek.real, 0.0)
    return complex(ek)


def grassmann_fiber_jacobian(split):
    """Eigenvalues of the fiber derivative at the attracting subspace."""
    mu_u = np.asarray(split.unstable_eigenvalues, dtype=complex)
    mu_s = np.asarray(split.stable_eigenvalues, dtype=complex)
    ratios = (mu_s[:, None] / mu_u[None, :]).ravel()
    inv_u = 1.0 / mu_u
    eig = np.concatenate([ratios, inv_u])
    order = np.lexsort((np.angle(eig), -np.abs(eig)))
    eig = eig[order]
    if np.any(np.abs(eig) >= 1.0):
        raise HyperbolicityError("Grassmann fiber spectrum not contracting")
    return GrassmannFiberData(eigenvalues=eig)


@dataclass
class OrbitCatalog:
    """Prime orbits sorted by (period, label).

    max_period is a completeness guarantee: every prime orbit with period
    <= max_period is present. Entries beyond it may also be present; they
    improve evaluations and never hurt the declared horizon.
    """

    d: int
    source: dict
    max_period: float
    orbits: list = field(default_factory=list)
    _splits: dict = field(default_factory=dict, repr=False, compare=False)
    _eigs: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.orbits = sorted(self.orbits, key=lambda o: (o.period, o.label))
        labels = [o.label for o in self.orbits]
        if len(set(labels)) != len(labels):
            raise SpecError("orbit labels must be unique")
        for o in self.orbits:
            if o.jacobian.shape != (2 * self.d, 2 * self.d):
                raise DimensionError(
                    "orbit jacobian size mismatch", label=o.label, shape=o.jacobian.shape
                )

    def __len__(self):
        return len(self.orbits)

    def split_of(self, orbit):
        sp = self._splits.get(orbit.label)
        if sp is None:
            sp = hyperbolic_split(orbit.jacobian)
            self._splits[orbit.label] = sp
        return sp

    def full_spectrum_of(self, orbit):
        """All 2d eigenvalues of the return Jacobian.

        Prefers the hyperbolic split, whose stable eigenvalues are exact
        partner inverses; raw eigvals of a stiff power lose the small
        eigenvalues to absolute roundoff eps * |mu_max|.
        """
        eig = self._eigs.get(orbit.label)
        if eig is None:
            try:
                eig = self.split_of(orbit).full_spectrum
            except HyperbolicityError:
                eig = np.linalg.eigvals(orbit.jacobian)
            self._eigs[orbit.label] = eig
        return eig

    def to_csv_text(self):
        from .util import canonical_json

        out = io.StringIO()
        source_text = canonical_json(self.source)
        out.write(f"d={self.d},source={source_text},max_period={float_repr(self.max_period)}\n")
        for o in self.orbits:
            cells = [o.label, float_repr(o.period)]
            cells.extend(float_repr(v) for v in o.jacobian.ravel())
            cells.append(str(int(o.multiplicity)))
            out.write(",".join(cells) + "\n")
        return out.getvalue()

    def write_csv(self, path):
        text = self.to_csv_text()
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return text

    @classmethod
    def from_csv_text(cls, text):
        lines = [
            ln
            for ln in text.splitlines()
            if ln.strip() and not ln.lstrip().startswith("#")
        ]
        if not lines:
            raise IOFormatError("empty catalog file")
        m = re.match(r"^d=(\d+),source=(.*),max_period=([^,]+)$", lines[0])
        if not m:
            raise IOFormatError("bad catalog header", header=lines[0])
        d = int(m.group(1))
        import json

        try:
            source = json.loads(m.group(2))
        except json.JSONDecodeError:
            source = {"name": m.group(2)}
        max_period = float(m.group(3))
        orbits = []
        width = (2 * d) * (2 * d)
        for ln in lines[1:]:
            cells = ln.split(",")
            if len(cells) == 2 + width:
                mult = 1
            elif len(cells) == 3 + width:
                mult = int(cells[-1])
            else:
                raise IOFormatError("bad catalog row width", row=ln[:80], expected=3 + width)
            jac = np.array([float(c) for c in cells[2 : 2 + width]]).reshape(2 * d, 2 * d)
            orbits.append(
                PrimeOrbit(label=cells[0], period=float(cells[1]), jacobian=jac, multiplicity=mult)
            )
        return cls(d=d, source=source, max_period=max_period, orbits=orbits)

    @classmethod
    def read_csv(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_csv_text(f.read())
