"""Orbit catalog generators: toral-automorphism suspensions, Fuchsian
geodesics on a constant-curvature surface, and seeded synthetic ensembles.

The suspension source aggregates: prime-orbit counts grow like lambda^n/n,
so the catalog stores one entry per map-period with a multiplicity column
(every prime orbit of map-period p has period p*c and return Jacobian A^p,
so zeta/determinant weights are exactly shared within the class).
"""

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ModelError, SpecError
from .model import OrbitCatalog, PrimeOrbit
from .util import divisors, mobius, random_symplectic


# ---------------------------------------------------------------------------
# suspension of a hyperbolic toral automorphism


@dataclass
class CatMapSuspensionSpec:
    A: tuple  # ((a,b),(c,d)) integer entries
    roof: float = 1.0
    n_max: int = 10

    def validate(self):
        A = [[int(self.A[i][j]) for j in range(2)] for i in range(2)]
        if any(self.A[i][j] != A[i][j] for i in range(2) for j in range(2)):
            raise SpecError("map matrix entries must be integers", A=self.A)
        det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        if det != 1:
            raise ModelError("map matrix must have determinant 1", det=det)
        tr = A[0][0] + A[1][1]
        if abs(tr) <= 2:
            raise ModelError("map matrix must be hyperbolic (|trace| > 2)", trace=tr)
        if self.roof <= 0:
            raise SpecError("roof height must be positive", roof=self.roof)
        if self.n_max < 1:
            raise SpecError("n_max must be >= 1", n_max=self.n_max)
        return A

    def descriptor(self):
        return {
            "name": "catmap",
            "A": [[int(v) for v in row] for row in self.A],
            "roof": float(self.roof),
            "n_max": int(self.n_max),
        }


def _int_mat_mul(X, Y):
    return [
        [X[0][0] * Y[0][0] + X[0][1] * Y[1][0], X[0][0] * Y[0][1] + X[0][1] * Y[1][1]],
        [X[1][0] * Y[0][0] + X[1][1] * Y[1][0], X[1][0] * Y[0][1] + X[1][1] * Y[1][1]],
    ]


def _int_mat_pow(A, n):
    # exact integer powers (Python ints never overflow)
    R = [[1, 0], [0, 1]]
    B = [row[:] for row in A]
    while n:
        if n & 1:
            R = _int_mat_mul(R, B)
        B = _int_mat_mul(B, B)
        n >>= 1
    return R


def catmap_fixed_point_counts(spec):
    """#Fix(A^n) = |det(A^n - Id)| = |trace(A^n) - 2| for n = 1..n_max."""
    A = spec.validate()
    counts = []
    for n in range(1, spec.n_max + 1):
        An = _int_mat_pow(A, n)
        counts.append(abs(An[0][0] + An[1][1] - 2))
    return counts


def catmap_prime_counts(spec):
    """Number of prime map-orbits of period p, by Moebius inversion."""
    nfix = catmap_fixed_point_counts(spec)
    primes = []
    for p in range(1, spec.n_max + 1):
        total = sum(mobius(p // q) * nfix[q - 1] for q in divisors(p))
        if total % p != 0:
            raise ModelError("Moebius inversion gave a non-integer count", p=p)
        primes.append(total // p)
    return primes


def catmap_suspension_catalog(spec):
    A = spec.validate()
    prime_counts = catmap_prime_counts(spec)
    orbits = []
    for p in range(1, spec.n_max + 1):
        count = prime_counts[p - 1]
        if count == 0:
            continue
        Ap = _int_mat_pow(A, p)
        if max(abs(v) for row in Ap for v in row) >= 2**53:
            raise SpecError("map power exceeds exact float range", p=p)
        orbits.append(
            PrimeOrbit(
                label=f"p{p:02d}",
                period=p * spec.roof,
                jacobian=np.array(Ap, dtype=float),
                multiplicity=count,
            )
        )
    return OrbitCatalog(
        d=1,
        source=spec.descriptor(),
        max_period=spec.n_max * spec.roof,
        orbits=orbits,
    )


# ---------------------------------------------------------------------------
# Fuchsian geodesics (constant negative curvature)


@dataclass
class FuchsianSpec:
    generators: list = None  # 2x2 unit-determinant matrices; None = octagon set
    max_word_len: int = 4
    det_tol: float = 1e-10
    conjugator_len: int = 3  # word-length bound for explicit conjugacy witnesses

    def validate(self):
        gens = self.generators
        if gens is None:
            gens = bolza_generators()
        gens = [np.asarray(g, dtype=float) for g in gens]
        if not gens:
            raise SpecError("at least one generator is required")
        for i, g in enumerate(gens):
            if g.shape != (2, 2):
                raise SpecError("generators must be 2x2", index=i)
            if abs(np.linalg.det(g) - 1.0) > self.det_tol:
                raise SpecError(
                    "generator determinant differs from 1",
                    index=i,
                    det=float(np.linalg.det(g)),
                )
        if self.max_word_len < 1:
            raise SpecError("max_word_len must be >= 1")
        alphabet = 2 * len(gens)
        if alphabet ** (self.max_word_len + 1) >= 2**63:
            raise SpecError(
                "word horizon too deep for packed rotation keys",
                alphabet=alphabet,
                max_word_len=self.max_word_len,
            )
        return gens

    def descriptor(self):
        gens = self.generators
        desc_gens = (
            "bolza"
            if gens is None
            else [[[float(v) for v in row] for row in np.asarray(g)] for g in gens]
        )
        return {
            "name": "fuchsian",
            "generators": desc_gens,
            "max_word_len": int(self.max_word_len),
        }


def bolza_generators():
    """Hyperbolic translation generators for the regular-octagon surface.

    g_k for k = 0..3 are rotations of one another by pi/4; each has trace
    2(1 + sqrt 2), so cosh(l/2) = 1 + sqrt 2 gives the systole length
    2*arccosh(1 + sqrt 2). Determinants are exactly 1.
    """
    a = 1.0 + math.sqrt(2.0)
    b = math.sqrt(2.0 + 2.0 * math.sqrt(2.0))
    gens = []
    for k in range(4):
        t = k * math.pi / 4.0
        gens.append(
            np.array(
                [
                    [a - b * math.sin(t), b * math.cos(t)],
                    [b * math.cos(t), a + b * math.sin(t)],
                ]
            )
        )
    return gens


def _letter_matrices(gens):
    mats = [np.asarray(g, dtype=float) for g in gens]
    mats += [np.linalg.inv(g) for g in gens]
    return np.array(mats)


def _inverse_letter(letter, g):
    return (letter + g) % (2 * g)


def _enumerate_reduced(g, length):
    """All freely reduced words (no adjacent x x^{-1}) of exactly `length`
    letters, as an int8 array of shape (N, length)."""
    alphabet = 2 * g
    words = np.arange(alphabet, dtype=np.int8)[:, None]
    for _ in range(1, length):
        last = words[:, -1]
        blocks = []
        for a in range(alphabet):
            ok = last != _inverse_letter(a, g)
            if np.any(ok):
                blocks.append(
                    np.concatenate(
                        [words[ok], np.full((int(ok.sum()), 1), a, dtype=np.int8)],
                        axis=1,
                    )
                )
        words = np.concatenate(blocks, axis=0)
    return words


def _cyclic_keys(words, alphabet):
    """Packed base-(alphabet) integer key of every rotation: (length, N)."""
    n, length = words.shape
    keys = np.zeros((length, n), dtype=np.uint64)
    w64 = words.astype(np.uint64)
    base = np.uint64(alphabet)
    for r in range(length):
        rolled = np.concatenate([w64[:, r:], w64[:, :r]], axis=1)
        key = np.zeros(n, dtype=np.uint64)
        for j in range(length):
            key = key * base + rolled[:, j]
        keys[r] = key
    return keys


def _canonical_class_mask(words, g):
    """Keep words that are cyclically reduced, are the least rotation of
    their cyclic class, and are not proper powers."""
    n, length = words.shape
    cyc = words[:, 0] != _inverse_letter(words[:, -1], g)
    keys = _cyclic_keys(words, 2 * g)
    canonical = keys[0] == keys.min(axis=0)
    power = np.zeros(n, dtype=bool)
    for dlen in divisors(length):
        if dlen < length:
            power |= keys[dlen] == keys[0]
    return cyc & canonical & ~power


def _word_matrices(words, letter_mats):
    if len(words) == 0:
        return np.zeros((0, 2, 2))
    mats = letter_mats[words[:, 0]]
    for j in range(1, words.shape[1]):
        mats = np.einsum("nij,njk->nik", mats, letter_mats[words[:, j]])
    return mats


def _conjugator_pool(letter_mats, g, max_len):
    """Matrices of all group words of length <= max_len (conjugacy witnesses).

    Conjugacy is tested against group elements only; testing against general
    SL(2,R) conjugations would wrongly merge a class with its inverse.
    """
    mats = [np.eye(2)]
    frontier = [((), np.eye(2))]
    for _ in range(max_len):
        nxt = []
        for word, m in frontier:
            for a in range(2 * g):
                if word and a == _inverse_letter(word[-1], g):
                    continue
                nxt.append((word + (a,), m @ letter_mats[a]))
        frontier = nxt
        mats.extend(m for _, m in frontier)
    return np.array(mats)


def _sl2_inverse_batch(mats):
    inv = np.empty_like(mats)
    inv[:, 0, 0] = mats[:, 1, 1]
    inv[:, 1, 1] = mats[:, 0, 0]
    inv[:, 0, 1] = -mats[:, 0, 1]
    inv[:, 1, 0] = -mats[:, 1, 0]
    return inv


def _conjugate_hits(mu, reps, pool, pool_inv, tol=1e-9):
    """Boolean per rep: is c mu c^{-1} = +/- rep for some pooled witness c?

    The +/- covers matrix groups containing -Id, where conjugacy of the
    underlying isometries is defined only up to sign.
    """
    if len(reps) == 0:
        return np.zeros(0, dtype=bool)
    V = np.einsum("kij,jl,klm->kim", pool, mu, pool_inv)
    scale = max(np.max(np.abs(mu)), np.max(np.abs(reps)), 1.0)
    dplus = np.abs(V[None, :, :, :] - reps[:, None, :, :]).max(axis=(2, 3))
    dminus = np.abs(V[None, :, :, :] + reps[:, None, :, :]).max(axis=(2, 3))
    return np.minimum(dplus, dminus).min(axis=1) <= tol * scale


class _ClassTable:
    """Conjugacy-class reps indexed by |trace| for candidate pre-filtering.

    |trace| agreement (scale-aware window) is only a pre-filter; membership
    always requires an explicit conjugator witness.
    """

    def __init__(self, conj_mats):
        self.pool = conj_mats
        self.pool_inv = _sl2_inverse_batch(conj_mats)
        self.reps = []  # (word tuple, matrix, trace)
        self._keys = []  # sorted |trace| values
        self._order = []  # rep indices parallel to _keys

    def _window(self, abst):
        tol = 4e-9 * (1.0 + abst)
        lo = bisect.bisect_left(self._keys, abst - tol)
        hi = bisect.bisect_right(self._keys, abst + tol)
        return [self._order[i] for i in range(lo, hi)]

    def find(self, mat, trace):
        idx = self._window(abs(trace))
        if not idx:
            return None
        reps = np.array([self.reps[j][1] for j in idx])
        hits = _conjugate_hits(mat, reps, self.pool, self.pool_inv)
        for j, hit in zip(idx, hits):
            if hit:
                return j
        return None

    def add(self, word, mat, trace):
        self.reps.append((word, mat, trace))
        abst = abs(trace)
        i = bisect.bisect_left(self._keys, abst)
        self._keys.insert(i, abst)
        self._order.insert(i, len(self.reps) - 1)
        return len(self.reps) - 1


def _class_candidates(gens, length):
    """Canonical free-cyclic-class representatives of exactly `length`
    letters, with word matrices and traces."""
    g = len(gens)
    letter_mats = _letter_matrices(gens)
    words = _enumerate_reduced(g, length)
    words = words[_canonical_class_mask(words, g)]
    mats = _word_matrices(words, letter_mats)
    traces = mats[:, 0, 0] + mats[:, 1, 1] if len(mats) else np.zeros(0)
    elliptic = np.abs(traces) <= 2.0 + 1e-12
    if np.any(elliptic):
        i = int(np.argmax(elliptic))
        raise ModelError(
            "non-hyperbolic word encountered; group is not cocompact "
            "torsion-free as assumed",
            word=[int(v) for v in words[i]],
            trace=float(traces[i]),
        )
    return words, mats, traces


def _min_generator_length(gens):
    traces = [abs(float(np.trace(g))) for g in gens]
    if min(traces) <= 2.0:
        raise ModelError("non-hyperbolic generator", trace=min(traces))
    return min(2.0 * math.acosh(t / 2.0) for t in traces)


def fuchsian_geodesic_catalog(spec):
    gens = spec.validate()
    g = len(gens)
    letter_mats = _letter_matrices(gens)
    table = _ClassTable(_conjugator_pool(letter_mats, g, spec.conjugator_len))

    for length in range(1, spec.max_word_len + 1):
        words, mats, traces = _class_candidates(gens, length)
        for w, m, t in zip(words, mats, traces):
            if table.find(m, t) is None:
                table.add(tuple(int(v) for v in w), m, float(t))

    # completeness horizon: geodesic length of the shortest class that first
    # appears at word length max_word_len + 1, discounted by 0.9; a cyclic
    # group has no new class there, so fall back to the word-length scaling
    # of the shortest generator translation
    words1, mats1, traces1 = _class_candidates(gens, spec.max_word_len + 1)
    new_min = None
    if len(traces1):
        lengths1 = 2.0 * np.arccosh(np.abs(traces1) / 2.0)
        for idx in np.argsort(lengths1):
            if table.find(mats1[idx], float(traces1[idx])) is None:
                new_min = float(lengths1[idx])
                break
    if new_min is None:
        new_min = (spec.max_word_len + 1) * _min_generator_length(gens)
    max_period = 0.9 * new_min

    # all merged classes are kept, including those beyond the horizon:
    # max_period guarantees completeness below it, it is not a filter
    # (the shortest new class at the next level can undercut the systole,
    # which would otherwise empty small catalogs)
    sep = "" if 2 * g <= 10 else "-"
    orbits = []
    for w, m, t in table.reps:
        ell = 2.0 * math.acosh(abs(t) / 2.0)
        label = "w" + sep.join(str(a) for a in w)
        jac = np.array([[math.exp(ell), 0.0], [0.0, math.exp(-ell)]])
        orbits.append(PrimeOrbit(label=label, period=ell, jacobian=jac))
    return OrbitCatalog(
        d=1, source=spec.descriptor(), max_period=max_period, orbits=orbits
    )


# ---------------------------------------------------------------------------
# synthetic seeded ensembles


@dataclass
class SyntheticSpec:
    seed: int
    d: int
    count: int
    period_range: tuple = (1.0, 3.0)
    log_eigen_range: tuple = (0.5, 2.0)

    def validate(self):
        if self.d < 1 or self.count < 1:
            raise SpecError("d and count must be positive", d=self.d, count=self.count)
        p0, p1 = self.period_range
        a0, a1 = self.log_eigen_range
        if not (0 < p0 <= p1) or not (0 < a0 <= a1):
            raise SpecError(
                "ranges must be positive and ordered",
                period_range=self.period_range,
                log_eigen_range=self.log_eigen_range,
            )

    def descriptor(self):
        return {
            "name": "synthetic",
            "seed": int(self.seed),
            "d": int(self.d),
            "count": int(self.count),
            "period_range": [float(v) for v in self.period_range],
            "log_eigen_range": [float(v) for v in self.log_eigen_range],
        }


def synthetic_catalog(spec):
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    orbits = []
    for i in range(spec.count):
        a = rng.uniform(*spec.log_eigen_range, size=spec.d)
        period = float(rng.uniform(*spec.period_range))
        S = random_symplectic(rng, spec.d)
        diag = np.diag(np.concatenate([np.exp(a), np.exp(-a)]))
        jac = S @ diag @ np.linalg.inv(S)
        orbits.append(PrimeOrbit(label=f"s{i:04d}", period=period, jacobian=jac))
    return OrbitCatalog(
        d=spec.d,
        source=spec.descriptor(),
        max_period=float(spec.period_range[1]),
        orbits=orbits,
    )


# ---------------------------------------------------------------------------
# dispatch helper used by the service layer


def catalog_from_descriptor(desc):
    """Rebuild a catalog from a source descriptor dict."""
    name = desc.get("name")
    if name == "catmap":
        return catmap_suspension_catalog(
            CatMapSuspensionSpec(
                A=tuple(tuple(row) for row in desc["A"]),
                roof=desc.get("roof", 1.0),
                n_max=desc.get("n_max", 10),
            )
        )
    if name == "fuchsian":
        gens = desc.get("generators", "bolza")
        if gens == "bolza":
            gens = None
        return fuchsian_geodesic_catalog(
            FuchsianSpec(generators=gens, max_word_len=desc.get("max_word_len", 4))
        )
    if name == "synthetic":
        return synthetic_catalog(
            SyntheticSpec(
                seed=desc["seed"],
                d=desc["d"],
                count=desc["count"],
                period_range=tuple(desc.get("period_range", (1.0, 3.0))),
                log_eigen_range=tuple(desc.get("log_eigen_range", (0.5, 2.0))),
            )
        )
    raise ArgumentError("unknown catalog source", name=name)
