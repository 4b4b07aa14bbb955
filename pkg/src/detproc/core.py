"""Exact densities of determinantal processes on a finite ground set.

The ground space is {1, ..., p} with the counting measure, so the space of
configurations (finite subsets) has 2^p elements and every integral is a
finite sum. This module holds the parameter types, the density evaluators
for projection processes and their Bernoulli mixtures, the kernel and its
correlation function, and two exact-enumeration oracles (the full density
table and the L-ensemble likelihood) used to cross-validate each other.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg

# 2^p enumeration is the workhorse; refuse anything beyond this unless the
# caller explicitly overrides.
DEFAULT_ENUM_CAP = 20
GRAM_TOL = 1e-9
KERNEL_TOL = 1e-9
TABLE_TOL = 1e-9


class EnumerationCapError(ValueError):
    """Raised when an operation would enumerate more than 2^cap configurations."""


def check_enum_cap(p: int, cap: int = DEFAULT_ENUM_CAP):
    if p > cap:
        raise EnumerationCapError(f"p={p} exceeds enumeration cap {cap}")


# ---------------------------------------------------------------------------
# determinant helpers

def abs_det(a: np.ndarray) -> float:
    """|det a| for a square matrix, via column-pivoted QR.

    Only the modulus is ever needed for densities; the product of |R_ii|
    from a pivoted QR is stable for near-singular submatrices.
    """
    a = np.asarray(a)
    k = a.shape[0]
    if k == 0:
        return 1.0
    if a.shape != (k, k):
        raise ValueError(f"expected square matrix, got {a.shape}")
    r = scipy.linalg.qr(a, mode="r", pivoting=True)[0]
    return float(np.prod(np.abs(np.diag(r))))


def abs_det_many(stack: np.ndarray) -> np.ndarray:
    """|det| for a stack of square matrices (..., k, k), batched QR.

    Bulk companion of abs_det for enumeration loops; agreement between the
    two routes is asserted in the test suite.
    """
    stack = np.asarray(stack)
    k = stack.shape[-1]
    if k == 0:
        return np.ones(stack.shape[:-2])
    r = np.linalg.qr(stack, mode="r")
    return np.abs(np.prod(np.abs(np.diagonal(r, axis1=-2, axis2=-1)), axis=-1))


# ---------------------------------------------------------------------------
# configurations

@dataclass(frozen=True, order=True)
class Config:
    """A finite subset of the ground set, stored as sorted 1-based indices."""

    members: tuple

    def __init__(self, members=()):
        members = tuple(sorted(int(x) for x in members))
        if len(set(members)) != len(members):
            raise ValueError(f"duplicate indices in configuration: {members}")
        if members and members[0] < 1:
            raise ValueError(f"indices must be >= 1, got {members}")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def mask(self) -> int:
        m = 0
        for x in self.members:
            m |= 1 << (x - 1)
        return m

    @classmethod
    def from_mask(cls, mask: int) -> "Config":
        return cls(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


@dataclass(frozen=True)
class GroundSet:
    """The finite ground space {1, ..., p}."""

    p: int
    cap: int = DEFAULT_ENUM_CAP

    def __post_init__(self):
        if not 1 <= self.p <= self.cap:
            raise ValueError(f"p must be in [1, {self.cap}], got {self.p}")

    def validate(self, alpha: Config):
        if len(alpha) and alpha.members[-1] > self.p:
            raise ValueError(f"configuration {alpha.members} not inside {{1..{self.p}}}")

    def configs(self):
        """All 2^p configurations in ascending bitmask order."""
        for mask in range(1 << self.p):
            yield Config.from_mask(mask)


def _masks_of_size(p: int, k: int) -> list:
    return [sum(1 << (x - 1) for x in c) for c in combinations(range(1, p + 1), k)]


# ---------------------------------------------------------------------------
# parameters

@dataclass(frozen=True)
class OrthonormalFamily:
    """p x r complex matrix whose columns are orthonormal in C^p.

    Inputs failing the Gram check are rejected rather than silently
    re-orthonormalized, so caller bugs surface here.
    """

    columns: np.ndarray

    def __post_init__(self):
        cols = np.atleast_2d(np.asarray(self.columns, dtype=complex))
        object.__setattr__(self, "columns", cols)
        p, r = cols.shape
        if r > p:
            raise ValueError(f"rank r={r} exceeds p={p}")
        gram = cols.conj().T @ cols
        dev = np.max(np.abs(gram - np.eye(r))) if r else 0.0
        if dev > GRAM_TOL:
            raise ValueError(f"columns are not orthonormal (Gram deviation {dev:.3e})")
        cols.setflags(write=False)

    @property
    def p(self) -> int:
        return self.columns.shape[0]

    @property
    def r(self) -> int:
        return self.columns.shape[1]

    def ground(self, cap: int = DEFAULT_ENUM_CAP) -> GroundSet:
        return GroundSet(self.p, cap)

    def check_active(self, active) -> tuple:
        active = tuple(sorted(int(j) for j in active))
        if len(set(active)) != len(active):
            raise ValueError(f"duplicate indices in active set {active}")
        if active and not (1 <= active[0] and active[-1] <= self.r):
            raise ValueError(f"active set {active} outside [1, {self.r}]")
        return active

    def submatrix(self, alpha: Config, active) -> np.ndarray:
        rows = [x - 1 for x in alpha]
        cols = [j - 1 for j in active]
        return self.columns[np.ix_(rows, cols)]


@dataclass(frozen=True)
class Spectrum:
    """Square-root eigenvalues lambda_j in [0, 1] of the mixture weights."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size and (v.min() < 0.0 or v.max() > 1.0):
            raise ValueError("spectrum entries must lie in [0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def r(self) -> int:
        return self.values.size

    @property
    def checked(self) -> np.ndarray:
        """The companion sequence 1 - sqrt(1 - lambda_j^2)."""
        return 1.0 - np.sqrt(np.clip(1.0 - self.values**2, 0.0, None))

    @classmethod
    def ones(cls, k: int) -> "Spectrum":
        return cls(np.ones(k))


@dataclass(frozen=True)
class ProjectionDensity:
    """Fixed-cardinality density |det submatrix|^2 on size-|J| configurations."""

    family: OrthonormalFamily
    active: tuple

    def __post_init__(self):
        object.__setattr__(self, "active", self.family.check_active(self.active))

    @property
    def rank(self) -> int:
        return len(self.active)


@dataclass(frozen=True)
class DppDensity:
    """Mixture of projection densities with Bernoulli product weights."""

    family: OrthonormalFamily
    spectrum: Spectrum

    def __post_init__(self):
        if self.spectrum.r != self.family.r:
            raise ValueError(
                f"spectrum length {self.spectrum.r} != family rank {self.family.r}"
            )


@dataclass(frozen=True)
class KernelMatrix:
    """p x p Hermitian matrix with eigenvalues in [0, 1]."""

    entries: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.entries, dtype=complex)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ValueError(f"kernel must be square, got {k.shape}")
        if np.max(np.abs(k - k.conj().T)) > KERNEL_TOL:
            raise ValueError("kernel is not Hermitian")
        eigs = np.linalg.eigvalsh(k)
        if eigs.min() < -KERNEL_TOL or eigs.max() > 1.0 + KERNEL_TOL:
            raise ValueError("kernel eigenvalues must lie in [0, 1]")
        k.setflags(write=False)
        object.__setattr__(self, "entries", k)

    @property
    def p(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DensityTable:
    """Exhaustive map from every configuration to its probability.

    probs is indexed by configuration bitmask (bit i-1 set iff point i is
    in the configuration). This is the exact-enumeration oracle that every
    other route in the package is checked against.
    """

    ground: GroundSet
    probs: np.ndarray
    check: bool = True

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (1 << self.ground.p,):
            raise ValueError(
                f"expected {1 << self.ground.p} entries, got {probs.shape}"
            )
        if self.check:
            if probs.min() < -1e-12:
                raise ValueError(f"negative probability {probs.min():.3e}")
            total = math.fsum(probs)
            if abs(total - 1.0) > TABLE_TOL:
                raise ValueError(f"total mass {total} differs from 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def prob(self, alpha: Config) -> float:
        self.ground.validate(alpha)
        return float(self.probs[alpha.mask])

    def __getitem__(self, alpha: Config) -> float:
        return self.prob(alpha)


# ---------------------------------------------------------------------------
# operations

def projection_density_eval(family: OrthonormalFamily, active, alpha: Config) -> float:
    """|det of the (alpha, J) submatrix|^2 when |alpha| = |J|, else 0."""
    active = family.check_active(active)
    family.ground().validate(alpha)
    if len(alpha) != len(active):
        return 0.0
    if not active:
        return 1.0
    return abs_det(family.submatrix(alpha, active)) ** 2


def mixture_weight(spectrum: Spectrum, active) -> float:
    """Probability that the Bernoulli(lambda_j^2) draws realize exactly J."""
    active = tuple(int(j) for j in active)
    if active and not (1 <= min(active) and max(active) <= spectrum.r):
        raise ValueError(f"active set {active} outside [1, {spectrum.r}]")
    sq = spectrum.values**2
    inside = np.zeros(spectrum.r, dtype=bool)
    for j in active:
        inside[j - 1] = True
    return float(np.prod(np.where(inside, sq, 1.0 - sq)))


def dpp_density_eval(density: DppDensity, alpha: Config) -> float:
    """Mixture sum over all index sets J of matching cardinality."""
    fam, spec = density.family, density.spectrum
    fam.ground().validate(alpha)
    k = len(alpha)
    if k > spec.r:
        return 0.0
    total = 0.0
    for active in combinations(range(1, spec.r + 1), k):
        w = mixture_weight(spec, active)
        if w == 0.0:
            continue
        total += w * projection_density_eval(fam, active, alpha)
    return total


def kernel_from_params(family: OrthonormalFamily, spectrum: Spectrum) -> KernelMatrix:
    """K(x, y) = sum_j lambda_j^2 phi_j(x) conj(phi_j(y))."""
    if spectrum.r != family.r:
        raise ValueError("dimension mismatch between family and spectrum")
    cols = family.columns
    k = (cols * spectrum.values**2) @ cols.conj().T
    return KernelMatrix((k + k.conj().T) / 2.0)


def correlation(kernel: KernelMatrix, alpha: Config) -> float:
    """Inclusion probability det K_{alpha,alpha}; 1 for the empty set."""
    GroundSet(kernel.p).validate(alpha)
    if not len(alpha):
        return 1.0
    rows = [x - 1 for x in alpha]
    sub = kernel.entries[np.ix_(rows, rows)]
    return float(np.linalg.det(sub).real)


def density_table(density, cap: int = DEFAULT_ENUM_CAP) -> DensityTable:
    """Exhaustive probability table over all 2^p configurations."""
    fam = density.family
    check_enum_cap(fam.p, cap)
    ground = GroundSet(fam.p, cap)
    probs = np.zeros(1 << fam.p)
    if isinstance(density, ProjectionDensity):
        _accumulate_projection(probs, fam, density.active, 1.0)
    elif isinstance(density, DppDensity):
        spec = density.spectrum
        for k in range(min(fam.p, spec.r) + 1):
            for active in combinations(range(1, spec.r + 1), k):
                w = mixture_weight(spec, active)
                if w == 0.0:
                    continue
                _accumulate_projection(probs, fam, active, w)
    else:
        raise TypeError(f"unsupported density type {type(density).__name__}")
    return DensityTable(ground, probs)


def _accumulate_projection(probs, fam, active, weight):
    k = len(active)
    if k == 0:
        probs[0] += weight
        return
    cols = [j - 1 for j in active]
    masks = _masks_of_size(fam.p, k)
    subs = np.empty((len(masks), k, k), dtype=complex)
    for i, members in enumerate(combinations(range(fam.p), k)):
        subs[i] = fam.columns[np.ix_(members, cols)]
    vals = abs_det_many(subs) ** 2
    for m, v in zip(masks, vals):
        probs[m] += weight * v


def normalization_check(table: DensityTable) -> float:
    """Total mass of the table; equals 1 for any valid parameter set."""
    return math.fsum(table.probs)


def inclusion_probabilities(table: DensityTable) -> np.ndarray:
    """P[alpha subset of N] for every alpha, by superset summation."""
    s = np.array(table.probs, dtype=float)
    p = table.ground.p
    idx = np.arange(1 << p)
    for i in range(p):
        bit = 1 << i
        lower = idx[(idx & bit) == 0]
        s[lower] += s[lower | bit]
    return s


def l_ensemble_oracle(density: DppDensity, alpha: Config) -> float:
    """Independent likelihood route det(I-K) det(L_{alpha,alpha}), L = K(I-K)^{-1}.

    Requires every lambda_j < 1 strictly (I - K must be invertible).
    """
    spec = density.spectrum
    if spec.r and spec.values.max() >= 1.0:
        raise ValueError("L-ensemble route needs all lambda_j < 1")
    fam = density.family
    fam.ground().validate(alpha)
    kern = kernel_from_params(fam, spec).entries
    eye = np.eye(fam.p)
    resolvent = np.linalg.solve(eye - kern, np.eye(fam.p))
    ell = kern @ resolvent
    base = float(np.linalg.det(eye - kern).real)
    if not len(alpha):
        return base
    rows = [x - 1 for x in alpha]
    return base * float(np.linalg.det(ell[np.ix_(rows, rows)]).real)


# ---------------------------------------------------------------------------
# random parameter generators (Haar via QR with positive-real diagonal)

def haar_orthonormal(p: int, r: int, rng, real: bool = False) -> OrthonormalFamily:
    """Haar-distributed orthonormal p x r family.

    Generated by QR-factorizing an iid (complex) Gaussian matrix and fixing
    the phase so the R diagonal is positive real, which makes the factor
    unique. real=True restricts to real entries for debugging.
    """
    gen = rng.generator
    if r == 0:
        return OrthonormalFamily(np.zeros((p, 0), dtype=complex))
    g = gen.standard_normal((p, r))
    if not real:
        g = g + 1j * gen.standard_normal((p, r))
    q, rr = np.linalg.qr(g)
    d = np.diag(rr)
    phase = d / np.abs(d)
    return OrthonormalFamily(q * phase.conj())


def random_spectrum(r: int, rng, max_value: float = 1.0) -> Spectrum:
    return Spectrum(rng.generator.uniform(0.0, max_value, size=r))


# ---------------------------------------------------------------------------
# external formats

def params_to_dict(family: OrthonormalFamily, spectrum: Spectrum) -> dict:
    """JSON form: {"p": int, "phi": [[re, im], ...] column-major, "lambda": [...]}"""
    flat = family.columns.T.reshape(-1)  # column-major over (p, r)
    return {
        "p": family.p,
        "phi": [[float(z.real), float(z.imag)] for z in flat],
        "lambda": [float(v) for v in spectrum.values],
    }


def params_from_dict(data: dict):
    p = int(data["p"])
    lam = np.asarray(data["lambda"], dtype=float)
    r = lam.size
    flat = np.array([complex(re, im) for re, im in data["phi"]])
    if flat.size != p * r:
        raise ValueError(f"phi has {flat.size} entries, expected p*r = {p * r}")
    cols = flat.reshape(r, p).T
    return OrthonormalFamily(cols), Spectrum(lam)


def save_params(path, family: OrthonormalFamily, spectrum: Spectrum):
    with open(path, "w") as fh:
        json.dump(params_to_dict(family, spectrum), fh, indent=1)
        fh.write("\n")


def load_params(path):
    with open(path) as fh:
        return params_from_dict(json.load(fh))


def write_table_csv(table: DensityTable, path):
    """CSV export: config_bitmask,probability with the bitmask in decimal."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["config_bitmask", "probability"])
        for mask, prob in enumerate(table.probs):
            writer.writerow([mask, f"{prob:.17g}"])
