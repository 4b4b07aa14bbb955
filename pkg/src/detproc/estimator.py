"""Aggregation-by-testing estimation of a point-process density.

Pipeline: separated nets on unit spheres of finite-dimensional subspaces,
a uniform grid for the mixture weights, projection of net tuples onto the
closest orthonormal tuple (polar factor), a candidate family carrying a
sub-probability prior, and selection by pairwise signed-root tests: the
winner minimizes the largest Hellinger distance to any candidate that
beats it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import islice, product

import numpy as np

from .core import (
    DensityTable,
    DppDensity,
    OrthonormalFamily,
    Spectrum,
    density_table,
)
from .hellinger import hellinger
from .rng import SeededRng
from .sampling import SampleSet

POLAR_RANK_TOL = 1e-10


# ---------------------------------------------------------------------------
# models, nets, approximation

@dataclass(frozen=True)
class SubspaceModel:
    """A subspace of C^p (or R^p) given by an orthonormal basis of columns."""

    basis: np.ndarray
    id: int = 0

    def __post_init__(self):
        basis = np.asarray(self.basis)
        if basis.ndim != 2 or basis.shape[1] < 1:
            raise ValueError(f"basis must be p x d with d >= 1, got {basis.shape}")
        gram = basis.conj().T @ basis
        if np.max(np.abs(gram - np.eye(basis.shape[1]))) > 1e-9:
            raise ValueError("model basis is not orthonormal")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def p(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.basis)

    @property
    def dim_real(self) -> int:
        """Dimension as a real linear space: 2d for complex scalars."""
        return 2 * self.dim if self.is_complex else self.dim

    def project(self, phi: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.conj().T @ phi)


@dataclass(frozen=True)
class SphereNet:
    """Strictly eta-separated unit vectors in a model subspace.

    Built greedily from a finite random pool, so maximality (hence the
    covering property) is certified only relative to that pool; the
    pool-relative covering radius is recorded as the certificate.
    """

    model: SubspaceModel
    eta: float
    points: np.ndarray
    pool_size: int
    pool_covering_radius: float

    def __post_init__(self):
        pts = np.asarray(self.points)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    def min_pairwise_distance(self) -> float:
        pts = self.points
        if len(self) < 2:
            return float("inf")
        best = float("inf")
        for i in range(len(self) - 1):
            d = np.linalg.norm(pts[i + 1 :] - pts[i], axis=1).min()
            best = min(best, float(d))
        return best

    def log_size_bound(self, n: int) -> float:
        """Volumetric ceiling for separation radius 1/sqrt(n)."""
        return self.model.dim_real * math.log(2.0 * math.sqrt(n) + 1.0)


def _random_unit_coefficients(count, dim, rng, complex_mode):
    gen = rng.generator
    c = gen.standard_normal((count, dim))
    if complex_mode:
        c = c + 1j * gen.standard_normal((count, dim))
    norms = np.linalg.norm(c, axis=1, keepdims=True)
    return c / norms


def sphere_net(model: SubspaceModel, eta: float, pool_size: int, rng: SeededRng,
               seed_points=None) -> SphereNet:
    """Greedy separated subset of the unit sphere of the model subspace.

    Draws pool_size uniform unit vectors, inserts each iff its distance to
    every current net point exceeds eta. seed_points (unit vectors in the
    subspace) are processed first and therefore anchor the net.
    """
    if not 0.0 < eta <= 2.0:
        raise ValueError(f"eta must be in (0, 2], got {eta}")
    if pool_size < 1:
        raise ValueError("pool_size must be >= 1")
    coeffs = _random_unit_coefficients(pool_size, model.dim, rng, model.is_complex)
    pool = coeffs @ model.basis.T
    if seed_points is not None and len(seed_points):
        seeds = np.atleast_2d(np.asarray(seed_points, dtype=pool.dtype))
        pool = np.concatenate([seeds, pool], axis=0)
    net = []
    for v in pool:
        if not net or np.linalg.norm(np.array(net) - v, axis=1).min() > eta:
            net.append(v)
    net = np.array(net)
    covering = 0.0
    for v in pool:
        covering = max(covering, float(np.linalg.norm(net - v, axis=1).min()))
    return SphereNet(model, float(eta), net, int(pool.shape[0]), covering)


def sphere_approx(phi: np.ndarray, model: SubspaceModel) -> np.ndarray:
    """Nearest-direction approximation of a unit vector inside the model sphere.

    Returns the normalized projection when its norm is at least 1/2, else a
    fixed unit vector of the subspace; either way the error is at most four
    times the distance from phi to the subspace itself.
    """
    phi = np.asarray(phi)
    nrm = np.linalg.norm(phi)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"phi must be a unit vector, got norm {nrm}")
    proj = model.project(phi)
    pn = np.linalg.norm(proj)
    if pn >= 0.5:
        return proj / pn
    return model.basis[:, 0].astype(proj.dtype, copy=True)


def nearest_orthonormal(vectors) -> OrthonormalFamily:
    """Closest orthonormal tuple (polar factor) in sum-of-squares distance.

    The polar factor of the stacked matrix is the global minimizer over all
    orthonormal tuples; rank-deficient input is rejected.
    """
    m = np.column_stack([np.asarray(v, dtype=complex) for v in vectors])
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if s.min() < POLAR_RANK_TOL:
        raise ValueError("vectors are numerically rank deficient")
    return OrthonormalFamily(u @ vh)


# ---------------------------------------------------------------------------
# weight grids and candidate families

@dataclass(frozen=True)
class LambdaGrid:
    """All weight vectors with first j entries on the uniform 1/n grid
    (zero excluded) and zeros afterwards; n^j points in total."""

    j: int
    n: int

    def __post_init__(self):
        if self.j < 1 or self.n < 1:
            raise ValueError("j and n must be >= 1")

    @property
    def count(self) -> int:
        return self.n**self.j

    def __iter__(self):
        """Descending lexicographic order, so (1, ..., 1) comes first and a
        desk-scale truncation keeps the projection-like corner."""
        levels = [i / self.n for i in range(self.n, 0, -1)]
        for values in product(levels, repeat=self.j):
            yield Spectrum(np.array(values))

    def first(self, count: int) -> list:
        return list(islice(iter(self), count))


@dataclass(frozen=True)
class CandidateCaps:
    """Mandatory truncation bounds for candidate enumeration."""

    j_max: int
    per_net: int
    family_max: int

    def __post_init__(self):
        if min(self.j_max, self.per_net, self.family_max) < 1:
            raise ValueError("all caps must be positive")


@dataclass
class CandidateEntry:
    """One candidate density with its enumeration index and prior mass."""

    index: tuple  # (j, model ids, net point indices, gamma grid rank)
    family: OrthonormalFamily
    spectrum: Spectrum
    prior: float
    _table: DensityTable = field(default=None, repr=False)

    @property
    def density(self) -> DppDensity:
        return DppDensity(self.family, self.spectrum)

    def table(self) -> DensityTable:
        if self._table is None:
            self._table = density_table(self.density)
        return self._table


@dataclass
class CandidateFamily:
    """Finite candidate list with a sub-probability prior."""

    entries: list
    caps: CandidateCaps
    truncated: bool
    net_sizes: dict

    def __len__(self):
        return len(self.entries)

    def prior_mass(self) -> float:
        return math.fsum(e.prior for e in self.entries)


def build_candidates(models, prior, n: int, caps: CandidateCaps, rng: SeededRng,
                     pool_size: int = 256, anchor=None,
                     anchor_jitter: int = 0) -> CandidateFamily:
    """Enumerate candidate densities from net tuples and the weight grid.

    prior maps model id to its weight (a sub-probability over models). Each
    candidate (j, m_1..m_j, Psi, gamma) gets prior mass
    (2n)^(-j) * prod_l prior(m_l) / |net(m_l)|, which sums to at most 1
    over the full enumeration and hence also after truncation.

    Truncation is deterministic: candidates are ordered by interleaved
    depth (grid rank + net-tuple rank) across truncation levels j, so each
    j keeps its shallowest candidates when family_max binds. An anchor
    (OrthonormalFamily) seeds every net with its columns, putting the
    anchored tuple at depth zero; anchor_jitter adds that many perturbed
    copies per column at distance 1.5 * eta, emulating the neighbors a
    maximal net would contain around the anchor.
    """
    models = list(models)
    if not models:
        raise ValueError("need at least one model")
    eta = 1.0 / math.sqrt(n)
    nets = {}
    for rank, model in enumerate(models):
        stream = rng.split(rank)
        seed_points = None
        if anchor is not None:
            seed_points = [anchor.columns[:, i] for i in range(anchor.r)]
            gen = stream.split(10**6).generator
            cos_t = 1.0 - (1.5 * eta) ** 2 / 2.0
            sin_t = math.sqrt(max(1.0 - cos_t**2, 0.0))
            for i in range(anchor.r):
                phi = anchor.columns[:, i]
                for _ in range(anchor_jitter):
                    u = (gen.standard_normal(model.dim)
                         + (1j * gen.standard_normal(model.dim)
                            if model.is_complex else 0.0)) @ model.basis.T
                    u = u - phi * (np.vdot(phi, u))
                    u_norm = np.linalg.norm(u)
                    if u_norm < 1e-12:
                        continue
                    seed_points.append(cos_t * phi + sin_t * u / u_norm)
        nets[model.id] = sphere_net(model, eta, pool_size, stream,
                                    seed_points=seed_points)

    descriptors = []  # (depth, j, model_rank, gamma_rank, tuple_rank, payload)
    total_theoretical = 0
    for j in range(1, caps.j_max + 1):
        gammas = LambdaGrid(j, n).first(caps.family_max)
        for model_rank, model_tuple in enumerate(product(models, repeat=j)):
            net_lists = [nets[m.id].points[: caps.per_net] for m in model_tuple]
            tuples = list(product(*[range(len(pts)) for pts in net_lists]))
            total_theoretical += (
                math.prod(len(nets[m.id]) for m in model_tuple) * LambdaGrid(j, n).count
            )
            for g_rank, gamma in enumerate(gammas):
                for t_rank, point_idx in enumerate(tuples):
                    depth = g_rank + t_rank
                    payload = (model_tuple, net_lists, point_idx, gamma)
                    descriptors.append(
                        (depth, j, model_rank, g_rank, t_rank, payload)
                    )
    descriptors.sort(key=lambda d: d[:5])

    entries = []
    seen_exhausted = len(descriptors)
    for depth, j, model_rank, g_rank, t_rank, payload in descriptors:
        if len(entries) >= caps.family_max:
            break
        model_tuple, net_lists, point_idx, gamma = payload
        vectors = [net_lists[l][point_idx[l]] for l in range(j)]
        try:
            fam = nearest_orthonormal(vectors)
        except ValueError:
            continue  # repeated/near-parallel net points
        mass = (2.0 * n) ** (-j)
        for m in model_tuple:
            mass *= prior[m.id] / len(nets[m.id])
        index = (j, tuple(m.id for m in model_tuple), tuple(point_idx), g_rank)
        entries.append(CandidateEntry(index, fam, gamma, mass))
    if not entries:
        raise ValueError("caps too tight: empty candidate family")
    truncated = total_theoretical > len(entries)
    return CandidateFamily(
        entries, caps, truncated, {mid: len(net) for mid, net in nets.items()}
    )


# ---------------------------------------------------------------------------
# tests and selection

def test_statistic(u: DensityTable, v: DensityTable, samples: SampleSet) -> float:
    """Signed-root statistic sum_i [sqrt(v(N_i)) - sqrt(u(N_i))] / sqrt(u+v).

    Positive values favor v over u; exactly antisymmetric in (u, v); a term
    where both densities vanish contributes zero.
    """
    if u.ground.p != v.ground.p:
        raise ValueError("tables live on different ground sets")
    counts = np.bincount(samples.masks(), minlength=len(u.probs))
    su = np.sqrt(u.probs)
    sv = np.sqrt(v.probs)
    denom = np.sqrt(u.probs + v.probs)
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(denom > 0.0, (sv - su) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(np.dot(counts, terms))


@dataclass
class SelectionResult:
    """Winner of the pairwise-test tournament plus its full diagnostics."""

    chosen_index: int
    crit_values: np.ndarray
    test_matrix: np.ndarray  # [a, b] = +1 if b beats a, -1 if a beats b

    @property
    def chosen(self):
        return self.chosen_index


def _beats(t_ab: float, prior_a: float, prior_b: float, a: int, b: int) -> bool:
    """Whether candidate b beats candidate a."""
    if t_ab > 0.0:
        return True
    if t_ab < 0.0:
        return False
    # tie: larger prior beats smaller; equal priors: lower index beats higher
    if prior_b != prior_a:
        return prior_b > prior_a
    return b < a


def select(family: CandidateFamily, samples: SampleSet) -> SelectionResult:
    """Pick the candidate minimizing the largest distance to anything beating it."""
    entries = family.entries
    m = len(entries)
    if m == 0:
        raise ValueError("empty candidate family")
    tables = [e.table() for e in entries]
    probs = np.stack([t.probs for t in tables])
    roots = np.sqrt(probs)
    counts = np.bincount(samples.masks(), minlength=probs.shape[1])
    affinity = np.clip(roots @ roots.T, 0.0, 1.0)
    h_matrix = np.sqrt(np.clip(1.0 - affinity, 0.0, None))
    np.fill_diagonal(h_matrix, 0.0)
    sign = np.zeros((m, m), dtype=np.int8)
    for a in range(m):
        for b in range(a + 1, m):
            denom = np.sqrt(probs[a] + probs[b])
            terms = np.divide(roots[b] - roots[a], denom,
                              out=np.zeros_like(denom), where=denom > 0.0)
            t = float(np.dot(counts, terms))
            b_beats_a = _beats(t, entries[a].prior, entries[b].prior, a, b)
            sign[a, b] = 1 if b_beats_a else -1
            sign[b, a] = -sign[a, b]
    crit = np.zeros(m)
    for a in range(m):
        beating = np.nonzero(sign[a] > 0)[0]
        crit[a] = h_matrix[a, beating].max() if beating.size else 0.0
    # argmin with ties broken by larger prior, then lower index
    order = sorted(
        range(m), key=lambda a: (crit[a], -entries[a].prior, a)
    )
    return SelectionResult(order[0], crit, sign)


# ---------------------------------------------------------------------------
# theoretical risk bound

def oracle_bound(family: OrthonormalFamily, spectrum: Spectrum, models, prior,
                 n: int, j: int, nets=None) -> float:
    """Bias/complexity trade-off bound for a target parameter pair.

    Per retained column: the best over models of approximation error plus a
    complexity price. With nets=None the subspace form is used, with the
    projector distance and price (D_m log n + log(1/prior))/n; passing the
    constructed nets switches to the net form with the realized net sizes.
    """
    if j < 0 or j > family.r:
        raise ValueError(f"truncation j={j} outside [0, {family.r}]")
    total = float(np.sum(spectrum.values[j:] ** 2))
    for jp in range(j):
        phi = family.columns[:, jp]
        best = float("inf")
        for model in models:
            if nets is None:
                err = float(np.linalg.norm(phi - model.project(phi)) ** 2)
                price = (model.dim_real * math.log(n)
                         + math.log(1.0 / prior[model.id])) / n
            else:
                net = nets[model.id]
                err = float(
                    np.min(np.linalg.norm(net.points - phi, axis=1)) ** 2
                )
                price = math.log(len(net) * n / prior[model.id]) / n
            best = min(best, err + price)
        total += best
    return total
