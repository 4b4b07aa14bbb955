"""Exact Hellinger geometry of determinantal densities.

Everything here is exact enumeration (no sampling estimators): this module
is the oracle layer the estimator relies on. It computes distances and
affinities between density tables, the closed-form distance between two
Bernoulli weight distributions, numerical verification of the three
distance inequalities (projection, mixture, full-mixture forms), and the
minor-vector coordinates whose modulus map is isometric to rank-k
projection densities under sqrt(2) * Hellinger.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import (
    Config,
    DensityTable,
    DppDensity,
    OrthonormalFamily,
    ProjectionDensity,
    Spectrum,
    _masks_of_size,
    density_table,
)

SLACK_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """Both sides of one inequality instance; slack distributions are artifacts."""

    lhs: float
    rhs: float
    context: str

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.slack >= -SLACK_TOL


def hellinger(table_p: DensityTable, table_q: DensityTable):
    """Squared Hellinger distance and affinity between two tables.

    Returns (h2, affinity) with affinity = sum sqrt(P Q) and h2 = 1 - affinity.
    """
    if table_p.ground.p != table_q.ground.p:
        raise ValueError("tables live on different ground sets")
    affinity = float(np.sqrt(table_p.probs * table_q.probs).sum())
    affinity = min(max(affinity, 0.0), 1.0)
    return 1.0 - affinity, affinity


def bernoulli_weight_hellinger(lam: Spectrum, gam: Spectrum) -> float:
    """Exact h^2 between the two weight distributions over index sets.

    Product-of-affinities form: h^2 = 1 - prod_j (l_j g_j + sqrt(1-l_j^2) sqrt(1-g_j^2)).
    Shorter spectrum is padded with zeros.
    """
    r = max(lam.r, gam.r)
    a = np.zeros(r)
    b = np.zeros(r)
    a[: lam.r] = lam.values
    b[: gam.r] = gam.values
    affinity = np.prod(a * b + np.sqrt((1.0 - a**2) * (1.0 - b**2)))
    return float(1.0 - affinity)


# ---------------------------------------------------------------------------
# minor-vector (blade) coordinates

@dataclass(frozen=True)
class WedgeVector:
    """Coordinates det M_{alpha, {1..k}} over all cardinality-k configurations.

    coords is aligned with the ascending-bitmask order of size-k subsets;
    for an orthonormal family the squared moduli sum to 1 and reproduce the
    projection density.
    """

    p: int
    k: int
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=complex)
        expected = math.comb(self.p, self.k)
        if coords.shape != (expected,):
            raise ValueError(f"expected {expected} coordinates, got {coords.shape}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    def masks(self) -> list:
        return _masks_of_size(self.p, self.k)

    def coord(self, alpha: Config) -> complex:
        if len(alpha) != self.k:
            raise ValueError(f"configuration has size {len(alpha)}, expected {self.k}")
        target = alpha.mask
        for i, m in enumerate(self.masks()):
            if m == target:
                return complex(self.coords[i])
        raise ValueError(f"configuration {alpha.members} outside ground set")


def wedge_coords(family: OrthonormalFamily, k: int) -> WedgeVector:
    """Signed k x k minors of the first k columns, one per size-k configuration."""
    if not 0 <= k <= family.r:
        raise ValueError(f"k={k} outside [0, {family.r}]")
    cols = family.columns[:, :k]
    p = family.p
    n = math.comb(p, k)
    if k == 0:
        return WedgeVector(p, 0, np.ones(1, dtype=complex))
    subs = np.empty((n, k, k), dtype=complex)
    for i, members in enumerate(combinations(range(p), k)):
        subs[i] = cols[list(members), :]
    return WedgeVector(p, k, np.linalg.det(subs))


def gplus_delta(wedge_a: WedgeVector, wedge_b: WedgeVector):
    """Squared distance between modulus vectors, and its gap to 2 h^2.

    Returns (delta2, isometry_gap); the gap must vanish up to enumeration
    round-off for coordinates built from orthonormal families.
    """
    if (wedge_a.p, wedge_a.k) != (wedge_b.p, wedge_b.k):
        raise ValueError("wedge vectors have mismatched shape")
    a = np.abs(wedge_a.coords)
    b = np.abs(wedge_b.coords)
    delta2 = float(np.sum((a - b) ** 2))
    # exact h^2 between the two projection densities |coords|^2
    affinity = float(np.sum(a * b))
    h2 = 1.0 - min(affinity, 1.0)
    return delta2, abs(delta2 - 2.0 * h2)


# ---------------------------------------------------------------------------
# inequality checks

def _det_moduli(family: OrthonormalFamily, active) -> np.ndarray:
    """|det submatrix| over all configurations of size |active|, bitmask order."""
    w = wedge_coords(
        OrthonormalFamily(family.columns[:, [j - 1 for j in active]]), len(active)
    )
    return np.abs(w.coords)


def check_bound_projection(fam_phi: OrthonormalFamily, fam_psi: OrthonormalFamily,
                           active) -> list:
    """Three reports on the distance between two projection densities.

    (i) the exact h^2 equals 1 minus the determinant-table affinity;
    (ii) h^2 <= 1 - |det Gram|; (iii) h^2 <= (5/2) sum ||phi_j - psi_j||^2.
    Both families are compared on the same index set J (re-align by
    permuting columns beforehand if needed).
    """
    active = fam_phi.check_active(active)
    fam_psi.check_active(active)
    if fam_phi.p != fam_psi.p:
        raise ValueError("families live on different ground sets")
    da = _det_moduli(fam_phi, active)
    db = _det_moduli(fam_psi, active)
    affinity = float(np.sum(da * db))
    h2_exact, _ = hellinger(
        density_table(ProjectionDensity(fam_phi, active)),
        density_table(ProjectionDensity(fam_psi, active)),
    )
    cols_phi = fam_phi.columns[:, [j - 1 for j in active]]
    cols_psi = fam_psi.columns[:, [j - 1 for j in active]]
    gram = cols_phi.conj().T @ cols_psi
    gram_bound = 1.0 - abs(np.linalg.det(gram))
    l2_bound = 2.5 * float(np.sum(np.abs(cols_phi - cols_psi) ** 2))
    return [
        BoundReport(h2_exact, 1.0 - affinity, "h2 equals det-table affinity"),
        BoundReport(h2_exact, gram_bound, "h2 <= 1 - |det gram|"),
        BoundReport(h2_exact, l2_bound, "h2 <= 2.5 * sum ||phi-psi||^2"),
    ]


def check_bound_mixture(weights_p, weights_q, tables_p, tables_q) -> BoundReport:
    """h^2 between two mixtures vs 2 h^2(weights) + 2 sum q_t h^2(components)."""
    weights_p = np.asarray(weights_p, dtype=float)
    weights_q = np.asarray(weights_q, dtype=float)
    if not (len(weights_p) == len(weights_q) == len(tables_p) == len(tables_q)):
        raise ValueError("mismatched mixture component counts")
    ground = tables_p[0].ground
    mix_p = np.zeros_like(tables_p[0].probs)
    mix_q = np.zeros_like(mix_p)
    for w, t in zip(weights_p, tables_p):
        mix_p += w * t.probs
    for w, t in zip(weights_q, tables_q):
        mix_q += w * t.probs
    lhs, _ = hellinger(DensityTable(ground, mix_p), DensityTable(ground, mix_q))
    h2_weights = 1.0 - float(np.sqrt(weights_p * weights_q).sum())
    h2_parts = sum(
        w * hellinger(tp, tq)[0] for w, tp, tq in zip(weights_q, tables_p, tables_q)
    )
    return BoundReport(lhs, 2.0 * h2_weights + 2.0 * h2_parts, "mixture bound")


def check_bound_dpp(fam_phi: OrthonormalFamily, spec_lam: Spectrum,
                    fam_psi: OrthonormalFamily, spec_gam: Spectrum) -> list:
    """Distance between two full mixtures against the parameter bound.

    Main report: exact h^2 vs 2[|l-g|^2 + |lc-gc|^2] + 5 sum g_j^2 ||phi_j-psi_j||^2.
    Also returns the two intermediate reports it is assembled from (weight
    distance, weighted component sum). Both parameter sets must have the
    same rank; pad with extra orthonormal columns and zero weights to
    compare unequal ranks.
    """
    if fam_phi.r != spec_lam.r or fam_psi.r != spec_gam.r:
        raise ValueError("family/spectrum rank mismatch")
    if fam_phi.r != fam_psi.r or fam_phi.p != fam_psi.p:
        raise ValueError("families must share p and rank")
    r = spec_lam.r
    lam = spec_lam.values
    gam = spec_gam.values
    weight_term = float(
        np.sum((lam - gam) ** 2)
        + np.sum((spec_lam.checked - spec_gam.checked) ** 2)
    )
    col_dist = np.sum(np.abs(fam_phi.columns - fam_psi.columns) ** 2, axis=0)
    col_term = float(np.sum(gam**2 * col_dist))

    table_phi = density_table(DppDensity(fam_phi, spec_lam))
    table_psi = density_table(DppDensity(fam_psi, spec_gam))
    lhs, _ = hellinger(table_phi, table_psi)

    # weighted sum of component projection distances under the gamma weights
    comp_sum = 0.0
    gam_sq = gam**2
    for k in range(1, r + 1):
        for active in combinations(range(1, r + 1), k):
            inside = np.zeros(r, dtype=bool)
            for j in active:
                inside[j - 1] = True
            w = float(np.prod(np.where(inside, gam_sq, 1.0 - gam_sq)))
            if w == 0.0:
                continue
            da = _det_moduli(fam_phi, active)
            db = _det_moduli(fam_psi, active)
            comp_sum += w * (1.0 - min(float(np.sum(da * db)), 1.0))

    return [
        BoundReport(lhs, 2.0 * weight_term + 5.0 * col_term,
                    "h2 <= parameter distance bound"),
        BoundReport(bernoulli_weight_hellinger(spec_lam, spec_gam), weight_term,
                    "weight h2 <= |lam-gam|^2 + |lam_c-gam_c|^2"),
        BoundReport(comp_sum, 2.5 * col_term,
                    "weighted components <= 2.5 sum gam^2 ||phi-psi||^2"),
    ]
