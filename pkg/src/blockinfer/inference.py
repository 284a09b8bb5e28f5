"""Post-selection tests on an estimated bicluster structure.

Known variance: the scaled residual norm, conditioned on the estimate and on
the residual direction and block-mean parts of the data, follows a chi law
with np - (#occupied blocks) degrees of freedom truncated to [0, beta], where
beta is the smallest positive boundary root over competing structures.  The
competing constraint for candidate g is the quadratic
a t^2 + b t + c >= 0 with

    a = -sigma0^2 ||(I - E_g) u||^2 <= 0,
    b = 2 sigma0 u' E_g z,
    c = ||E_g z||^2 >= 0,

so candidates with a = 0 always hold (then b = 0 too) and are skipped.

Unknown variance: splitting the residual into its reference-block part and
the rest gives an F statistic whose truncation set is characterized
numerically on a probe grid, since the selection inequality is no longer
quadratic in t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import SeededRng
from .backend import kernels
from .core import BlockStructure, DataVector, block_sum_matrix, residual_vector
from .enumeration import count_structures, rgs_matrix
from .estimate import CoolingSchedule
from .specfun import f_cdf, f_quantile, reg_lower_gamma

A_ZERO_TOL = 1e-12      # on ||(I-E_g)u||^2, which lives in [0, 1]
DEGENERATE_REL_TOL = 1e-12


class DegenerateSignalError(ValueError):
    """The residual vanished: the data is exactly block-constant under the
    estimate.  Measure-zero under the model; p-value 1 by convention."""


@dataclass(frozen=True)
class Decomposition:
    """Split of x against an estimate: x = sigma0 * T * u + z."""

    r: np.ndarray
    u: np.ndarray
    z: np.ndarray
    T: float
    dof: int
    sigma0: float

    @property
    def r_norm(self) -> float:
        return self.T * self.sigma0


@dataclass(frozen=True)
class QuadCoeffs:
    """Selection-constraint quadratic for one candidate: a t^2 + b t + c >= 0."""

    a: float
    b: float
    c: float

    @property
    def always_holds(self) -> bool:
        return self.a == 0.0


@dataclass(frozen=True)
class TruncationResult:
    """Upper boundary of the selection interval and the structure attaining it."""

    beta: float
    g_tilde: BlockStructure | None
    candidates_scanned: int


def decompose(x: DataVector, g_hat: BlockStructure, sigma0: float) -> Decomposition:
    """Residual direction, magnitude, and block-mean part of x under g_hat."""
    if sigma0 <= 0:
        raise ValueError(f"sigma0 must be positive, got {sigma0}")
    if (x.n, x.p) != (g_hat.n, g_hat.p):
        raise ValueError("data and structure shapes differ")
    r = residual_vector(x, g_hat)
    r_norm = float(np.linalg.norm(r))
    if r_norm <= DEGENERATE_REL_TOL * max(1.0, float(np.linalg.norm(x.x))):
        raise DegenerateSignalError("residual is numerically zero")
    u = r / r_norm
    z = x.x - r
    dof = x.n * x.p - g_hat.occupied_blocks
    return Decomposition(r=r, u=u, z=z, T=r_norm / sigma0, dof=dof, sigma0=sigma0)


def _block_quadratics(u: np.ndarray, z: np.ndarray, g: BlockStructure):
    """(su, suz, sz): block-sum quadratic forms of u and z against g."""
    n, p = g.n, g.p
    um = u.reshape((p, n)).T
    zm = z.reshape((p, n)).T
    r0, c0 = g.row_labels - 1, g.col_labels - 1
    su_sums, counts = block_sum_matrix(um, r0, c0, g.K, g.H)
    sz_sums, _ = block_sum_matrix(zm, r0, c0, g.K, g.H)
    occ = counts > 0
    cnt = counts[occ].astype(np.float64)
    su = float(np.sum(su_sums[occ] ** 2 / cnt))
    suz = float(np.sum(su_sums[occ] * sz_sums[occ] / cnt))
    sz = float(np.sum(sz_sums[occ] ** 2 / cnt))
    return su, suz, sz


def truncation_coeffs(u: np.ndarray, z: np.ndarray, g: BlockStructure,
                      g_hat: BlockStructure, sigma0: float) -> QuadCoeffs:
    """Quadratic coefficients of candidate g's selection constraint."""
    su, suz, sz = _block_quadratics(u, z, g)
    z_sq = float(z @ z)
    if su <= A_ZERO_TOL:
        return QuadCoeffs(a=0.0, b=-2.0 * sigma0 * suz, c=max(z_sq - sz, 0.0))
    return QuadCoeffs(
        a=-sigma0 * sigma0 * su,
        b=-2.0 * sigma0 * suz,
        c=max(z_sq - sz, 0.0),
    )


def boundary_root(coeffs: QuadCoeffs, sigma0: float) -> float:
    """Positive root (-b - sqrt(b^2 - 4ac)) / 2a of a feasible constraint."""
    if coeffs.always_holds:
        return math.inf
    su = -coeffs.a / (sigma0 * sigma0)
    suz = -coeffs.b / (2.0 * sigma0)
    cg = coeffs.c
    return (math.sqrt(suz * suz + su * cg) - suz) / (sigma0 * su)


def exact_truncation(decomp: Decomposition, g_hat: BlockStructure, K: int, H: int,
                     sigma0: float) -> TruncationResult:
    """Scan every candidate structure for the smallest boundary root."""
    n, p = g_hat.n, g_hat.p
    row_parts = rgs_matrix(n, K)
    col_parts = rgs_matrix(p, H)
    u_mat = np.ascontiguousarray(decomp.u.reshape((p, n)).T)
    z_mat = np.ascontiguousarray(decomp.z.reshape((p, n)).T)
    z_sq = float(decomp.z @ decomp.z)
    _, idx, scanned = kernels.truncation_scan(
        u_mat, z_mat, z_sq, sigma0, row_parts, col_parts, K, H
    )
    if idx < 0:
        return TruncationResult(beta=math.inf, g_tilde=None, candidates_scanned=scanned)
    nc = col_parts.shape[0]
    g_tilde = BlockStructure(row_parts[idx // nc] + 1, col_parts[idx % nc] + 1, K, H)
    beta = boundary_root(truncation_coeffs(decomp.u, decomp.z, g_tilde, g_hat, sigma0), sigma0)
    return TruncationResult(beta=beta, g_tilde=g_tilde, candidates_scanned=scanned)


def sa_truncation(decomp: Decomposition, g_hat: BlockStructure, K: int, H: int,
                  sigma0: float, schedule: CoolingSchedule | None = None,
                  rng: SeededRng | None = None, max_steps: int = 0) -> TruncationResult:
    """Annealed search for the boundary-attaining structure.

    Moves resample a random-size subset of row/column labels (size 1 with
    probability 1/2 + 2^-(n+p), size s with probability 2^-s); infeasible
    candidates carry objective +inf so they never displace a feasible state.
    The returned bound is the final state's root, always >= the exact one.
    """
    schedule = schedule or CoolingSchedule.geometric()
    rng = rng if rng is not None else SeededRng.from_seed(0)
    n, p = g_hat.n, g_hat.p
    u_mat = np.ascontiguousarray(decomp.u.reshape((p, n)).T)
    z_mat = np.ascontiguousarray(decomp.z.reshape((p, n)).T)
    z_sq = float(decomp.z @ decomp.z)
    rl, cl, steps, beta_raw, _ = kernels.sa_truncation(
        u_mat, z_mat, z_sq, sigma0, K, H,
        schedule.kind_code, schedule.t0, schedule.ratio, schedule.c,
        schedule.epsilon, max_steps, np.uint64(rng.spawn().key),
    )
    if math.isinf(beta_raw):
        return TruncationResult(beta=math.inf, g_tilde=None, candidates_scanned=int(steps))
    g_tilde = BlockStructure.from_labels(rl + 1, cl + 1, K, H)
    beta = boundary_root(truncation_coeffs(decomp.u, decomp.z, g_tilde, g_hat, sigma0), sigma0)
    return TruncationResult(beta=beta, g_tilde=g_tilde, candidates_scanned=int(steps))


def selective_p_value(T: float, dof: int, beta: float) -> float:
    """Upper-tail probability of the truncated chi law at T.

    1 - P(dof/2, T^2/2) / P(dof/2, beta^2/2) on [0, beta]; 0 past the
    boundary; the naive value when beta is infinite.
    """
    if dof < 1:
        raise ValueError(f"dof must be >= 1, got {dof}")
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    if T > beta:
        return 0.0
    num = reg_lower_gamma(dof / 2.0, T * T / 2.0)
    den = 1.0 if math.isinf(beta) else reg_lower_gamma(dof / 2.0, beta * beta / 2.0)
    if den <= 0.0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - num / den))


def naive_p_value(T: float, dof: int) -> float:
    """Upper-tail probability of the untruncated chi law at T."""
    if dof < 1:
        raise ValueError(f"dof must be >= 1, got {dof}")
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    return min(1.0, max(0.0, 1.0 - reg_lower_gamma(dof / 2.0, T * T / 2.0)))


@dataclass(frozen=True)
class FTestPieces:
    """Components of the unknown-variance statistic.

    The residual splits orthogonally into its part on the reference block's
    entries (r1, d1 degrees of freedom) and the rest (r2, d2 degrees of
    freedom).  T_F = (||r2||^2 / d2) / (||r1||^2 / d1) is F-distributed with
    numerator df d2 and denominator df d1 under the null; c_ratio = d2/d1 so
    that c_ratio * T_F recovers the raw energy ratio used by the direction
    reconstruction u = u1/sqrt(cT+1) + sqrt(cT/(cT+1)) u2.
    """

    d1: int
    d2: int
    c_ratio: float
    T_F: float
    u1: np.ndarray
    u2: np.ndarray
    z: np.ndarray
    r_norm: float
    block: tuple[int, int]
    block_cells: int


def _reference_block(g_hat: BlockStructure, choice: str) -> tuple[int, int]:
    if choice == "first":
        return 1, 1
    if choice == "largest":
        row_sizes = np.bincount(g_hat.row_labels)[1:]
        col_sizes = np.bincount(g_hat.col_labels)[1:]
        k = int(np.argmax(row_sizes)) + 1
        h = int(np.argmax(col_sizes)) + 1
        return k, h
    raise ValueError(f"block choice must be 'first' or 'largest', got {choice!r}")


def unknown_variance_statistic(x: DataVector, g_hat: BlockStructure, K: int, H: int,
                               block: str = "first") -> FTestPieces:
    """F statistic pieces from the orthogonal residual split.

    Under canonical labels the "first" reference block is the one containing
    row 1 and column 1; "largest" picks the best-conditioned block instead
    (any estimate-measurable choice preserves validity).
    """
    n, p = x.n, x.p
    k_ref, h_ref = _reference_block(g_hat, block)
    in_rows = g_hat.row_labels == k_ref
    in_cols = g_hat.col_labels == h_ref
    mask = np.outer(in_cols, in_rows).ravel()  # vector layout: j-major
    cells = int(mask.sum())
    occupied = g_hat.occupied_blocks
    d1 = cells - 1
    d2 = n * p - occupied - cells + 1
    if d1 < 1:
        raise ValueError(f"reference block must hold >= 2 cells, got {cells}")
    if d2 < 1:
        raise ValueError(f"residual degrees of freedom d2 = {d2} < 1")
    r = residual_vector(x, g_hat)
    r1 = np.where(mask, r, 0.0)
    r2 = r - r1
    r1_norm = float(np.linalg.norm(r1))
    r2_norm = float(np.linalg.norm(r2))
    if r1_norm <= DEGENERATE_REL_TOL * max(1.0, float(np.linalg.norm(x.x))):
        raise DegenerateSignalError("reference-block residual is numerically zero")
    c_ratio = d2 / d1
    T_F = (r2_norm * r2_norm) / (r1_norm * r1_norm) / c_ratio
    u1 = r1 / r1_norm
    u2 = r2 / r2_norm if r2_norm > 0 else np.zeros_like(r2)
    return FTestPieces(
        d1=d1, d2=d2, c_ratio=c_ratio, T_F=T_F, u1=u1, u2=u2,
        z=x.x - r, r_norm=float(np.linalg.norm(r)),
        block=(k_ref, h_ref), block_cells=cells,
    )


class _SelectionOracle:
    """Membership predicate: does the estimate stay optimal at probe point t?"""

    def __init__(self, pieces: FTestPieces, g_hat: BlockStructure, K: int, H: int):
        self.pieces = pieces
        self.n, self.p = g_hat.n, g_hat.p
        self.K, self.H = K, H
        self.row_parts = rgs_matrix(self.n, K)
        self.col_parts = rgs_matrix(self.p, H)
        nc = self.col_parts.shape[0]
        row_index = {r.tobytes(): i for i, r in enumerate(self.row_parts)}
        col_index = {c.tobytes(): i for i, c in enumerate(self.col_parts)}
        r_key = np.ascontiguousarray(g_hat.row_labels - 1).tobytes()
        c_key = np.ascontiguousarray(g_hat.col_labels - 1).tobytes()
        self.hat_flat = row_index[r_key] * nc + col_index[c_key]

    def state_at(self, t: float) -> np.ndarray:
        pc = self.pieces
        ct = pc.c_ratio * t
        vec = pc.r_norm * (pc.u1 / math.sqrt(ct + 1.0)
                           + math.sqrt(ct / (ct + 1.0)) * pc.u2) + pc.z
        return np.ascontiguousarray(vec.reshape((self.p, self.n)).T)

    def member(self, t: float) -> bool:
        idx, _ = kernels.residue_scan(
            self.state_at(t), self.row_parts, self.col_parts, self.K, self.H
        )
        return idx == self.hat_flat


def unknown_variance_truncation(pieces: FTestPieces, g_hat: BlockStructure, K: int,
                                H: int, grid_points: int = 512) -> list[tuple[float, float]]:
    """Selection set of the F statistic as a union of disjoint intervals.

    The membership predicate is evaluated on a geometric probe grid up to the
    far F quantile (at least 4 * T_F) and each sign change is refined by
    bisection to 1e-9 relative; membership persisting at the top of the grid
    extends the final interval to +inf (the probe path converges there and
    the neglected F mass is below 1e-12).
    """
    if count_structures(g_hat.n, g_hat.p, K, H) == 1:
        # singleton family: the estimate is selected at every t
        return [(0.0, math.inf)]
    oracle = _SelectionOracle(pieces, g_hat, K, H)
    t_max = max(f_quantile(pieces.d2, pieces.d1, 1.0 - 1e-12), 4.0 * pieces.T_F, 1.0)
    t_min = t_max * 1e-9
    grid = np.geomspace(t_min, t_max, grid_points)
    grid = np.unique(np.concatenate(([0.0], grid, [pieces.T_F])))
    member = np.array([oracle.member(t) for t in grid], dtype=bool)

    def refine(lo: float, hi: float, lo_member: bool) -> float:
        # boundary between a member and a non-member point
        for _ in range(200):
            if hi - lo <= 1e-9 * max(1.0, hi):
                break
            mid = 0.5 * (lo + hi)
            if oracle.member(mid) == lo_member:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    intervals: list[tuple[float, float]] = []
    i = 0
    m = grid.size
    while i < m:
        if not member[i]:
            i += 1
            continue
        j = i
        while j + 1 < m and member[j + 1]:
            j += 1
        lo = grid[i] if i == 0 else refine(grid[i - 1], grid[i], False)
        hi = math.inf if j == m - 1 else refine(grid[j], grid[j + 1], True)
        intervals.append((float(lo), float(hi)))
        i = j + 1
    return intervals


def truncated_f_p_value(T_F: float, d1: int, d2: int,
                        intervals: list[tuple[float, float]]) -> float:
    """Survival mass of the statistic's null law over the selection set
    beyond T_F.  The law is F with numerator df d2 and denominator df d1
    (the arguments keep the statistic's own block/complement order)."""
    def mass(lo: float, hi: float) -> float:
        top = 1.0 if math.isinf(hi) else f_cdf(d2, d1, hi)
        return max(0.0, top - f_cdf(d2, d1, lo))

    slack = 1e-9 * max(1.0, T_F)
    if not any(lo - slack <= T_F <= hi + slack for lo, hi in intervals):
        raise ValueError("observed statistic lies outside the truncation set")
    total = sum(mass(lo, hi) for lo, hi in intervals)
    if total <= 0.0:
        raise ValueError("truncation set carries no F mass")
    tail = sum(mass(max(lo, T_F), hi) for lo, hi in intervals if hi >= T_F)
    return min(1.0, max(0.0, tail / total))
