"""Minimization of the squared residue over bicluster structures.

Three routes: exhaustive scan over the canonical enumeration (exact),
simulated annealing with single row/column label moves, and the fast
alternating reassignment method seeded by one-way k-means.

Annealing converges in probability to a global minimum when the cooling
schedule is non-increasing with limit zero and sum_t exp(-d*/T_t) diverges
for d* the maximum depth of non-global local minima.  The logarithmic
schedule c / log(t + 2) with c >= d* satisfies all three; the geometric
default T0 * ratio^t satisfies only the first two but is what the
experiments use, being vastly faster in practice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import SeededRng
from .backend import kernels
from .core import BlockStructure, DataVector, squared_residue
from .enumeration import rgs_matrix

DEFAULT_T0 = 10.0
DEFAULT_RATIO = 0.99
DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class CoolingSchedule:
    """Temperature sequence: geometric t0 * ratio^t or logarithmic c / log(t+2)."""

    kind: str
    epsilon: float = DEFAULT_EPSILON
    t0: float = DEFAULT_T0
    ratio: float = DEFAULT_RATIO
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("geometric", "logarithmic"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.kind == "geometric":
            if self.t0 <= 0:
                raise ValueError("t0 must be positive")
            if not 0.0 < self.ratio < 1.0:
                raise ValueError("ratio must lie in (0, 1)")
        else:
            if self.c < 0:
                raise ValueError("c must be non-negative")

    @classmethod
    def geometric(cls, t0: float = DEFAULT_T0, ratio: float = DEFAULT_RATIO,
                  epsilon: float = DEFAULT_EPSILON) -> "CoolingSchedule":
        return cls(kind="geometric", t0=t0, ratio=ratio, epsilon=epsilon)

    @classmethod
    def logarithmic(cls, c: float, epsilon: float = DEFAULT_EPSILON) -> "CoolingSchedule":
        return cls(kind="logarithmic", c=c, epsilon=epsilon)

    @property
    def kind_code(self) -> int:
        return 0 if self.kind == "geometric" else 1


@dataclass(frozen=True)
class EstimateResult:
    """A structure estimate with its residue and the work spent finding it."""

    g_hat: BlockStructure
    residue: float
    steps: int
    method: str


def _validate_caps(x: DataVector, K: int, H: int):
    if not (1 <= K <= x.n):
        raise ValueError(f"K must be in [1, n={x.n}], got {K}")
    if not (1 <= H <= x.p):
        raise ValueError(f"H must be in [1, p={x.p}], got {H}")


def _singleton(x: DataVector, K: int, H: int, method: str) -> EstimateResult:
    g = BlockStructure(np.ones(x.n, dtype=np.int64), np.ones(x.p, dtype=np.int64), K, H)
    return EstimateResult(g_hat=g, residue=squared_residue(x, g), steps=0, method=method)


def exact_minimizer(x: DataVector, K: int, H: int) -> EstimateResult:
    """Globally minimal structure; ties go to the first in enumeration order."""
    _validate_caps(x, K, H)
    row_parts = rgs_matrix(x.n, K)
    col_parts = rgs_matrix(x.p, H)
    idx, _ = kernels.residue_scan(x.as_matrix(), row_parts, col_parts, K, H)
    nc = col_parts.shape[0]
    g = BlockStructure(row_parts[idx // nc] + 1, col_parts[idx % nc] + 1, K, H)
    return EstimateResult(
        g_hat=g,
        residue=squared_residue(x, g),
        steps=row_parts.shape[0] * nc,
        method="exact",
    )


def sa_minimizer(x: DataVector, K: int, H: int, schedule: CoolingSchedule | None = None,
                 rng: SeededRng | None = None, max_steps: int = 0) -> EstimateResult:
    """Annealed minimization: uniform pick among the n+p indices, uniform new
    label from the complement, accept worse moves with probability
    exp(-df/T_t), stop once T_t drops below epsilon."""
    _validate_caps(x, K, H)
    if K == 1 and H == 1:
        # no legal move exists
        return _singleton(x, K, H, "sa")
    schedule = schedule or CoolingSchedule.geometric()
    rng = rng if rng is not None else SeededRng.from_seed(0)
    rl, cl, steps, _ = kernels.sa_residue_min(
        np.ascontiguousarray(x.as_matrix()), K, H,
        schedule.kind_code, schedule.t0, schedule.ratio, schedule.c,
        schedule.epsilon, max_steps, np.uint64(rng.spawn().key),
    )
    g = BlockStructure.from_labels(rl, cl, K, H)
    return EstimateResult(g_hat=g, residue=squared_residue(x, g), steps=int(steps), method="sa")


def log_schedule_constant(x: DataVector) -> float:
    """Objective range bound ||x||^2 - (sum x)^2 / np, a valid log-schedule c."""
    total = float(np.sum(x.x))
    return float(x.x @ x.x) - total * total / (x.n * x.p)


def tan_witten_minimizer(x: DataVector, K: int, H: int, rng: SeededRng | None = None,
                         max_passes: int = 200) -> EstimateResult:
    """Alternating row/column reassignment on the mean-centered matrix,
    initialized by one-way k-means on rows and on columns."""
    result, _ = tan_witten_with_trace(x, K, H, rng=rng, max_passes=max_passes)
    return result


def tan_witten_with_trace(x: DataVector, K: int, H: int, rng: SeededRng | None = None,
                          max_passes: int = 200):
    """Alternating minimization plus its fitted-sum-of-squares trace, one
    entry at start and after each half-step (reassign or mean update)."""
    _validate_caps(x, K, H)
    rng = rng if rng is not None else SeededRng.from_seed(0)
    A = x.as_matrix()
    centered = np.ascontiguousarray(A - A.mean())
    init_r, _ = kernels.kmeans_labels(centered, K, np.uint64(rng.spawn().key))
    init_c, _ = kernels.kmeans_labels(np.ascontiguousarray(centered.T), H, np.uint64(rng.spawn().key))
    rl, cl, passes, trace, tlen = kernels.tan_witten_loop(
        centered, init_r, init_c, K, H, max_passes
    )
    g = BlockStructure.from_labels(rl, cl, K, H)
    result = EstimateResult(
        g_hat=g, residue=squared_residue(x, g), steps=int(passes), method="tanwitten"
    )
    return result, np.asarray(trace[:tlen])
