"""Scenario runner: batched trials, metrics, CSV persistence.

A trial draws a Gaussian matrix around block-wise means, estimates the
structure, and computes the selective and naive p-values.  Trials are
deterministic functions of (master seed, scenario name, trial index), so a
run reproduces bit-identically regardless of execution order; rows are
written in trial order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ._rng import SeededRng, derive_key, fnv1a64, gaussian_block, key_from_parts
from .core import BlockStructure, DataVector
from .estimate import (
    CoolingSchedule,
    EstimateResult,
    exact_minimizer,
    sa_minimizer,
    tan_witten_minimizer,
)
from .inference import (
    DegenerateSignalError,
    decompose,
    exact_truncation,
    naive_p_value,
    sa_truncation,
    selective_p_value,
    truncated_f_p_value,
    unknown_variance_statistic,
    unknown_variance_truncation,
)
from .specfun import f_cdf, ks_uniform_statistic

# Block-wise mean matrices of the stock scenarios, keyed by null cluster counts.
DEFAULT_MEAN_MATRICES = {
    (2, 2): [[0.7, 0.55],
             [0.5, 0.6]],
    (3, 2): [[0.7, 0.55],
             [0.5, 0.6],
             [0.55, 0.5]],
    (3, 3): [[0.6, 0.55, 0.7],
             [0.4, 0.6, 0.5],
             [0.65, 0.5, 0.6]],
    (4, 4): [[0.6, 0.55, 0.7, 0.5],
             [0.4, 0.6, 0.5, 0.7],
             [0.65, 0.5, 0.6, 0.4],
             [0.5, 0.4, 0.45, 0.6]],
    (5, 5): [[0.6, 0.55, 0.7, 0.5, 0.65],
             [0.4, 0.6, 0.5, 0.7, 0.55],
             [0.65, 0.5, 0.6, 0.4, 0.45],
             [0.5, 0.4, 0.45, 0.6, 0.7],
             [0.7, 0.65, 0.55, 0.45, 0.6]],
}

CSV_COLUMNS = [
    "trial", "seed", "n", "p", "K", "H", "K_null", "H_null", "level", "estimator",
    "matched_null", "T", "beta", "p_selective", "p_naive", "residue", "degenerate",
    "elapsed_ms",
]

ESTIMATORS = ("exact", "sa", "tanwitten")
TRUNCATIONS = ("exact", "sa")
VARIANCE_MODES = ("known", "unknown")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a batch needs; immutable so trials can share it freely."""

    scenario: str
    n: int
    p: int
    K_null: int
    H_null: int
    K: int
    H: int
    level: int = 1
    sigma0: float = 0.05
    trials: int = 1000
    estimator: str = "exact"
    truncation: str = "exact"
    variance_mode: str = "known"
    t0: float = 10.0
    ratio: float = 0.99
    epsilon: float = 1e-6
    seed: int = 0
    alphas: tuple = (0.1, 0.05, 0.01)
    base_mean_matrix: tuple | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 1 <= self.level <= 5:
            raise ValueError("level must be in 1..5")
        if self.K < 1 or self.H < 1 or self.K_null < 1 or self.H_null < 1:
            raise ValueError("cluster counts must be >= 1")
        if self.K_null > self.n or self.H_null > self.p:
            raise ValueError("null cluster counts cannot exceed the matrix dimensions")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")
        if self.truncation not in TRUNCATIONS:
            raise ValueError(f"truncation must be one of {TRUNCATIONS}")
        if self.variance_mode not in VARIANCE_MODES:
            raise ValueError(f"variance_mode must be one of {VARIANCE_MODES}")
        if self.sigma0 <= 0:
            raise ValueError("sigma0 must be positive")
        base = self.base_mean_matrix
        if base is None:
            key = (self.K_null, self.H_null)
            if key not in DEFAULT_MEAN_MATRICES:
                raise ValueError(
                    f"no stock mean matrix for null cluster counts {key}; "
                    "pass base_mean_matrix explicitly"
                )
            base = DEFAULT_MEAN_MATRICES[key]
        arr = np.asarray(base, dtype=np.float64)
        if arr.shape != (self.K_null, self.H_null):
            raise ValueError(
                f"base mean matrix shape {arr.shape} != null counts "
                f"({self.K_null}, {self.H_null})"
            )
        object.__setattr__(self, "base_mean_matrix", tuple(map(tuple, arr.tolist())))

    @property
    def mean_matrix(self) -> np.ndarray:
        return np.asarray(self.base_mean_matrix, dtype=np.float64)

    def schedule(self) -> CoolingSchedule:
        return CoolingSchedule.geometric(t0=self.t0, ratio=self.ratio, epsilon=self.epsilon)


@dataclass(frozen=True)
class TrialRecord:
    """One trial's outputs, mirroring the CSV schema."""

    trial: int
    seed: int
    n: int
    p: int
    K: int
    H: int
    K_null: int
    H_null: int
    level: int
    estimator: str
    matched_null: bool
    T: float
    beta: float
    p_selective: float
    p_naive: float
    residue: float
    degenerate: bool
    elapsed_ms: float


def null_memberships(n: int, p: int, K_null: int, H_null: int) -> BlockStructure:
    """Round-robin memberships: row i gets cluster (i mod K_null) + 1, canonicalized."""
    if K_null > n or H_null > p:
        raise ValueError("cluster counts cannot exceed dimensions")
    rows = (np.arange(1, n + 1) % K_null) + 1
    cols = (np.arange(1, p + 1) % H_null) + 1
    return BlockStructure.from_labels(rows, cols, K_null, H_null)


def mean_vector(level: int, base_mean_matrix, g_null: BlockStructure) -> np.ndarray:
    """Per-entry means, shrunk toward 0.5 by (1 - (level-1)/5), vector layout."""
    if not 1 <= level <= 5:
        raise ValueError("level must be in 1..5")
    base = np.asarray(base_mean_matrix, dtype=np.float64)
    shrink = 1.0 - (level - 1) / 5.0
    block_means = shrink * (base - 0.5) + 0.5
    full = block_means[g_null.row_labels - 1][:, g_null.col_labels - 1]
    return full.T.ravel()


def _trial_key(config: ScenarioConfig, trial_index: int) -> int:
    return key_from_parts(config.seed, fnv1a64(config.scenario), trial_index)


def generate_trial(config: ScenarioConfig, trial_index: int) -> DataVector:
    """The trial's data vector: block means plus sigma0 * N(0, I) noise."""
    g_null = null_memberships(config.n, config.p, config.K_null, config.H_null)
    mu = mean_vector(config.level, config.mean_matrix, g_null)
    data_key = derive_key(_trial_key(config, trial_index), 0)
    noise = gaussian_block(data_key, config.n * config.p)
    return DataVector(n=config.n, p=config.p, x=mu + config.sigma0 * noise)


def _estimate(config: ScenarioConfig, x: DataVector, trial_key: int) -> EstimateResult:
    if config.estimator == "exact":
        return exact_minimizer(x, config.K, config.H)
    rng = SeededRng(key=derive_key(trial_key, 1))
    if config.estimator == "sa":
        return sa_minimizer(x, config.K, config.H, schedule=config.schedule(), rng=rng)
    return tan_witten_minimizer(x, config.K, config.H, rng=rng)


def _run_trial(config: ScenarioConfig, g_null: BlockStructure, mu: np.ndarray,
               trial_index: int) -> TrialRecord:
    trial_key = _trial_key(config, trial_index)
    data_key = derive_key(trial_key, 0)
    noise = gaussian_block(data_key, config.n * config.p)
    x = DataVector(n=config.n, p=config.p, x=mu + config.sigma0 * noise)

    started = time.perf_counter()
    est = _estimate(config, x, trial_key)
    matched = est.g_hat == g_null

    degenerate = False
    if config.variance_mode == "known":
        try:
            decomp = decompose(x, est.g_hat, config.sigma0)
            if config.truncation == "exact":
                trunc = exact_truncation(decomp, est.g_hat, config.K, config.H, config.sigma0)
            else:
                trunc = sa_truncation(
                    decomp, est.g_hat, config.K, config.H, config.sigma0,
                    schedule=config.schedule(), rng=SeededRng(key=derive_key(trial_key, 2)),
                )
            T = decomp.T
            beta = trunc.beta
            p_sel = selective_p_value(decomp.T, decomp.dof, trunc.beta)
            p_nai = naive_p_value(decomp.T, decomp.dof)
        except DegenerateSignalError:
            degenerate = True
            T, beta, p_sel, p_nai = 0.0, math.inf, 1.0, 1.0
    else:
        try:
            pieces = unknown_variance_statistic(x, est.g_hat, config.K, config.H)
            intervals = unknown_variance_truncation(pieces, est.g_hat, config.K, config.H)
            T = pieces.T_F
            beta = intervals[-1][1] if intervals else math.inf
            p_sel = truncated_f_p_value(pieces.T_F, pieces.d1, pieces.d2, intervals)
            p_nai = 1.0 - f_cdf(pieces.d2, pieces.d1, pieces.T_F)
        except DegenerateSignalError:
            degenerate = True
            T, beta, p_sel, p_nai = 0.0, math.inf, 1.0, 1.0
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    return TrialRecord(
        trial=trial_index, seed=trial_key, n=config.n, p=config.p, K=config.K, H=config.H,
        K_null=config.K_null, H_null=config.H_null, level=config.level,
        estimator=config.estimator, matched_null=bool(matched), T=float(T),
        beta=float(beta), p_selective=float(p_sel), p_naive=float(p_nai),
        residue=float(est.residue), degenerate=degenerate, elapsed_ms=elapsed_ms,
    )


def run_scenario(config: ScenarioConfig) -> list[TrialRecord]:
    """All trials of a scenario, in trial order; per-trial failures never abort."""
    if config.variance_mode == "unknown" and config.truncation == "sa":
        raise ValueError("the unknown-variance truncation is grid-based; use truncation='exact'")
    g_null = null_memberships(config.n, config.p, config.K_null, config.H_null)
    mu = mean_vector(config.level, config.mean_matrix, g_null)
    return [_run_trial(config, g_null, mu, i) for i in range(config.trials)]


@dataclass(frozen=True)
class Summary:
    """Batch metrics: rejection rates per significance level, accuracy, uniformity."""

    total: int
    null_trials: int
    alternative_trials: int
    degenerate_trials: int
    accuracy: float
    fpr_selective: dict
    fpr_naive: dict
    tpr_selective: dict
    tpr_naive: dict
    ks_selective: float | None
    ks_naive: float | None

    def to_json_dict(self) -> dict:
        def enc(v):
            if v is None:
                return None
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            return v
        return {
            "counts": {
                "total": self.total,
                "null": self.null_trials,
                "alternative": self.alternative_trials,
                "degenerate": self.degenerate_trials,
            },
            "accuracy": self.accuracy,
            "fpr_selective": {str(a): enc(v) for a, v in self.fpr_selective.items()},
            "fpr_naive": {str(a): enc(v) for a, v in self.fpr_naive.items()},
            "tpr_selective": {str(a): enc(v) for a, v in self.tpr_selective.items()},
            "tpr_naive": {str(a): enc(v) for a, v in self.tpr_naive.items()},
            "ks_selective": enc(self.ks_selective),
            "ks_naive": enc(self.ks_naive),
        }


def summarize(records: list[TrialRecord], alphas=(0.1, 0.05, 0.01)) -> Summary:
    """Rates over null (structure matched) and alternative trials.

    Metrics with an empty denominator are reported as absent rather than 0.
    """
    if not records:
        raise ValueError("records must be non-empty")
    nulls = [r for r in records if r.matched_null]
    alts = [r for r in records if not r.matched_null]

    def rate(rs, alpha, attr):
        if not rs:
            return None
        return sum(1 for r in rs if getattr(r, attr) <= alpha) / len(rs)

    fpr_sel = {a: rate(nulls, a, "p_selective") for a in alphas}
    fpr_nai = {a: rate(nulls, a, "p_naive") for a in alphas}
    tpr_sel = {a: rate(alts, a, "p_selective") for a in alphas}
    tpr_nai = {a: rate(alts, a, "p_naive") for a in alphas}
    ks_sel = ks_uniform_statistic([r.p_selective for r in nulls]) if nulls else None
    ks_nai = ks_uniform_statistic([r.p_naive for r in nulls]) if nulls else None
    return Summary(
        total=len(records),
        null_trials=len(nulls),
        alternative_trials=len(alts),
        degenerate_trials=sum(1 for r in records if r.degenerate),
        accuracy=len(nulls) / len(records),
        fpr_selective=fpr_sel,
        fpr_naive=fpr_nai,
        tpr_selective=tpr_sel,
        tpr_naive=tpr_nai,
        ks_selective=ks_sel,
        ks_naive=ks_nai,
    )


def _fmt_float(v: float) -> str:
    if math.isinf(v):
        return "inf"
    return repr(float(v))


def write_records_csv(path, records: list[TrialRecord]):
    """Persist records under the fixed schema; floats round-trip exactly."""
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in records:
            row = [
                str(r.trial), str(r.seed), str(r.n), str(r.p), str(r.K), str(r.H),
                str(r.K_null), str(r.H_null), str(r.level), r.estimator,
                "1" if r.matched_null else "0",
                _fmt_float(r.T), _fmt_float(r.beta), _fmt_float(r.p_selective),
                _fmt_float(r.p_naive), _fmt_float(r.residue),
                "1" if r.degenerate else "0", _fmt_float(r.elapsed_ms),
            ]
            fh.write(",".join(row) + "\n")


def read_records_csv(path) -> list[TrialRecord]:
    records = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header: {header}")
        for line in fh:
            vals = line.strip().split(",")
            if len(vals) != len(CSV_COLUMNS):
                raise ValueError(f"malformed CSV row: {line!r}")
            d = dict(zip(CSV_COLUMNS, vals))
            records.append(TrialRecord(
                trial=int(d["trial"]), seed=int(d["seed"]), n=int(d["n"]), p=int(d["p"]),
                K=int(d["K"]), H=int(d["H"]), K_null=int(d["K_null"]),
                H_null=int(d["H_null"]), level=int(d["level"]), estimator=d["estimator"],
                matched_null=d["matched_null"] == "1", T=float(d["T"]),
                beta=float(d["beta"]), p_selective=float(d["p_selective"]),
                p_naive=float(d["p_naive"]), residue=float(d["residue"]),
                degenerate=d["degenerate"] == "1", elapsed_ms=float(d["elapsed_ms"]),
            ))
    return records


SCENARIO_DEFAULTS = {
    "realizable": dict(K_null=2, H_null=2, K=2, H=2, estimator="exact",
                       truncation="exact", level=1),
    "unrealizable": dict(K_null=3, H_null=2, K=2, H=2, estimator="exact",
                         truncation="exact", level=1),
    "approx": dict(K_null=2, H_null=2, K=2, H=2, estimator="sa",
                   truncation="sa", level=1),
    "sensitivity": dict(K_null=2, H_null=2, K=2, H=2, estimator="sa",
                        truncation="sa", level=3),
}


def make_config(scenario: str, n: int, p: int, **overrides) -> ScenarioConfig:
    """Scenario defaults merged with explicit overrides."""
    if scenario not in SCENARIO_DEFAULTS:
        raise ValueError(f"unknown scenario {scenario!r}")
    params = dict(SCENARIO_DEFAULTS[scenario])
    params.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig(scenario=scenario, n=n, p=p, **params)
