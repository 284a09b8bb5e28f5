"""Data representation and block-sum algebra.

A bicluster structure assigns every row to one of K row clusters and every
column to one of H column clusters; the induced mean-removal projector is
never materialized (except by the test-only helper at the bottom).  All
quadratic forms go through per-block sums, which costs O(np) per evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MATERIALIZE_GUARD = 400  # hard cap on np for the dense test-only projector


class ShapeError(ValueError):
    """Incompatible matrix/vector/structure shapes."""


def _as_float_matrix(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.size < 1:
        raise ShapeError(f"expected a 2-D matrix with at least one entry, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


@dataclass(frozen=True)
class DataMatrix:
    """Observed n x p real matrix."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_matrix(self.values))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class DataVector:
    """Column-major vectorization of a DataMatrix, with shape metadata.

    Index map: entry (i, j) of the matrix (1-based) lands at position
    n*(j-1) + i of the vector.
    """

    n: int
    p: int
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64).ravel()
        if self.n < 1 or self.p < 1:
            raise ShapeError("n and p must be >= 1")
        if x.size != self.n * self.p:
            raise ShapeError(f"vector length {x.size} != n*p = {self.n * self.p}")
        object.__setattr__(self, "x", x)

    def as_matrix(self) -> np.ndarray:
        """The n x p matrix view (inverse of the column-major map)."""
        return self.x.reshape((self.p, self.n)).T


def vectorize(A: DataMatrix) -> DataVector:
    """Stack columns of A into one vector (column-major order)."""
    return DataVector(n=A.n, p=A.p, x=A.values.T.ravel())


def devectorize(v: DataVector) -> DataMatrix:
    """Inverse of :func:`vectorize`; bit-exact round trip."""
    return DataMatrix(values=v.as_matrix().copy())


def canonical_labels(labels) -> np.ndarray:
    """Relabel clusters in first-occurrence order (1-based restricted growth)."""
    labels = np.asarray(labels)
    out = np.empty(labels.size, dtype=np.int64)
    seen: dict = {}
    for t, v in enumerate(labels.tolist()):
        out[t] = seen.setdefault(v, len(seen) + 1)
    return out


def is_canonical(labels: np.ndarray) -> bool:
    top = 0
    for v in labels.tolist():
        if v < 1 or v > top + 1:
            return False
        top = max(top, v)
    return True


@dataclass(frozen=True)
class BlockStructure:
    """Canonical pair of row/column cluster memberships under caps (K, H).

    Labels are 1-based and in restricted-growth form: the first occurrence of
    label k precedes the first occurrence of k+1, which makes equality up to
    cluster relabeling a plain array comparison.
    """

    row_labels: np.ndarray
    col_labels: np.ndarray
    K: int
    H: int

    def __post_init__(self):
        r = np.asarray(self.row_labels, dtype=np.int64)
        c = np.asarray(self.col_labels, dtype=np.int64)
        if r.size < 1 or c.size < 1:
            raise ShapeError("label vectors must be non-empty")
        if not is_canonical(r) or not is_canonical(c):
            raise ValueError("labels are not in canonical restricted-growth form")
        if r.max() > self.K:
            raise ValueError(f"row labels use {r.max()} clusters, cap is {self.K}")
        if c.max() > self.H:
            raise ValueError(f"col labels use {c.max()} clusters, cap is {self.H}")
        r.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "row_labels", r)
        object.__setattr__(self, "col_labels", c)

    @classmethod
    def from_labels(cls, row_labels, col_labels, K: int, H: int) -> "BlockStructure":
        """Canonicalize arbitrary label vectors and wrap them."""
        return cls(canonical_labels(row_labels), canonical_labels(col_labels), K, H)

    @property
    def n(self) -> int:
        return self.row_labels.size

    @property
    def p(self) -> int:
        return self.col_labels.size

    @property
    def n_row_clusters(self) -> int:
        return int(self.row_labels.max())

    @property
    def n_col_clusters(self) -> int:
        return int(self.col_labels.max())

    @property
    def occupied_blocks(self) -> int:
        return self.n_row_clusters * self.n_col_clusters

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlockStructure):
            return NotImplemented
        return (
            np.array_equal(self.row_labels, other.row_labels)
            and np.array_equal(self.col_labels, other.col_labels)
        )

    def __hash__(self):
        return hash((self.row_labels.tobytes(), self.col_labels.tobytes()))


@dataclass(frozen=True)
class BlockSums:
    """Per-block entry sums and cell counts; empty blocks hold zeros."""

    sums: np.ndarray    # (K, H)
    counts: np.ndarray  # (K, H) integer


@dataclass(frozen=True)
class BlockMeans:
    """Per-block arithmetic means; empty blocks hold NaN."""

    means: np.ndarray   # (K, H)
    counts: np.ndarray


def _check_compatible(v: np.ndarray, g: BlockStructure):
    if v.size != g.n * g.p:
        raise ShapeError(f"vector length {v.size} != structure size {g.n * g.p}")


def block_sum_matrix(values: np.ndarray, row_labels0: np.ndarray, col_labels0: np.ndarray,
                     K: int, H: int) -> tuple[np.ndarray, np.ndarray]:
    """Sums and counts over the K*H blocks of an n x p matrix (0-based labels)."""
    flat = row_labels0[:, None] * H + col_labels0[None, :]
    sums = np.bincount(flat.ravel(), weights=values.ravel(), minlength=K * H)
    counts = np.bincount(flat.ravel(), minlength=K * H)
    return sums.reshape(K, H), counts.reshape(K, H)


def block_sums(x: DataVector, g: BlockStructure) -> BlockSums:
    """Entry sums S_kh over each block of the structure."""
    _check_compatible(x.x, g)
    sums, counts = block_sum_matrix(
        x.as_matrix(), g.row_labels - 1, g.col_labels - 1, g.K, g.H
    )
    return BlockSums(sums=sums, counts=counts)


def block_mean_mle(x: DataVector, g: BlockStructure) -> BlockMeans:
    """Per-block arithmetic mean, the likelihood-maximizing mean estimate."""
    bs = block_sums(x, g)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(bs.counts > 0, bs.sums / np.maximum(bs.counts, 1), np.nan)
    return BlockMeans(means=means, counts=bs.counts)


def projected_quadratic(v, w, g: BlockStructure) -> float:
    """v' E w for the implicit mean-removal projector E of structure g.

    Computed as v.w - sum_kh S_v(k,h) S_w(k,h) / (|I_k||J_h|) without
    materializing E; bilinear, symmetric, and >= 0 when v = w.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    w = np.asarray(w, dtype=np.float64).ravel()
    _check_compatible(v, g)
    _check_compatible(w, g)
    r0, c0 = g.row_labels - 1, g.col_labels - 1
    vm = v.reshape((g.p, g.n)).T
    wm = w.reshape((g.p, g.n)).T
    sv, cnt = block_sum_matrix(vm, r0, c0, g.K, g.H)
    sw, _ = block_sum_matrix(wm, r0, c0, g.K, g.H)
    occ = cnt > 0
    return float(v @ w - np.sum(sv[occ] * sw[occ] / cnt[occ]))


def squared_residue(x: DataVector, g: BlockStructure) -> float:
    """Average within-block sample variance: x' E x / (np)."""
    return projected_quadratic(x.x, x.x, g) / (g.n * g.p)


def residual_vector(x: DataVector, g: BlockStructure) -> np.ndarray:
    """E x: the data minus its per-block means, in vector layout."""
    _check_compatible(x.x, g)
    bm = block_mean_mle(x, g)
    means = np.where(np.isnan(bm.means), 0.0, bm.means)
    fitted = means[g.row_labels - 1][:, g.col_labels - 1]
    return x.x - fitted.T.ravel()


def materialize_projection(g: BlockStructure) -> np.ndarray:
    """Dense np x np mean-removal projector; test support only (np <= 400)."""
    n, p = g.n, g.p
    if n * p > MATERIALIZE_GUARD:
        raise ValueError(f"materialization guard exceeded: np = {n * p} > {MATERIALIZE_GUARD}")
    E = np.eye(n * p)
    for k in range(1, g.n_row_clusters + 1):
        rbar = (g.row_labels == k).astype(np.float64)
        rbar /= np.sqrt(rbar.sum())
        for h in range(1, g.n_col_clusters + 1):
            cbar = (g.col_labels == h).astype(np.float64)
            cbar /= np.sqrt(cbar.sum())
            e_kh = np.kron(cbar, rbar)
            E -= np.outer(e_kh, e_kh)
    return E


def load_matrix_csv(path) -> DataMatrix:
    """Read a headerless CSV of numbers as a DataMatrix."""
    arr = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    return DataMatrix(values=arr)


def save_matrix_csv(path, A: DataMatrix):
    """Write a DataMatrix as headerless CSV with round-trip-exact decimals."""
    with open(path, "w") as fh:
        for row in A.values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
