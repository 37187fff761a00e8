"""Agglomerative clustering under the Ward criterion.

Implementation is the nearest-neighbor-chain algorithm over squared
Euclidean distances, updated with the Lance-Williams recurrence

    d(i+j, k) = [(n_i+n_k) d(i,k) + (n_j+n_k) d(j,k) - n_k d(i,j)]
                / (n_i + n_j + n_k)

Two storage modes: "matrix" keeps the condensed pairwise matrix in memory
(float64 up to 8192 items, float32 above, about 512 MB at 16k); "centroid"
recomputes rows on demand from cluster centroids and fits any n at O(n^2 d)
time.  Both produce the same merge tree up to floating-point noise.

The merge list is canonicalized to non-decreasing height order and node ids
are relabeled accordingly: leaves are 0..n-1, the t-th merge is node n+t.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from sklearn.base import BaseEstimator

from captionlens.errors import DataError
from captionlens.validation import as_float_matrix, check_positive_int

if TYPE_CHECKING:
    from captionlens.corpus.embeddings import EmbeddingSpace

__all__ = ["Merge", "Dendrogram", "ward_linkage", "ward_cluster", "cut_labels", "WardClustering"]

# above this, the condensed matrix drops to float32 to stay around 512 MB
_FLOAT64_MAX_ITEMS = 8192
_AUTO_MATRIX_MAX_ITEMS = 20000
_PDIST_BLOCK = 512


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    n_items: int
    merges: tuple[Merge, ...]

    def __post_init__(self):
        n = self.n_items
        if n < 2:
            raise DataError(f"a dendrogram needs at least 2 items, got {n}")
        if len(self.merges) != n - 1:
            raise DataError(f"expected {n - 1} merges for {n} items, got {len(self.merges)}")
        sizes = {}
        consumed = set()
        previous = -np.inf
        for t, merge in enumerate(self.merges):
            node = n + t
            if merge.left >= merge.right:
                raise DataError(f"merge {t}: children not in (left < right) form")
            for child in (merge.left, merge.right):
                if not 0 <= child < node:
                    raise DataError(f"merge {t}: child {child} is not an earlier node")
                if child in consumed:
                    raise DataError(f"merge {t}: node {child} consumed twice")
                consumed.add(child)
            if merge.height < 0:
                raise DataError(f"merge {t}: negative height {merge.height}")
            if merge.height < previous:
                raise DataError(f"merge {t}: heights decrease ({merge.height} < {previous})")
            previous = merge.height
            size = sizes.get(merge.left, 1) + sizes.get(merge.right, 1)
            if merge.size != size:
                raise DataError(f"merge {t}: recorded size {merge.size}, children sum {size}")
            sizes[node] = size

    @property
    def heights(self) -> np.ndarray:
        return np.array([m.height for m in self.merges])

    def to_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "merges": [[m.left, m.right, m.height, m.size] for m in self.merges],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Dendrogram":
        try:
            merges = tuple(
                Merge(int(left), int(right), float(height), int(size))
                for left, right, height, size in payload["merges"]
            )
            return cls(n_items=int(payload["n_items"]), merges=merges)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed dendrogram payload: {exc}") from exc


def _condensed_squared_distances(X: np.ndarray, dtype) -> np.ndarray:
    """Condensed pairwise squared Euclidean distances, blocked over rows."""
    n = X.shape[0]
    work = X.astype(dtype, copy=False)
    norms = np.einsum("ij,ij->i", work, work)
    out = np.empty(n * (n - 1) // 2, dtype=dtype)
    for start in range(0, n - 1, _PDIST_BLOCK):
        stop = min(start + _PDIST_BLOCK, n - 1)
        gram = work[start:stop] @ work.T
        for i in range(start, stop):
            row = norms[i] + norms[i + 1 :] - 2.0 * gram[i - start, i + 1 :]
            np.maximum(row, 0, out=row)
            offset = i * n - i * (i + 1) // 2
            out[offset : offset + n - 1 - i] = row
    return out


class _CondensedStore:
    """Pairwise distances in condensed form with row gather/scatter."""

    def __init__(self, X: np.ndarray, dtype):
        self.n = X.shape[0]
        self.d = _condensed_squared_distances(X, dtype)
        # row offsets: index of pair (k, i) for k < i is _p[k] + i
        ks = np.arange(self.n, dtype=np.int64)
        self._p = ks * self.n - ks * (ks + 1) // 2 - ks - 1

    def row(self, i: int, out: np.ndarray) -> None:
        n = self.n
        if i > 0:
            out[:i] = self.d[self._p[:i] + i]
        if i < n - 1:
            offset = i * n - i * (i + 1) // 2
            out[i + 1 :] = self.d[offset : offset + n - 1 - i]
        out[i] = np.inf

    def write_row(self, i: int, values: np.ndarray) -> None:
        n = self.n
        if i > 0:
            self.d[self._p[:i] + i] = values[:i]
        if i < n - 1:
            offset = i * n - i * (i + 1) // 2
            self.d[offset : offset + n - 1 - i] = values[i + 1 :]


class _MatrixEngine:
    def __init__(self, X: np.ndarray):
        dtype = np.float64 if X.shape[0] <= _FLOAT64_MAX_ITEMS else np.float32
        self._store = _CondensedStore(X, dtype)
        self._scratch_x = np.empty(X.shape[0], dtype=dtype)
        self._scratch_y = np.empty(X.shape[0], dtype=dtype)

    def neighbor_row(self, x: int) -> np.ndarray:
        self._store.row(x, self._scratch_x)
        return self._scratch_x

    def merge(self, x: int, y: int, d_xy: float, sizes_f: np.ndarray, keep: int) -> None:
        row_x = self._scratch_x
        row_y = self._scratch_y
        self._store.row(x, row_x)
        self._store.row(y, row_y)
        sx, sy = sizes_f[x], sizes_f[y]
        denom = sx + sy + sizes_f
        new = ((sx + sizes_f) * row_x + (sy + sizes_f) * row_y - sizes_f * d_xy) / denom
        new[x] = 0.0
        new[y] = 0.0
        self._store.write_row(keep, new)


class _CentroidEngine:
    """Row-on-demand mode: d(A,B) = 2 n_A n_B / (n_A+n_B) * |c_A - c_B|^2.

    Equal to the Lance-Williams chain on squared Euclidean input in exact
    arithmetic; used when the condensed matrix would not fit.
    """

    def __init__(self, X: np.ndarray):
        self._centroids = X.astype(np.float64, copy=True)
        self._sizes: np.ndarray | None = None
        self._scratch = np.empty(X.shape[0])

    def _row(self, x: int, sizes_f: np.ndarray) -> np.ndarray:
        diff = self._centroids - self._centroids[x]
        sq = np.einsum("ij,ij->i", diff, diff)
        sx = sizes_f[x]
        out = self._scratch
        np.multiply(sq, 2.0 * sx * sizes_f / (sx + sizes_f), out=out)
        out[x] = np.inf
        return out

    def neighbor_row(self, x: int) -> np.ndarray:
        return self._row(x, self._last_sizes)

    def merge(self, x: int, y: int, d_xy: float, sizes_f: np.ndarray, keep: int) -> None:
        sx, sy = sizes_f[x], sizes_f[y]
        self._centroids[keep] = (sx * self._centroids[x] + sy * self._centroids[y]) / (sx + sy)

    def bind_sizes(self, sizes_f: np.ndarray) -> None:
        self._last_sizes = sizes_f


def _resolve_mode(mode: str, n: int) -> str:
    if mode not in ("auto", "matrix", "centroid"):
        raise DataError(f"unknown ward mode {mode!r}")
    if mode == "auto":
        return "matrix" if n <= _AUTO_MATRIX_MAX_ITEMS else "centroid"
    return mode


def ward_linkage(X, mode: str = "auto") -> Dendrogram:
    """Full Ward merge tree of the rows of X.

    Chain ties prefer the node the chain came from, then the lowest slot;
    the final merge list is height-sorted, so exactly tied merges appear in
    discovery order.
    """
    X = as_float_matrix(X, min_rows=2)
    n = X.shape[0]
    engine = _MatrixEngine(X) if _resolve_mode(mode, n) == "matrix" else _CentroidEngine(X)

    active = np.ones(n, dtype=bool)
    sizes_f = np.ones(n)
    rep = np.arange(n)
    chain: list[int] = []
    raw: list[tuple[int, int, float, int]] = []
    if isinstance(engine, _CentroidEngine):
        engine.bind_sizes(sizes_f)

    while len(raw) < n - 1:
        if not chain:
            chain.append(int(np.flatnonzero(active)[0]))
        while True:
            x = chain[-1]
            row = engine.neighbor_row(x)
            masked = np.where(active, row, np.inf)
            masked[x] = np.inf
            y = int(np.argmin(masked))
            if len(chain) >= 2:
                prev = chain[-2]
                if masked[prev] <= masked[y]:
                    y = prev
            if len(chain) >= 2 and y == chain[-2]:
                d_xy = float(masked[y])
                break
            chain.append(y)
        chain.pop()
        chain.pop()
        keep, drop = (x, y) if x < y else (y, x)
        engine.merge(x, y, d_xy, sizes_f, keep)
        merged_size = int(sizes_f[x] + sizes_f[y])
        raw.append((int(rep[x]), int(rep[y]), d_xy, merged_size))
        sizes_f[keep] = merged_size
        active[drop] = False

    order = np.argsort(np.array([m[2] for m in raw]), kind="stable")
    parent = np.arange(2 * n - 1, dtype=np.int64)

    def find(node: int) -> int:
        root = node
        while parent[root] != root:
            root = parent[root]
        while parent[node] != root:
            parent[node], node = root, int(parent[node])
        return root

    merges = []
    next_id = n
    for idx in order:
        rep_x, rep_y, height, size = raw[idx]
        a, b = int(find(rep_x)), int(find(rep_y))
        left, right = (a, b) if a < b else (b, a)
        merges.append(Merge(left=left, right=right, height=max(0.0, float(height)), size=size))
        parent[a] = next_id
        parent[b] = next_id
        next_id += 1
    return Dendrogram(n_items=n, merges=tuple(merges))


def ward_cluster(space: "EmbeddingSpace", mode: str = "auto") -> Dendrogram:
    """Merge tree over a space's vectors, in insertion (row) order."""
    if len(space) < 2:
        raise DataError(f"clustering needs at least 2 vectors, space has {len(space)}")
    return ward_linkage(space.matrix.astype(np.float64), mode=mode)


def cut_labels(dendrogram: Dendrogram, k: int) -> np.ndarray:
    """Cluster id per leaf after undoing the last k-1 merges.

    Ids run 0..k-1 in order of each cluster's first leaf.
    """
    check_positive_int(k, "k")
    n = dendrogram.n_items
    if k > n:
        raise DataError(f"k={k} exceeds item count {n}")
    parent = np.arange(n, dtype=np.int64)

    def find(node: int) -> int:
        root = node
        while parent[root] != root:
            root = parent[root]
        while parent[node] != root:
            parent[node], node = root, int(parent[node])
        return root

    # a merge node's representative leaf: first leaf of its left child
    rep_of = list(range(n))
    for t, merge in enumerate(dendrogram.merges):
        rep_of.append(rep_of[merge.left])
        if t < n - k:
            a, b = find(rep_of[merge.left]), find(rep_of[merge.right])
            parent[b] = a
    labels = np.empty(n, dtype=np.int64)
    seen: dict[int, int] = {}
    for leaf in range(n):
        root = find(leaf)
        if root not in seen:
            seen[root] = len(seen)
        labels[leaf] = seen[root]
    return labels


class WardClustering(BaseEstimator):
    """Ward agglomerative clustering in the sklearn estimator shape.

    fit() computes the full merge tree (dendrogram_) and the n_clusters-cut
    labeling (labels_); predict is not meaningful for agglomerative trees,
    use fit_predict.
    """

    def __init__(self, n_clusters: int = 32, mode: str = "auto"):
        self.n_clusters = n_clusters
        self.mode = mode

    def fit(self, X, y=None):
        check_positive_int(self.n_clusters, "n_clusters")
        self.dendrogram_ = ward_linkage(X, mode=self.mode)
        self.labels_ = cut_labels(self.dendrogram_, self.n_clusters)
        return self

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).labels_
