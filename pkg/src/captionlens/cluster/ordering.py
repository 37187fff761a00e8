"""Dendrogram-consistent left-to-right ordering of cut clusters.

The k clusters are leaves of the dendrogram's top k-1 merges.  Every
subtree keeps its clusters contiguous; each subtree's orientation is chosen
greedily from the top down, minimizing the squared Euclidean distance
between the centroids at the block boundaries already fixed by ancestors.
Cost ties keep the subtree containing the smaller cluster id first.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from captionlens.cluster.partition import ClusterAssignment
from captionlens.cluster.ward import Dendrogram, cut_labels
from captionlens.errors import DataError

if TYPE_CHECKING:
    from captionlens.corpus.embeddings import EmbeddingSpace

__all__ = ["order_clusters"]


def _sq_dist(a: np.ndarray, b: np.ndarray) -> float:
    diff = a - b
    return float(diff @ diff)


def order_clusters(
    dendrogram: Dendrogram,
    assignment: ClusterAssignment,
    space: "EmbeddingSpace",
) -> dict[int, int]:
    """Order position per cluster id; positions form a permutation of 0..k-1."""
    n = dendrogram.n_items
    k = assignment.k
    if len(space) != n:
        raise DataError(f"space has {len(space)} vectors, dendrogram has {n} leaves")
    labels = cut_labels(dendrogram, k)
    ids = space.ids
    for row, image_id in enumerate(ids):
        expected = assignment.assignment.get(image_id)
        if expected != int(labels[row]):
            raise DataError(
                f"assignment does not match a k={k} cut of this dendrogram "
                f"(image {image_id!r}: cut says {int(labels[row])}, assignment says {expected})"
            )
    if k == 1:
        return {0: 0}

    # nodes still alive after the first n-k merges are the cluster roots
    alive = set(range(n))
    for t in range(n - k):
        merge = dendrogram.merges[t]
        alive.discard(merge.left)
        alive.discard(merge.right)
        alive.add(n + t)
    children: dict[int, tuple[int, int]] = {}
    for t in range(n - k, n - 1):
        merge = dendrogram.merges[t]
        children[n + t] = (merge.left, merge.right)
    top_root = n + (n - 2)

    # first-leaf representative of every node, to map roots to cluster ids
    rep_of = list(range(n))
    for merge in dendrogram.merges:
        rep_of.append(rep_of[merge.left])
    cluster_of_root = {root: int(labels[rep_of[root]]) for root in alive}

    X = space.matrix.astype(np.float64)
    centroid: dict[int, np.ndarray] = {}
    weight: dict[int, float] = {}
    min_cid: dict[int, int] = {}
    for root in alive:
        cid = cluster_of_root[root]
        rows = np.flatnonzero(labels == cid)
        centroid[root] = X[rows].mean(axis=0)
        weight[root] = float(rows.size)
        min_cid[root] = cid
    for t in range(n - k, n - 1):
        node = n + t
        left, right = children[node]
        w = weight[left] + weight[right]
        centroid[node] = (weight[left] * centroid[left] + weight[right] * centroid[right]) / w
        weight[node] = w
        min_cid[node] = min(min_cid[left], min_cid[right])

    order: list[int] = []
    stack: list[tuple[int, np.ndarray | None, np.ndarray | None]] = [(top_root, None, None)]
    while stack:
        node, left_ctx, right_ctx = stack.pop()
        if node in cluster_of_root:
            order.append(cluster_of_root[node])
            continue
        left, right = children[node]
        cost_lr = 0.0
        cost_rl = 0.0
        if left_ctx is not None:
            cost_lr += _sq_dist(left_ctx, centroid[left])
            cost_rl += _sq_dist(left_ctx, centroid[right])
        if right_ctx is not None:
            cost_lr += _sq_dist(centroid[right], right_ctx)
            cost_rl += _sq_dist(centroid[left], right_ctx)
        if cost_lr < cost_rl:
            first, second = left, right
        elif cost_rl < cost_lr:
            first, second = right, left
        elif min_cid[left] <= min_cid[right]:
            first, second = left, right
        else:
            first, second = right, left
        stack.append((second, centroid[first], right_ctx))
        stack.append((first, left_ctx, centroid[second]))
    if sorted(order) != list(range(k)):
        raise DataError("internal error: ordering did not produce a permutation")
    return {cid: pos for pos, cid in enumerate(order)}
