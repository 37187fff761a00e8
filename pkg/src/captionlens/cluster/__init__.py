"""Ward clustering, cluster cut/order/label steps, and 2D projection."""

from captionlens.cluster.labels import (
    DEFAULT_LABEL_FLOOR,
    DEFAULT_LABEL_TERMS,
    label_clusters,
)
from captionlens.cluster.ordering import order_clusters
from captionlens.cluster.partition import ClusterAssignment, ClusterSummary, cut
from captionlens.cluster.projection import PlanarEmbedding, PlanarProjection, project_2d
from captionlens.cluster.ward import (
    Dendrogram,
    Merge,
    WardClustering,
    cut_labels,
    ward_cluster,
    ward_linkage,
)

__all__ = [
    "Merge",
    "Dendrogram",
    "WardClustering",
    "ward_linkage",
    "ward_cluster",
    "cut_labels",
    "cut",
    "ClusterSummary",
    "ClusterAssignment",
    "order_clusters",
    "label_clusters",
    "DEFAULT_LABEL_TERMS",
    "DEFAULT_LABEL_FLOOR",
    "PlanarProjection",
    "PlanarEmbedding",
    "project_2d",
]
