import numpy as np
import pytest

from captionlens.cluster.projection import PlanarEmbedding, PlanarProjection, project_2d
from captionlens.corpus.embeddings import EmbeddingSpace
from captionlens.errors import DataError


def test_components_are_orthonormal_and_sign_pinned():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 8))
    est = PlanarProjection().fit(X)
    C = est.components_
    assert C.shape == (2, 8)
    assert np.allclose(C @ C.T, np.eye(2), atol=1e-12)
    for row in C:
        anchor = int(np.argmax(np.abs(row)))
        assert row[anchor] > 0
    assert est.explained_variance_[0] >= est.explained_variance_[1] >= 0


def test_explained_variance_matches_svd():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(25, 6)) * np.array([5, 3, 1, 1, 1, 1])
    est = PlanarProjection().fit(X)
    centered = X - X.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    assert np.allclose(est.explained_variance_, (s[:2] ** 2) / 24, rtol=1e-9)


def test_two_feature_input_preserves_pairwise_distances():
    # with only two features both components are kept: a rigid motion
    X = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
    coords = PlanarProjection().fit_transform(X)
    for i in range(3):
        for j in range(3):
            original = np.linalg.norm(X[i] - X[j])
            projected = np.linalg.norm(coords[i] - coords[j])
            assert projected == pytest.approx(original, abs=1e-9)
    # centered coordinates
    assert np.allclose(coords.mean(axis=0), 0.0, atol=1e-9)
    # dominant spread lands on the first axis
    assert np.ptp(coords[:, 0]) > np.ptp(coords[:, 1])


def test_deterministic_across_runs():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(30, 12))
    a = PlanarProjection().fit(X)
    b = PlanarProjection().fit(X)
    assert np.array_equal(a.components_, b.components_)
    assert np.array_equal(a.transform(X), b.transform(X))


def test_degenerate_identical_rows():
    X = np.ones((5, 4)) * 3.0
    est = PlanarProjection().fit(X)
    assert np.array_equal(est.components_, np.eye(2, 4))
    assert np.array_equal(est.explained_variance_, np.zeros(2))
    assert np.allclose(est.transform(X), 0.0)


def test_fit_validation():
    with pytest.raises(DataError):
        PlanarProjection().fit(np.ones((2, 4)))  # too few rows
    with pytest.raises(DataError):
        PlanarProjection().fit(np.ones((5, 1)))  # too few features
    with pytest.raises(DataError):
        PlanarProjection().transform(np.ones((3, 4)))  # not fitted
    est = PlanarProjection().fit(np.random.default_rng(1).normal(size=(6, 4)))
    with pytest.raises(DataError):
        est.transform(np.ones((3, 5)))  # feature mismatch


def test_project_2d_keys_by_image_id():
    rng = np.random.default_rng(5)
    space = EmbeddingSpace.from_vectors(
        "caption", 6, ((f"img{i}", rng.normal(size=6)) for i in range(9))
    )
    embedding = project_2d(space)
    assert set(embedding.coords) == {f"img{i}" for i in range(9)}
    direct = PlanarProjection().fit_transform(space.matrix.astype(np.float64))
    for row, image_id in enumerate(space.ids):
        assert embedding.coords[image_id] == pytest.approx(tuple(direct[row]))


def test_project_2d_needs_three():
    space = EmbeddingSpace.from_vectors(
        "caption", 2, [("a", np.array([1.0, 0.0])), ("b", np.array([0.0, 1.0]))]
    )
    with pytest.raises(DataError, match="at least 3"):
        project_2d(space)


def test_planar_embedding_roundtrip_and_validation():
    original = PlanarEmbedding(
        coords={"a": (1.0, 2.0), "b": (-0.5, 0.25)},
        components=((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
        explained_variance=(4.0, 1.0),
    )
    clone = PlanarEmbedding.from_dict(original.to_dict())
    assert clone == original

    with pytest.raises(DataError, match="unit"):
        PlanarEmbedding({}, ((2.0, 0.0), (0.0, 1.0)), (1.0, 0.5))
    with pytest.raises(DataError, match="orthogonal"):
        PlanarEmbedding({}, ((1.0, 0.0), (0.6, 0.8)), (1.0, 0.5))
    with pytest.raises(DataError, match="descending"):
        PlanarEmbedding({}, ((1.0, 0.0), (0.0, 1.0)), (0.5, 1.0))
    with pytest.raises(DataError, match="malformed"):
        PlanarEmbedding.from_dict({"coords": {}})
