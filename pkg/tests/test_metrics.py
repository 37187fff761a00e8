import numpy as np
import pytest

from captionlens.errors import DataError
from captionlens.similarity.metrics import overlap_metric, symmetry_metric
from conftest import snapshot_from_vectors


def _angles_snapshot(degrees, space="caption"):
    vectors = {}
    for i, deg in enumerate(degrees):
        rad = np.deg2rad(deg)
        vectors[f"p{i}"] = np.array([np.cos(rad), np.sin(rad)])
    return snapshot_from_vectors(vectors, space_name=space)


def test_two_image_corpus_fully_symmetric():
    snapshot = snapshot_from_vectors(
        {"a": np.array([1.0, 0.0]), "b": np.array([0.5, 1.0])}
    )
    report = symmetry_metric(snapshot, "caption", [1, 5, 25])
    for entry in report.entries:
        assert entry.reciprocated_count == entry.total_directed_count == 2
        assert entry.proportion == 1.0


def test_three_angle_fixture():
    # nearest links: 0deg->10deg, 10deg->0deg, 50deg->10deg
    snapshot = _angles_snapshot([0, 10, 50])
    report = symmetry_metric(snapshot, "caption", [1])
    entry = report.entries[0]
    assert entry.total_directed_count == 3
    assert entry.reciprocated_count == 2
    assert entry.proportion == pytest.approx(2 / 3)


def test_reciprocated_non_decreasing_in_n():
    rng = np.random.default_rng(8)
    for trial in range(6):
        count = int(rng.integers(4, 40))
        vectors = {f"r{i:02d}": rng.normal(size=6) for i in range(count)}
        snapshot = snapshot_from_vectors(vectors)
        ns = list(range(1, count))
        report = symmetry_metric(snapshot, "caption", ns)
        counts = [e.reciprocated_count for e in report.entries]
        assert counts == sorted(counts)


def test_total_directed_count_formula():
    snapshot = _angles_snapshot([0, 15, 30, 45, 60])
    report = symmetry_metric(snapshot, "caption", [2, 99])
    assert report.entries[0].total_directed_count == 5 * 2
    assert report.entries[1].total_directed_count == 5 * 4  # clamped at corpus-1


def test_symmetry_table_shape():
    snapshot = _angles_snapshot([0, 10, 50])
    table = symmetry_metric(snapshot, "caption", [1, 2]).to_table()
    lines = table.splitlines()
    assert lines[0].split() == ["N", "Reciprocated", "Directed", "Share"]
    assert len(lines) == 3
    assert lines[1].endswith("%")


def test_symmetry_needs_two_vectors():
    snapshot = snapshot_from_vectors({"only": np.array([1.0, 0.0])})
    with pytest.raises(DataError):
        symmetry_metric(snapshot, "caption", [1])


def test_symmetry_rejects_bad_n():
    snapshot = _angles_snapshot([0, 10])
    with pytest.raises(DataError):
        symmetry_metric(snapshot, "caption", [0])
    with pytest.raises(DataError):
        symmetry_metric(snapshot, "caption", [])


def _identical_two_spaces(count=7, dim=5, seed=4):
    rng = np.random.default_rng(seed)
    vectors = {f"s{i}": rng.normal(size=dim) for i in range(count)}
    return snapshot_from_vectors(
        vectors, space_name="caption", extra_spaces={"visual": vectors}
    )


def test_overlap_identical_spaces():
    snapshot = _identical_two_spaces(count=7)
    report = overlap_metric(snapshot, "caption", "visual", [1, 3, 10])
    for entry, n in zip(report.entries, [1, 3, 10]):
        assert entry.mean_overlap == pytest.approx(min(n, 6))
        assert entry.proportion_zero_overlap == 0.0


def test_overlap_disjoint_fixture():
    # 9 points; space A groups ids by i//3, space B by i%3 (one per A group),
    # so top-1 and top-2 sets never intersect
    eye = np.eye(3)
    a_vectors = {f"g{i}": eye[i // 3] for i in range(9)}
    b_vectors = {f"g{i}": eye[i % 3] for i in range(9)}
    snapshot = snapshot_from_vectors(
        a_vectors, space_name="caption", extra_spaces={"visual": b_vectors}
    )
    report = overlap_metric(snapshot, "caption", "visual", [1, 2])
    for entry in report.entries:
        assert entry.mean_overlap == 0.0
        assert entry.proportion_zero_overlap == 1.0
        assert entry.proportion_overlap_at_most_one == 1.0


def test_overlap_symmetric_in_space_order():
    rng = np.random.default_rng(12)
    vecs_a = {f"v{i}": rng.normal(size=4) for i in range(12)}
    vecs_b = {f"v{i}": rng.normal(size=4) for i in range(12)}
    snapshot = snapshot_from_vectors(
        vecs_a, space_name="caption", extra_spaces={"visual": vecs_b}
    )
    fwd = overlap_metric(snapshot, "caption", "visual", [1, 3, 5])
    rev = overlap_metric(snapshot, "visual", "caption", [1, 3, 5])
    for e1, e2 in zip(fwd.entries, rev.entries):
        assert e1.mean_overlap == e2.mean_overlap
        assert e1.proportion_zero_overlap == e2.proportion_zero_overlap


def test_overlap_mean_non_decreasing():
    rng = np.random.default_rng(13)
    vecs_a = {f"v{i}": rng.normal(size=4) for i in range(15)}
    vecs_b = {f"v{i}": rng.normal(size=4) for i in range(15)}
    snapshot = snapshot_from_vectors(
        vecs_a, space_name="caption", extra_spaces={"visual": vecs_b}
    )
    report = overlap_metric(snapshot, "caption", "visual", list(range(1, 15)))
    means = [e.mean_overlap for e in report.entries]
    assert means == sorted(means)


def test_overlap_requires_matching_ids():
    vecs_a = {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])}
    vecs_b = {"a": np.array([1.0, 0.0]), "c": np.array([0.0, 1.0])}
    records = {**vecs_a, "c": np.array([1.0, 1.0])}
    snapshot = snapshot_from_vectors(
        records, space_name="caption", extra_spaces={"visual": vecs_b}
    )
    # caption covers a,b,c; visual covers a,c only -> coverage mismatch
    with pytest.raises(DataError, match="b"):
        overlap_metric(snapshot, "caption", "visual", [1])


def test_overlap_table_columns():
    snapshot = _identical_two_spaces(count=5)
    table = overlap_metric(snapshot, "caption", "visual", [1, 3]).to_table()
    header = table.splitlines()[0]
    assert "Avg. Overlap" in header
    assert "No-Overlap" in header
    assert "Overlap <= 1" in header
