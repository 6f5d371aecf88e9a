import os
import pathlib

import numpy as np
import pytest

import rpfkernel as rk

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def nine_point():
    a = np.eye(9)
    for i in range(8):
        a[i, i + 1] = a[i + 1, i] = 0.9
    a[3, 4] = a[4, 3] = 0.3
    return a


def blobs(seed=0, gap=10.0):
    rng = np.random.default_rng(seed)
    x = np.vstack([rng.normal(0, 1, (60, 2)), rng.normal(0, 1, (60, 2)) + [gap, 0]])
    return x, [0] * 60 + [1] * 60


def test_load_iris():
    x, labels, features, classes = rk.load_csv(str(DATA / "iris.csv"), "species")
    assert x.shape == (150, 4)
    assert len(labels) == 150
    assert len(classes) == 3
    assert features[0] == "sepal_length"


def test_missing_file_is_value_error():
    with pytest.raises(ValueError, match="input not found"):
        rk.load_csv(str(DATA / "absent.csv"))


def test_kernel_properties():
    x, _ = blobs(1, gap=3.0)
    s = rk.rpf_kernel(x, trees=100, leaf_size=10, seed=3)
    assert s.shape == (120, 120)
    assert np.array_equal(s, s.T)
    assert np.all(np.diag(s) == 1.0)
    assert s.min() >= 0.0 and s.max() <= 1.0
    assert np.linalg.eigvalsh(s).min() >= -1e-8
    assert np.array_equal(s, rk.rpf_kernel(x, trees=100, leaf_size=10, seed=3))


def test_tree_leaves_partition():
    x, _ = blobs(2)
    leaves = rk.tree_leaves(x, leaf_size=8, seed=5)
    flat = sorted(i for leaf in leaves for i in leaf)
    assert flat == list(range(120))
    assert max(len(leaf) for leaf in leaves) < 8


def test_nine_point_split():
    b = rk.fiedler_bipartition(nine_point())
    assert b["nonnegative"] == [0, 1, 2, 3]
    assert b["negative"] == [4, 5, 6, 7, 8]
    assert rk.ncut_recursive(nine_point(), 2) == [0, 0, 0, 0, 1, 1, 1, 1, 1]


def test_cluster_separated_blobs():
    x, truth = blobs(3)
    out = rk.cluster(x, 2, labels=truth, trees=200, seed=1)
    assert out["metrics"]["rho_c"] == 1.0
    assert rk.clustering_accuracy(truth, out["labels"]) == 1.0
    assert rk.njw_cluster(rk.gaussian_kernel(x, 1.0), 2) in ([0] * 60 + [1] * 60, [1] * 60 + [0] * 60)


def test_cluster_iris_oracle_tuned():
    x, labels, _, _ = rk.load_csv(str(DATA / "iris.csv"), "species")
    out = rk.cluster(x, 3, labels=labels, seed=0, tune="oracle")
    assert out["metrics"]["rho_c"] >= 0.9


def test_bad_config_raises():
    x, _ = blobs(4)
    with pytest.raises(ValueError):
        rk.cluster(x, 0)
    with pytest.raises(ValueError):
        rk.rpf_kernel(x, leaf_size=1)


def test_metrics_and_kmeans():
    assert rk.clustering_accuracy([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    assert rk.cocluster_accuracy([0, 0, 1], [0, 1, 1]) == pytest.approx(1 / 3)
    x, truth = blobs(5)
    r = rk.kmeans(x, 2, restarts=5)
    assert all(b <= a for a, b in zip(r["history"], r["history"][1:]))
    assert rk.evaluate(truth, r["labels"])["rho_c"] == 1.0


def test_separation_probability():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.2], [0.3, 0.9]])
    e = rk.separation_probability(pts, 0, 1, trials=20000, seed=2)
    assert e["empirical_probability"] >= e["bound"] - 3 * e["standard_error"]
    same = rk.separation_probability(pts, 2, 2, trials=1000)
    assert same["empirical_probability"] == 0.0 and same["bound"] == 0.0
    assert rk.mean_abs_cosine(2) == pytest.approx(2 / np.pi)
    assert rk.principal_stretch(pts)["rho"] == pytest.approx(np.sqrt(0.49 + 0.81))
