import math
from collections import Counter

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.neighbors import KNeighborsClassifier
from sklearn.pipeline import make_pipeline

from conftest import random_blobs
from gidalign.estimators import GIDTransformer, KNNImageClassifier
from gidalign.gid import GidConfig, canonicalize_batch


def brute_knn(train_x, train_y, q, k):
    d = [(math.dist(x, q), i) for i, x in enumerate(train_x)]
    d.sort()
    nearest = d[:k]
    votes = Counter(train_y[i] for _, i in nearest)
    top = max(votes.values())
    tied = [c for c, v in votes.items() if v == top]
    means = {c: np.mean([dist for dist, i in nearest if train_y[i] == c]) for c in tied}
    return min(tied, key=lambda c: (means[c], c))


def test_get_params_and_clone():
    t = GIDTransformer(interp="bicubic", image_shape=(4, 4))
    assert t.get_params()["interp"] == "bicubic"
    c = clone(t).set_params(interp="nearest")
    assert c.interp == "nearest" and t.interp == "bicubic"
    k = KNNImageClassifier(n_neighbors=5)
    assert clone(k).get_params() == {"n_neighbors": 5}


def test_transformer_matches_functional(rng):
    imgs = np.stack(random_blobs(6, rng, size=16))
    t = GIDTransformer(interp="bilinear").fit(imgs)
    out = t.transform(imgs)
    ref, _ = canonicalize_batch(imgs, GidConfig("bilinear"))
    assert np.array_equal(out, ref)
    assert t.image_shape_ == (16, 16)


def test_transformer_flat_rows(rng):
    imgs = np.stack(random_blobs(4, rng, size=12))
    flat = imgs.reshape(4, -1)
    t = GIDTransformer(image_shape=(12, 12))
    out = t.fit_transform(flat)
    assert out.shape == (4, 144)
    assert np.array_equal(out.reshape(4, 12, 12), canonicalize_batch(imgs)[0])
    assert t.n_features_in_ == 144


def test_transformer_errors(rng):
    with pytest.raises(NotFittedError):
        GIDTransformer().transform(np.zeros((1, 4, 4)))
    with pytest.raises(ValueError):
        GIDTransformer().fit(np.zeros((2, 16)))
    with pytest.raises(ValueError):
        GIDTransformer(interp="cubic-spline").fit(np.zeros((1, 4, 4)))
    t = GIDTransformer().fit(np.zeros((1, 4, 4)))
    with pytest.raises(ValueError):
        t.transform(np.zeros((1, 5, 5)))


def test_transformer_in_sklearn_pipeline(rng):
    imgs = np.stack(random_blobs(20, rng, size=12))
    y = np.arange(20) % 2
    pipe = make_pipeline(GIDTransformer(image_shape=(12, 12)), KNeighborsClassifier(1))
    pipe.fit(imgs.reshape(20, -1), y)
    assert pipe.score(imgs.reshape(20, -1), y) == 1.0


def test_knn_self_match(rng):
    x = rng.random((8, 3, 3))
    y = np.arange(8) % 10
    clf = KNNImageClassifier(1).fit(x, y)
    assert np.array_equal(clf.predict(x), y)


def test_knn_zero_one_query():
    x = np.stack([np.zeros((2, 2)), np.ones((2, 2))])
    clf = KNNImageClassifier(1).fit(x, [0, 1])
    assert clf.predict(np.full((1, 2, 2), 0.4)).tolist() == [0]


def test_knn_toy_set_against_brute_force():
    # ten 1x2 "images" = points in the unit square; labels planted around three clusters
    pts = [(0.1, 0.1), (0.15, 0.2), (0.2, 0.1),
           (0.8, 0.8), (0.85, 0.9), (0.9, 0.75),
           (0.1, 0.9), (0.2, 0.85),
           (0.5, 0.5), (0.55, 0.45)]
    labels = [0, 0, 0, 1, 1, 1, 2, 2, 3, 1]
    clf = KNNImageClassifier(3).fit(np.array(pts).reshape(10, 1, 2), labels)
    queries = [(0.12, 0.12), (0.6, 0.6), (0.3, 0.8), (0.45, 0.5), (0.9, 0.1)]
    got = clf.predict(np.array(queries).reshape(-1, 1, 2)).tolist()
    assert got == [brute_knn(pts, labels, q, 3) for q in queries]
    # hand check of the planted answers: (0.6,0.6) has 3 and 9 (label 1) plus 8 (label 3)
    assert got[:2] == [0, 1]


def test_knn_vote_tie_goes_to_smaller_mean_distance():
    x = np.array([[0.0], [0.3], [0.35]]).reshape(3, 1, 1)
    clf = KNNImageClassifier(3).fit(x, [5, 2, 7])
    # one vote each; class 5 is closest
    assert clf.predict(np.array([[[0.05]]])).tolist() == [5]


def test_knn_full_tie_goes_to_smaller_label():
    x = np.array([[0.0], [1.0], [2.0]]).reshape(3, 1, 1)
    clf = KNNImageClassifier(3).fit(x, [4, 9, 4])
    # votes: 4 twice; no tie
    assert clf.predict(np.array([[[1.0]]])).tolist() == [4]
    clf = KNNImageClassifier(1).fit(np.array([[0.0], [1.0]]).reshape(2, 1, 1), [6, 3])
    # equidistant: stable order picks the first sample, label 6
    assert clf.predict(np.array([[[0.5]]])).tolist() == [6]
    x = np.array([[0.5], [0.5], [0.0]]).reshape(3, 1, 1)
    clf = KNNImageClassifier(3).fit(x, [8, 3, 1])
    # equal distance 0.5 for labels 8 and 3 and 1.0 for label 1 -> 3 (smaller label)
    assert clf.predict(np.array([[[1.0]]])).tolist() == [3]


@pytest.mark.parametrize("k", [0, 2, -1, 1.5])
def test_knn_rejects_bad_k(k):
    with pytest.raises(ValueError):
        KNNImageClassifier(k).fit(np.zeros((3, 2, 2)), [0, 1, 2])


def test_knn_dimension_mismatch():
    clf = KNNImageClassifier(1).fit(np.zeros((2, 3, 3)), [0, 1])
    with pytest.raises(ValueError):
        clf.predict(np.zeros((1, 4, 4)))


def test_knn_matches_sklearn_on_random_data(rng):
    x = rng.random((60, 5, 5))
    y = rng.integers(0, 10, 60)
    q = rng.random((30, 5, 5))
    ours = KNNImageClassifier(1).fit(x, y).predict(q)
    ref = KNeighborsClassifier(1).fit(x.reshape(60, -1), y).predict(q.reshape(30, -1))
    assert np.array_equal(ours, ref)
