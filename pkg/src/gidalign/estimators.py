"""scikit-learn compatible wrappers.

``GIDTransformer`` canonicalizes image stacks and can sit in a
:class:`sklearn.pipeline.Pipeline` in front of any classifier.
``KNNImageClassifier`` is the plain k-nearest-neighbour classifier used by
the rotation sweep, with fully specified tie-breaking.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .geometry import DEFAULT_DEGENERACY_EPSILON
from .gid import GidConfig, canonicalize_batch, estimate_orientation_stack
from .validation import check_image_stack


def _to_stack(X, image_shape):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2:
        if image_shape is None:
            raise ValueError(
                "2-d input needs image_shape to reshape rows into images")
        shape = tuple(image_shape)
        if int(np.prod(shape)) != X.shape[1]:
            raise ValueError(
                f"image_shape {shape} does not match {X.shape[1]} features")
        return check_image_stack(X.reshape((X.shape[0],) + shape)), True
    return check_image_stack(X), False


class GIDTransformer(TransformerMixin, BaseEstimator):
    """Rotate every image into its intensity-direction canonical frame.

    Parameters
    ----------
    interp : {'nearest', 'bilinear', 'bicubic'}, default='bilinear'
        Kernel used for the canonicalizing rotation.
    channel_mode : {'aggregate', 'per-channel'}, default='aggregate'
    degeneracy_epsilon : float, default=1e-9
        Relative resultant length under which an image is left untouched.
    image_shape : tuple of int, optional
        Needed when ``X`` is passed as flattened rows ``(n_samples, n_features)``;
        output is then flattened back.

    Attributes
    ----------
    image_shape_ : tuple of int
        Per-image shape seen during ``fit``.
    """

    def __init__(self, interp="bilinear", channel_mode="aggregate",
                 degeneracy_epsilon=DEFAULT_DEGENERACY_EPSILON, image_shape=None):
        self.interp = interp
        self.channel_mode = channel_mode
        self.degeneracy_epsilon = degeneracy_epsilon
        self.image_shape = image_shape

    def _config(self) -> GidConfig:
        return GidConfig(self.interp, self.channel_mode, self.degeneracy_epsilon)

    def fit(self, X, y=None):
        self._config()
        stack, flat = _to_stack(X, self.image_shape)
        self.image_shape_ = stack.shape[1:]
        if flat:
            self.n_features_in_ = int(np.prod(self.image_shape_))
        return self

    def transform(self, X):
        check_is_fitted(self, "image_shape_")
        stack, flat = _to_stack(X, self.image_shape)
        if stack.shape[0] and stack.shape[1:] != self.image_shape_:
            raise ValueError(
                f"images have shape {stack.shape[1:]}, fitted on {self.image_shape_}")
        out, _ = canonicalize_batch(stack, self._config())
        return out.reshape(out.shape[0], -1) if flat else out

    def estimate(self, X):
        """Orientation estimates of ``X``, one per image."""
        stack, _ = _to_stack(X, self.image_shape)
        return estimate_orientation_stack(stack, self.degeneracy_epsilon)


class KNNImageClassifier(ClassifierMixin, BaseEstimator):
    """Majority vote among the k nearest training images (Euclidean).

    Ties in the vote go to the class whose tied neighbours have the smaller
    mean distance, then to the smaller class label. Neighbours at equal
    distance are ranked by training index.

    Parameters
    ----------
    n_neighbors : int, default=3
        Must be odd and positive.
    """

    def __init__(self, n_neighbors=3):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        k = self.n_neighbors
        if int(k) != k or k < 1 or k % 2 == 0:
            raise ValueError(f"n_neighbors must be an odd positive integer, got {k!r}")
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise ValueError("training set is empty")
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"{X.shape[0]} samples but {y.shape[0]} labels")
        self.sample_shape_ = X.shape[1:]
        self.train_ = X.reshape(X.shape[0], -1)
        self.train_sq_ = np.einsum("ij,ij->i", self.train_, self.train_)
        self.classes_, self.y_encoded_ = np.unique(y, return_inverse=True)
        self.n_features_in_ = self.train_.shape[1]
        return self

    def kneighbors(self, X):
        """Indices and distances of the k nearest training samples."""
        check_is_fitted(self, "train_")
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1:] != self.sample_shape_:
            raise ValueError(
                f"query shape {X.shape[1:]} does not match training shape {self.sample_shape_}")
        Q = X.reshape(X.shape[0], -1)
        d2 = (Q * Q).sum(axis=1)[:, None] + self.train_sq_[None, :] - 2.0 * (Q @ self.train_.T)
        np.maximum(d2, 0.0, out=d2)
        k = min(self.n_neighbors, self.train_.shape[0])
        # stable sort: equal distances keep training order
        idx = np.argsort(d2, axis=1, kind="stable")[:, :k]
        return idx, np.sqrt(np.take_along_axis(d2, idx, axis=1))

    def predict(self, X):
        idx, dist = self.kneighbors(X)
        n_classes = len(self.classes_)
        labels = self.y_encoded_[idx]
        out = np.empty(len(idx), dtype=np.intp)
        for q in range(len(idx)):
            counts = np.bincount(labels[q], minlength=n_classes)
            tied = np.flatnonzero(counts == counts.max())
            if len(tied) == 1:
                out[q] = tied[0]
                continue
            means = [dist[q][labels[q] == c].mean() for c in tied]
            # np.argmin picks the first (smallest label) among equal means
            out[q] = tied[int(np.argmin(means))]
        return self.classes_[out]
