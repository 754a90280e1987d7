"""Rotation-independent image canonicalization by global intensity direction."""

from .datasets import (
    FormatError,
    LabeledImageSet,
    load_cifar10,
    load_idx_images,
    load_idx_labels,
    pad_centered,
    read_pgm,
    to_grayscale,
    write_pgm,
)
from .estimators import GIDTransformer, KNNImageClassifier
from .evaluation import (
    ConsistencyReport,
    SweepConfig,
    SweepReport,
    knn_classify,
    run_consistency,
    run_sweep,
    write_csv,
)
from .geometry import (
    Center,
    OrientationEstimate,
    image_center,
    pixel_angle,
    weighted_circular_mean,
    wrap_angle,
)
from .gid import ChannelMode, GidConfig, canonicalize, canonicalize_batch, estimate_orientation
from .warp import InterpMethod, rotate_about_center, sample

__version__ = "0.1.0"

__all__ = [
    "Center",
    "ChannelMode",
    "ConsistencyReport",
    "FormatError",
    "GIDTransformer",
    "GidConfig",
    "InterpMethod",
    "KNNImageClassifier",
    "LabeledImageSet",
    "OrientationEstimate",
    "SweepConfig",
    "SweepReport",
    "canonicalize",
    "canonicalize_batch",
    "estimate_orientation",
    "image_center",
    "knn_classify",
    "load_cifar10",
    "load_idx_images",
    "load_idx_labels",
    "pad_centered",
    "pixel_angle",
    "read_pgm",
    "rotate_about_center",
    "run_consistency",
    "run_sweep",
    "sample",
    "to_grayscale",
    "weighted_circular_mean",
    "wrap_angle",
    "write_csv",
    "write_pgm",
]
