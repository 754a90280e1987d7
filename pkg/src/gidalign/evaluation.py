"""Rotation-sweep and alignment-consistency harness.

A sweep rotates every test image through a grid of angles, optionally
canonicalizes it, and scores a k-NN classifier fitted on (optionally
canonicalized) unrotated training images. Output is one accuracy record
per angle.
"""

from __future__ import annotations

import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .datasets import LabeledImageSet
from .estimators import KNNImageClassifier
from .geometry import angle_difference
from .gid import GidConfig, canonicalize_batch, estimate_orientation_stack
from .warp import InterpMethod, rotate_stack

PIPELINES = ("baseline", "gid")

# test images are always rotated with this kernel; the GID config only
# controls the canonicalizing rotation
SWEEP_ROTATION = InterpMethod.BILINEAR


def angle_grid(start: float, stop: float, step: float) -> list[float]:
    """Degrees from ``start`` to ``stop`` inclusive in steps of ``step``."""
    if not step > 0:
        raise ValueError(f"angle step must be > 0, got {step}")
    if stop < start:
        raise ValueError(f"angle stop {stop} is before start {start}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    # multiply rather than accumulate to avoid drift
    return [start + i * step for i in range(n)]


def parse_angle_range(text: str) -> list[float]:
    """Parse ``start:stop:step`` (degrees)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"angle range must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"non-numeric angle range {text!r}") from None
    return angle_grid(start, stop, step)


def degrees_to_rotation(deg: float) -> float:
    """Radians for a sweep angle; whole turns map to exactly 0."""
    return math.radians(math.fmod(deg, 360.0))


@dataclass
class SweepConfig:
    angle_start: float = 0.0
    angle_stop: float = 360.0
    angle_step: float = 1.0
    train_size: int = 1000
    test_size: int = 200
    k: int = 3
    pipeline: str = "gid"
    gid: GidConfig = field(default_factory=GidConfig)
    seed: int = 42

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise ValueError(f"pipeline must be one of {PIPELINES}, got {self.pipeline!r}")
        if self.train_size < 1 or self.test_size < 1:
            raise ValueError("train_size and test_size must be >= 1")
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"k must be odd and >= 1, got {self.k}")
        self.angles()

    def angles(self) -> list[float]:
        return angle_grid(self.angle_start, self.angle_stop, self.angle_step)

    def echo(self) -> dict:
        d = asdict(self)
        g = d.pop("gid")
        d.update({"interp": g["interp"].value, "channel_mode": g["channel_mode"].value,
                  "degeneracy_epsilon": g["degeneracy_epsilon"]})
        return d


@dataclass(frozen=True)
class AccuracyRecord:
    angle_deg: float
    accuracy: float
    n_correct: int
    n_total: int


@dataclass
class SweepReport:
    records: list[AccuracyRecord]
    metadata: dict = field(default_factory=dict)

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([r.accuracy for r in self.records])

    def flatness(self) -> float:
        """max - min accuracy over the swept angles."""
        acc = self.accuracies
        return float(acc.max() - acc.min()) if acc.size else 0.0


@dataclass(frozen=True)
class SpreadRecord:
    image_id: int
    spread_deg: float
    degenerate: bool


@dataclass
class ConsistencyReport:
    records: list[SpreadRecord]
    metadata: dict = field(default_factory=dict)

    @property
    def spreads(self) -> np.ndarray:
        return np.array([r.spread_deg for r in self.records])

    @property
    def mean_spread(self) -> float:
        return float(self.spreads.mean()) if self.records else 0.0

    @property
    def max_spread(self) -> float:
        return float(self.spreads.max()) if self.records else 0.0

    @property
    def degenerate_count(self) -> int:
        return sum(r.degenerate for r in self.records)


def subsample(data: LabeledImageSet, n: int, rng: np.random.Generator) -> LabeledImageSet:
    """First ``n`` items after a seeded shuffle."""
    if n > len(data):
        raise ValueError(f"requested {n} samples from a set of {len(data)}")
    return data.subset(rng.permutation(len(data))[:n])


def knn_classify(train: LabeledImageSet, query, k: int = 1) -> int:
    """Label of one query image under k-NN over flattened pixels."""
    query = np.asarray(query, dtype=np.float64)
    clf = KNNImageClassifier(n_neighbors=k).fit(train.images, train.labels)
    return int(clf.predict(query[None])[0])


def _score_angle(deg, test, clf, cfg: SweepConfig) -> AccuracyRecord:
    rotated = rotate_stack(test.images, degrees_to_rotation(deg), SWEEP_ROTATION)
    if cfg.pipeline == "gid":
        rotated, _ = canonicalize_batch(rotated, cfg.gid)
    pred = clf.predict(rotated)
    correct = int(np.sum(pred == test.labels))
    return AccuracyRecord(float(deg), correct / len(test), correct, len(test))


def run_sweep(train: LabeledImageSet, test: LabeledImageSet, cfg: SweepConfig,
              n_jobs: int = 1) -> SweepReport:
    """Accuracy of the configured pipeline at every angle of the grid.

    Output depends only on the data and ``cfg``, never on ``n_jobs``.
    """
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    train = subsample(train, cfg.train_size, rng)
    test = subsample(test, cfg.test_size, rng)
    train_x = train.images
    if cfg.pipeline == "gid":
        train_x, _ = canonicalize_batch(train_x, cfg.gid)
    clf = KNNImageClassifier(n_neighbors=cfg.k).fit(train_x, train.labels)

    angles = cfg.angles()
    if n_jobs == 1:
        records = [_score_angle(a, test, clf, cfg) for a in angles]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(lambda a: _score_angle(a, test, clf, cfg), angles))
    meta = cfg.echo()
    meta["wall_time_s"] = time.perf_counter() - t0
    return SweepReport(records, meta)


def circular_spread(angles) -> float:
    """Largest pairwise wrapped difference (radians) within a set of angles."""
    a = np.asarray(angles, dtype=np.float64)
    if a.size < 2:
        return 0.0
    return float(np.abs(angle_difference(a[:, None], a[None, :])).max())


def run_consistency(test: LabeledImageSet, angles, cfg: GidConfig | None = None
                    ) -> ConsistencyReport:
    """Spread of post-canonicalization orientation across rotated copies.

    Each image is rotated by every angle (degrees), canonicalized, and its
    orientation re-estimated; the per-image spread is the maximum pairwise
    wrapped difference of those estimates. An image is flagged degenerate
    when any of its copies had no usable orientation.
    """
    cfg = cfg or GidConfig()
    angles = list(angles)
    if not angles or len(test) == 0:
        raise ValueError("run_consistency needs at least one image and one angle")
    n = len(test)
    est = np.zeros((n, len(angles)))
    degenerate = np.zeros(n, dtype=bool)
    for j, deg in enumerate(angles):
        rotated = rotate_stack(test.images, degrees_to_rotation(deg), SWEEP_ROTATION)
        canon, first = canonicalize_batch(rotated, cfg)
        again = estimate_orientation_stack(canon, cfg.degeneracy_epsilon)
        est[:, j] = [e.angle for e in again]
        degenerate |= np.array([a.degenerate or b.degenerate for a, b in zip(first, again)])
    records = []
    for i in range(n):
        spread = 0.0 if degenerate[i] else math.degrees(circular_spread(est[i]))
        records.append(SpreadRecord(i, spread, bool(degenerate[i])))
    meta = {"angles": angles, "interp": cfg.interp.value,
            "channel_mode": cfg.channel_mode.value}
    return ConsistencyReport(records, meta)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def write_csv(report, sink) -> None:
    """Write a sweep or consistency report as LF-terminated CSV."""
    buf = io.StringIO(newline="")
    if isinstance(report, SweepReport):
        buf.write("angle_deg,accuracy,n_correct,n_total\n")
        for r in report.records:
            buf.write(f"{_fmt(r.angle_deg)},{_fmt(r.accuracy)},{r.n_correct},{r.n_total}\n")
    elif isinstance(report, ConsistencyReport):
        buf.write("image_id,spread_deg,degenerate\n")
        for r in report.records:
            buf.write(f"{r.image_id},{_fmt(r.spread_deg)},{str(r.degenerate).lower()}\n")
    else:
        raise TypeError(f"cannot write {type(report).__name__} as CSV")
    data = buf.getvalue()
    if isinstance(sink, io.TextIOBase):
        sink.write(data)
    else:
        sink.write(data.encode("ascii"))


def mean_report(reports: list[SweepReport]) -> SweepReport:
    """Average per-angle accuracy over repeated sweeps on the same grid."""
    if not reports:
        raise ValueError("no reports to aggregate")
    base = reports[0].records
    out = []
    for i, r in enumerate(base):
        rows = [rep.records[i] for rep in reports]
        if any(x.angle_deg != r.angle_deg for x in rows):
            raise ValueError("reports were swept over different angle grids")
        n_correct = sum(x.n_correct for x in rows)
        n_total = sum(x.n_total for x in rows)
        out.append(AccuracyRecord(r.angle_deg, float(np.mean([x.accuracy for x in rows])),
                                  n_correct, n_total))
    return SweepReport(out, {"repeats": len(reports)})
