"""Command-line interface: ``gidalign {estimate,align,sweep,consistency}``.

Angles on the command line are in degrees. Reported orientations use the
raw image convention: 0 points along +column (right), positive angles turn
towards +row (down the screen).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .datasets import FormatError, LabeledImageSet, load_prepared, read_pgm_file, write_pgm_file
from .evaluation import (
    SweepConfig,
    mean_report,
    parse_angle_range,
    run_consistency,
    run_sweep,
    subsample,
    write_csv,
)
from .gid import ChannelMode, GidConfig, canonicalize, estimate_orientation
from .warp import InterpMethod

log = logging.getLogger("gidalign")

INTERP_CHOICES = [m.value for m in InterpMethod]
MODE_CHOICES = [m.value for m in ChannelMode]


class CliError(Exception):
    pass


def _echo(args: argparse.Namespace) -> None:
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        print(f"{key}={value}", file=sys.stderr)


def _as_list(est):
    return list(est) if isinstance(est, tuple) else [est]


def cmd_estimate(args) -> int:
    img = read_pgm_file(args.image)
    est = estimate_orientation(img, args.channel_mode)
    many = isinstance(est, tuple)
    for k, e in enumerate(_as_list(est)):
        prefix = f"channel_{k}." if many else ""
        print(f"{prefix}angle_deg: {math.degrees(e.angle):.6f}")
        print(f"{prefix}magnitude: {e.magnitude:.6g}")
        print(f"{prefix}degenerate: {str(e.degenerate).lower()}")
    return 0


def cmd_align(args) -> int:
    img = read_pgm_file(args.input)
    cfg = GidConfig(args.interp, args.channel_mode)
    out, est = canonicalize(img, cfg)
    for k, e in enumerate(_as_list(est)):
        if e.degenerate:
            print(f"warning: orientation of channel/image {k} is degenerate; left unrotated",
                  file=sys.stderr)
        else:
            print(f"rotated_by_deg={-math.degrees(e.angle):.6f}", file=sys.stderr)
    write_pgm_file(out, args.output)
    return 0


def _load_sets(args) -> tuple[LabeledImageSet, LabeledImageSet]:
    try:
        train = load_prepared(args.dataset, args.data_dir, "train")
        test = load_prepared(args.dataset, args.data_dir, "test")
    except FileNotFoundError as exc:
        raise CliError(f"{exc}; place the {args.dataset} files in --data-dir") from None
    return train, test


def _angles(text: str) -> list[float]:
    try:
        return parse_angle_range(text)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _write(report, out: str) -> None:
    if out == "-":
        write_csv(report, sys.stdout.buffer)
        sys.stdout.flush()
    else:
        with open(out, "wb") as fh:
            write_csv(report, fh)


def _repeat_path(out: str, tag: str) -> str:
    p = Path(out)
    return str(p.with_name(f"{p.stem}_{tag}{p.suffix or '.csv'}"))


def cmd_sweep(args) -> int:
    angles = _angles(args.angles)
    start, stop, step = (float(x) for x in args.angles.split(":"))
    if args.repeats < 1:
        raise CliError("--repeats must be >= 1")
    if args.repeats > 1 and args.out == "-":
        raise CliError("--repeats > 1 needs --out FILE")
    train, test = _load_sets(args)
    reports = []
    for r in range(args.repeats):
        cfg = SweepConfig(start, stop, step, args.train_n, args.test_n, args.k,
                          args.pipeline, GidConfig(args.interp, args.channel_mode),
                          args.seed + r)
        try:
            rep = run_sweep(train, test, cfg, n_jobs=args.jobs)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        assert len(rep.records) == len(angles)
        reports.append(rep)
        log.info("repeat %d: mean accuracy %.4f, flatness %.4f, %.1fs", r,
                 float(rep.accuracies.mean()), rep.flatness(), rep.metadata["wall_time_s"])
    if args.repeats == 1:
        _write(reports[0], args.out)
    else:
        for r, rep in enumerate(reports):
            _write(rep, _repeat_path(args.out, f"r{r}"))
        _write(mean_report(reports), _repeat_path(args.out, "mean"))
    return 0


def cmd_consistency(args) -> int:
    angles = _angles(args.angles)
    _, test = _load_sets(args)
    try:
        test = subsample(test, args.test_n, np.random.default_rng(args.seed))
    except ValueError as exc:
        raise CliError(str(exc)) from None
    rep = run_consistency(test, angles, GidConfig(args.interp, args.channel_mode))
    print(f"mean_spread_deg={rep.mean_spread:.6g}", file=sys.stderr)
    print(f"max_spread_deg={rep.max_spread:.6g}", file=sys.stderr)
    print(f"degenerate_count={rep.degenerate_count}", file=sys.stderr)
    _write(rep, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="gidalign", formatter_class=fmt,
                                     description="Intensity-direction image canonicalization")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", formatter_class=fmt, help="print the orientation of a PGM/PPM image")
    p.add_argument("image", help="input PGM (P5) or PPM (P6) file")
    p.add_argument("--channel-mode", choices=MODE_CHOICES, default="aggregate",
                   help="one angle from the channel mean, or one angle per channel")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("align", formatter_class=fmt, help="write the canonicalized image")
    p.add_argument("input", help="input PGM/PPM file")
    p.add_argument("output", help="output PGM/PPM file")
    p.add_argument("--interp", choices=INTERP_CHOICES, default="bilinear",
                   help="resampling kernel")
    p.add_argument("--channel-mode", choices=MODE_CHOICES, default="aggregate",
                   help="shared warp from the channel mean, or one warp per channel")
    p.set_defaults(func=cmd_align)

    def data_flags(p):
        p.add_argument("--dataset", choices=["mnist", "cifar10"], default="mnist",
                       help="mnist is padded to 32x32, cifar10 grayscaled and padded to 46x46")
        p.add_argument("--data-dir", default="data", help="directory holding the dataset files")
        p.add_argument("--interp", choices=INTERP_CHOICES, default="bilinear",
                       help="kernel for the GID rotation step")
        p.add_argument("--channel-mode", choices=MODE_CHOICES, default="aggregate",
                       help="channel policy for the GID step")
        p.add_argument("--seed", type=int, default=42, help="subsampling seed")
        p.add_argument("--out", default="-", help="CSV output path ('-' for stdout)")

    p = sub.add_parser("sweep", formatter_class=fmt, help="accuracy vs. input rotation")
    data_flags(p)
    p.add_argument("--pipeline", choices=["baseline", "gid"], default="gid",
                   help="classify raw rotated images, or canonicalize first")
    p.add_argument("--train-n", type=int, default=1000, help="training images drawn")
    p.add_argument("--test-n", type=int, default=200, help="test images drawn")
    p.add_argument("--k", type=int, default=3, help="neighbours for k-NN (odd)")
    p.add_argument("--angles", default="0:360:1", help="start:stop:step in degrees, stop inclusive")
    p.add_argument("--repeats", type=int, default=1,
                   help="reseeded repeats; >1 writes one CSV per repeat plus a mean CSV")
    p.add_argument("--jobs", type=int, default=1, help="worker threads over angles")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("consistency", formatter_class=fmt,
                       help="spread of canonical orientation across rotated copies")
    data_flags(p)
    p.add_argument("--test-n", type=int, default=100, help="test images drawn")
    p.add_argument("--angles", default="0:350:10", help="start:stop:step in degrees, stop inclusive")
    p.set_defaults(func=cmd_consistency)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    _echo(args)
    try:
        return args.func(args)
    except (CliError, FormatError, OSError, ValueError) as exc:
        print(f"gidalign {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
