"""Build the bundled MNIST test fixture from the 5000-digit subset in mlxtend.

mlxtend ships 500 digits per class drawn from the official MNIST training
set as a CSV. This script shuffles them with a fixed seed and writes a
4000/1000 split in gzipped IDX format, using the standard MNIST file names,
so the regular loaders read it.

    pip download --no-deps mlxtend -d /tmp/mlx
    python tools/make_mnist_subset.py /tmp/mlx/mlxtend-*.whl tests/data/mnist5k
"""

import argparse
import gzip
import io
import zipfile
from pathlib import Path

import numpy as np

from gidalign.datasets import write_idx

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("wheel")
    ap.add_argument("out_dir")
    ap.add_argument("--n-train", type=int, default=4000)
    args = ap.parse_args()

    raw = gzip.decompress(zipfile.ZipFile(args.wheel).read(MEMBER))
    table = np.loadtxt(io.BytesIO(raw), delimiter=",", dtype=np.int64)
    images = table[:, :-1].astype(np.uint8).reshape(-1, 28, 28)
    labels = table[:, -1].astype(np.uint8)
    order = np.random.default_rng(0).permutation(len(labels))
    images, labels = images[order], labels[order]

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = args.n_train
    for prefix, sl in (("train", slice(0, n)), ("t10k", slice(n, None))):
        for kind, arr in (("images-idx3", images[sl]), ("labels-idx1", labels[sl])):
            buf = io.BytesIO()
            write_idx(arr, buf)
            # mtime=0 keeps the gzip bytes reproducible
            (out / f"{prefix}-{kind}-ubyte.gz").write_bytes(gzip.compress(buf.getvalue(), mtime=0))


if __name__ == "__main__":
    main()
