"""Write a small MNIST-style IDX subset built from scikit-learn's bundled digits.

The 8x8 digit images (pixel range 0..16) are rescaled to 0..255 and split into a
seeded 1000-sample training set and a 200-sample test set.

    python3 scripts/make_digits_idx.py crates/core/tests/data
"""

import struct
import sys
from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits

SEED = 20240601
N_TRAIN = 1000
N_TEST = 200


def write_images(path, images):
    n, rows, cols = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, n, rows, cols))
        f.write(images.astype(np.uint8).tobytes())


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    digits = load_digits()
    images = np.rint(digits.images * (255.0 / 16.0)).clip(0, 255)
    order = np.random.default_rng(SEED).permutation(len(images))
    train = order[:N_TRAIN]
    test = order[N_TRAIN:N_TRAIN + N_TEST]
    write_images(out / "digits-train-images.idx", images[train])
    write_labels(out / "digits-train-labels.idx", digits.target[train])
    write_images(out / "digits-test-images.idx", images[test])
    write_labels(out / "digits-test-labels.idx", digits.target[test])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data")
