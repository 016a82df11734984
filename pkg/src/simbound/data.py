"""Dataset container, CSV and JSON serialization, generators, and splits.

CSV layout: one row per example, ``label,feat_1,...,feat_d``.  Labels must be
one of the tokens ``-1``, ``1``, ``+1``.  A header row is recognized only when
the first cell is the literal ``label``.  All randomness flows through Philox
counter-based streams keyed by the caller's seed; normal variates come from
numpy's ziggurat sampler on those streams, and the draw order (labels first,
then the noise matrix) is fixed, so generation is reproducible byte for byte.
"""

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class GeneratorKind(str, Enum):
    TWO_GAUSSIANS = "two_gaussians"
    SPARSE_BLOBS = "sparse_blobs"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labeled sample: features (m, d) float64, labels (m,) valued in {-1, +1}."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.ascontiguousarray(np.asarray(self.features, dtype=float))
        labels = np.asarray(self.labels, dtype=float)
        if features.ndim != 2:
            raise ValueError(f"features must be 2-dimensional, got shape {features.shape}")
        if features.shape[0] < 1 or features.shape[1] < 1:
            raise ValueError(f"dataset needs at least one row and one column, got shape {features.shape}")
        if labels.shape != (features.shape[0],):
            raise ValueError(
                f"labels shape {labels.shape} does not match {features.shape[0]} rows"
            )
        if not np.all((labels == 1.0) | (labels == -1.0)):
            raise ValueError("labels must be exactly -1 or +1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for the synthetic two-class generators.

    two_gaussians: labels are uniform on {-1, +1}; features are drawn from
    Normal(y * mu, noise_sigma^2 I) with mu = (mean_separation / 2) * 1/sqrt(d)
    in every coordinate.  sparse_blobs uses the same mean on the first
    d - irrelevant_dims coordinates and leaves the remaining coordinates as
    pure Normal(0, noise_sigma^2) noise.
    """

    kind: GeneratorKind
    d: int
    mean_separation: float
    noise_sigma: float
    irrelevant_dims: int = 0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", GeneratorKind(self.kind))
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if not self.noise_sigma > 0:
            raise ValueError(f"noise_sigma must be positive, got {self.noise_sigma}")
        if self.irrelevant_dims < 0:
            raise ValueError(f"irrelevant_dims must be nonnegative, got {self.irrelevant_dims}")
        if self.kind is GeneratorKind.SPARSE_BLOBS and self.irrelevant_dims >= self.d:
            raise ValueError(
                f"irrelevant_dims must be below d for sparse blobs, got {self.irrelevant_dims} with d={self.d}"
            )
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


def philox_generator(seed, stream=0):
    """Philox counter-based generator; distinct streams never overlap."""
    return np.random.Generator(np.random.Philox(key=seed, counter=stream << 128))


def generate(spec, m):
    """Draw m examples from the generator described by spec."""
    if m < 1:
        raise ValueError(f"sample size must be positive, got {m}")
    rng = philox_generator(spec.seed)
    labels = rng.integers(0, 2, size=m).astype(float) * 2.0 - 1.0
    noise = rng.standard_normal((m, spec.d))
    mean = np.zeros(spec.d)
    informative = spec.d - spec.irrelevant_dims if spec.kind is GeneratorKind.SPARSE_BLOBS else spec.d
    mean[:informative] = spec.mean_separation / (2.0 * math.sqrt(spec.d))
    features = labels[:, None] * mean[None, :] + spec.noise_sigma * noise
    return Dataset(features, labels)


def split(data, train_fraction, seed):
    """Partition rows into (train, test) by a seeded shuffle.

    The train part receives ceil(train_fraction * m) rows.  Raises if either
    side would be empty.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie strictly between 0 and 1, got {train_fraction}")
    n_train = math.ceil(train_fraction * data.m)
    if n_train < 1 or n_train >= data.m:
        raise ValueError(
            f"degenerate split: {n_train} of {data.m} rows on the train side"
        )
    perm = philox_generator(seed).permutation(data.m)
    train_idx = perm[:n_train]
    test_idx = perm[n_train:]
    return (
        Dataset(data.features[train_idx], data.labels[train_idx]),
        Dataset(data.features[test_idx], data.labels[test_idx]),
    )


_LABEL_TOKENS = {"-1": -1.0, "1": 1.0, "+1": 1.0}


def load_csv(path):
    """Read a dataset, enforcing the strict label policy.

    Errors name the offending row by its line number in the file.
    """
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    rows = []
    expected_d = None
    for line_no, line in enumerate(lines, start=1):
        if line.strip() == "":
            continue
        cells = [cell.strip() for cell in line.split(",")]
        if line_no == 1 and cells[0] == "label":
            continue
        token = cells[0]
        if token not in _LABEL_TOKENS:
            raise ValueError(
                f"row {line_no}: invalid label token {token!r} (expected -1, 1, or +1)"
            )
        if len(cells) < 2:
            raise ValueError(f"row {line_no}: no feature columns")
        if expected_d is None:
            expected_d = len(cells) - 1
        elif len(cells) - 1 != expected_d:
            raise ValueError(
                f"row {line_no}: expected {expected_d} features, got {len(cells) - 1}"
            )
        try:
            feats = [float(cell) for cell in cells[1:]]
        except ValueError as exc:
            raise ValueError(f"row {line_no}: non-numeric feature value ({exc})") from None
        rows.append((_LABEL_TOKENS[token], feats))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    labels = np.array([r[0] for r in rows])
    features = np.array([r[1] for r in rows])
    return Dataset(features, labels)


def save_csv(data, path):
    """Write a dataset in the same layout load_csv reads.

    Floats are written in shortest round-trip decimal form, so a
    save/load cycle reproduces the dataset exactly.
    """
    with open(path, "w", encoding="utf-8") as handle:
        for label, row in zip(data.labels, data.features):
            cells = [str(int(label))] + [repr(float(v)) for v in row]
            handle.write(",".join(cells) + "\n")


def dataset_to_json_dict(data):
    return {
        "m": data.m,
        "d": data.d,
        "labels": [int(v) for v in data.labels],
        "features": [[float(v) for v in row] for row in data.features],
    }


def dataset_from_json_dict(doc):
    for field in ("labels", "features"):
        if field not in doc:
            raise ValueError(f"dataset document missing field {field!r}")
    return Dataset(np.array(doc["features"], dtype=float), np.array(doc["labels"], dtype=float))


def save_json(data, path):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(dataset_to_json_dict(data), handle, indent=2)
        handle.write("\n")


def load_json(path):
    with open(path, "r", encoding="utf-8") as handle:
        return dataset_from_json_dict(json.load(handle))
