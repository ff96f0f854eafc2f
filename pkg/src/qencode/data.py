"""Synthetic binary classification data, scaling, splitting and CSV I/O."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal, Optional

import numpy as np


class DataError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels)
        if x.ndim != 2:
            raise DataError("features must be a 2-D array")
        if y.shape != (x.shape[0],):
            raise DataError(f"{x.shape[0]} feature rows but {y.size} labels")
        if np.isnan(x).any():
            raise DataError("features contain NaN")
        if not np.isin(y, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        names = tuple(self.feature_names) or tuple(f"f{i}" for i in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise DataError("feature_names length does not match feature columns")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y.astype(int))
        object.__setattr__(self, "feature_names", names)

    def __len__(self) -> int:
        return self.labels.size

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, index) -> Dataset:
        return Dataset(self.features[index], self.labels[index], self.feature_names, dict(self.provenance))

    def with_features(self, features) -> Dataset:
        return Dataset(features, self.labels, self.feature_names, dict(self.provenance))


@dataclass(frozen=True)
class GeneratorConfig:
    n_samples: int = 1000
    n_features: int = 6
    n_informative: int = 2
    n_redundant: int = 2
    n_clusters_per_class: int = 2
    class_sep: float = 1.0
    seed: int = 42
    shuffle: bool = False

    def validate(self) -> None:
        if self.n_samples < 2:
            raise DataError("n_samples must be >= 2")
        if self.n_features < 1:
            raise DataError("n_features must be >= 1")
        if self.n_informative < 1:
            raise DataError("n_informative must be >= 1")
        if self.n_informative + self.n_redundant > self.n_features:
            raise DataError("n_informative + n_redundant must not exceed n_features")
        if self.n_clusters_per_class < 1:
            raise DataError("n_clusters_per_class must be >= 1")
        if 2 ** self.n_informative < 2 * self.n_clusters_per_class:
            raise DataError("n_informative too small for 2 * n_clusters_per_class hypercube vertices")


def generate_classification(config: GeneratorConfig = GeneratorConfig()) -> Dataset:
    """Gaussian clusters on hypercube vertices, one block per class.

    Each class owns ``n_clusters_per_class`` distinct vertices of the
    ``{-class_sep, +class_sep}`` hypercube in the informative subspace.
    Redundant columns are fixed random combinations of the informative ones,
    and any remaining columns are pure noise. Without shuffling, class 0 rows
    come first.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    n_inf, n_red = config.n_informative, config.n_redundant
    n_clusters = 2 * config.n_clusters_per_class

    vertex_ids = rng.choice(2**n_inf, size=n_clusters, replace=False)
    bits = (vertex_ids[:, None] >> np.arange(n_inf)) & 1
    centroids = (2.0 * bits - 1.0) * config.class_sep

    per_class = [config.n_samples - config.n_samples // 2, config.n_samples // 2]
    blocks, labels = [], []
    for cls, count in enumerate(per_class):
        k = config.n_clusters_per_class
        sizes = [count // k + (1 if i < count % k else 0) for i in range(k)]
        for i, size in enumerate(sizes):
            centroid = centroids[cls * k + i]
            blocks.append(centroid + rng.standard_normal((size, n_inf)))
        labels.append(np.full(count, cls))
    informative = np.vstack(blocks)
    y = np.concatenate(labels)

    mixing = 2.0 * rng.random((n_inf, n_red)) - 1.0
    redundant = informative @ mixing
    noise = rng.standard_normal((config.n_samples, config.n_features - n_inf - n_red))
    x = np.hstack([informative, redundant, noise])

    if config.shuffle:
        order = rng.permutation(config.n_samples)
        x, y = x[order], y[order]
    provenance = {"generator": "hypercube_clusters", **asdict(config)}
    return Dataset(x, y, tuple(f"f{i}" for i in range(config.n_features)), provenance)


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScalerParams:
    kind: Literal["standard", "minmax"]
    center: np.ndarray  # mean or min
    spread: np.ndarray  # std or (max - min)
    feature_range: tuple[float, float] = (0.0, math.pi)

    def to_json(self) -> dict:
        return {"kind": self.kind, "center": self.center.tolist(), "spread": self.spread.tolist(),
                "feature_range": list(self.feature_range)}

    @classmethod
    def from_json(cls, obj: dict) -> ScalerParams:
        return cls(obj["kind"], np.array(obj["center"]), np.array(obj["spread"]),
                   tuple(obj.get("feature_range", (0.0, math.pi))))


def fit_scaler(data, kind: str = "minmax", feature_range: tuple[float, float] = (0.0, math.pi)) -> ScalerParams:
    x = data.features if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if kind == "standard":
        center, spread = x.mean(axis=0), x.std(axis=0)
        if np.any(spread == 0):
            raise DataError(f"constant feature column(s) {np.flatnonzero(spread == 0).tolist()}")
    elif kind == "minmax":
        center = x.min(axis=0)
        spread = x.max(axis=0) - center
        if np.any(spread == 0):
            raise DataError(f"constant feature column(s) {np.flatnonzero(spread == 0).tolist()}")
        lo, hi = feature_range
        if not hi > lo:
            raise DataError("feature_range must satisfy lo < hi")
    else:
        raise DataError(f"unknown scaler kind {kind!r}")
    return ScalerParams(kind, center, spread, tuple(float(v) for v in feature_range))


def apply_scaler(params: ScalerParams, features):
    """Scale features with fitted statistics. Values outside the fit range pass through unclipped."""
    if isinstance(features, Dataset):
        return features.with_features(apply_scaler(params, features.features))
    x = np.asarray(features, dtype=float)
    if params.kind == "standard":
        return (x - params.center) / params.spread
    lo, hi = params.feature_range
    return lo + (x - params.center) * (hi - lo) / params.spread


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------


def split_indices(n: int, test_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if not 0 < test_fraction < 1:
        raise DataError("test_fraction must lie strictly between 0 and 1")
    n_train = math.ceil(round(n * (1 - test_fraction), 9))
    if n_train == 0 or n_train == n:
        raise DataError(f"split of {n} rows at test_fraction={test_fraction} leaves an empty partition")
    order = np.random.default_rng(seed).permutation(n)
    return order[:n_train], order[n_train:]


def train_test_split(data: Dataset, test_fraction: float = 0.2, seed: int = 42) -> tuple[Dataset, Dataset]:
    train_idx, test_idx = split_indices(len(data), test_fraction, seed)
    return data.subset(train_idx), data.subset(test_idx)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def write_csv(data: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(data.feature_names) + ["label"])
        for row, label in zip(data.features, data.labels):
            writer.writerow([repr(float(v)) for v in row] + [str(int(label))])


def read_csv(path) -> Dataset:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty") from None
        if "label" not in header:
            raise DataError(f"{path}: line 1: missing 'label' column")
        label_col = header.index("label")
        names = [h for i, h in enumerate(header) if i != label_col]
        rows, labels = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: line {line_no}: expected {len(header)} fields, got {len(row)}")
            try:
                values = [float(v) for i, v in enumerate(row) if i != label_col]
                label = float(row[label_col])
            except ValueError as exc:
                raise DataError(f"{path}: line {line_no}: non-numeric cell ({exc})") from None
            if label not in (0.0, 1.0):
                raise DataError(f"{path}: line {line_no}: label must be 0 or 1, got {row[label_col]!r}")
            rows.append(values)
            labels.append(int(label))
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset(np.array(rows), np.array(labels), tuple(names), {"source": str(path)})


def least_squares_accuracy(train: Dataset, test: Dataset) -> float:
    """Test accuracy of a least-squares linear classifier; a generator sanity probe."""
    a = np.hstack([train.features, np.ones((len(train), 1))])
    w, *_ = np.linalg.lstsq(a, 2.0 * train.labels - 1.0, rcond=None)
    pred = (np.hstack([test.features, np.ones((len(test), 1))]) @ w > 0).astype(int)
    return float(np.mean(pred == test.labels))


def load_or_generate(path: Optional[str], config: GeneratorConfig = GeneratorConfig()) -> Dataset:
    return read_csv(path) if path else generate_classification(config)
