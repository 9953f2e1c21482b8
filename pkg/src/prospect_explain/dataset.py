"""Prospect feature schema, CSV I/O, splitting, scaling, class statistics.

A prospect is described by six scores in [0, 1] (geologic probability
estimates and data-quality grades) plus a binary drilled outcome. All
container types here are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .rng import Xoshiro256PP

FEATURE_NAMES = (
    "initial_pg",
    "dhi_index",
    "final_pg",
    "data_quality_1",
    "data_quality_2",
    "data_quality_3",
)
N_FEATURES = len(FEATURE_NAMES)
CSV_HEADER = "id," + ",".join(FEATURE_NAMES) + ",outcome"

HIST_BINS = 10


class DatasetError(ValueError):
    """Raised for malformed prospect data (file or in-memory)."""


def _fmt(value: float) -> str:
    """Serialize a float with 17 significant digits (lossless round-trip)."""
    return format(value, ".17g")


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names; the column contract for every dataset."""

    names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        if tuple(self.names) != FEATURE_NAMES:
            raise DatasetError(
                f"feature schema must be exactly {FEATURE_NAMES}, got {tuple(self.names)}"
            )

    def index_of(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class ProspectRecord:
    """One prospect: integer id, six scores in [0, 1], binary outcome."""

    id: int
    features: tuple[float, ...]
    outcome: int

    def __post_init__(self):
        if self.id < 0:
            raise DatasetError(f"record id must be non-negative, got {self.id}")
        if len(self.features) != N_FEATURES:
            raise DatasetError(
                f"record {self.id}: expected {N_FEATURES} features, got {len(self.features)}"
            )
        for name, value in zip(FEATURE_NAMES, self.features):
            if not math.isfinite(value):
                raise DatasetError(f"record {self.id}: {name} is not finite")
            if not 0.0 <= value <= 1.0:
                raise DatasetError(
                    f"record {self.id}: {name} = {value} outside [0, 1]"
                )
        if self.outcome not in (0, 1):
            raise DatasetError(
                f"record {self.id}: outcome must be 0 or 1, got {self.outcome}"
            )


@dataclass(frozen=True)
class Dataset:
    """Ordered prospect records with their shared schema."""

    schema: FeatureSchema
    records: tuple[ProspectRecord, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for rec in self.records:
            if rec.id in seen:
                raise DatasetError(f"duplicate record id {rec.id}")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def feature_matrix(self) -> np.ndarray:
        return np.array([rec.features for rec in self.records], dtype=np.float64)

    def outcome_vector(self) -> np.ndarray:
        return np.array([rec.outcome for rec in self.records], dtype=np.float64)

    def class_counts(self) -> tuple[int, int]:
        ones = sum(rec.outcome for rec in self.records)
        return (len(self.records) - ones, ones)

    def record_by_id(self, record_id: int) -> ProspectRecord:
        for rec in self.records:
            if rec.id == record_id:
                return rec
        raise DatasetError(f"no record with id {record_id}")


def make_dataset(records) -> Dataset:
    return Dataset(schema=FeatureSchema(), records=tuple(records))


# ---------------------------------------------------------------------------
# CSV round-trip
# ---------------------------------------------------------------------------

def format_dataset(ds: Dataset) -> str:
    """Render a dataset as CSV text (LF line endings, 17 sig digits)."""
    lines = [CSV_HEADER]
    for rec in ds.records:
        cells = [str(rec.id)]
        cells.extend(_fmt(v) for v in rec.features)
        cells.append(str(rec.outcome))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_dataset(text: str) -> Dataset:
    """Parse CSV text into a Dataset, validating every cell.

    Errors name the offending data row (1-based, header excluded).
    """
    lines = text.splitlines()
    if not lines:
        raise DatasetError("empty input: missing header")
    if lines[0].strip("\r") != CSV_HEADER:
        raise DatasetError(
            f"malformed header: expected '{CSV_HEADER}', got '{lines[0].strip(chr(13))}'"
        )
    records = []
    seen: set[int] = set()
    for row_no, raw in enumerate(lines[1:], start=1):
        line = raw.strip("\r")
        if line == "":
            continue
        cells = line.split(",")
        if len(cells) != N_FEATURES + 2:
            raise DatasetError(
                f"row {row_no}: expected {N_FEATURES + 2} columns, got {len(cells)}"
            )
        try:
            rec_id = int(cells[0])
        except ValueError:
            raise DatasetError(f"row {row_no}: non-numeric id '{cells[0]}'") from None
        if rec_id in seen:
            raise DatasetError(f"row {row_no}: duplicate id {rec_id}")
        seen.add(rec_id)
        features = []
        for name, cell in zip(FEATURE_NAMES, cells[1 : 1 + N_FEATURES]):
            try:
                value = float(cell)
            except ValueError:
                raise DatasetError(
                    f"row {row_no}: non-numeric {name} '{cell}'"
                ) from None
            if not math.isfinite(value):
                raise DatasetError(f"row {row_no}: {name} is not finite")
            if not 0.0 <= value <= 1.0:
                raise DatasetError(f"row {row_no}: {name} = {cell} outside [0, 1]")
            features.append(value)
        if cells[-1] not in ("0", "1"):
            raise DatasetError(
                f"row {row_no}: outcome must be 0 or 1, got '{cells[-1]}'"
            )
        records.append(
            ProspectRecord(id=rec_id, features=tuple(features), outcome=int(cells[-1]))
        )
    return make_dataset(records)


def load_dataset(path: str) -> Dataset:
    if not os.path.exists(path):
        raise DatasetError(f"no such file: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_dataset(fh.read())


def save_dataset(ds: Dataset, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_dataset(ds))


# ---------------------------------------------------------------------------
# Train/test split
# ---------------------------------------------------------------------------

def split_train_test(
    ds: Dataset, test_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Stratified split driven by the seeded generator.

    Within each class the records are shuffled and the first
    ceil(test_fraction * class_count) go to the test side. Both sides
    must end up with at least one record of each class. Record order
    within each side follows the input dataset.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError(f"test_fraction must be in (0, 1), got {test_fraction}")
    by_class: dict[int, list[int]] = {0: [], 1: []}
    for pos, rec in enumerate(ds.records):
        by_class[rec.outcome].append(pos)
    for label in (0, 1):
        if len(by_class[label]) < 2:
            raise DatasetError(
                f"class {label} has {len(by_class[label])} records; need at least 2 to split"
            )
    rng = Xoshiro256PP(seed)
    test_positions: set[int] = set()
    for label in (0, 1):
        positions = by_class[label]
        n_test = math.ceil(test_fraction * len(positions))
        if n_test == 0 or n_test == len(positions):
            raise DatasetError(
                f"test_fraction {test_fraction} leaves class {label} empty on one side"
            )
        shuffled = list(positions)
        rng.shuffle(shuffled)
        test_positions.update(shuffled[:n_test])
    train = [rec for pos, rec in enumerate(ds.records) if pos not in test_positions]
    test = [rec for pos, rec in enumerate(ds.records) if pos in test_positions]
    return make_dataset(train), make_dataset(test)


# ---------------------------------------------------------------------------
# Standardization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scaler:
    """Per-feature mean/std pairs; std uses the n-1 denominator."""

    means: tuple[float, ...]
    stds: tuple[float, ...]

    def __post_init__(self):
        if len(self.means) != N_FEATURES or len(self.stds) != N_FEATURES:
            raise DatasetError("scaler must carry exactly 6 means and 6 stds")
        for name, s in zip(FEATURE_NAMES, self.stds):
            if not s > 0.0:
                raise DatasetError(f"scaler std for {name} must be positive, got {s}")


def fit_scaler(ds: Dataset) -> Scaler:
    """Sample mean/std per feature; rejects degenerate features by name."""
    if len(ds) < 2:
        raise DatasetError(f"need at least 2 records to fit a scaler, got {len(ds)}")
    x = ds.feature_matrix()
    means = x.mean(axis=0)
    stds = x.std(axis=0, ddof=1)
    for name, s in zip(FEATURE_NAMES, stds):
        if s == 0.0:
            raise DatasetError(f"feature {name} has zero variance; cannot standardize")
    return Scaler(means=tuple(float(m) for m in means), stds=tuple(float(s) for s in stds))


def apply_scaler(scaler: Scaler, x) -> np.ndarray:
    """Standardize one raw feature vector: (x - mean) / std."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (N_FEATURES,):
        raise DatasetError(f"expected {N_FEATURES} features, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise DatasetError("non-finite value in feature vector")
    return (arr - np.asarray(scaler.means)) / np.asarray(scaler.stds)


def invert_scaler(scaler: Scaler, z) -> np.ndarray:
    """Map standardized coordinates back to raw feature space."""
    arr = np.asarray(z, dtype=np.float64)
    return arr * np.asarray(scaler.stds) + np.asarray(scaler.means)


def standardize_matrix(scaler: Scaler, x: np.ndarray) -> np.ndarray:
    return (x - np.asarray(scaler.means)) / np.asarray(scaler.stds)


# ---------------------------------------------------------------------------
# Class-conditional feature statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FeatureStats:
    """Moments and a 10-bin histogram over [0, 1] for one (class, feature)."""

    count: int
    mean: float | None
    std: float | None
    histogram: tuple[int, ...]

    def __post_init__(self):
        if len(self.histogram) != HIST_BINS:
            raise DatasetError("histogram must have exactly 10 bins")
        if sum(self.histogram) != self.count:
            raise DatasetError("histogram counts must sum to the class count")


@dataclass(frozen=True)
class ClassStats:
    """Per-class, per-feature statistics (outcome 0 and outcome 1)."""

    schema: FeatureSchema = field(default_factory=FeatureSchema)
    per_class: tuple[tuple[FeatureStats, ...], tuple[FeatureStats, ...]] = ()

    def stats_for(self, label: int, feature: str) -> FeatureStats:
        return self.per_class[label][self.schema.index_of(feature)]


def _hist_bin(value: float) -> int:
    # Equal bins on [0, 1]; the last bin is closed on the right.
    return min(int(value * HIST_BINS), HIST_BINS - 1)


def class_feature_stats(ds: Dataset) -> ClassStats:
    """Moments and histograms computed separately for each outcome class.

    An absent class is representable: count 0 with undefined (None)
    moments. A single-record class has a mean but no sample std.
    """
    if len(ds) == 0:
        raise DatasetError("cannot compute statistics of an empty dataset")
    per_class = []
    for label in (0, 1):
        rows = [rec.features for rec in ds.records if rec.outcome == label]
        stats = []
        for j in range(N_FEATURES):
            values = [row[j] for row in rows]
            hist = [0] * HIST_BINS
            for v in values:
                hist[_hist_bin(v)] += 1
            n = len(values)
            if n == 0:
                mean, std = None, None
            else:
                mean = float(np.mean(values))
                std = float(np.std(values, ddof=1)) if n > 1 else None
            stats.append(
                FeatureStats(count=n, mean=mean, std=std, histogram=tuple(hist))
            )
        per_class.append(tuple(stats))
    return ClassStats(per_class=(per_class[0], per_class[1]))
