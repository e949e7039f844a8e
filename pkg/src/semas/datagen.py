"""Synthetic sensor datasets, CSV ingestion, standardization and splits.

The real plant datasets are not redistributable, so experiments run on a
profile-matched generator: sample counts, feature widths, anomaly
prevalence and split fractions mirror the published characteristics of a
boiler emulator (10k cycles, 18 features, 36.8% anomalies) and a wind
turbine SCADA export (500 rows, 42 features, 45% faults).  Fault rows mix
mean shifts, noise inflation and a severity-scaled drift term so that
detectors face a learnable but non-trivial separation; every manifest
flags the generator as a stand-in for the engineered fault scenarios.
"""

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import CalledOnNormal, InvalidProfile, SchemaMismatch, SingleClass, UnreadableFile

log = logging.getLogger(__name__)

RUL_MAX = 100.0
RUL_MIN = 5.0


@dataclass(frozen=True)
class DatasetProfile:
    n_samples: int
    n_features: int
    anomaly_prevalence: float
    split: float
    fault_modes: int
    seed: int
    separation: float = 1.0

    def with_seed(self, seed: int) -> "DatasetProfile":
        return replace(self, seed=seed)


BOILER = DatasetProfile(
    n_samples=10_000,
    n_features=18,
    anomaly_prevalence=0.368,
    split=0.80,
    fault_modes=3,
    seed=42,
    separation=1.0,
)

WIND = DatasetProfile(
    n_samples=500,
    n_features=42,
    anomaly_prevalence=0.45,
    split=0.80,
    fault_modes=5,
    seed=42,
    separation=2.5,
)

# reduced boiler-shaped profile for quick demos and CI runs
BOILER_SMALL = DatasetProfile(
    n_samples=2_000,
    n_features=18,
    anomaly_prevalence=0.368,
    split=0.80,
    fault_modes=3,
    seed=42,
    separation=1.0,
)

PROFILES = {"boiler": BOILER, "wind": WIND, "boiler-small": BOILER_SMALL}

# anomaly-shape coefficients, scaled by profile.separation and severity
_SHARED_SHIFT = 4.4
_MODE_SHIFT = 2.0
_DRIFT_SHIFT = 1.0
_NOISE_INFLATION = 1.5


@dataclass(frozen=True)
class LabeledSample:
    features: np.ndarray
    label: int
    rul_hours: Optional[float]
    fault_mode: int


class Dataset:
    """Array-backed sample collection; indexing yields LabeledSample views."""

    def __init__(self, features, labels, rul_hours=None, fault_modes=None, severity=None):
        self.features = np.asarray(features, dtype=np.float64)
        self.labels = np.asarray(labels, dtype=np.int64)
        n = len(self.labels)
        if self.features.shape[0] != n:
            raise ValueError("features/labels length mismatch")
        self.rul_hours = (
            np.full(n, np.nan) if rul_hours is None else np.asarray(rul_hours, dtype=np.float64)
        )
        self.fault_modes = (
            np.full(n, -1, dtype=np.int64)
            if fault_modes is None
            else np.asarray(fault_modes, dtype=np.int64)
        )
        self.severity = (
            np.zeros(n) if severity is None else np.asarray(severity, dtype=np.float64)
        )

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, i: int) -> LabeledSample:
        label = int(self.labels[i])
        rul = float(self.rul_hours[i]) if label == 1 and np.isfinite(self.rul_hours[i]) else None
        return LabeledSample(self.features[i], label, rul, int(self.fault_modes[i]))

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(
            self.features[idx],
            self.labels[idx],
            self.rul_hours[idx],
            self.fault_modes[idx],
            self.severity[idx],
        )

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def generate(profile: DatasetProfile) -> Dataset:
    """Draw a full synthetic dataset for the profile, deterministic in seed."""
    if not (0.0 < profile.anomaly_prevalence < 1.0):
        raise InvalidProfile("anomaly_prevalence must be inside (0, 1)")
    if profile.n_features < 1 or profile.n_samples < 4:
        raise InvalidProfile("need at least 1 feature and 4 samples")
    if profile.fault_modes < 1:
        raise InvalidProfile("need at least one fault mode")

    rng = np.random.default_rng(profile.seed)
    n, d = profile.n_samples, profile.n_features
    n_anom = int(round(profile.anomaly_prevalence * n))
    n_norm = n - n_anom

    # shared latent-factor structure gives correlated channels
    r = max(2, d // 6)
    loadings = rng.normal(0.0, 0.6, size=(r, d))
    feat_scale = np.exp(rng.normal(0.0, 0.4, size=d))
    feat_offset = rng.normal(0.0, 3.0, size=d)

    def core(count):
        factors = rng.normal(size=(count, r))
        noise = rng.normal(size=(count, d))
        return factors @ loadings + noise

    normal = core(n_norm)

    modes = rng.integers(0, profile.fault_modes, size=n_anom)
    severity = 0.05 + 0.95 * rng.beta(1.3, 1.3, size=n_anom)

    shared = rng.normal(size=d)
    shared /= np.linalg.norm(shared)
    shift_dirs = np.zeros((profile.fault_modes, d))
    drift_dirs = np.zeros((profile.fault_modes, d))
    infl_masks = np.zeros((profile.fault_modes, d))
    for m in range(profile.fault_modes):
        active = rng.random(d) < 0.4
        if not active.any():
            active[rng.integers(0, d)] = True
        direction = rng.normal(size=d) * active
        shift_dirs[m] = direction / np.linalg.norm(direction)
        drift = rng.normal(size=d)
        drift_dirs[m] = drift / np.linalg.norm(drift)
        infl_masks[m] = rng.random(d) < 0.3

    anom = core(n_anom)
    s = severity[:, None]
    anom = anom * (1.0 + _NOISE_INFLATION * s * infl_masks[modes])
    anom = anom + profile.separation * s * (
        _SHARED_SHIFT * shared + _MODE_SHIFT * shift_dirs[modes]
    )
    anom = anom + profile.separation * _DRIFT_SHIFT * s * s * drift_dirs[modes]

    features = np.vstack([normal, anom]) * feat_scale + feat_offset
    labels = np.concatenate([np.zeros(n_norm, dtype=np.int64), np.ones(n_anom, dtype=np.int64)])
    rul = np.concatenate([np.full(n_norm, np.nan), RUL_MAX - (RUL_MAX - RUL_MIN) * severity])
    fault = np.concatenate([np.full(n_norm, -1, dtype=np.int64), modes])
    sev = np.concatenate([np.zeros(n_norm), severity])

    perm = rng.permutation(n)
    return Dataset(features[perm], labels[perm], rul[perm], fault[perm], sev[perm])


def stratified_split(data: Dataset, train_fraction: float) -> tuple[Dataset, Dataset]:
    """Per-class split preserving prevalence to within one sample.

    Deterministic: within each class the first round(fraction * count)
    occurrences go to the training side.
    """
    labels = data.labels
    classes = np.unique(labels)
    if len(classes) < 2:
        raise SingleClass("both classes must be present")
    train_idx, test_idx = [], []
    for c in classes:
        idx = np.flatnonzero(labels == c)
        k = int(round(train_fraction * len(idx)))
        train_idx.append(idx[:k])
        test_idx.append(idx[k:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return data.subset(train_idx), data.subset(test_idx)


def assign_rul(label: int, fault_mode: int, severity: float) -> float:
    """Hours-to-failure from severity via the linear map 100 - 95 * s."""
    if label != 1:
        raise CalledOnNormal("RUL is defined for anomalies only")
    s = min(1.0, max(0.0, float(severity)))
    return RUL_MAX - (RUL_MAX - RUL_MIN) * s


class Standardizer:
    """Per-feature zero-mean/unit-variance transform, fitted on train only.

    Constant features are centered and passed through with divisor 1.
    """

    def __init__(self):
        self.mean_: Optional[np.ndarray] = None
        self.scale_: Optional[np.ndarray] = None

    def fit(self, X) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0.0, std, 1.0)
        return self

    def transform(self, X) -> np.ndarray:
        if self.mean_ is None:
            raise RuntimeError("standardizer not fitted")
        return (np.asarray(X, dtype=np.float64) - self.mean_) / self.scale_

    def fit_transform(self, X) -> np.ndarray:
        return self.fit(X).transform(X)


def drift_features(X, magnitude: float, rng, frac_features: float = 0.34) -> np.ndarray:
    """Shift a random subset of (standardized) features by +- magnitude.

    Models an operating-point change mid-stream; deterministic given rng.
    """
    X = np.asarray(X, dtype=np.float64)
    d = X.shape[1]
    k = max(1, int(round(frac_features * d)))
    idx = rng.choice(d, size=k, replace=False)
    signs = rng.choice([-1.0, 1.0], size=k)
    out = X.copy()
    out[:, idx] += magnitude * signs
    return out


# ---------------------------------------------------------------------------
# CSV in/out
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CsvSchema:
    feature_columns: Sequence[str]
    label_column: str
    rul_column: Optional[str] = None
    fault_mode_column: Optional[str] = None
    drop_columns: Sequence[str] = ()


@dataclass
class IngestResult:
    dataset: Dataset
    rejected_rows: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def ingest_csv(path: str, schema: CsvSchema) -> IngestResult:
    """Parse a CSV into a Dataset, dropping declared metadata columns.

    Malformed rows (non-numeric cells, missing values) are rejected and
    reported by 0-based data-row index instead of failing the whole file.
    """
    try:
        fh = open(path, "r", newline="")
    except OSError as exc:
        raise UnreadableFile(str(exc)) from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaMismatch("file has no header row")
        missing = [c for c in list(schema.feature_columns) + [schema.label_column] if c not in reader.fieldnames]
        if missing:
            raise SchemaMismatch(f"missing columns: {missing}")

        feats, labels, ruls, faults = [], [], [], []
        rejected, warnings = [], []
        for i, row in enumerate(reader):
            try:
                vec = [float(row[c]) for c in schema.feature_columns]
                label = int(float(row[schema.label_column]))
                rul = np.nan
                if schema.rul_column and row.get(schema.rul_column, "") not in ("", None):
                    rul = float(row[schema.rul_column])
                fault = -1
                if schema.fault_mode_column and row.get(schema.fault_mode_column, "") not in ("", None):
                    fault = int(float(row[schema.fault_mode_column]))
            except (TypeError, ValueError):
                rejected.append(i)
                continue
            feats.append(vec)
            labels.append(label)
            ruls.append(rul)
            faults.append(fault)

    if not feats:
        msg = f"{path}: no data rows parsed"
        warnings.append(msg)
        log.warning(msg)
        empty = Dataset(np.zeros((0, len(schema.feature_columns))), np.zeros(0, dtype=np.int64))
        return IngestResult(empty, rejected, warnings)
    ds = Dataset(np.array(feats), np.array(labels), np.array(ruls), np.array(faults))
    return IngestResult(ds, rejected, warnings)


def save_dataset(dataset: Dataset, csv_path: str, manifest: Optional[dict] = None) -> None:
    """Write the dataset as CSV plus a JSON sidecar manifest."""
    d = dataset.n_features
    header = [f"f{j}" for j in range(d)] + ["label", "rul_hours", "fault_mode"]
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(len(dataset)):
            rul = dataset.rul_hours[i]
            writer.writerow(
                [repr(float(v)) for v in dataset.features[i]]
                + [int(dataset.labels[i]), "" if not np.isfinite(rul) else repr(float(rul)), int(dataset.fault_modes[i])]
            )
    sidecar = dict(manifest or {})
    sidecar.setdefault("generator_note", "synthetic stand-in; fault mechanics are artifact-defined")
    sidecar["n_samples"] = len(dataset)
    sidecar["n_features"] = d
    with open(csv_path + ".manifest.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)


def default_schema(n_features: int) -> CsvSchema:
    return CsvSchema(
        feature_columns=[f"f{j}" for j in range(n_features)],
        label_column="label",
        rul_column="rul_hours",
        fault_mode_column="fault_mode",
    )
