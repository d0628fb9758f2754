"""CSV ingestion, preprocessing, and synthetic fixture generation.

Preprocessing follows the benign-only protocol: flow identifier columns
are dropped, features are min-max scaled on the benign training rows
only, and attack rows appear exclusively in test sets.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError

DEFAULT_DROP_COLUMNS = (
    "IPV4_SRC_ADDR",
    "IPV4_DST_ADDR",
    "L4_SRC_PORT",
    "L4_DST_PORT",
)

# The fixture every quantitative test pins to.
STANDARD_FIXTURE = dict(n_benign=5000, n_attack=500, dims=16, shift=0.6, seed=42)


@dataclass
class LabeledDataset:
    columns: list[str]
    rows: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int, 0 benign / 1 attack
    categories: list[str] | None = None

    @property
    def n_benign(self) -> int:
        return int((self.labels == 0).sum())

    @property
    def n_attack(self) -> int:
        return int((self.labels == 1).sum())


@dataclass
class ScalerParams:
    mins: np.ndarray
    maxs: np.ndarray


@dataclass
class SplitSpec:
    benign_train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.benign_train_fraction < 1.0:
            raise ValueError(
                f"benign_train_fraction must be in (0, 1), got {self.benign_train_fraction}"
            )


def _parse_label(raw: str) -> int:
    s = raw.strip()
    if s in ("0", "1"):
        return int(s)
    return 0 if s.lower() == "benign" else 1


def load_csv(
    path,
    label_column: str = "Label",
    drop_columns: list[str] | None = None,
    category_column: str = "Attack",
) -> LabeledDataset:
    """Load a labeled feature table, dropping identifier columns.

    Rows with unparseable numeric values are rejected; the error names
    the offending row indices (0-based, counting data rows).
    """
    drop = set(DEFAULT_DROP_COLUMNS if drop_columns is None else drop_columns)
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty") from None
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found")
        label_idx = header.index(label_column)
        cat_idx = header.index(category_column) if category_column in header else None
        feature_idx = [
            i
            for i, name in enumerate(header)
            if i != label_idx and i != cat_idx and name not in drop
        ]
        columns = [header[i] for i in feature_idx]

        rows: list[list[float]] = []
        labels: list[int] = []
        categories: list[str] = []
        bad_rows: list[int] = []
        for rownum, rec in enumerate(reader):
            try:
                values = [float(rec[i]) for i in feature_idx]
                if not all(np.isfinite(values)):
                    raise ValueError
                label = _parse_label(rec[label_idx])
            except (ValueError, IndexError):
                bad_rows.append(rownum)
                continue
            rows.append(values)
            labels.append(label)
            categories.append(rec[cat_idx] if cat_idx is not None else "")
    if bad_rows:
        shown = ", ".join(map(str, bad_rows[:20]))
        raise DataError(f"{path}: unparseable rows at indices {shown}")
    if not rows:
        raise DataError(f"{path}: no data rows")
    return LabeledDataset(
        columns=columns,
        rows=np.array(rows, dtype=np.float64),
        labels=np.array(labels, dtype=np.int64),
        categories=categories if cat_idx is not None else None,
    )


def save_csv(ds: LabeledDataset, path, label_column: str = "Label") -> None:
    """Write a dataset back out; floats use shortest round-trip formatting."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        header = list(ds.columns) + [label_column]
        if ds.categories is not None:
            header.append("Attack")
        writer.writerow(header)
        for i in range(len(ds.rows)):
            rec = [repr(float(v)) for v in ds.rows[i]] + [str(int(ds.labels[i]))]
            if ds.categories is not None:
                rec.append(ds.categories[i])
            writer.writerow(rec)


def fit_scaler(train: np.ndarray) -> ScalerParams:
    """Per-feature min/max, fitted on benign training rows only."""
    train = np.asarray(train, dtype=np.float64)
    if train.size == 0:
        raise DataError("cannot fit scaler on empty data")
    return ScalerParams(mins=train.min(axis=0), maxs=train.max(axis=0))


def apply_scaler(p: ScalerParams, data: np.ndarray) -> np.ndarray:
    """Affine map to [0, 1] with clamping; constant features map to 0."""
    data = np.asarray(data, dtype=np.float64)
    if data.shape[-1] != len(p.mins):
        raise DataError(
            f"data has {data.shape[-1]} features, scaler expects {len(p.mins)}"
        )
    span = p.maxs - p.mins
    safe = np.where(span > 0.0, span, 1.0)
    out = (data - p.mins) / safe
    out[..., span == 0.0] = 0.0
    return np.clip(out, 0.0, 1.0)


def split_benign(ds: LabeledDataset, spec: SplitSpec) -> tuple[np.ndarray, LabeledDataset]:
    """Seeded split of benign rows; all attack rows go to the test side."""
    benign_idx = np.flatnonzero(ds.labels == 0)
    if benign_idx.size == 0:
        raise DataError("dataset contains no benign rows")
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(benign_idx)
    n_train = int(round(spec.benign_train_fraction * benign_idx.size))
    train_idx = order[:n_train]
    test_idx = np.concatenate([order[n_train:], np.flatnonzero(ds.labels == 1)])
    test = LabeledDataset(
        columns=list(ds.columns),
        rows=ds.rows[test_idx],
        labels=ds.labels[test_idx],
        categories=[ds.categories[i] for i in test_idx] if ds.categories else None,
    )
    return ds.rows[train_idx], test


def synth_generate(
    n_benign: int, n_attack: int, dims: int, shift: float, seed: int
) -> LabeledDataset:
    """Generate a benign cluster pair and shifted/widened attack rows.

    Benign rows come from a two-component isotropic Gaussian mixture
    clamped to [0, 1]; attack rows come from the same mixture translated
    by ``shift`` along a fixed random direction with the component
    spread inflated by (1 + 4 * shift), so shift=0 reproduces the benign
    distribution exactly.
    """
    if n_benign < 1 or n_attack < 1:
        raise ValueError("row counts must be positive")
    if dims < 1:
        raise ValueError("dims must be positive")
    if shift < 0:
        raise ValueError("shift must be >= 0")
    rng = np.random.default_rng(seed)
    mu = np.stack([rng.uniform(0.42, 0.48, dims), rng.uniform(0.52, 0.58, dims)])
    direction = rng.normal(size=dims)
    direction /= np.linalg.norm(direction)
    sigma = 0.08

    def sample(n: int, offset: np.ndarray, scale: float) -> np.ndarray:
        comp = rng.integers(0, 2, size=n)
        x = mu[comp] + offset + rng.normal(size=(n, dims)) * sigma * scale
        return np.clip(x, 0.0, 1.0)

    benign = sample(n_benign, np.zeros(dims), 1.0)
    attack = sample(n_attack, shift * direction, 1.0 + 4.0 * shift)
    rows = np.vstack([benign, attack])
    labels = np.concatenate([np.zeros(n_benign, np.int64), np.ones(n_attack, np.int64)])
    columns = [f"f{j}" for j in range(dims)]
    categories = ["Benign"] * n_benign + ["Synthetic"] * n_attack
    return LabeledDataset(columns=columns, rows=rows, labels=labels, categories=categories)


def standard_fixture() -> LabeledDataset:
    return synth_generate(**STANDARD_FIXTURE)
