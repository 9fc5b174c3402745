"""Dataset loading, normalization, and synthetic stream generation.

Real datasets are CSV files described by a manifest (INI format): one
section per dataset giving the file path, delimiter, target column,
expected shape, and an optional SHA-256 checksum. Loading fails closed on
any mismatch. Normalization maps every feature to [0, 1], rescales rows to
the unit ball, and maps targets to [0, 1]; the constants are kept so
predictions can be mapped back to the original scale.
"""
from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .kernels import KernelSpec, rf_features, sample_spectral

# Expected shapes for the benchmark datasets (rows x feature columns).
KNOWN_SHAPES = {
    "airfoil": (1503, 5),
    "concrete": (1030, 8),
    "naval": (11934, 15),
    "wine": (4898, 11),
}


class DatasetError(Exception):
    pass


@dataclass
class Dataset:
    name: str
    features: np.ndarray  # (T, d)
    targets: np.ndarray   # (T,)
    provenance: str = ""
    # normalization constants, populated by normalize()
    feature_min: np.ndarray | None = None
    feature_max: np.ndarray | None = None
    target_min: float | None = None
    target_max: float | None = None

    @property
    def num_samples(self) -> int:
        return self.features.shape[0]

    @property
    def input_dim(self) -> int:
        return self.features.shape[1]

    def denormalize_targets(self, y: np.ndarray) -> np.ndarray:
        if self.target_min is None:
            raise DatasetError("dataset was not normalized")
        return y * (self.target_max - self.target_min) + self.target_min


@dataclass
class StreamConfig:
    shuffle_seed: int | None = None
    horizon: int | None = None


def read_manifest(path: str | Path) -> dict[str, dict[str, str]]:
    # no interpolation: source URLs may contain '%'
    parser = configparser.ConfigParser(interpolation=None)
    with open(path) as fh:
        parser.read_file(fh)
    return {name: dict(parser[name]) for name in parser.sections()}


def load_dataset(name: str, manifest_path: str | Path) -> Dataset:
    """Load one dataset as described by the manifest; fail closed on any
    schema, shape, or checksum mismatch."""
    manifest = read_manifest(manifest_path)
    if name not in manifest:
        raise DatasetError(f"dataset {name!r} not in manifest {manifest_path}")
    entry = manifest[name]
    path = Path(manifest_path).parent / entry["path"]
    if not path.exists():
        raise DatasetError(f"dataset file missing: {path}")

    expected_checksum = entry.get("sha256", "")
    if expected_checksum:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        if digest != expected_checksum:
            raise DatasetError(f"checksum mismatch for {path}: {digest}")

    delimiter = entry.get("delimiter", ",")
    if delimiter == "whitespace":
        delimiter = r"\s+"
    header = 0 if entry.get("has_header", "false").lower() == "true" else None
    try:
        frame = pd.read_csv(path, sep=delimiter, header=header)
    except Exception as exc:
        raise DatasetError(f"failed to parse {path}: {exc}") from exc

    if frame.isna().any().any() or not all(
            np.issubdtype(dt, np.number) for dt in frame.dtypes):
        raise DatasetError(f"non-numeric or missing cells in {path}")

    target_col = int(entry["target_col"])
    feature_cols = entry.get("feature_cols", "")
    if feature_cols:
        cols = [int(c) for c in feature_cols.split()]
    else:
        cols = [c for c in range(frame.shape[1]) if c != target_col]
    features = frame.iloc[:, cols].to_numpy(dtype=float)
    targets = frame.iloc[:, target_col].to_numpy(dtype=float)

    n_rows, n_feat = int(entry["n_rows"]), int(entry["n_features"])
    if features.shape != (n_rows, n_feat):
        raise DatasetError(
            f"shape mismatch for {name}: got {features.shape}, "
            f"expected ({n_rows}, {n_feat})")
    return Dataset(name=name, features=features, targets=targets,
                   provenance=entry.get("source", str(path)))


def normalize(dataset: Dataset) -> Dataset:
    """Min-max features to [0, 1], scale rows by 1/sqrt(d) so ||x|| <= 1,
    and min-max targets to [0, 1]. Constant columns map to zero."""
    if dataset.num_samples == 0:
        raise DatasetError("empty dataset")
    fmin = dataset.features.min(axis=0)
    fmax = dataset.features.max(axis=0)
    span = fmax - fmin
    safe_span = np.where(span > 0, span, 1.0)
    feats = (dataset.features - fmin) / safe_span
    feats[:, span == 0] = 0.0
    feats /= np.sqrt(dataset.input_dim)

    tmin, tmax = float(dataset.targets.min()), float(dataset.targets.max())
    if tmax <= tmin:
        raise DatasetError("degenerate target column")
    targets = (dataset.targets - tmin) / (tmax - tmin)

    return Dataset(name=dataset.name, features=feats, targets=targets,
                   provenance=dataset.provenance, feature_min=fmin,
                   feature_max=fmax, target_min=tmin, target_max=tmax)


def apply_stream_config(dataset: Dataset, config: StreamConfig) -> Dataset:
    feats, targets = dataset.features, dataset.targets
    if config.shuffle_seed is not None:
        order = np.random.default_rng(config.shuffle_seed).permutation(len(targets))
        feats, targets = feats[order], targets[order]
    if config.horizon is not None:
        if config.horizon > len(targets):
            raise DatasetError("horizon exceeds dataset length")
        feats, targets = feats[:config.horizon], targets[:config.horizon]
    return Dataset(name=dataset.name, features=feats, targets=targets,
                   provenance=dataset.provenance,
                   feature_min=dataset.feature_min, feature_max=dataset.feature_max,
                   target_min=dataset.target_min, target_max=dataset.target_max)


@dataclass
class SyntheticSpec:
    """Stream realizable by one dictionary kernel's RF predictor."""

    kernel: KernelSpec
    input_dim: int = 2
    num_rf: int = 50
    noise: float = 0.0
    num_anchors: int = 5


def _uniform_ball(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    direction = rng.normal(size=(n, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = rng.random(n) ** (1.0 / d)
    return direction * radius[:, None]


def _draw_generator(spec: SyntheticSpec, seed: int):
    rng = np.random.default_rng(seed)
    fmap = sample_spectral(spec.kernel, spec.num_rf, spec.input_dim, rng)
    anchors = _uniform_ball(rng, spec.num_anchors, spec.input_dim)
    coeffs = rng.random(spec.num_anchors)
    coeffs /= coeffs.sum()
    # z(a).z(x) is the RF kernel estimate, which lives in roughly (0, 1],
    # so a convex combination keeps targets in range without clipping bias.
    theta0 = sum(c * rf_features(fmap, a) for c, a in zip(coeffs, anchors))
    return rng, fmap, theta0


def synthetic_truth(spec: SyntheticSpec, seed: int):
    """The generating feature map and coefficients behind synthetic_stream."""
    _, fmap, theta0 = _draw_generator(spec, seed)
    return fmap, theta0


def synthetic_stream(spec: SyntheticSpec, seed: int, horizon: int) -> Dataset:
    """Inputs uniform in the unit ball; targets are a fixed convex
    combination of the generating kernel's feature maps at random anchor
    points (so targets stay in [0, 1] and the stream is realizable by that
    kernel's RF class), plus optional Gaussian noise, clipped to [0, 1]."""
    rng, fmap, theta0 = _draw_generator(spec, seed)

    features = _uniform_ball(rng, horizon, spec.input_dim)
    clean = np.array([theta0 @ rf_features(fmap, x) for x in features])
    targets = clean + (rng.normal(scale=spec.noise, size=horizon)
                       if spec.noise > 0 else 0.0)
    targets = np.clip(targets, 0.0, 1.0)
    return Dataset(name="synthetic", features=features, targets=targets,
                   provenance=f"synthetic(kernel={spec.kernel.index}, seed={seed})")
