"""Datasets, linear models, direction algebra and synthetic data."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateDirectionError, InvalidDirectionError, ParseError

__all__ = [
    "Dataset",
    "LinearModel",
    "GaussianPairConfig",
    "direction_angle",
    "directions_equivalent",
    "angle_or_nan",
    "transform_dataset",
    "inverse_sqrt",
    "normalize_labels",
    "generate_gaussian_pair",
    "load_dataset_csv",
    "save_dataset_csv",
    "load_generator_config",
    "zero_tol",
    "require_direction",
]

ZERO_DIRECTION_RTOL = 1e-12


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labelled points. Rows of ``points`` are observations, labels are +-1.

    ``flipped`` records whether the labels were swapped by
    :func:`normalize_labels` so that the positive class is the larger one.
    """

    points: np.ndarray
    labels: np.ndarray
    flipped: bool = False

    def __post_init__(self):
        X = np.array(self.points, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise ValueError("points must be a 2-d array")
        if y.shape != (X.shape[0],):
            raise ValueError(f"labels has shape {y.shape}, expected ({X.shape[0]},)")
        if not np.all(np.isfinite(X)):
            raise ValueError("points contain non-finite coordinates")
        if not np.all((y == 1) | (y == -1)):
            raise ValueError("labels must be +1 or -1")
        if X.shape[0] < 2 or not np.any(y == 1) or not np.any(y == -1):
            raise ValueError("need at least one point in each class")
        object.__setattr__(self, "points", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y, dtype=float))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def positive(self) -> np.ndarray:
        return self.labels > 0

    @property
    def n_plus(self) -> int:
        return int(np.count_nonzero(self.positive))

    @property
    def n_minus(self) -> int:
        return self.n - self.n_plus

    @property
    def X_plus(self) -> np.ndarray:
        return self.points[self.positive]

    @property
    def X_minus(self) -> np.ndarray:
        return self.points[~self.positive]

    @property
    def mean_plus(self) -> np.ndarray:
        return self.X_plus.mean(axis=0)

    @property
    def mean_minus(self) -> np.ndarray:
        return self.X_minus.mean(axis=0)

    @property
    def balanced(self) -> bool:
        return self.n_plus == self.n_minus

    @property
    def scale(self) -> float:
        """Largest point norm, floored at 1; the reference length for tolerances."""
        return max(1.0, float(np.max(np.linalg.norm(self.points, axis=1))))

    def subset(self, index) -> "Dataset":
        return Dataset(self.points[index], self.labels[index], self.flipped)

    def __len__(self):
        return self.n


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Decision function f(x) = w.x + b."""

    w: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(np.ravel(self.w)))
        object.__setattr__(self, "b", float(self.b))

    def decision_function(self, points) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        if X.shape[1] != self.w.shape[0]:
            raise ValueError(
                f"points have dimension {X.shape[1]}, model has {self.w.shape[0]}"
            )
        return X @ self.w + self.b

    def predict(self, points) -> np.ndarray:
        # sign(0) is +1 by convention
        return np.where(self.decision_function(points) >= 0, 1.0, -1.0)

    def with_intercept(self, b: float) -> "LinearModel":
        return LinearModel(self.w, b)

    def to_dict(self):
        return {"w": self.w.tolist(), "b": self.b}


@dataclass(frozen=True)
class GaussianPairConfig:
    n_plus: int
    n_minus: int
    d: int
    separation: float
    seed: int

    def __post_init__(self):
        if self.n_plus < 1 or self.n_minus < 1:
            raise ValueError("n_plus and n_minus must be >= 1")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not self.separation >= 0:
            raise ValueError("separation must be >= 0")

    def to_dict(self):
        return {
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "d": self.d,
            "separation": self.separation,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj) -> "GaussianPairConfig":
        keys = {"n_plus", "n_minus", "d", "separation", "seed"}
        if set(obj) != keys:
            raise ValueError(f"generator config needs exactly the fields {sorted(keys)}")
        return cls(
            n_plus=int(obj["n_plus"]),
            n_minus=int(obj["n_minus"]),
            d=int(obj["d"]),
            separation=float(obj["separation"]),
            seed=int(obj["seed"]),
        )


def zero_tol(scale: float = 1.0) -> float:
    return ZERO_DIRECTION_RTOL * max(1.0, scale)


def require_direction(w, scale: float = 1.0, what: str = "direction") -> np.ndarray:
    """Return ``w`` as an array, refusing numerically zero vectors."""
    w = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w)) or np.linalg.norm(w) <= zero_tol(scale):
        raise DegenerateDirectionError(f"{what} is numerically zero")
    return w


def _unit(u, name):
    u = np.ravel(np.asarray(u, dtype=float))
    norm = np.linalg.norm(u)
    if not np.isfinite(norm) or norm == 0:
        raise InvalidDirectionError(f"{name} must be a finite nonzero vector")
    return u / norm


def direction_angle(u, v) -> float:
    """Angle in [0, pi/2] between the lines spanned by ``u`` and ``v``.

    Uses atan2 of the rejection norm and the dot product, which stays
    accurate for nearly parallel vectors where arccos loses half the digits.
    """
    u = _unit(u, "u")
    v = _unit(v, "v")
    if u.shape != v.shape:
        raise ValueError("vectors have different lengths")
    c = float(u @ v)
    s = float(np.linalg.norm(u - c * v))
    return float(min(math.atan2(s, abs(c)), math.pi / 2))


def angle_or_nan(u, v) -> float:
    """direction_angle, or NaN when either vector is zero (e.g. an SVM with w = 0)."""
    try:
        return direction_angle(u, v)
    except InvalidDirectionError:
        return float("nan")


def directions_equivalent(u, v, tol: float = 1e-8) -> bool:
    return direction_angle(u, v) <= tol


def transform_dataset(data: Dataset, m) -> Dataset:
    """Map every point x to m @ x."""
    m = np.asarray(m, dtype=float)
    if m.shape != (data.d, data.d):
        raise ValueError(f"transform has shape {m.shape}, expected ({data.d}, {data.d})")
    if not np.all(np.isfinite(m)):
        raise ValueError("transform contains non-finite entries")
    return Dataset(data.points @ m.T, data.labels, data.flipped)


def inverse_sqrt(sigma) -> np.ndarray:
    """Symmetric inverse square root of a positive definite matrix."""
    vals, vecs = np.linalg.eigh(np.asarray(sigma, dtype=float))
    if vals[0] <= 0:
        raise ValueError("matrix is not positive definite")
    return (vecs / np.sqrt(vals)) @ vecs.T


def normalize_labels(data: Dataset) -> Dataset:
    """Flip labels if needed so that n_plus >= n_minus; the flip is recorded."""
    if data.n_plus >= data.n_minus:
        return data
    return Dataset(data.points, -data.labels, not data.flipped)


def generate_gaussian_pair(cfg: GaussianPairConfig) -> Dataset:
    """Two identity-covariance Gaussians with means +-(separation/2) e1.

    Each class draws from its own child stream of ``cfg.seed``, so adding
    points to one class leaves the existing points of both classes intact.
    Positive rows come first.
    """
    plus_seq, minus_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    shift = np.zeros(cfg.d)
    shift[0] = cfg.separation / 2.0
    X_plus = np.random.default_rng(plus_seq).standard_normal((cfg.n_plus, cfg.d)) + shift
    X_minus = np.random.default_rng(minus_seq).standard_normal((cfg.n_minus, cfg.d)) - shift
    y = np.concatenate([np.ones(cfg.n_plus), -np.ones(cfg.n_minus)])
    return Dataset(np.vstack([X_plus, X_minus]), y)


def _parse_label(text, row):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"label {text!r} is not a number", row) from None
    if value not in (1.0, -1.0):
        raise ParseError(f"label {text!r} is not +1 or -1", row)
    return value


def load_dataset_csv(path) -> Dataset:
    """Read a CSV with one observation per row and the label in the last column.

    Blank lines are skipped. A non-numeric first row is treated as a header.
    """
    points, labels = [], []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for row, fields in enumerate(csv.reader(fh), start=1):
            fields = [f.strip() for f in fields]
            if not fields or all(f == "" for f in fields):
                continue
            if len(fields) < 2:
                raise ParseError("need at least one feature and a label", row)
            try:
                coords = [float(f) for f in fields[:-1]]
            except ValueError:
                if row == 1 and width is None:
                    continue
                raise ParseError("non-numeric feature value", row) from None
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(f"expected {width} columns, found {len(fields)}", row)
            if not all(math.isfinite(c) for c in coords):
                raise ParseError("non-finite feature value", row)
            labels.append(_parse_label(fields[-1], row))
            points.append(coords)
    if not points:
        raise ParseError("no data rows")
    try:
        return Dataset(np.array(points), np.array(labels))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def save_dataset_csv(data: Dataset, path) -> None:
    """Write ``data`` as CSV to a path or an open text stream."""
    if hasattr(path, "write"):
        _write_rows(data, path)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(data, fh)


def _write_rows(data, fh):
    writer = csv.writer(fh, lineterminator="\n")
    for x, y in zip(data.points, data.labels):
        writer.writerow([repr(float(v)) for v in x] + ["+1" if y > 0 else "-1"])


def load_generator_config(path) -> GaussianPairConfig:
    return GaussianPairConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
