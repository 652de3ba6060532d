"""ML benchmark: classifier accuracy degradation under input bit flips.

Feature vectors are encoded to the stored representation under test
(binary32 or posit(32,2)), a seeded single bit flip corrupts one feature
word per test vector, everything is decoded back and the classifier
(computing in float64) predicts.  The fault site sequence is a pure
function of the seed, so float and posit runs see identical faults.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .decoded import NumClass
from .faults import MASK64, _GAMMA, splitmix64
from .float32 import float_decode, float_encode
from .posit32 import posit_decode, posit_encode

CLASSIFIERS = ("knn1", "gaussian_nb", "decision_tree", "nearest_centroid")
FEATURE_SETS = ("statistical", "wavelet")


@dataclass(frozen=True)
class TimeSeriesDataset:
    """Labelled 1-D signals; labels dense in [0, n_classes)."""

    signals: list[np.ndarray]
    labels: list[int]
    name: str = "dataset"
    sample_rate: float | None = None

    def __post_init__(self):
        if len(self.signals) != len(self.labels):
            raise ValueError("signals/labels length mismatch")
        if any(len(s) == 0 for s in self.signals):
            raise ValueError("empty signal")
        present = sorted(set(self.labels))
        if len(present) < 2:
            raise ValueError("need at least 2 classes")
        if present != list(range(len(present))):
            raise ValueError("labels must be dense in [0, C)")

    @property
    def n_classes(self) -> int:
        return len(set(self.labels))


def generate_synthetic(
    classes: int,
    per_class: int,
    length: int,
    seed: int,
    noise: float = 0.4,
) -> TimeSeriesDataset:
    """Class-conditional sums of sinusoids with seeded Gaussian noise."""
    if classes < 2:
        raise ValueError("need at least 2 classes")
    rng = np.random.default_rng(seed)
    t = np.arange(length) / length
    signals = []
    labels = []
    for c in range(classes):
        f1 = 3.0 + 2.0 * c
        f2 = 7.0 + 3.0 * c
        for _ in range(per_class):
            p1, p2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
            sig = (
                np.sin(2.0 * np.pi * f1 * t + p1)
                + 0.5 * np.sin(2.0 * np.pi * f2 * t + p2)
                + noise * rng.standard_normal(length)
            )
            signals.append(sig)
            labels.append(c)
    return TimeSeriesDataset(signals, labels, name=f"synthetic-{classes}x{per_class}")


class DatasetFormatError(ValueError):
    pass


def load_csv(path: str | Path, name: str | None = None) -> TimeSeriesDataset:
    """Read ``label, s0, s1, ...`` rows; a non-numeric first row is a header.

    Sample text goes through the exact rational parser, so decimal input
    survives ingestion without silent precision loss before the float64
    feature pipeline.
    """
    signals: list[np.ndarray] = []
    labels: list[int] = []
    with open(path) as fh:
        for recno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            cells = [cell.strip() for cell in row]
            if recno == 1 and not _is_number(cells[0]):
                continue  # header
            if len(cells) < 2:
                raise DatasetFormatError(f"{path}: record {recno}: no samples")
            try:
                label = int(cells[0])
                samples = [float(Fraction(cell)) for cell in cells[1:]]
            except (ValueError, ZeroDivisionError):
                raise DatasetFormatError(
                    f"{path}: record {recno}: malformed numeric field"
                ) from None
            if label < 0:
                raise DatasetFormatError(f"{path}: record {recno}: negative label")
            signals.append(np.asarray(samples))
            labels.append(label)
    if not signals:
        raise DatasetFormatError(f"{path}: no records")
    return TimeSeriesDataset(signals, labels, name=name or str(path))


def _is_number(text: str) -> bool:
    try:
        Fraction(text)
    except (ValueError, ZeroDivisionError):
        return False
    return True


def _windows(signal: np.ndarray, window_len: int, stride: int):
    if window_len > len(signal):
        raise ValueError(f"window_len {window_len} exceeds signal length {len(signal)}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    for start in range(0, len(signal) - window_len + 1, stride):
        yield signal[start : start + window_len]


def extract_statistical(signal: np.ndarray, window_len: int = 64, stride: int = 32) -> np.ndarray:
    """Per sliding window: mean, population std, RMS, lag-1 autocovariance."""
    features = []
    for win in _windows(np.asarray(signal, dtype=float), window_len, stride):
        mu = win.mean()
        centered = win - mu
        features.append(mu)
        features.append(math.sqrt(float(np.mean(centered**2))))
        features.append(math.sqrt(float(np.mean(win**2))))
        features.append(float(np.dot(centered[:-1], centered[1:])) / (len(win) - 1))
    return np.asarray(features)


def haar_dwt(window: np.ndarray, levels: int) -> list[np.ndarray]:
    """Orthonormal Haar transform; returns [detail_1, ..., detail_L, approx]."""
    n = len(window)
    if levels < 1 or n % (1 << levels):
        raise ValueError(f"window length {n} is not a multiple of 2**{levels}")
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    approx = np.asarray(window, dtype=float)
    bands = []
    for _ in range(levels):
        bands.append((approx[0::2] - approx[1::2]) * inv_sqrt2)
        approx = (approx[0::2] + approx[1::2]) * inv_sqrt2
    bands.append(approx)
    return bands


def extract_wavelet(
    signal: np.ndarray, window_len: int = 64, stride: int = 32, levels: int = 3
) -> np.ndarray:
    """Per sliding window: mean squared coefficient of each Haar subband."""
    features = []
    for win in _windows(np.asarray(signal, dtype=float), window_len, stride):
        for band in haar_dwt(win, levels):
            features.append(float(np.mean(band**2)))
    return np.asarray(features)


def extract_features(
    dataset: TimeSeriesDataset,
    feature_set: str,
    window_len: int = 64,
    stride: int = 32,
    levels: int = 3,
) -> tuple[np.ndarray, np.ndarray]:
    if feature_set == "statistical":
        rows = [extract_statistical(s, window_len, stride) for s in dataset.signals]
    elif feature_set == "wavelet":
        rows = [extract_wavelet(s, window_len, stride, levels) for s in dataset.signals]
    else:
        raise ValueError(f"unknown feature set: {feature_set!r}")
    return np.vstack(rows), np.asarray(dataset.labels)


# ---------------------------------------------------------------------------
# classifiers (deterministic tie-breaks: lowest class id)


class Knn1:
    def fit(self, X, y):
        self.X_train = np.asarray(X, dtype=float)
        self.y_train = np.asarray(y)
        return self

    def predict(self, X):
        out = np.empty(len(X), dtype=int)
        for i, x in enumerate(np.asarray(X, dtype=float)):
            diff = self.X_train - x
            with np.errstate(invalid="ignore", over="ignore"):
                dist = np.einsum("ij,ij->i", diff, diff)
            best = np.nanmin(dist)
            candidates = np.flatnonzero(dist == best)
            out[i] = self.y_train[candidates].min() if len(candidates) else self.y_train[0]
        return out


class GaussianNB:
    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        self.classes = np.unique(y)
        self.means = np.vstack([X[y == c].mean(axis=0) for c in self.classes])
        variances = np.vstack([X[y == c].var(axis=0) for c in self.classes])
        floor = 1e-9 * max(X.var(axis=0).max(), 1e-12)
        self.variances = np.maximum(variances, floor)
        counts = np.array([(y == c).sum() for c in self.classes], dtype=float)
        self.log_priors = np.log(counts / counts.sum())
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X), dtype=int)
        for i, x in enumerate(X):
            with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
                ll = self.log_priors - 0.5 * np.sum(
                    np.log(2.0 * np.pi * self.variances)
                    + (x - self.means) ** 2 / self.variances,
                    axis=1,
                )
            ll = np.where(np.isnan(ll), -np.inf, ll)
            out[i] = self.classes[int(np.argmax(ll))]  # argmax takes lowest id on ties
        return out


class NearestCentroid:
    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        self.classes = np.unique(y)
        self.centroids = np.vstack([X[y == c].mean(axis=0) for c in self.classes])
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X), dtype=int)
        for i, x in enumerate(X):
            diff = self.centroids - x
            with np.errstate(invalid="ignore", over="ignore"):
                dist = np.einsum("ij,ij->i", diff, diff)
            dist = np.where(np.isnan(dist), np.inf, dist)
            out[i] = self.classes[int(np.argmin(dist))]
        return out


class _TreeNode(NamedTuple):
    feature: int
    threshold: float
    left: "object"
    right: "object"


class DecisionTree:
    """Binary CART on Gini impurity with a configurable depth cap."""

    def __init__(self, max_depth: int = 8, min_samples_split: int = 2):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        self.n_classes = int(y.max()) + 1
        self.root = self._build(X, y, 0)
        return self

    def _leaf(self, y):
        counts = np.bincount(y, minlength=self.n_classes)
        return int(np.argmax(counts))  # lowest id on ties

    def _build(self, X, y, depth):
        if depth >= self.max_depth or len(y) < self.min_samples_split or len(np.unique(y)) == 1:
            return self._leaf(y)
        split = self._best_split(X, y)
        if split is None:
            return self._leaf(y)
        feature, threshold = split
        mask = X[:, feature] <= threshold
        if not mask.any() or mask.all():
            return self._leaf(y)
        return _TreeNode(
            feature,
            threshold,
            self._build(X[mask], y[mask], depth + 1),
            self._build(X[~mask], y[~mask], depth + 1),
        )

    def _best_split(self, X, y):
        n, n_features = X.shape
        onehot = np.eye(self.n_classes)[y]
        best = None
        best_gini = math.inf
        for feature in range(n_features):
            order = np.argsort(X[:, feature], kind="stable")
            values = X[order, feature]
            counts_left = np.cumsum(onehot[order], axis=0)
            total = counts_left[-1]
            boundaries = np.flatnonzero(values[1:] > values[:-1])
            if len(boundaries) == 0:
                continue
            nl = (boundaries + 1).astype(float)
            nr = n - nl
            cl = counts_left[boundaries]
            cr = total - cl
            gini_l = 1.0 - np.sum((cl / nl[:, None]) ** 2, axis=1)
            gini_r = 1.0 - np.sum((cr / nr[:, None]) ** 2, axis=1)
            weighted = (nl * gini_l + nr * gini_r) / n
            j = int(np.argmin(weighted))
            if weighted[j] < best_gini:
                best_gini = weighted[j]
                idx = boundaries[j]
                best = (feature, (values[idx] + values[idx + 1]) / 2.0)
        return best

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X), dtype=int)
        for i, x in enumerate(X):
            node = self.root
            while isinstance(node, _TreeNode):
                value = x[node.feature]
                # NaN-substituted or infinite inputs fall to the right branch
                node = node.left if value <= node.threshold else node.right
            out[i] = node
        return out


_MODEL_FACTORIES = {
    "knn1": Knn1,
    "gaussian_nb": GaussianNB,
    "decision_tree": DecisionTree,
    "nearest_centroid": NearestCentroid,
}


def train(model_kind: str, X: np.ndarray, y: np.ndarray):
    """Fit one of the scoped classifiers; rejects single-class training."""
    if model_kind not in _MODEL_FACTORIES:
        raise ValueError(f"unknown classifier: {model_kind!r}")
    y = np.asarray(y)
    if len(np.unique(y)) < 2:
        raise ValueError("training data must contain at least 2 classes")
    return _MODEL_FACTORIES[model_kind]().fit(X, y)


def predict(model, features: np.ndarray) -> int:
    return int(model.predict(np.asarray(features, dtype=float)[None, :])[0])


def stratified_split(y: np.ndarray, test_fraction: float, seed: int):
    """Seeded stratified split; returns (train_idx, test_idx)."""
    rng = np.random.default_rng(seed)
    train_idx = []
    test_idx = []
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        n_test = max(1, int(round(len(idx) * test_fraction)))
        test_idx.extend(idx[:n_test])
        train_idx.extend(idx[n_test:])
    return np.sort(np.asarray(train_idx)), np.sort(np.asarray(test_idx))


# ---------------------------------------------------------------------------
# format round-trips and fault injection on stored feature words


def _float_word_to_value(word: int) -> tuple[float, bool]:
    d = float_decode(word)
    if d.cls is NumClass.NAN:
        return 0.0, True
    if d.cls is NumClass.INFINITY:
        return (-math.inf if d.negative else math.inf), False
    return float(d.value), False


def _posit_word_to_value(word: int) -> tuple[float, bool]:
    d = posit_decode(word)
    if d.cls is NumClass.NAR:
        return 0.0, True
    return float(d.value), False


def value_roundtrip(x: float, format: str) -> float:
    """Encode/decode ``x`` through the stored format, no fault."""
    if format == "float32":
        return _float_word_to_value(float_encode(Fraction(x)))[0]
    if format == "posit32":
        return _posit_word_to_value(posit_encode(Fraction(x)))[0]
    raise ValueError(f"unknown format: {format!r}")


def value_with_flip(x: float, format: str, bit: int) -> tuple[float, bool]:
    """Encode ``x``, flip ``bit`` in the stored word, decode.

    Returns (value, substituted); NaN/NaR decodes come back as 0.0 with
    the substitution flag set.
    """
    if format == "float32":
        return _float_word_to_value(float_encode(Fraction(x)) ^ (1 << bit))
    if format == "posit32":
        return _posit_word_to_value(posit_encode(Fraction(x)) ^ (1 << bit))
    raise ValueError(f"unknown format: {format!r}")


@dataclass(frozen=True)
class FaultPolicy:
    """One seeded SEU per (selected) test vector.

    ``vector_fraction`` selects the hit subset deterministically from the
    seed; 1.0 faults every vector, 0.0 disables injection.
    """

    enabled: bool = True
    vector_fraction: float = 1.0


_SELECT_STREAM = 0x5E1EC7
_SITE_STREAM = 0xFA57


def _draw(seed: int, stream: int, counter: int) -> int:
    key = (seed ^ ((stream * _GAMMA) & MASK64)) + counter * _GAMMA
    return splitmix64(key & MASK64)


def fault_sites(seed: int, n_vectors: int, n_features: int, policy: FaultPolicy):
    """(feature_index, bit) per vector, or None; format-independent."""
    sites = []
    for i in range(n_vectors):
        if not policy.enabled or policy.vector_fraction <= 0.0:
            sites.append(None)
            continue
        if policy.vector_fraction < 1.0:
            u = _draw(seed, _SELECT_STREAM, i) / 2.0**64
            if u >= policy.vector_fraction:
                sites.append(None)
                continue
        feature = _draw(seed, _SITE_STREAM, 2 * i) % n_features
        bit = _draw(seed, _SITE_STREAM, 2 * i + 1) % 32
        sites.append((int(feature), int(bit)))
    return sites


class BenchRow(NamedTuple):
    classifier: str
    feature_set: str
    format: str
    baseline_accuracy: float
    faulted_accuracy: float
    accuracy_drop: float
    nan_or_nar_substitutions: int
    seed: int


def run_fault_bench(
    dataset: TimeSeriesDataset,
    feature_set: str,
    model_kind: str,
    format: str,
    fault_policy: FaultPolicy,
    seed: int,
    window_len: int = 64,
    stride: int = 32,
    levels: int = 3,
    test_fraction: float = 0.3,
) -> BenchRow:
    """Train on clean features, evaluate clean vs faulted stored inputs."""
    X, y = extract_features(dataset, feature_set, window_len, stride, levels)
    train_idx, test_idx = stratified_split(y, test_fraction, seed)
    model = train(model_kind, X[train_idx], y[train_idx])
    X_test, y_test = X[test_idx], y[test_idx]

    baseline = np.array(
        [[value_roundtrip(v, format) for v in row] for row in X_test]
    )
    sites = fault_sites(seed, len(X_test), X.shape[1], fault_policy)
    substitutions = 0
    faulted = baseline.copy()
    for i, site in enumerate(sites):
        if site is None:
            continue
        feature, bit = site
        value, substituted = value_with_flip(X_test[i, feature], format, bit)
        faulted[i, feature] = value
        substitutions += substituted

    baseline_acc = float(np.mean(model.predict(baseline) == y_test))
    faulted_acc = float(np.mean(model.predict(faulted) == y_test))
    return BenchRow(
        model_kind,
        feature_set,
        format,
        baseline_acc,
        faulted_acc,
        baseline_acc - faulted_acc,
        substitutions,
        seed,
    )


def run_full_bench(
    dataset: TimeSeriesDataset,
    seed: int,
    fault_policy: FaultPolicy | None = None,
    **feature_kwargs,
) -> list[BenchRow]:
    """All scoped classifiers x feature sets x formats under one seed."""
    policy = fault_policy if fault_policy is not None else FaultPolicy()
    rows = []
    for model_kind in CLASSIFIERS:
        for feature_set in FEATURE_SETS:
            for format in ("float32", "posit32"):
                rows.append(
                    run_fault_bench(
                        dataset, feature_set, model_kind, format, policy, seed, **feature_kwargs
                    )
                )
    return rows
