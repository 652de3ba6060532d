"""ML benchmark: features, classifiers, fault injection into stored inputs."""

import math

import numpy as np
import pytest

from positres.mlbench import (
    CLASSIFIERS,
    DatasetFormatError,
    FaultPolicy,
    TimeSeriesDataset,
    extract_features,
    extract_statistical,
    extract_wavelet,
    fault_sites,
    generate_synthetic,
    haar_dwt,
    load_csv,
    run_fault_bench,
    run_full_bench,
    stratified_split,
    train,
    value_roundtrip,
    value_with_flip,
)


def test_synthetic_is_deterministic():
    a = generate_synthetic(3, 5, 64, seed=11)
    b = generate_synthetic(3, 5, 64, seed=11)
    assert all(np.array_equal(x, y) for x, y in zip(a.signals, b.signals))
    assert a.labels == b.labels == sorted(a.labels)
    assert a.n_classes == 3
    c = generate_synthetic(3, 5, 64, seed=12)
    assert not np.array_equal(a.signals[0], c.signals[0])


def test_dataset_validation():
    with pytest.raises(ValueError):
        generate_synthetic(1, 5, 64, seed=0)
    with pytest.raises(ValueError):
        TimeSeriesDataset([np.ones(4)], [0])  # single class
    with pytest.raises(ValueError):
        TimeSeriesDataset([np.ones(4), np.ones(4)], [0, 2])  # not dense


def test_statistical_features():
    signal = np.array([1.0, 2.0, 3.0, 4.0])
    feats = extract_statistical(signal, window_len=4, stride=4)
    mean, std, rms, autocov = feats
    assert mean == 2.5
    assert std == pytest.approx(math.sqrt(1.25))
    assert rms == pytest.approx(math.sqrt(7.5))
    # lag-1 autocovariance with 1/(n-1) normalization
    centered = signal - 2.5
    assert autocov == pytest.approx(np.dot(centered[:-1], centered[1:]) / 3)


def test_windowing():
    feats = extract_statistical(np.arange(10.0), window_len=4, stride=2)
    assert len(feats) == 4 * 4  # windows at 0, 2, 4, 6
    with pytest.raises(ValueError):
        extract_statistical(np.arange(3.0), window_len=4)


def test_haar_is_orthonormal():
    rng = np.random.default_rng(0)
    window = rng.standard_normal(64)
    bands = haar_dwt(window, levels=3)
    assert [len(b) for b in bands] == [32, 16, 8, 8]
    # Parseval: the orthonormal transform preserves total energy
    total = sum(float(np.sum(b**2)) for b in bands)
    assert total == pytest.approx(float(np.sum(window**2)))
    with pytest.raises(ValueError):
        haar_dwt(np.ones(60), levels=3)


def test_wavelet_features_shape():
    feats = extract_wavelet(np.arange(256.0), window_len=64, stride=32, levels=3)
    assert len(feats) == 7 * 4  # 7 windows x (3 detail bands + approx)


def test_extract_features_matrix():
    ds = generate_synthetic(2, 3, 128, seed=1)
    X, y = extract_features(ds, "statistical")
    assert X.shape == (6, 3 * 4)
    assert np.array_equal(y, ds.labels)
    with pytest.raises(ValueError):
        extract_features(ds, "fourier")


def test_classifiers_learn_separable_data():
    rng = np.random.default_rng(2)
    X = np.vstack([rng.normal(0, 0.1, (20, 3)), rng.normal(5, 0.1, (20, 3))])
    y = np.array([0] * 20 + [1] * 20)
    for kind in CLASSIFIERS:
        model = train(kind, X, y)
        assert np.array_equal(model.predict(X), y), kind
        assert np.array_equal(model.predict(X + 0.01), y), kind


def test_train_rejects_single_class():
    with pytest.raises(ValueError):
        train("knn1", np.ones((4, 2)), np.zeros(4, dtype=int))
    with pytest.raises(ValueError):
        train("svm", np.ones((4, 2)), np.array([0, 0, 1, 1]))


def test_stratified_split():
    y = np.array([0] * 10 + [1] * 20)
    train_idx, test_idx = stratified_split(y, 0.3, seed=4)
    assert len(np.intersect1d(train_idx, test_idx)) == 0
    assert len(train_idx) + len(test_idx) == 30
    assert np.sum(y[test_idx] == 0) == 3
    assert np.sum(y[test_idx] == 1) == 6
    again = stratified_split(y, 0.3, seed=4)
    assert np.array_equal(train_idx, again[0]) and np.array_equal(test_idx, again[1])


def test_value_roundtrip_error_bounds():
    rng = np.random.default_rng(6)
    for x in rng.normal(0, 100, 200):
        for fmt in ("float32", "posit32"):
            rt = value_roundtrip(float(x), fmt)
            assert abs(rt - x) <= abs(x) * 2.0**-23 * (1 if fmt == "float32" else 1)


def test_value_with_flip_substitutes_specials():
    # 1.5 * 2**127 stores as 0x7F400000; flipping bit 23 makes it NaN
    value, substituted = value_with_flip(1.5 * 2.0**127, "float32", 23)
    assert substituted and value == 0.0
    # posit 0.0 stores as 0x00000000; flipping the sign bit makes NaR
    value, substituted = value_with_flip(0.0, "posit32", 31)
    assert substituted and value == 0.0
    # an ordinary flip is not substituted
    _, substituted = value_with_flip(1.0, "float32", 0)
    assert not substituted


def test_fault_sites_are_deterministic_and_format_free():
    policy = FaultPolicy()
    a = fault_sites(9, 50, 12, policy)
    b = fault_sites(9, 50, 12, policy)
    assert a == b
    assert all(0 <= f < 12 and 0 <= bit < 32 for f, bit in a)
    assert fault_sites(10, 50, 12, policy) != a
    assert all(s is None for s in fault_sites(9, 50, 12, FaultPolicy(enabled=False)))
    half = fault_sites(9, 400, 12, FaultPolicy(vector_fraction=0.5))
    n_hit = sum(s is not None for s in half)
    assert 120 < n_hit < 280


def test_run_fault_bench_is_reproducible():
    ds = generate_synthetic(2, 20, 128, seed=3)
    row1 = run_fault_bench(ds, "statistical", "knn1", "float32", FaultPolicy(), seed=3)
    row2 = run_fault_bench(ds, "statistical", "knn1", "float32", FaultPolicy(), seed=3)
    assert row1 == row2
    assert 0.0 <= row1.baseline_accuracy <= 1.0
    assert row1.accuracy_drop == pytest.approx(
        row1.baseline_accuracy - row1.faulted_accuracy
    )


def test_disabled_faults_leave_accuracy_unchanged():
    ds = generate_synthetic(2, 20, 128, seed=3)
    row = run_fault_bench(
        ds, "statistical", "knn1", "posit32", FaultPolicy(enabled=False), seed=3
    )
    assert row.faulted_accuracy == row.baseline_accuracy
    assert row.nan_or_nar_substitutions == 0


def test_run_full_bench_covers_grid():
    ds = generate_synthetic(2, 12, 64, seed=5)
    rows = run_full_bench(ds, seed=5)
    assert len(rows) == 16
    cells = {(r.classifier, r.feature_set, r.format) for r in rows}
    assert len(cells) == 16
    # identical fault sites across formats: baselines agree per cell
    by_cell = {(r.classifier, r.feature_set, r.format): r for r in rows}
    for clf in CLASSIFIERS:
        for fs in ("statistical", "wavelet"):
            assert (
                by_cell[(clf, fs, "float32")].seed == by_cell[(clf, fs, "posit32")].seed
            )


def test_load_csv(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text(
        "label,s0,s1,s2,s3\n0,1.0,2.5,3,4\n1,0.125,-2,3e2,0.2\n0,1,1,1,2\n1,5,5,5,5\n"
    )
    ds = load_csv(path)
    assert ds.labels == [0, 1, 0, 1]
    assert ds.signals[1][2] == 300.0
    assert ds.signals[0][1] == 2.5


def test_load_csv_diagnostics(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,1.0\n1,abc\n")
    with pytest.raises(DatasetFormatError, match="record 2"):
        load_csv(path)
    path.write_text("0,1.0\n0,2.0\n")
    with pytest.raises(ValueError, match="2 classes"):
        load_csv(path)
    path.write_text("")
    with pytest.raises(DatasetFormatError, match="no records"):
        load_csv(path)
