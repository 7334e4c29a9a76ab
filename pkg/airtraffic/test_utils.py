import math

import numpy as np
import pandas as pd
import pytest

from airtraffic.generate_synthetic_traffic import CROSSING_REGIONS, generate_scenario
from airtraffic.utils import (
    EARTH_RADIUS_KM,
    KernelConfig,
    KernelEstimator,
    atm_quantize,
    compare_summaries,
    estimate_field,
    ingest_traffic_csv,
    label_agreement,
    nw_estimate,
    project_planar,
    standardize_velocities,
)
from shared.errors import CsvFormatError, DataError, EmptyKernelError, UsageError
from shared.quantization import Codebook, QuantizedMeasure
from shared.manifold_core import ManifoldId

RADIUS = 5.0


@pytest.fixture(scope="module")
def crossing():
    return generate_scenario("crossing", seed=0)


@pytest.fixture(scope="module")
def crossing_summary(crossing):
    return atm_quantize(crossing, 3, KernelConfig(RADIUS), seed=0)


def _nearest_sample(samples, point):
    return int(np.argmin(np.hypot(samples["x"] - point[0], samples["y"] - point[1])))


def test_standardize_velocities():
    samples = pd.DataFrame({"x": [0.0, 1.0, 2.0], "y": 0.0, "vx": [1.0, 2.0, 3.0], "vy": [4.0, 4.0, 4.0]})
    out = standardize_velocities(samples)
    assert out["vx"].tolist() == pytest.approx([-math.sqrt(1.5), 0.0, math.sqrt(1.5)])
    assert out["vy"].tolist() == [0.0, 0.0, 0.0]
    assert out["x"].tolist() == samples["x"].tolist()


def test_kernel_config():
    cfg = KernelConfig(6.0)
    assert cfg.h == 2.0
    assert cfg.weights(np.array([0.0, 6.0]))[1] == 0.0
    with pytest.raises(UsageError):
        KernelConfig(0.0)
    with pytest.raises(UsageError):
        KernelConfig(5.0, -1.0)


def test_nadaraya_watson_moments():
    samples = pd.DataFrame({
        "x": [0.0, 0.0, 5.0],
        "y": [0.0, 0.0, 0.0],
        "vx": [1.0, -1.0, 10.0],
        "vy": [0.0, 0.0, 10.0],
    })
    mean, cov = nw_estimate(samples, (0.0, 0.0), KernelConfig(1.0), ridge=1e-8)
    assert mean == pytest.approx([0.0, 0.0])
    assert np.allclose(cov, [[1.0 + 1e-8, 0.0], [0.0, 1e-8]], atol=1e-15)

    mean, cov = nw_estimate(samples, (5.0, 0.0), KernelConfig(1.0), ridge=0.0)
    assert mean == pytest.approx([10.0, 10.0])
    assert np.allclose(cov, 0.0)

    with pytest.raises(EmptyKernelError):
        nw_estimate(samples, (50.0, 50.0), KernelConfig(1.0))


def test_project_planar():
    ref = (43.6, 1.4)
    x, y = project_planar(ref[0], ref[1], ref)
    assert x == pytest.approx(0.0, abs=1e-9)
    assert y == pytest.approx(0.0, abs=1e-9)
    x, y = project_planar(ref[0] + 0.01, ref[1], ref)
    assert x == pytest.approx(0.0, abs=1e-9)
    assert y == pytest.approx(EARTH_RADIUS_KM * math.radians(0.01), rel=1e-6)
    with pytest.raises(DataError):
        project_planar(-43.6, 1.4 - 180.0, ref)


def test_ingest_rejects_bad_rows(tmp_path):
    path = tmp_path / "traffic.csv"
    path.write_text("x,y,vx,vy,t\n0,0,1,0,0\n1,0,nan,0,1\n2,0,1,0,5\n3,0,,0,1\n")
    result = ingest_traffic_csv(path)
    assert len(result.samples) == 2
    assert result.rejected_lines == [3, 5]
    assert result.to_dict()["rejected_rows"] == 2

    windowed = ingest_traffic_csv(path, window=(0.0, 2.0))
    assert windowed.samples["x"].tolist() == [0.0]


def test_ingest_lat_lon(tmp_path):
    path = tmp_path / "flights.csv"
    path.write_text("lat,lon,vx,vy\n43.6,1.4,200,0\n43.7,1.4,0,200\n")
    with pytest.raises(UsageError):
        ingest_traffic_csv(path)
    result = ingest_traffic_csv(path, ref=(43.6, 1.4))
    assert result.source == "stereographic"
    assert result.samples["y"].iloc[1] == pytest.approx(EARTH_RADIUS_KM * math.radians(0.1), rel=1e-4)

    wrong = tmp_path / "wrong.csv"
    wrong.write_text("a,b\n1,2\n")
    with pytest.raises(CsvFormatError):
        ingest_traffic_csv(wrong)


def test_field_is_scale_coherent(crossing):
    scaled = crossing.copy()
    for col in ("x", "y", "vx", "vy"):
        scaled[col] = 2.0 * scaled[col]
    base = estimate_field(standardize_velocities(crossing), KernelConfig(RADIUS))
    doubled = estimate_field(standardize_velocities(scaled), KernelConfig(2.0 * RADIUS))
    assert np.allclose(base.to_numpy(), doubled.to_numpy(), rtol=1e-9, atol=1e-15)

    a = atm_quantize(crossing, 3, KernelConfig(RADIUS), seed=4, field_frame=base)
    b = atm_quantize(scaled, 3, KernelConfig(2.0 * RADIUS), seed=4, field_frame=doubled)
    assert np.allclose(a.measure.codebook.centers, b.measure.codebook.centers, rtol=1e-9, atol=1e-15)
    assert np.array_equal(a.class_labels, b.class_labels)


def test_field_from_foreign_positions_skips_empty_kernels(crossing, caplog):
    estimator = KernelEstimator(standardize_velocities(crossing), KernelConfig(RADIUS))
    positions = crossing[["x", "y"]].to_numpy(dtype=float)
    moved = positions.copy()
    moved[:20] += 1e4
    field = estimator.field(moved)
    assert field.iloc[:20].isna().all().all()
    assert np.isfinite(field.iloc[20:].to_numpy()).all()

    with caplog.at_level("WARNING", logger="airtraffic"):
        summary = atm_quantize(crossing, 3, KernelConfig(RADIUS), seed=4, field_frame=field)
    assert summary.diagnostics["empty_kernel_skipped"] == 20
    assert (summary.class_labels[:20] == 0).all()
    assert (summary.class_labels[20:] > 0).all()
    assert "empty kernel" in caplog.text

    moved[: len(moved) // 2 + 1] += 1e4
    with pytest.raises(EmptyKernelError):
        atm_quantize(crossing, 3, KernelConfig(RADIUS), seed=4, field_frame=estimator.field(moved))


def test_crossing_classes(crossing, crossing_summary):
    summary = crossing_summary
    assert summary.order.status == "total"
    assert sorted(summary.order.ranks) == [1, 2, 3]
    assert summary.measure.weights.sum() == pytest.approx(1.0)
    labels = summary.class_labels
    assert labels[_nearest_sample(crossing, CROSSING_REGIONS["crossing"])] == 3
    assert labels[_nearest_sample(crossing, (10.0, 8.0))] == 1
    assert labels.min() >= 1

    payload = summary.to_dict()
    assert [c["rank"] for c in payload["classes"]] == [1, 2, 3]
    traces = [c["trace"] for c in payload["classes"]]
    assert traces == sorted(traces)
    assert sum(c["count"] for c in payload["classes"]) == len(crossing)


def test_parallel_tracks_give_a_total_order():
    samples = generate_scenario("parallel", seed=1)
    summary = atm_quantize(samples, 3, KernelConfig(RADIUS), seed=1)
    assert summary.order.status == "total"
    assert summary.diagnostics["zero_variance_components"] == ["vy"]


def test_dense_crossing_reaches_the_top_class():
    samples = generate_scenario("dense_x", seed=2)
    summary = atm_quantize(samples, 3, KernelConfig(RADIUS), seed=2)
    top = summary.class_labels == 3
    near = np.hypot(samples["x"] - 50.0, samples["y"] - 50.0) < RADIUS
    assert np.any(top & near)


def test_same_seed_same_summary(crossing, crossing_summary):
    again = atm_quantize(crossing, 3, KernelConfig(RADIUS), seed=0)
    assert again.to_dict() == crossing_summary.to_dict()


def test_frobenius_baseline_returns_spd_centers(crossing):
    summary = atm_quantize(crossing, 3, KernelConfig(RADIUS), seed=0, metric="frobenius")
    assert summary.measure.manifold == ManifoldId.spd(2)
    mats = summary.measure.codebook.centers.reshape(-1, 2, 2)
    assert np.allclose(mats, mats.transpose(0, 2, 1))


def test_invalid_runs(crossing):
    with pytest.raises(UsageError):
        atm_quantize(crossing, 3, None)
    with pytest.raises(UsageError):
        atm_quantize(crossing, 0, KernelConfig(RADIUS))
    with pytest.raises(UsageError):
        atm_quantize(crossing, 3, KernelConfig(RADIUS), metric="euclid")


def test_compare_summaries(crossing_summary):
    other = atm_quantize(generate_scenario("parallel", seed=0), 3, KernelConfig(RADIUS), seed=0)
    out = compare_summaries([crossing_summary, other])
    assert out.shape == (2, 2)
    assert out[0, 0] == 0.0 and out[1, 1] == 0.0
    assert out[0, 1] == out[1, 0] > 0.0

    circle = QuantizedMeasure(Codebook(ManifoldId.circle(), [[0.0]]), [1.0])
    with pytest.raises(DataError):
        compare_summaries([circle, circle])


def test_label_agreement():
    assert label_agreement([1, 2, 3], [1, 2, 1]) == pytest.approx(2 / 3)
    with pytest.raises(DataError):
        label_agreement([1, 2], [1])
