import math

import numpy as np
import pytest

from manifoldquantization import compute_frechet_mean, run_decay_study, run_quantization
from manifoldquantization.run_decay_study import decay_study, parse_ints
from manifoldquantization.run_quantization import parse_steps
from shared.errors import UsageError
from shared.manifold_core import ManifoldId, PointSet
from shared.quantization_io import load_json, numerical_payload, read_frame_csv, write_points_csv
from shared.sampling import sample_von_mises


@pytest.fixture
def vm_csv(tmp_path):
    path = tmp_path / "vm.csv"
    write_points_csv(path, sample_von_mises(0.0, 5.0, 1000, seed=3))
    return path


def _quantize(vm_csv, tmp_path, *extra):
    out = tmp_path / "report.json"
    code = run_quantization.main([
        "--input", str(vm_csv), "--output", str(out), "--config", str(tmp_path / "none.yml"), *extra,
    ])
    return code, out


def test_quantize_report_and_trace(vm_csv, tmp_path):
    trace_path, svg_path = tmp_path / "trace.csv", tmp_path / "trace.svg"
    code, out = _quantize(vm_csv, tmp_path, "--n", "5", "--repeat-m", "50", "--trace-w1",
                          "--snapshot-steps", "100", "--trace-csv", str(trace_path), "--svg", str(svg_path))
    assert code == 0
    payload = load_json(out)
    assert set(payload) == {"_README", "metadata", "report"}
    report = payload["report"]
    assert len(report["quantized_measure"]["centers"]) == 5
    assert math.fsum(report["quantized_measure"]["weights"]) == pytest.approx(1.0)
    assert report["checkpoints"][0]["k"] == 0
    assert report["checkpoints"][-1]["k"] == 3 * 1000
    assert any("centers" in cp for cp in report["checkpoints"] if cp["k"] == 100)
    assert payload["metadata"]["run_config"]["seed"] == 0

    trace, _, _ = read_frame_csv(trace_path)
    assert list(trace.columns) == ["k", "distortion", "w1"]
    assert svg_path.read_text().startswith("<svg")


def test_quantize_is_deterministic(vm_csv, tmp_path):
    _, out = _quantize(vm_csv, tmp_path, "--n", "3", "--seed", "11")
    first = numerical_payload(load_json(out))
    _, out = _quantize(vm_csv, tmp_path, "--n", "3", "--seed", "11")
    assert numerical_payload(load_json(out)) == first


def test_quantize_exit_codes(vm_csv, tmp_path):
    assert _quantize(vm_csv, tmp_path, "--n", "0")[0] == 2
    assert _quantize(vm_csv, tmp_path, "--schedule", "1.2,50")[0] == 2
    assert _quantize(vm_csv, tmp_path, "--manifold", "sphere2")[0] == 3

    off_sphere = tmp_path / "s2.csv"
    off_sphere.write_text('# manifold: "sphere2"\nx,y,z\n0,0,1\n0,0,1.5\n')
    assert _quantize(off_sphere, tmp_path, "--n", "1")[0] == 3

    constant = tmp_path / "constant.csv"
    write_points_csv(constant, PointSet(ManifoldId.circle(), np.ones((10, 1))))
    assert _quantize(constant, tmp_path, "--n", "2")[0] == 3


def test_frechet_mean_of_sample(vm_csv, tmp_path):
    out = tmp_path / "mean.json"
    assert compute_frechet_mean.main(["--input", str(vm_csv), "--output", str(out)]) == 0
    result = load_json(out)["result"]
    assert result["converged"]
    theta = result["mean"]["coords"][0]
    assert min(theta, 2 * math.pi - theta) < 0.1


def test_frechet_mean_per_cell(vm_csv, tmp_path):
    _, report = _quantize(vm_csv, tmp_path, "--n", "4")
    out = tmp_path / "cells.json"
    assert compute_frechet_mean.main(["--input", str(vm_csv), "--report", str(report), "--output", str(out)]) == 0
    cells = load_json(out)["cells"]
    assert [c["cell"] for c in cells] == [1, 2, 3, 4]
    assert sum(c["count"] for c in cells) == 1000
    assert all(c["center_to_mean"] < 0.5 for c in cells if c["count"])


def test_decay_slope_on_the_sphere():
    result = decay_study([2, 4, 8, 16], seeds=[0, 1], samples=1000)
    assert all(a > b for a, b in zip(result.best, result.best[1:]))
    assert -1.3 < result.slope < -0.7
    assert list(result.frame().columns) == ["n", "best_distortion", "n_times_distortion"]


def test_decay_cli(tmp_path):
    out, table = tmp_path / "decay.json", tmp_path / "decay.csv"
    code = run_decay_study.main(["--n-values", "2,4", "--seeds", "1", "--samples", "300", "--epochs", "1",
                                 "--output", str(out), "--csv", str(table), "--config", str(tmp_path / "none.yml")])
    assert code == 0
    result = load_json(out)["result"]
    assert result["n_values"] == [2, 4]
    assert result["theoretical_slope"] == -1.0
    assert table.exists()
    assert run_decay_study.main(["--n-values", "4", "--output", str(out)]) == 2


def test_argument_parsers():
    assert parse_steps("10, 20") == [10, 20]
    assert parse_steps([5, 6]) == [5, 6]
    assert parse_steps(None) == []
    with pytest.raises(UsageError):
        parse_steps("-1")
    assert parse_ints("2,4", "--n-values") == [2, 4]
    with pytest.raises(UsageError):
        parse_ints("two", "--n-values")
    with pytest.raises(UsageError):
        decay_study([4], seeds=[0])
