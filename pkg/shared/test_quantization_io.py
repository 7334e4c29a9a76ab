import io
import json
import logging

import numpy as np
import pandas as pd
import pytest

from shared.errors import CsvFormatError, DataError, UsageError
from shared.manifold_core import ManifoldId, PointSet
from shared.quantization_io import (
    build_metadata,
    configure_logging,
    expand_env,
    format_table,
    load_config,
    load_json,
    numerical_payload,
    parse_float_pair,
    pick,
    read_frame_csv,
    read_points_csv,
    write_frame_csv,
    write_json,
    write_points_csv,
)


def test_env_templates(monkeypatch):
    monkeypatch.setenv("CLRQ_TEST_DIR", "/tmp/clrq")
    monkeypatch.delenv("CLRQ_MISSING", raising=False)
    assert expand_env("${CLRQ_TEST_DIR:.}") == "/tmp/clrq"
    assert expand_env("${CLRQ_MISSING:fallback}") == "fallback"
    assert expand_env("${CLRQ_MISSING}") == ""
    assert expand_env("${CLRQ_TEST_DIR}/runs-${CLRQ_MISSING:a}") == "/tmp/clrq/runs-a"
    assert expand_env("plain $HOME {x}") == "plain $HOME {x}"
    assert expand_env(3) == 3


def test_load_config(tmp_path, monkeypatch):
    monkeypatch.setenv("CLRQ_OUTPUT_DIR", str(tmp_path))
    path = tmp_path / "config.yml"
    path.write_text("output:\n  directory: \"${CLRQ_OUTPUT_DIR:.}\"\n  files: [\"${CLRQ_OUTPUT_DIR:.}\"]\n")
    cfg = load_config(path)
    assert cfg["output"]["directory"] == str(tmp_path)
    assert cfg["output"]["files"] == [str(tmp_path)]
    assert load_config(tmp_path / "absent.yml") == {}
    assert load_config(None) == {}

    broken = tmp_path / "broken.yml"
    broken.write_text("a: [1, 2\n")
    with pytest.raises(UsageError):
        load_config(broken)

    listing = tmp_path / "listing.yml"
    listing.write_text("- a\n- b\n")
    with pytest.raises(UsageError):
        load_config(listing)
    (tmp_path / "blank.yml").write_text("")
    assert load_config(tmp_path / "blank.yml") == {}


def test_pick_precedence():
    section = {"n": 4, "empty": ""}
    assert pick(7, section, "n", 1) == 7
    assert pick(None, section, "n", 1) == 4
    assert pick(None, section, "empty", 1) == 1
    assert pick(None, {}, "n", 1) == 1


def test_parse_float_pair():
    assert parse_float_pair("1.5,-2", "--ref") == (1.5, -2.0)
    assert parse_float_pair(None, "--ref") is None
    with pytest.raises(UsageError):
        parse_float_pair("1,2,3", "--ref")


def test_json_artifacts(tmp_path):
    path = write_json(tmp_path / "out" / "a.json", {"x": np.float64(0.5), "n": np.int64(3), "v": np.arange(3)})
    assert json.loads(path.read_text()) == {"x": 0.5, "n": 3, "v": [0, 1, 2]}
    assert load_json(path)["n"] == 3
    assert not list(path.parent.glob(".a.json.*"))

    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(DataError):
        load_json(tmp_path / "bad.json")
    with pytest.raises(DataError):
        load_json(tmp_path / "missing.json")
    with pytest.raises(ValueError):
        write_json(tmp_path / "nan.json", {"x": float("nan")})


def test_metadata_and_numerical_payload():
    meta = build_metadata("quantize", {"n": 3}, extra=1)
    assert meta["command"] == "quantize"
    assert meta["run_config"] == {"n": 3}
    assert meta["extra"] == 1
    stripped = numerical_payload({"metadata": meta, "value": 2})
    assert "generated_at" not in stripped["metadata"]
    assert "generated_at" in meta
    assert stripped["value"] == 2


def test_points_csv_round_trip(tmp_path):
    points = PointSet(ManifoldId.sphere2(), [[0.0, 0.0, 1.0], [0.6, 0.8, 0.0]])
    path = write_points_csv(tmp_path / "pts.csv", points, {"seed": 4})
    text = path.read_text().splitlines()
    assert text[0] == '# manifold: "sphere2"'
    assert text[2] == "x,y,z"
    back = read_points_csv(path)
    assert back.manifold == ManifoldId.sphere2()
    assert np.allclose(back.coords, points.coords, atol=1e-15)

    with pytest.raises(DataError):
        read_points_csv(path, ManifoldId.circle())


def test_points_csv_reports_bad_lines(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text('# manifold: "sphere2"\nx,y,z\n0,0,1\n0,0,2\n1,0,0\nabc,0,0\n')
    with pytest.raises(CsvFormatError) as info:
        read_points_csv(path)
    assert info.value.lines == [4, 6]
    assert info.value.exit_code == 3

    headerless = tmp_path / "plain.csv"
    headerless.write_text("theta\n0.5\n")
    with pytest.raises(UsageError):
        read_points_csv(headerless)
    assert read_points_csv(headerless, ManifoldId.circle()).coords.tolist() == [[0.5]]

    with pytest.raises(CsvFormatError):
        read_points_csv(headerless, ManifoldId.sphere2())


def test_frame_csv_header(tmp_path):
    frame = pd.DataFrame({"k": [0, 10], "distortion": [0.25, 0.125]})
    path = write_frame_csv(tmp_path / "trace.csv", frame, {"run_config": {"n": 2}})
    back, header, first_line = read_frame_csv(path)
    assert header == {"run_config": {"n": 2}}
    assert first_line == 3
    assert back["distortion"].tolist() == [0.25, 0.125]


def test_format_table():
    table = format_table([[2, 0.5], [16, float("nan")]], ["n", "distortion"])
    lines = table.splitlines()
    assert lines[0].split() == ["n", "distortion"]
    assert lines[1].split() == ["2", "0.5000"]
    assert lines[2].split() == ["16", "nan"]


def test_log_prefixes():
    stream = io.StringIO()
    configure_logging(verbose=False, stream=stream)
    logging.getLogger("shared.test").warning("careful")
    logging.getLogger("shared.test").debug("hidden")
    err = stream.getvalue()
    assert "[warn]" in err and "careful" in err
    assert "hidden" not in err
