"""
Configuration, logging and file I/O shared by the quantization scripts.

Provides:
- load_config: config.yml with ${ENV:default} templates (after .env is loaded)
- configure_logging: stderr handler with [debug]/[info]/[warn]/[error] prefixes
- write_json / load_json: atomic JSON artifacts with numpy support
- write_points_csv / read_points_csv: point clouds with '#' comment headers
- build_metadata: the metadata block every artifact carries

Usage:
    from shared.quantization_io import load_config, configure_logging, write_json

    configure_logging(verbose=True)
    cfg = load_config("manifoldquantization/config.yml")
"""
from __future__ import annotations

import io
import json
import logging
import math
import os
import re
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml
from dotenv import load_dotenv

from . import __version__
from .errors import ClrqError, CsvFormatError, DataError, InvalidPointError, UsageError
from .manifold_core import ManifoldId, ManifoldKind, PointSet, geometry_for

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
TOOL_NAME = "clrq"


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


# =============================================================================
# CONFIGURATION
# =============================================================================

# ${NAME} or ${NAME:default}, anywhere inside a string value
_ENV_TEMPLATE = re.compile(r"\$\{(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?::(?P<default>[^}]*))?\}")


def expand_env(value: Any) -> Any:
    """Substitute environment templates in a config string; other values pass through."""
    if not isinstance(value, str):
        return value
    return _ENV_TEMPLATE.sub(lambda m: os.environ.get(m["name"], m["default"] or ""), value)


def resolve_env(node: Any) -> Any:
    """``expand_env`` applied to every leaf of a parsed YAML tree."""
    if isinstance(node, dict):
        return {key: resolve_env(value) for key, value in node.items()}
    if isinstance(node, (list, tuple)):
        return [resolve_env(value) for value in node]
    return expand_env(node)


def load_config(path: Optional[PathLike]) -> Dict[str, Any]:
    """Load a workflow config.yml; a missing path yields an empty config."""
    load_dotenv()
    if path is None:
        return {}
    config_file = Path(path)
    if not config_file.is_file():
        logger.debug("config %s not found, using built-in defaults", config_file)
        return {}
    try:
        raw = yaml.safe_load(config_file.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise UsageError(f"Cannot parse {config_file}: {exc}") from None
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise UsageError(f"{config_file} must hold a mapping of sections, got {type(raw).__name__}")
    return resolve_env(raw)


def default_config_path(script_file: str) -> Path:
    return Path(script_file).resolve().parent / "config.yml"


def pick(flag: Any, section: Dict[str, Any], key: str, default: Any = None) -> Any:
    """Command-line value, else config.yml value, else built-in default."""
    if flag is not None:
        return flag
    value = section.get(key) if section else None
    return default if value is None or value == "" else value


def parse_float_pair(text: Optional[str], flag: str) -> Optional[Tuple[float, float]]:
    if text is None:
        return None
    try:
        first, second = (float(v) for v in str(text).split(","))
    except ValueError:
        raise UsageError(f"{flag} expects two comma-separated numbers, got {text!r}") from None
    return first, second


# =============================================================================
# LOGGING
# =============================================================================

_PREFIXES = {
    logging.DEBUG: "[debug]",
    logging.INFO: "[info]",
    logging.WARNING: "[warn]",
    logging.ERROR: "[error]",
    logging.CRITICAL: "[error]",
}


class PrefixFormatter(logging.Formatter):
    """``[warn] shared.quantization: message`` lines for stderr."""

    def format(self, record: logging.LogRecord) -> str:
        prefix = _PREFIXES.get(record.levelno, "[info]")
        message = record.getMessage()
        if record.exc_info and logger.isEnabledFor(logging.DEBUG):
            message = f"{message}\n{self.formatException(record.exc_info)}"
        return f"{prefix} {record.name}: {message}"


def configure_logging(verbose: bool = False, stream=None) -> None:
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_clrq", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(PrefixFormatter())
    handler._clrq = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def print_banner(title: str, lines: Iterable[str] = ()) -> None:
    print("=" * 80, file=sys.stderr)
    print(title, file=sys.stderr)
    print("=" * 80, file=sys.stderr)
    for line in lines:
        print(line, file=sys.stderr)


def report_error(exc: ClrqError) -> int:
    """Log a toolkit error with the [error] prefix and return its exit code."""
    logging.getLogger(TOOL_NAME).error("%s", exc)
    return exc.exit_code


# =============================================================================
# JSON
# =============================================================================

class NumpyEncoder(json.JSONEncoder):
    """JSON encoder for numpy scalars and arrays."""

    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, Path):
            return str(obj)
        return super().default(obj)


def write_text(path: PathLike, text: str) -> Path:
    """Write ``text`` atomically (temp file in the target directory, then rename)."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, target)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise DataError(f"Cannot write {target}: {exc}") from None
    return target


def write_json(path: PathLike, payload: Dict[str, Any], indent: int = 2) -> Path:
    text = json.dumps(payload, indent=indent, sort_keys=False, cls=NumpyEncoder, allow_nan=False)
    return write_text(path, text + "\n")


def load_json(path: PathLike) -> Dict[str, Any]:
    input_file = Path(path)
    if not input_file.exists():
        raise DataError(f"File not found: {input_file}")
    try:
        with open(input_file, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise DataError(f"{input_file} is not valid JSON: {exc}") from None


def build_metadata(command: str, run_config: Dict[str, Any], **extra: Any) -> Dict[str, Any]:
    """The metadata block: tool version, full run config, generation time."""
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": command,
        "generated_at": utc_now_iso(),
        "run_config": run_config,
        **extra,
    }


def numerical_payload(artifact: Dict[str, Any]) -> Dict[str, Any]:
    """Artifact without its generation timestamp (for determinism checks)."""
    out = dict(artifact)
    if isinstance(out.get("metadata"), dict):
        out["metadata"] = {k: v for k, v in out["metadata"].items() if k != "generated_at"}
    return out


# =============================================================================
# CSV
# =============================================================================

def coordinate_columns(manifold: ManifoldId) -> List[str]:
    kind = manifold.kind
    if kind is ManifoldKind.CIRCLE:
        return ["theta"]
    if kind is ManifoldKind.SPHERE2:
        return ["x", "y", "z"]
    if kind is ManifoldKind.HYPERBOLIC2:
        return ["x", "y"]
    if kind is ManifoldKind.SPD:
        n = manifold.dim
        return [f"s{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return [f"x{i + 1}" for i in range(manifold.dim)]


def comment_lines(header: Dict[str, Any]) -> str:
    return "".join(f"# {key}: {json.dumps(value, sort_keys=True, cls=NumpyEncoder)}\n" for key, value in header.items())


def write_frame_csv(path: PathLike, frame: pd.DataFrame, header: Optional[Dict[str, Any]] = None,
                    float_format: str = "%.17g") -> Path:
    buffer = io.StringIO()
    buffer.write(comment_lines(header or {}))
    frame.to_csv(buffer, index=False, float_format=float_format, lineterminator="\n")
    return write_text(path, buffer.getvalue())


def write_points_csv(path: PathLike, points: PointSet, header: Optional[Dict[str, Any]] = None) -> Path:
    frame = pd.DataFrame(points.coords, columns=coordinate_columns(points.manifold))
    return write_frame_csv(path, frame, {"manifold": points.manifold.tag, **(header or {})})


def read_comment_header(path: PathLike) -> Tuple[Dict[str, Any], int]:
    """Leading ``# key: json`` lines and their count."""
    header: Dict[str, Any] = {}
    count = 0
    try:
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if not line.startswith("#"):
                    break
                count += 1
                key, _, value = line[1:].strip().partition(":")
                try:
                    header[key.strip()] = json.loads(value.strip())
                except json.JSONDecodeError:
                    header[key.strip()] = value.strip()
    except OSError as exc:
        raise DataError(f"Cannot read {path}: {exc}") from None
    return header, count


def read_frame_csv(path: PathLike) -> Tuple[pd.DataFrame, Dict[str, Any], int]:
    """CSV as a DataFrame, its comment header, and the file line of data row 0."""
    input_file = Path(path)
    if not input_file.exists():
        raise DataError(f"File not found: {input_file}")
    header, skipped = read_comment_header(input_file)
    try:
        frame = pd.read_csv(input_file, skiprows=skipped, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise CsvFormatError(f"Cannot parse {input_file}: {exc}") from None
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame, header, skipped + 2


def read_points_csv(path: PathLike, manifold: Optional[ManifoldId] = None) -> PointSet:
    """Point cloud from CSV; every invalid row is reported with its line number."""
    frame, header, first_line = read_frame_csv(path)
    declared = header.get("manifold")
    if manifold is None:
        if not declared:
            raise UsageError(f"{path}: no '# manifold:' header; pass --manifold")
        manifold = ManifoldId.parse(str(declared))
    elif declared and ManifoldId.parse(str(declared)) != manifold:
        raise DataError(f"{path} holds {declared} points, expected {manifold.tag}")

    columns = coordinate_columns(manifold)
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise CsvFormatError(f"{path}: missing columns {missing} for {manifold.tag}")
    values = frame[columns].apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)

    geometry = geometry_for(manifold)
    rows = []
    bad = []
    for idx, row in enumerate(values):
        if not np.all(np.isfinite(row)):
            bad.append(first_line + idx)
            continue
        try:
            rows.append(geometry.project_point(row))
        except InvalidPointError:
            bad.append(first_line + idx)
    if bad:
        raise CsvFormatError(f"{path}: {len(bad)} rows are not valid {manifold.tag} points", bad)
    if not rows:
        return PointSet.empty(manifold)
    return PointSet(manifold, np.stack(rows))


def format_table(rows: Sequence[Sequence[Any]], headers: Sequence[str]) -> str:
    """Fixed-width text table for stderr summaries."""
    cells = [[str(h) for h in headers]] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.4f}"
    return str(value)
