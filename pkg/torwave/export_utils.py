"""
Serialization of reports and trial tables, and the loaders used by --replay.

JSON floats use Python's shortest round-trip representation, so parsing the
output gives back bit-identical values; NaN and infinities become null.
"""

import dataclasses
import json
import math
from enum import Enum
from io import StringIO
from pathlib import Path
from typing import Any, List, Type, TypeVar, Union

import numpy as np
import pandas as pd

from .curve import CurveDef
from .errors import ValidationError
from .experiments import TailRow, TrialBatch
from .lattice import EigenvalueSpec, spec_from_dict
from .wave import CoefficientEnsemble, WaveSample, sample_from_dump
from .zeros import ZeroCountResult

TRIAL_COLUMNS = ["trial", "z", "suspects", "seed"]
TAIL_COLUMNS = list(TailRow.__dataclass_fields__)
FORMATS = ("json", "csv")

R = TypeVar("R")


def to_plain(data: Any) -> Any:
    """Convert reports, numpy values and enums into JSON-ready Python objects."""
    if hasattr(data, "to_dict"):
        return to_plain(data.to_dict())
    if dataclasses.is_dataclass(data) and not isinstance(data, type):
        return to_plain(dataclasses.asdict(data))
    if isinstance(data, pd.DataFrame):
        return [to_plain(row) for row in data.to_dict(orient="records")]
    if isinstance(data, dict):
        return {str(k): to_plain(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_plain(v) for v in data]
    if isinstance(data, np.ndarray):
        return [to_plain(v) for v in data.tolist()]
    if isinstance(data, Enum):
        return data.value
    if isinstance(data, (bool, np.bool_)):
        return bool(data)
    if isinstance(data, (int, np.integer)):
        return int(data)
    if isinstance(data, (float, np.floating)):
        value = float(data)
        return value if math.isfinite(value) else None
    return data


def _frame(data: Any) -> pd.DataFrame:
    if isinstance(data, TrialBatch):
        return data.to_frame()
    if isinstance(data, pd.DataFrame):
        return data
    plain = to_plain(data)
    if isinstance(plain, dict):
        plain = [plain]
    return pd.json_normalize(plain)


def export_report(data: Any, format_type: str) -> str:
    """
    Export a report to one of the supported formats.

    Args:
        data: A report object, TrialBatch, DataFrame, dict or list of rows
        format_type: "json" or "csv"

    Returns:
        String data in the requested format
    """
    if format_type == "json":
        return json.dumps(to_plain(data), indent=2, allow_nan=False) + "\n"

    elif format_type == "csv":
        output = StringIO()
        _frame(data).to_csv(output, index=False, lineterminator="\n")
        return output.getvalue()

    raise ValidationError(f"unknown format {format_type!r}; choose from {', '.join(FORMATS)}")


def write_output(text: str, out: Union[str, Path, None]) -> None:
    """Write to the --out path, or stdout when it is None."""
    if out is None:
        print(text, end="")
        return
    Path(out).write_text(text, encoding="utf-8")


def load_json(source: Union[str, Path]) -> Any:
    try:
        return json.loads(Path(source).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"{source}: cannot read ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: not valid JSON ({exc})") from None


def load_spec_json(source: Union[str, Path]) -> EigenvalueSpec:
    return spec_from_dict(load_json(source))


def load_count_json(source: Union[str, Path]) -> ZeroCountResult:
    return ZeroCountResult.from_dict(load_json(source))


def load_trial_csv(
    source: Union[str, Path],
    spec: EigenvalueSpec,
    curve: CurveDef,
    ensemble: CoefficientEnsemble,
) -> TrialBatch:
    """
    Rebuild a TrialBatch from a trial table written by export_report.

    Args:
        source: CSV path with header trial,z,suspects,seed
        spec: Spectrum the table was produced for
        curve: Curve the table was produced for
        ensemble: Coefficient law of the run

    Returns:
        TrialBatch
    """
    frame = pd.read_csv(
        source,
        dtype={"trial": np.int64, "z": np.int64, "suspects": np.int64, "seed": np.uint64},
    )
    if list(frame.columns) != TRIAL_COLUMNS:
        raise ValidationError(f"{source}: expected header {','.join(TRIAL_COLUMNS)}")
    return TrialBatch.from_frame(frame, spec, curve, ensemble)


def _restore(value: Any) -> Any:
    if value is None:
        return math.nan
    if isinstance(value, list):
        return tuple(_restore(v) for v in value)
    return value


def report_from_dict(cls: Type[R], data: Any) -> R:
    """
    Rebuild a report dataclass from its exported JSON object.

    Classes with their own from_dict are delegated to. Otherwise every field
    without a default must be present; derived keys such as order_ratio are
    ignored and recomputed, null becomes NaN and lists become tuples.
    """
    if not isinstance(data, dict):
        raise ValidationError(f"expected a JSON object for {cls.__name__}")
    from_dict = getattr(cls, "from_dict", None)
    if from_dict is not None:
        return from_dict(data)
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name in data:
            kwargs[f.name] = _restore(data[f.name])
        elif f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
            raise ValidationError(f"{cls.__name__} record is missing {f.name!r}")
    return cls(**kwargs)


def is_json_file(source: Union[str, Path]) -> bool:
    """True when the first non-blank character opens a JSON object or array."""
    try:
        with open(source, encoding="utf-8") as handle:
            head = handle.read(4096).lstrip()
    except OSError as exc:
        raise ValidationError(f"{source}: cannot read ({exc.strerror})") from None
    return head[:1] in ("{", "[")


def load_report_json(source: Union[str, Path], cls: Type[R]) -> R:
    return report_from_dict(cls, load_json(source))


def load_report_rows(source: Union[str, Path], cls: Type[R]) -> List[R]:
    """Rows of a tabular report, from either its JSON list or its CSV form."""
    if is_json_file(source):
        records = load_json(source)
        if not isinstance(records, list):
            raise ValidationError(f"{source}: expected a JSON list of rows")
    else:
        frame = pd.read_csv(source, float_precision="round_trip")
        records = [
            {k: (v.item() if isinstance(v, np.generic) else v) for k, v in row.items()}
            for row in frame.to_dict(orient="records")
        ]
    return [report_from_dict(cls, record) for record in records]


def load_sample_json(source: Union[str, Path]) -> WaveSample:
    return sample_from_dump(load_json(source))


def csv_columns(source: Union[str, Path]) -> List[str]:
    try:
        return [str(c) for c in pd.read_csv(source, nrows=0).columns]
    except (OSError, pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise ValidationError(f"{source}: not a readable CSV ({exc})") from None
