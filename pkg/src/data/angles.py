"""
Angle file ingestion and export

CSV only: one angle per row in a single column, optional header row, UTF-8,
comma separated, decimal point. Degrees are converted to radians on input;
everything this package writes is in radians.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ..inference.likelihood import Sample
from ..utils.exceptions import AngleParseError, DataFileError

logger = logging.getLogger("gvm_symmetry.data")


class AngleUnit(str, Enum):
    RADIANS = "radians"
    DEGREES = "degrees"


@dataclass(frozen=True)
class AngleFileSpec:
    """Where and how to read the angles"""
    path: Path
    unit: AngleUnit = AngleUnit.RADIANS
    column: Union[str, int] = 0
    header: bool = True

    def __post_init__(self):
        object.__setattr__(self, "path", Path(self.path))
        object.__setattr__(self, "unit", AngleUnit(self.unit))


def _select_column(frame: pd.DataFrame, column: Union[str, int]) -> pd.Series:
    if isinstance(column, int):
        if not 0 <= column < frame.shape[1]:
            raise AngleParseError(f"Column index {column} out of range; file has {frame.shape[1]} columns")
        return frame.iloc[:, column]
    if column not in frame.columns:
        raise AngleParseError(f"Column {column!r} not found; available: {', '.join(map(str, frame.columns))}")
    return frame[column]


def read_angle_file(spec: AngleFileSpec) -> Sample:
    """Read one column of angles into a Sample"""
    if not spec.path.is_file():
        raise DataFileError(f"Angle file not found: {spec.path}")
    try:
        frame = pd.read_csv(spec.path, header=0 if spec.header else None, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise AngleParseError(f"No angles in {spec.path}")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise AngleParseError(f"Could not parse {spec.path}: {e}")
    except OSError as e:
        raise DataFileError(f"Could not read {spec.path}: {e}")

    raw = _select_column(frame, spec.column)
    values = pd.to_numeric(raw, errors="coerce")
    bad = values.isna() | ~np.isfinite(values.to_numpy(dtype=float))
    if bad.any():
        first = int(np.flatnonzero(bad.to_numpy())[0])
        raise AngleParseError(f"Non-numeric or non-finite angle {raw.iloc[first]!r} at data row {first + 1}")
    if values.empty:
        raise AngleParseError(f"No angles in {spec.path}")

    angles = values.to_numpy(dtype=float)
    if spec.unit is AngleUnit.DEGREES:
        angles = np.deg2rad(angles)
    logger.info(f"Read {angles.size} angles from {spec.path} ({spec.unit.value})")
    return Sample(angles)


def write_angle_file(angles, path: Union[str, Path], column: str = "theta") -> Path:
    """Write angles in radians as a one-column CSV with a header"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        pd.DataFrame({column: np.asarray(angles, dtype=float)}).to_csv(path, index=False)
    except OSError as e:
        raise DataFileError(f"Could not write {path}: {e}")
    return path
