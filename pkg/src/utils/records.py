"""
Flat key-value records for machine-readable output

One record per line: ``record=<kind> key=value key=value ...``. Field order
is fixed by the caller. Floats are written with ``repr`` so that parsing a
printed record gives back the identical value.
"""

from typing import Any, Dict, List, Sequence, Tuple

from .exceptions import RecordParseError

FieldList = Sequence[Tuple[str, Any]]


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(float(v)) for v in value) if value else "-"
    text = str(value)
    if not text or any(ch.isspace() for ch in text) or "=" in text:
        raise ValueError(f"Record value {text!r} must be a non-empty token")
    return text


def format_record(kind: str, fields: FieldList) -> str:
    """Render one record line"""
    parts = [f"record={kind}"]
    for key, value in fields:
        parts.append(f"{key}={_format_value(value)}")
    return " ".join(parts)


def parse_record(line: str) -> Dict[str, str]:
    """Split a record line into its raw string fields"""
    fields: Dict[str, str] = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep or not key:
            raise RecordParseError(f"Malformed record token: {token!r}")
        fields[key] = value
    if "record" not in fields:
        raise RecordParseError("Record line lacks a 'record' field")
    return fields


def parse_float_list(value: str) -> List[float]:
    """Inverse of the list formatting used by format_record"""
    if value == "-":
        return []
    return [float(v) for v in value.split(",")]


def parse_bool(value: str) -> bool:
    return value == "true"


def find_record(lines: Sequence[str], kind: str) -> Dict[str, str]:
    """Return the first record of the given kind"""
    for line in lines:
        line = line.strip()
        if not line.startswith("record="):
            continue
        fields = parse_record(line)
        if fields["record"] == kind:
            return fields
    raise RecordParseError(f"No '{kind}' record found")
