"""The `# key=value ...` first line shared by every CSV artifact."""
import io
from typing import Mapping

import pandas as pd

from mortcast.exceptions import MalformedRow

PREFIX = "# "


def format_metadata(fields: Mapping[str, object]) -> str:
    """Single metadata line; booleans are written lower-case.

    Examples:
        >>> format_metadata({"country": "AUS", "open_upper": True})
        '# country=AUS open_upper=true'
    """
    parts = []
    for key, value in fields.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        text = str(value)
        if " " in text or "=" in text:
            raise ValueError(f"Metadata value for {key!r} must not contain spaces or '=': {text!r}")
        parts.append(f"{key}={text}")
    return PREFIX + " ".join(parts)


def parse_metadata(line: str) -> dict[str, str]:
    """Inverse of `format_metadata` (values stay strings).

    Raises:
        MalformedRow: Line is not a metadata line
    """
    if not line.startswith(PREFIX.strip()):
        raise MalformedRow([f"Expected a '# key=value' metadata line, got {line[:60]!r}"])
    fields = {}
    for token in line.lstrip("#").split():
        key, sep, value = token.partition("=")
        if not sep:
            raise MalformedRow([f"Metadata token {token!r} is not key=value"])
        fields[key] = value
    return fields


def parse_bool(value: str) -> bool:
    return value.strip().lower() == "true"


def split_document(text: str, **read_options) -> tuple[dict[str, str], pd.DataFrame]:
    """Metadata fields and the CSV body of an artifact.

    Floats are read back bit-exactly (pandas round_trip parser); extra
    keyword arguments go to `pandas.read_csv`.
    """
    first, _, body = text.partition("\n")
    meta = parse_metadata(first)
    frame = pd.read_csv(io.StringIO(body), float_precision="round_trip", **read_options)
    return meta, frame


def join_document(fields: Mapping[str, object], frame: pd.DataFrame) -> str:
    """Metadata line followed by the CSV body (floats written with repr)."""
    return format_metadata(fields) + "\n" + frame.to_csv(index=False, lineterminator="\n")
