"""Result writers: CSV tables and JSON documents, written atomically."""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Union

import pandas as pd

from .exceptions import OutputError

FLOAT_FORMAT = "%.17g"


def _atomic_write(path: Path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
    except OSError as e:
        raise OutputError(str(path), "Failed to write file", str(e))


def format_csv(df: pd.DataFrame) -> str:
    """17 significant digits, ',' separator, '.' decimal point, LF line endings."""
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n", na_rep="")


def write_csv_atomic(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    _atomic_write(path, format_csv(df))
    return path


def write_json_atomic(document: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    _atomic_write(path, json.dumps(document, indent=2, sort_keys=True) + "\n")
    return path
