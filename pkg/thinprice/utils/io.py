"""
Metadata:
    Project: ThinPrice
    File Name: io.py
    File Path: thinprice/utils/io.py
    Module: Atomic File Output
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Write-then-rename helpers so that concurrent item analyses never leave
    a partially written artifact behind, plus a deterministic JSON encoder
    for numpy scalars and arrays.

Contents:
    Functions:
        - atomic_write_text: Write text to a temp file and rename into place
        - atomic_write_json: Deterministic JSON (sorted keys, fixed indent)
        - to_jsonable: Convert numpy / dataclass-free structures to JSON types
"""

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Union

import numpy as np

PathLike = Union[str, "os.PathLike[str]"]


def atomic_write_text(path: PathLike, text: str) -> Path:
    """
    Atomically write text to path (UTF-8, "\\n" newlines).

    The temporary file lives in the destination directory so os.replace
    stays a same-filesystem rename.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def to_jsonable(value: Any) -> Any:
    """
    Recursively convert numpy types, tuples and non-finite floats.

    Non-finite floats become the strings "inf", "-inf" and "nan" so the
    output is strict JSON.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, Path):
        return str(value)
    return value


def dumps_json(payload: Any) -> str:
    """Serialize payload deterministically (sorted keys, 2-space indent, trailing newline)."""
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def atomic_write_json(path: PathLike, payload: Any) -> Path:
    """Atomically write payload as deterministic JSON."""
    return atomic_write_text(path, dumps_json(payload))
