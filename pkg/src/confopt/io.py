"""All-or-nothing CSV and JSON writers."""
from __future__ import annotations

import contextlib
import csv
import json
import math
import os
import tempfile

import numpy as np


def fmt(value):
    """17 significant digits for reals so files round-trip bit for bit."""
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return value


@contextlib.contextmanager
def atomic_open(path, mode: str = "w"):
    """Write to a temporary sibling and rename it over ``path`` on success.

    On any exception the temporary file is removed and ``path`` is untouched.
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, newline="" if "b" not in mode else None, encoding=None if "b" in mode else "utf-8") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows) -> None:
    """``rows`` are dicts keyed by ``header`` or plain sequences."""
    with atomic_open(path) as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            if isinstance(row, dict):
                row = [row[k] for k in header]
            w.writerow([fmt(v) for v in row])


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _sanitize(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def write_json(path, obj) -> None:
    with atomic_open(path) as fh:
        json.dump(_sanitize(obj), fh, indent=2, default=_json_default)
        fh.write("\n")
