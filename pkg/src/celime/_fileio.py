"""Small file helpers: atomic writes and round-trippable float text."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path


def format_float(v) -> str:
    # repr is the shortest string that parses back to the same double
    return repr(float(v))


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to a temp file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
