"""Newline-delimited record I/O and atomic file writes.

All record streams are UTF-8 text with one JSON object per line.  Raw tweet
records carry ``id`` (string), ``text`` (string) and an optional
``is_retweet`` flag; normalized records add a ``spans`` array; encoded
records are ``{"id": ..., "ids": [...]}``.
"""

from __future__ import annotations

import json
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataError


def json_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def read_json_records(path) -> Iterator[dict]:
    """Yield one dict per non-empty line; malformed lines raise DataError."""
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: invalid JSON: {e}") from e
            if not isinstance(obj, dict):
                raise DataError(f"{path}:{lineno}: record must be an object")
            yield obj


def validate_tweet_record(obj: dict, where: str = "") -> dict:
    """Check the id/text contract of a tweet record and return it."""
    tid = obj.get("id")
    text = obj.get("text")
    if not isinstance(tid, str) or not tid:
        raise DataError(f"{where}: record needs a non-empty string 'id'")
    if not isinstance(text, str):
        raise DataError(f"{where}: record needs a string 'text'")
    if not isinstance(obj.get("is_retweet", False), bool):
        raise DataError(f"{where}: 'is_retweet' must be a boolean")
    return obj


def read_tweet_records(path) -> Iterator[dict]:
    for i, obj in enumerate(read_json_records(path), start=1):
        yield validate_tweet_record(obj, where=f"{path}:{i}")


def write_json_records(path, records: Iterable[dict]) -> int:
    """Atomically write records as JSON lines; returns the record count."""
    n = 0
    with atomic_write(path) as f:
        for obj in records:
            f.write(json_line(obj))
            f.write("\n")
            n += 1
    return n


@contextmanager
def atomic_write(path, mode: str = "w"):
    """Write to a temp file in the target directory, rename on success.

    An exception during writing removes the temp file and leaves any
    existing file at ``path`` untouched.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    os.chmod(tmp, 0o644)  # mkstemp defaults to 0600
    try:
        kwargs = {} if "b" in mode else {"encoding": "utf-8"}
        with os.fdopen(fd, mode, **kwargs) as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
