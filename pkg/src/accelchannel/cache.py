"""On-disk cache of expensive intermediate results.

Entries are stored one per file, named by the key.  Each file carries a short
header with the key and a checksum of the body; anything that fails to parse
or verify is treated as a miss.  Writes go to a temporary file in the same
directory and are moved into place with ``os.replace``.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import warnings
from pathlib import Path

ENV_VAR = "ACCELCHANNEL_CACHE"
MAGIC = b"ACCH1"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "accelchannel"


def make_key(kind: str, payload: dict, version: str) -> str:
    """Content hash of ``payload`` (JSON-serializable) plus a kind and version tag."""
    blob = json.dumps({"kind": kind, "version": version, "data": payload}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


class DiskCache:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.enabled = True

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.bin"

    def _disable(self, err: Exception) -> None:
        if self.enabled:
            warnings.warn(f"cache disabled after storage error: {err}", stacklevel=3)
        self.enabled = False

    def get(self, key: str) -> bytes | None:
        if not self.enabled:
            return None
        try:
            raw = self._path(key).read_bytes()
        except FileNotFoundError:
            return None
        except OSError as err:
            self._disable(err)
            return None
        head, sep, body = raw.partition(b"\n")
        if not sep:
            return None
        parts = head.split(b" ")
        if len(parts) != 3 or parts[0] != MAGIC or parts[1].decode(errors="replace") != key:
            return None
        if hashlib.sha256(body).hexdigest().encode() != parts[2]:
            return None
        return body

    def put(self, key: str, payload: bytes) -> None:
        if not self.enabled:
            return
        path = self._path(key)
        head = b" ".join([MAGIC, key.encode(), hashlib.sha256(payload).hexdigest().encode()])
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=path.parent)
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(head + b"\n" + payload)
                os.replace(tmp, path)
            except BaseException:
                try:
                    os.unlink(tmp)
                except OSError:
                    pass
                raise
        except OSError as err:
            self._disable(err)

    def clear(self) -> int:
        """Remove cache entries (only files this class writes); returns the number removed."""
        if not self.root.exists():
            return 0
        count = 0
        for sub in self.root.iterdir():
            if not (sub.is_dir() and len(sub.name) == 2):
                continue
            for p in list(sub.glob("*.bin")) + list(sub.glob(".tmp-*")):
                p.unlink()
                count += p.suffix == ".bin"
            try:
                sub.rmdir()
            except OSError:
                pass
        return count
