"""Write-once file primitives shared by the store and the gateway."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

__all__ = ["ImmutableOverwrite", "write_once", "utc_now_iso"]


class ImmutableOverwrite(ValueError):
    """Rewriting an existing content-addressed file with different bytes."""


def write_once(path: Path, data: bytes) -> bool:
    """Create path with data atomically; byte-identical rewrites are no-ops.

    Returns True when the file was created by this call, False when an
    identical file already existed. Raises ImmutableOverwrite when the
    existing content differs. os.link gives atomic create-or-fail, so
    concurrent identical writers race safely.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        try:
            os.link(tmp_name, path)
            return True
        except FileExistsError:
            existing = path.read_bytes()
            if existing != data:
                raise ImmutableOverwrite(f"{path.name} already exists with different content")
            return False
    finally:
        os.unlink(tmp_name)


def utc_now_iso() -> str:
    from datetime import datetime, timezone

    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
