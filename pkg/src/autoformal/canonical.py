"""Canonical serialization and content addressing.

Every persisted JSON artifact goes through canonical_json_bytes so that the
same logical value always produces the same bytes, and therefore the same
content hash, on every platform.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

__all__ = [
    "canonical_json_bytes",
    "canonical_json_str",
    "content_hash",
    "hash_bytes",
    "normalize_newlines",
]


def normalize_newlines(text: str) -> str:
    """Collapse CRLF and bare CR to LF."""
    return text.replace("\r\n", "\n").replace("\r", "\n")


def canonical_json_str(value: Any) -> str:
    # sort_keys + tight separators: one canonical form per logical value
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_json_bytes(value: Any) -> bytes:
    return canonical_json_str(value).encode("utf-8")


def hash_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def content_hash(value: Any) -> str:
    """sha256 over the canonical JSON encoding of a JSON-compatible value."""
    return hash_bytes(canonical_json_bytes(value))
