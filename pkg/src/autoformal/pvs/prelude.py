"""Bundled index of common PVS prelude names.

Covers the prelude names generated theories actually touch; full prelude
indexing is out of scope. Notably absent: `set_theory`, which is not a
prelude theory (the rename table maps it to `sets`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional


@dataclass(frozen=True)
class PreludeEntry:
    origin_theory: str
    entry_kind: str  # theory | type | constant | function


class PreludeIndex:
    def __init__(self, entries: dict[str, PreludeEntry]):
        self._entries = dict(entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, name: str) -> Optional[PreludeEntry]:
        return self._entries.get(name)

    def names(self) -> set[str]:
        return set(self._entries)


# default rename table for E_UNKNOWN_PRELUDE_NAME fixes; config may extend
DEFAULT_RENAMES: dict[str, str] = {"set_theory": "sets"}

_cached: Optional[PreludeIndex] = None


def load_prelude() -> PreludeIndex:
    global _cached
    if _cached is None:
        raw = resources.files("autoformal.pvs").joinpath("prelude_index.json").read_text("utf-8")
        data = json.loads(raw)
        _cached = PreludeIndex(
            {
                name: PreludeEntry(entry["origin_theory"], entry["entry_kind"])
                for name, entry in data["entries"].items()
            }
        )
    return _cached
