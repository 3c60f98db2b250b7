"""Diagnostic codes and the published registry.

Codes are a frozen, append-only registry: repair rules and tests key on
them, so existing codes never change meaning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class RegistryEntry:
    severity: Severity
    fixable: bool
    description: str


REGISTRY: dict[str, RegistryEntry] = {
    "E_THEORY_HEADER": RegistryEntry(
        Severity.ERROR, True, "theory header written as 'theory Name' instead of 'Name: THEORY'"
    ),
    "E_IMPORT_BEFORE_BEGIN": RegistryEntry(
        Severity.ERROR, True, "IMPORTING clause appears before BEGIN"
    ),
    "E_END_NAME_MISMATCH": RegistryEntry(
        Severity.ERROR, True, "END name differs from the theory name"
    ),
    "E_UNKNOWN_PRELUDE_NAME": RegistryEntry(
        Severity.ERROR, False, "name resolves to no prelude entry, declaration, or binding"
    ),
    "E_PARSE": RegistryEntry(Severity.ERROR, False, "text is not a recognizable theory"),
    "E_BAD_CHAR": RegistryEntry(Severity.ERROR, False, "character outside the lexical alphabet"),
    "E_DUP_DECL": RegistryEntry(Severity.ERROR, False, "duplicate declaration name"),
    "E_ARITY": RegistryEntry(Severity.ERROR, False, "application argument count mismatch"),
    "W_UNUSED_DECL": RegistryEntry(Severity.WARNING, False, "declaration never referenced"),
}


@dataclass
class Diagnostic:
    code: str
    severity: Severity
    # (line, column) are 1-based; length in characters
    line: int
    column: int
    length: int
    message: str
    fixable: bool
    # char-offset span plus rule parameters, carried for repair planning
    data: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity.value,
            "span": [self.line, self.column, self.length],
            "message": self.message,
            "fixable": self.fixable,
            "data": dict(self.data),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Diagnostic":
        line, column, length = obj["span"]
        return cls(
            code=obj["code"],
            severity=Severity(obj["severity"]),
            line=line,
            column=column,
            length=length,
            message=obj["message"],
            fixable=obj["fixable"],
            data=dict(obj.get("data", {})),
        )


def line_col(text: str, offset: int) -> tuple[int, int]:
    """1-based (line, column) of a char offset."""
    line = text.count("\n", 0, offset) + 1
    last_nl = text.rfind("\n", 0, offset)
    return line, offset - last_nl


def make_diagnostic(
    text: str,
    code: str,
    start: int,
    end: int,
    message: str,
    data: Optional[dict] = None,
    fixable: Optional[bool] = None,
) -> Diagnostic:
    entry = REGISTRY[code]
    line, column = line_col(text, start)
    payload = {"start": start, "end": end}
    if data:
        payload.update(data)
    return Diagnostic(
        code=code,
        severity=entry.severity,
        line=line,
        column=column,
        length=max(end - start, 0),
        message=message,
        fixable=entry.fixable if fixable is None else fixable,
        data=payload,
    )
