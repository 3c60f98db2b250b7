"""Rule-based auto-repair of generated PVS text.

Each fixable diagnostic code maps to one declarative transform; repairs
are planned from diagnostics, applied back-to-front as span edits on the
source text (never the AST, so untouched formatting survives), and driven
to a fixpoint. Overlapping applications are deferred to the next pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .pvs.diagnostics import Diagnostic
from .pvs.linter import lint_text
from .pvs.prelude import PreludeIndex

__all__ = [
    "TransformKind",
    "RepairRule",
    "RULES",
    "RepairApplication",
    "EditRecord",
    "RepairLog",
    "RepairOutcome",
    "OverlappingEdits",
    "StaleSpan",
    "MaxPassesExceeded",
    "plan_repairs",
    "apply_repairs",
    "repair_to_fixpoint",
]


class TransformKind(Enum):
    REWRITE_HEADER = "rewrite_header"
    MOVE_IMPORTING_AFTER_BEGIN = "move_importing_after_begin"
    RENAME_REFERENCE = "rename_reference"
    FIX_END_NAME = "fix_end_name"


@dataclass(frozen=True)
class RepairRule:
    rule_id: str
    triggers_on: str
    description: str
    transform: TransformKind


RULES: dict[str, RepairRule] = {
    rule.triggers_on: rule
    for rule in [
        RepairRule(
            "rewrite_header",
            "E_THEORY_HEADER",
            "rewrite 'theory Name' as 'Name: THEORY'",
            TransformKind.REWRITE_HEADER,
        ),
        RepairRule(
            "move_importing_after_begin",
            "E_IMPORT_BEFORE_BEGIN",
            "move a pre-BEGIN IMPORTING clause after BEGIN",
            TransformKind.MOVE_IMPORTING_AFTER_BEGIN,
        ),
        RepairRule(
            "rename_reference",
            "E_UNKNOWN_PRELUDE_NAME",
            "rename a near-miss reference to its prelude name",
            TransformKind.RENAME_REFERENCE,
        ),
        RepairRule(
            "fix_end_name",
            "E_END_NAME_MISMATCH",
            "make the END name match the theory name",
            TransformKind.FIX_END_NAME,
        ),
    ]
}


@dataclass(frozen=True)
class RepairApplication:
    rule: RepairRule
    diagnostic: Diagnostic

    @property
    def start(self) -> int:
        return int(self.diagnostic.data.get("start", 0))


class OverlappingEdits(ValueError):
    pass


class StaleSpan(ValueError):
    pass


@dataclass
class EditRecord:
    rule_id: str
    span_start: int
    span_end: int
    text_before: str
    text_after: str
    pass_number: int

    def to_json(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "span": [self.span_start, self.span_end],
            "text_before": self.text_before,
            "text_after": self.text_after,
            "pass_number": self.pass_number,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EditRecord":
        return cls(
            rule_id=obj["rule_id"],
            span_start=obj["span"][0],
            span_end=obj["span"][1],
            text_before=obj["text_before"],
            text_after=obj["text_after"],
            pass_number=obj["pass_number"],
        )


@dataclass
class RepairLog:
    entries: list[EditRecord] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"entries": [e.to_json() for e in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "RepairLog":
        return cls(entries=[EditRecord.from_json(e) for e in obj.get("entries", [])])

    def replay(self, original: str) -> str:
        """Re-apply the logged edits to the original input.

        Spans within one pass are valid against that pass's input, so each
        pass group is applied back-to-front before moving to the next.
        """
        text = original
        passes = sorted({e.pass_number for e in self.entries})
        for pass_number in passes:
            group = [e for e in self.entries if e.pass_number == pass_number]
            for entry in sorted(group, key=lambda e: e.span_start, reverse=True):
                if text[entry.span_start : entry.span_end] != entry.text_before:
                    raise StaleSpan(
                        f"replay mismatch at {entry.span_start}..{entry.span_end}"
                    )
                text = (
                    text[: entry.span_start] + entry.text_after + text[entry.span_end :]
                )
        return text


def plan_repairs(diags: list[Diagnostic]) -> list[RepairApplication]:
    plan = [
        RepairApplication(RULES[d.code], d)
        for d in diags
        if d.fixable and d.code in RULES
    ]
    plan.sort(key=lambda a: a.start)
    return plan


def _concrete_edit(text: str, app: RepairApplication) -> tuple[int, int, str]:
    data = app.diagnostic.data
    start, end = int(data["start"]), int(data["end"])
    if start < 0 or end > len(text) or start > end:
        raise StaleSpan(f"span {start}..{end} outside text")
    slice_ = text[start:end]
    kind = app.rule.transform

    if kind is TransformKind.REWRITE_HEADER:
        if not slice_.lower().startswith("theory"):
            raise StaleSpan("header span no longer starts with 'theory'")
        return start, end, f"{data['name']}{data.get('formals_text', '')}: THEORY"

    if kind is TransformKind.MOVE_IMPORTING_AFTER_BEGIN:
        # the edit region runs from the IMPORTING keyword through BEGIN
        import_end = int(data["import_end"])
        begin_start = int(data["begin_start"])
        begin_end = int(data["begin_end"])
        region = text[start:begin_end]
        if not region.upper().startswith("IMPORTING") or not region.upper().endswith("BEGIN"):
            raise StaleSpan("importing/BEGIN region changed since diagnosis")
        import_text = text[start:import_end]
        between = text[import_end:begin_start]
        if not between.endswith("\n"):
            between = between + "\n"
        return start, begin_end, "BEGIN" + between + "  " + import_text

    if kind is TransformKind.RENAME_REFERENCE:
        if slice_ != data.get("found"):
            raise StaleSpan(f"expected {data.get('found')!r} at span, saw {slice_!r}")
        return start, end, str(data["suggested"])

    if kind is TransformKind.FIX_END_NAME:
        if slice_ != data.get("found"):
            raise StaleSpan(f"expected {data.get('found')!r} at span, saw {slice_!r}")
        return start, end, str(data["expected"])

    raise StaleSpan(f"unknown transform {kind!r}")


def apply_repairs(
    text: str, plan: list[RepairApplication], pass_number: int = 1
) -> tuple[str, RepairLog]:
    edits: list[tuple[int, int, str, str]] = []
    for app in plan:
        start, end, replacement = _concrete_edit(text, app)
        edits.append((start, end, replacement, app.rule.rule_id))

    ordered = sorted(edits, key=lambda e: e[0])
    for prev, cur in zip(ordered, ordered[1:]):
        if cur[0] < prev[1]:
            raise OverlappingEdits(
                f"edit at {cur[0]} overlaps edit {prev[0]}..{prev[1]}"
            )

    log = RepairLog(
        entries=[
            EditRecord(rule_id, start, end, text[start:end], replacement, pass_number)
            for start, end, replacement, rule_id in ordered
        ]
    )
    out = text
    for start, end, replacement, _rule_id in reversed(ordered):
        out = out[:start] + replacement + out[end:]
    return out, log


@dataclass
class RepairOutcome:
    text: str
    log: RepairLog
    remaining: list[Diagnostic]
    passes: int


class MaxPassesExceeded(RuntimeError):
    def __init__(self, outcome: RepairOutcome):
        super().__init__(
            f"fixable diagnostics remain after {outcome.passes} repair passes"
        )
        self.outcome = outcome


def _non_overlapping(plan: list[RepairApplication], text: str) -> list[RepairApplication]:
    """Keep a maximal by-position prefix of non-overlapping applications.

    Deferred applications trigger again on the next pass's fresh parse.
    """
    selected: list[RepairApplication] = []
    taken: list[tuple[int, int]] = []
    for app in plan:
        start, end, _ = _concrete_edit(text, app)
        if any(start < e and s < end for s, e in taken):
            continue
        taken.append((start, end))
        selected.append(app)
    return selected


def repair_to_fixpoint(
    text: str,
    max_passes: int = 5,
    prelude: Optional[PreludeIndex] = None,
    rename_table: Optional[dict[str, str]] = None,
) -> RepairOutcome:
    if max_passes < 1:
        raise ValueError("max_passes must be at least 1")
    log = RepairLog()
    passes = 0
    while True:
        diags = lint_text(text, prelude, rename_table)
        plan = plan_repairs(diags)
        if not plan:
            return RepairOutcome(text=text, log=log, remaining=diags, passes=passes)
        if passes >= max_passes:
            raise MaxPassesExceeded(
                RepairOutcome(text=text, log=log, remaining=diags, passes=passes)
            )
        passes += 1
        selected = _non_overlapping(plan, text)
        text, pass_log = apply_repairs(text, selected, pass_number=passes)
        log.entries.extend(pass_log.entries)
