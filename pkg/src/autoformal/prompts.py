"""Prompt templates and LLM response post-processing.

Templates live as text files with a small front-matter header; each
template version is immutable once shipped (bumping a version adds a new
file). Responses are mined for fenced code blocks, with a fallback for
bare theory text pasted without fences.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

__all__ = [
    "PromptTemplate",
    "TemplateRegistry",
    "CodeBlock",
    "MissingPlaceholder",
    "UnknownPlaceholder",
    "render",
    "extract_code_blocks",
]


class MissingPlaceholder(KeyError):
    pass


class UnknownPlaceholder(KeyError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    version: int
    role_preamble: str
    body_pattern: str
    required_placeholders: tuple[str, ...]


# << >> delimiters: curly braces would collide with LaTeX environments
# and PVS set comprehensions quoted inside template bodies
_PLACEHOLDER = re.compile(r"<<([a-z_][a-z0-9_]*)>>")
_FRONT_MATTER = re.compile(r"\A---\n(.*?)\n---\n", re.DOTALL)


def parse_template(text: str, source_name: str = "<template>") -> PromptTemplate:
    m = _FRONT_MATTER.match(text)
    if not m:
        raise ValueError(f"{source_name}: missing front-matter header")
    fields: dict[str, str] = {}
    for line in m.group(1).splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(":")
        fields[key.strip()] = value.strip()
    body = text[m.end() :]
    required = tuple(
        name.strip() for name in fields.get("required", "").split(",") if name.strip()
    )
    found = set(_PLACEHOLDER.findall(body))
    if found != set(required):
        raise ValueError(
            f"{source_name}: placeholders {sorted(found)} do not match "
            f"declared required list {sorted(required)}"
        )
    return PromptTemplate(
        template_id=fields["template_id"],
        version=int(fields["version"]),
        role_preamble=fields.get("role_preamble", ""),
        body_pattern=body,
        required_placeholders=required,
    )


def render(template: PromptTemplate, bindings: dict[str, str]) -> str:
    for name in template.required_placeholders:
        if name not in bindings:
            raise MissingPlaceholder(name)
    for name in bindings:
        if name not in template.required_placeholders:
            raise UnknownPlaceholder(name)
    # single-pass substitution: placeholder-shaped text inside bindings
    # stays verbatim instead of expanding again
    return _PLACEHOLDER.sub(lambda m: bindings[m.group(1)], template.body_pattern)


class TemplateRegistry:
    """Loads `<id>.v<version>.txt` template files from a directory."""

    def __init__(self, root: Optional[Path] = None):
        self._templates: dict[tuple[str, int], PromptTemplate] = {}
        if root is None:
            base = resources.files("autoformal").joinpath("prompts_data")
            for entry in base.iterdir():
                if entry.name.endswith(".txt"):
                    self._load(entry.read_text("utf-8"), entry.name)
        else:
            for path in sorted(Path(root).glob("*.txt")):
                self._load(path.read_text("utf-8"), path.name)

    def _load(self, text: str, name: str) -> None:
        template = parse_template(text, name)
        key = (template.template_id, template.version)
        if key in self._templates:
            raise ValueError(f"duplicate template {key}")
        self._templates[key] = template

    def ids(self) -> set[str]:
        return {tid for tid, _ in self._templates}

    def versions(self, template_id: str) -> list[int]:
        return sorted(v for tid, v in self._templates if tid == template_id)

    def get(self, template_id: str, version: Optional[int] = None) -> PromptTemplate:
        versions = self.versions(template_id)
        if not versions:
            raise KeyError(f"no template named {template_id!r}")
        return self._templates[(template_id, version if version is not None else versions[-1])]


@dataclass(frozen=True)
class CodeBlock:
    language_tag: Optional[str]
    text: str
    origin_span: tuple[int, int]


_FENCE = re.compile(r"```([A-Za-z0-9_+-]*)[ \t]*\n(.*?)```", re.DOTALL)
_THEORY_HEADER = re.compile(
    r"(?im)^[ \t]*(?:[A-Za-z][A-Za-z0-9_?]*[ \t]*(?:\[[^\]\n]*\])?[ \t]*:[ \t]*THEORY\b|theory[ \t]+[A-Za-z])"
)
_END_LINE = re.compile(r"(?im)^.*\bEND\b.*$")


def extract_code_blocks(response_text: str) -> list[CodeBlock]:
    blocks: list[CodeBlock] = []
    for m in _FENCE.finditer(response_text):
        text = m.group(2)
        if not text.strip():
            continue
        blocks.append(
            CodeBlock(
                language_tag=m.group(1) or None,
                text=text,
                origin_span=(m.start(2), m.end(2)),
            )
        )
    if blocks:
        return blocks

    header = _THEORY_HEADER.search(response_text)
    if header is None:
        return []
    start = header.start()
    last_end = None
    for m in _END_LINE.finditer(response_text, header.end()):
        last_end = m.end()
    if last_end is None:
        return []
    return [
        CodeBlock(
            language_tag=None,
            text=response_text[start:last_end],
            origin_span=(start, last_end),
        )
    ]
