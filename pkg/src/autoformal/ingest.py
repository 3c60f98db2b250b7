"""Document loading and statement extraction.

Accepts LaTeX or Nougat-flavored markdown, normalizes markup to a common
shape, and extracts definition/theorem/lemma records with the terms they
introduce and use. Math content is carried verbatim, never interpreted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .canonical import hash_bytes, normalize_newlines

__all__ = [
    "DocFormat",
    "StatementKind",
    "SourceDocument",
    "StatementRecord",
    "DecodeError",
    "EmptyDocument",
    "load_document",
    "normalize_markup",
    "extract_statements",
    "normalize_term",
]


class DocFormat(Enum):
    LATEX = "latex"
    NOUGAT_MARKDOWN = "nougat_markdown"


class StatementKind(Enum):
    DEFINITION = "definition"
    THEOREM = "theorem"
    LEMMA = "lemma"
    PROPOSITION = "proposition"
    COROLLARY = "corollary"
    PROOF = "proof"
    REMARK = "remark"


# Environment names recognized as statements, case-sensitive; starred
# variants map to the same kind.
STATEMENT_ENVIRONMENTS: dict[str, StatementKind] = {
    "definition": StatementKind.DEFINITION,
    "theorem": StatementKind.THEOREM,
    "lemma": StatementKind.LEMMA,
    "proposition": StatementKind.PROPOSITION,
    "corollary": StatementKind.COROLLARY,
    "proof": StatementKind.PROOF,
    "remark": StatementKind.REMARK,
}

_KIND_TITLES = {kind: name.capitalize() for name, kind in STATEMENT_ENVIRONMENTS.items()}


class DecodeError(ValueError):
    pass


class EmptyDocument(ValueError):
    pass


@dataclass(frozen=True)
class SourceDocument:
    doc_id: str
    format: DocFormat
    raw_text: str
    title: Optional[str] = None
    spans: tuple[tuple[int, int], ...] = ()

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "format": self.format.value,
            "raw_text": self.raw_text,
            "title": self.title,
            "spans": [list(s) for s in self.spans],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SourceDocument":
        return cls(
            doc_id=data["doc_id"],
            format=DocFormat(data["format"]),
            raw_text=data["raw_text"],
            title=data.get("title"),
            spans=tuple(tuple(s) for s in data.get("spans", [])),
        )


@dataclass
class StatementRecord:
    stmt_id: str
    kind: StatementKind
    label: Optional[str]
    body_latex: str
    introduced_terms: list[str] = field(default_factory=list)
    used_terms: list[str] = field(default_factory=list)
    source_span: tuple[int, int] = (0, 0)
    proves: Optional[str] = None
    canonical_term: Optional[str] = None
    doc_id: str = ""

    def to_json(self) -> dict:
        return {
            "stmt_id": self.stmt_id,
            "kind": self.kind.value,
            "label": self.label,
            "body_latex": self.body_latex,
            "introduced_terms": list(self.introduced_terms),
            "used_terms": list(self.used_terms),
            "source_span": list(self.source_span),
            "proves": self.proves,
            "canonical_term": self.canonical_term,
            "doc_id": self.doc_id,
        }

    @classmethod
    def from_json(cls, data: dict) -> "StatementRecord":
        return cls(
            stmt_id=data["stmt_id"],
            kind=StatementKind(data["kind"]),
            label=data.get("label"),
            body_latex=data["body_latex"],
            introduced_terms=list(data.get("introduced_terms", [])),
            used_terms=list(data.get("used_terms", [])),
            source_span=tuple(data.get("source_span", (0, 0))),
            proves=data.get("proves"),
            canonical_term=data.get("canonical_term"),
            doc_id=data.get("doc_id", ""),
        )


_ENV_MARKER = re.compile(r"\\(begin|end)\{([A-Za-z@*]+)\}")
_LATEX_TITLE = re.compile(r"\\title\{([^{}]*)\}")
_MD_TITLE = re.compile(r"^#\s+(.+?)\s*$", re.MULTILINE)
_MD_HEADING = re.compile(r"^#{1,6}\s", re.MULTILINE)


def load_document(data: bytes, format_hint: Optional[DocFormat] = None) -> SourceDocument:
    try:
        # utf-8-sig strips a BOM when present
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise DecodeError(f"document is not valid UTF-8: {exc}") from exc
    text = normalize_newlines(text)
    if not text.strip():
        raise EmptyDocument("document has no non-whitespace content")

    if format_hint is not None:
        fmt = format_hint
    elif "\\documentclass" in text or "\\begin{document}" in text:
        fmt = DocFormat.LATEX
    else:
        fmt = DocFormat.NOUGAT_MARKDOWN

    doc_id = "doc-" + hash_bytes(data)[:12]
    return SourceDocument(
        doc_id=doc_id,
        format=fmt,
        raw_text=text,
        title=_detect_title(text, fmt),
        spans=_compute_spans(text, fmt),
    )


def _detect_title(text: str, fmt: DocFormat) -> Optional[str]:
    if fmt is DocFormat.LATEX:
        m = _LATEX_TITLE.search(text)
        return m.group(1).strip() if m else None
    m = _MD_TITLE.search(text)
    return m.group(1) if m else None


def _top_level_env_spans(text: str) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    stack: list[tuple[str, int]] = []
    for m in _ENV_MARKER.finditer(text):
        which, env = m.group(1), m.group(2)
        if env == "document":
            # transparent wrapper, not itself a block
            continue
        if which == "begin":
            stack.append((env, m.start()))
        elif stack and stack[-1][0] == env:
            _, start = stack.pop()
            if not stack:
                spans.append((start, m.end()))
        # unbalanced \end markers are ignored: best-effort scanning
    return spans


def _compute_spans(text: str, fmt: DocFormat) -> tuple[tuple[int, int], ...]:
    if fmt is DocFormat.NOUGAT_MARKDOWN:
        headings = [m.start() for m in _MD_HEADING.finditer(text)]
        if headings:
            spans = []
            if text[: headings[0]].strip():
                spans.append((0, headings[0]))
            for i, start in enumerate(headings):
                end = headings[i + 1] if i + 1 < len(headings) else len(text)
                spans.append((start, end))
            return tuple(spans)
    return tuple(_top_level_env_spans(text))


_INLINE_MATH = re.compile(r"(?<!\\)\\\((.*?)(?<!\\)\\\)", re.DOTALL)
_DISPLAY_MATH = re.compile(r"(?<!\\)\\\[(.*?)(?<!\\)\\\]", re.DOTALL)
_BOLD_HEADER = re.compile(
    r"\*\*(Definition|Theorem|Lemma|Proposition|Corollary|Proof|Remark)"
    r"(\*?)\s*([0-9]+(?:\.[0-9]+)*)?\s*\*\*[.:]?\s*"
)


def normalize_markup(doc: SourceDocument) -> SourceDocument:
    text = _INLINE_MATH.sub(lambda m: "$" + m.group(1) + "$", doc.raw_text)
    text = _DISPLAY_MATH.sub(lambda m: "$$" + m.group(1) + "$$", text)
    if doc.format is DocFormat.NOUGAT_MARKDOWN:
        text = _rewrite_bold_statements(text)
    if text == doc.raw_text and doc.spans:
        return doc
    return SourceDocument(
        doc_id=doc.doc_id,
        format=doc.format,
        raw_text=text,
        title=doc.title,
        spans=_compute_spans(text, doc.format),
    )


def _rewrite_bold_statements(text: str) -> str:
    out: list[str] = []
    pos = 0
    for m in _BOLD_HEADER.finditer(text):
        env = m.group(1).lower() + m.group(2)
        number = m.group(3)
        # statement body: from the end of the header to the first blank line
        # (or next heading / end of text)
        body_start = m.end()
        stop = len(text)
        blank = re.compile(r"\n\s*\n").search(text, body_start)
        if blank:
            stop = blank.start()
        heading = _MD_HEADING.search(text, body_start)
        if heading and heading.start() < stop:
            stop = heading.start()
        body = text[body_start:stop].strip()
        if not body:
            continue
        out.append(text[pos : m.start()])
        title = f"[{number}]" if number else ""
        out.append(f"\\begin{{{env}}}{title} {body}\\end{{{env}}}")
        pos = stop
    out.append(text[pos:])
    return "".join(out)


@dataclass
class _EnvBlock:
    env: str
    kind: StatementKind
    starred: bool
    start: int
    end: int
    body_start: int
    body_end: int
    bracket: Optional[str]
    parent: Optional[int]
    children: list[int] = field(default_factory=list)


_BRACKET = re.compile(r"\[([^\[\]]*)\]")


def _scan_statement_blocks(text: str) -> list[_EnvBlock]:
    blocks: list[_EnvBlock] = []
    stack: list[int] = []
    for m in _ENV_MARKER.finditer(text):
        which, env = m.group(1), m.group(2)
        base = env.rstrip("*")
        if base not in STATEMENT_ENVIRONMENTS:
            continue
        if which == "begin":
            bracket = None
            body_start = m.end()
            bm = _BRACKET.match(text, m.end())
            if bm:
                bracket = bm.group(1).strip()
                body_start = bm.end()
            block = _EnvBlock(
                env=env,
                kind=STATEMENT_ENVIRONMENTS[base],
                starred=env.endswith("*"),
                start=m.start(),
                end=-1,
                body_start=body_start,
                body_end=-1,
                bracket=bracket,
                parent=stack[-1] if stack else None,
            )
            if stack:
                blocks[stack[-1]].children.append(len(blocks))
            stack.append(len(blocks))
            blocks.append(block)
        elif stack and blocks[stack[-1]].env == env:
            idx = stack.pop()
            blocks[idx].end = m.end()
            blocks[idx].body_end = m.start()
    # drop unterminated blocks
    return [b for b in blocks if b.end >= 0]


# "A mapping $h$ is ..." / "An effective symbolic space is ..."
_STOP_WORDS = {
    "and", "or", "the", "of", "that", "such", "which", "where",
    "if", "as", "by", "for", "in", "on", "to",
}
_ARTICLE_TERM = re.compile(
    r"\b[Aa]n?\s+((?:[A-Za-z][A-Za-z-]*)(?:\s+[A-Za-z][A-Za-z-]*){0,3}?)"
    r"\s+(?:\$[^$]+\$\s+)?(?:is|are)\b"
)
_EMPHASIS = re.compile(r"\\(?:emph|textit|textbf)\{([^{}]+)\}|\*\*([^*]+)\*\*")


def normalize_term(term: str) -> str:
    return re.sub(r"\s+", " ", term).strip().lower()


def _emphasized_terms(body: str) -> list[str]:
    terms = []
    for m in _EMPHASIS.finditer(body):
        raw = m.group(1) or m.group(2) or ""
        norm = normalize_term(raw)
        if norm:
            terms.append(norm)
    return terms


def _article_terms(body: str) -> list[str]:
    terms = []
    for m in _ARTICLE_TERM.finditer(body):
        words = m.group(1).split()
        if any(w.lower() in _STOP_WORDS for w in words):
            continue
        terms.append(normalize_term(m.group(1)))
    return terms


def _term_usage_pattern(term: str) -> re.Pattern[str]:
    # tolerate a trailing plural "s" on the final word
    return re.compile(r"\b" + re.escape(term) + r"s?\b", re.IGNORECASE)


def _singularize(terms: list[str]) -> list[str]:
    # strip a plural "s" only when the singular form is also present
    present = set(terms)
    out = []
    for t in terms:
        if t.endswith("s") and t[:-1] in present:
            t = t[:-1]
        if t not in out:
            out.append(t)
    return out


def extract_statements(doc: SourceDocument) -> list[StatementRecord]:
    text = doc.raw_text
    blocks = _scan_statement_blocks(text)
    records: list[StatementRecord] = []
    counters: dict[StatementKind, int] = {}
    introduced_so_far: list[tuple[str, str]] = []  # (term, stmt_id)
    block_to_stmt: dict[int, str] = {}

    for idx, block in enumerate(blocks):
        body = _block_body(text, blocks, idx)
        if not body:
            continue

        label = _statement_label(block, body, counters)
        stmt_id = "stmt-" + hash_bytes(
            f"{doc.doc_id}\x00{block.kind.value}\x00{block.start}\x00{body}".encode("utf-8")
        )[:12]

        introduced: list[str] = []
        canonical = None
        if block.kind is StatementKind.DEFINITION:
            introduced = _singularize(_emphasized_terms(body) + _article_terms(body))
            canonical = introduced[0] if introduced else None

        used: list[tuple[int, str]] = []
        for term, _src in introduced_so_far:
            m = _term_usage_pattern(term).search(body)
            if m and term not in {u for _, u in used}:
                used.append((m.start(), term))
        used.sort()

        proves = None
        if block.kind is StatementKind.PROOF:
            proves = _proved_statement(block, blocks, block_to_stmt, records)

        record = StatementRecord(
            stmt_id=stmt_id,
            kind=block.kind,
            label=label,
            body_latex=body,
            introduced_terms=introduced,
            used_terms=[t for _, t in used],
            source_span=(block.start, block.end),
            proves=proves,
            canonical_term=canonical,
            doc_id=doc.doc_id,
        )
        records.append(record)
        block_to_stmt[idx] = stmt_id
        for term in introduced:
            if term not in {t for t, _ in introduced_so_far}:
                introduced_so_far.append((term, stmt_id))
    return records


def _block_body(text: str, blocks: list[_EnvBlock], idx: int) -> str:
    block = blocks[idx]
    # nested recognized environments are carved out of the parent body
    parts: list[str] = []
    pos = block.body_start
    for child_idx in block.children:
        child = blocks[child_idx]
        if child.end < 0:
            continue
        parts.append(text[pos : child.start])
        pos = child.end
    parts.append(text[pos : block.body_end])
    pieces = [p.strip() for p in parts]
    return "\n".join(p for p in pieces if p)


def _statement_label(
    block: _EnvBlock, body: str, counters: dict[StatementKind, int]
) -> Optional[str]:
    m = re.search(r"\\label\{([^{}]+)\}", body)
    if m:
        return m.group(1)
    title = _KIND_TITLES[block.kind]
    if block.bracket:
        if re.fullmatch(r"[0-9]+(\.[0-9]+)*", block.bracket):
            return f"{title} {block.bracket}"
        return block.bracket
    if block.starred:
        return None
    counters[block.kind] = counters.get(block.kind, 0) + 1
    return f"{title} {counters[block.kind]}"


def _proved_statement(
    block: _EnvBlock,
    blocks: list[_EnvBlock],
    block_to_stmt: dict[int, str],
    records: list[StatementRecord],
) -> Optional[str]:
    if block.parent is not None and block.parent in block_to_stmt:
        return block_to_stmt[block.parent]
    for record in reversed(records):
        if record.kind is not StatementKind.PROOF:
            return record.stmt_id
    return None
