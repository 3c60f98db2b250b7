"""Bridge to an external PVS batch installation, with a built-in stub.

The stub backend maps parse+lint onto the CheckResult shape so the whole
pipeline runs in environments without PVS; the real backend shells out to
a configured batch command and classifies its output with regexes. Each
invocation works in its own temp directory, deleted on success.
"""

from __future__ import annotations

import os
import re
import shlex
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .pvs.diagnostics import Diagnostic, Severity
from .pvs.linter import lint
from .pvs.nodes import DeclKind, TheoryAst
from .pvs.parser import parse_theory
from .pvs.prelude import PreludeIndex
from .pvs.printer import print_theory

__all__ = [
    "BackendConfig",
    "CheckResult",
    "ProofAttempt",
    "ProofStatus",
    "BackendUnavailable",
    "CheckTimeout",
    "OutputUnparseable",
    "UnknownFormula",
    "write_prooflite",
    "check",
    "prove",
    "PVS_HOME_ENV",
]

PVS_HOME_ENV = "AUTOFORMAL_PVS_HOME"

DEFAULT_PATTERNS = {
    "parse_error": r"(?m)(?:^|\s)Error:|\.pvs:\d+:\d+|parse error",
    "type_error": r"(?i)typecheck error|type mismatch|expecting",
    "typechecked": r"(?i)typechecked|proved|succeeded|grand totals",
    "proved": r"(?i)\bproved\b|succeeded|grand totals:.*\b0 missed\b",
    "unfinished": r"(?i)unfinished|missed|failed",
}


class ProofStatus(Enum):
    PROVED = "proved"
    UNFINISHED = "unfinished"
    ERROR = "error"
    TIMEOUT = "timeout"
    SKIPPED_STUB = "skipped_stub"


@dataclass
class BackendConfig:
    kind: str = "stub"  # "stub" | "pvs"
    # templates with {file} and {theory} placeholders
    check_command: str = "proveit --importchain {file}"
    prove_command: str = "proveit --importchain {file}"
    timeout_s: float = 300.0
    raw_cap_bytes: int = 65536
    patterns: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_PATTERNS))
    pvs_home: str = ""

    def resolved_home(self) -> str:
        return os.environ.get(PVS_HOME_ENV, "") or self.pvs_home

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "check_command": self.check_command,
            "prove_command": self.prove_command,
            "timeout_s": self.timeout_s,
            "raw_cap_bytes": self.raw_cap_bytes,
            "patterns": dict(self.patterns),
            "pvs_home": self.pvs_home,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BackendConfig":
        cfg = cls()
        for key in (
            "kind", "check_command", "prove_command", "timeout_s",
            "raw_cap_bytes", "pvs_home",
        ):
            if key in obj:
                setattr(cfg, key, obj[key])
        if "patterns" in obj:
            cfg.patterns = {**DEFAULT_PATTERNS, **obj["patterns"]}
        return cfg


@dataclass
class CheckResult:
    backend: str
    parse_ok: bool
    typecheck_ok: bool
    diagnostics: list[Diagnostic]
    raw_output: str
    duration_ms: int

    def to_json(self) -> dict:
        return {
            "backend": self.backend,
            "parse_ok": self.parse_ok,
            "typecheck_ok": self.typecheck_ok,
            "diagnostics": [d.to_json() for d in self.diagnostics],
            "raw_output": self.raw_output,
            "duration_ms": self.duration_ms,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CheckResult":
        return cls(
            backend=obj["backend"],
            parse_ok=obj["parse_ok"],
            typecheck_ok=obj["typecheck_ok"],
            diagnostics=[Diagnostic.from_json(d) for d in obj.get("diagnostics", [])],
            raw_output=obj.get("raw_output", ""),
            duration_ms=obj.get("duration_ms", 0),
        )


@dataclass
class ProofAttempt:
    formula_name: str
    tactic_script: str
    status: ProofStatus
    duration_ms: int
    output_excerpt: str

    def to_json(self) -> dict:
        return {
            "formula_name": self.formula_name,
            "tactic_script": self.tactic_script,
            "status": self.status.value,
            "duration_ms": self.duration_ms,
            "output_excerpt": self.output_excerpt,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ProofAttempt":
        return cls(
            formula_name=obj["formula_name"],
            tactic_script=obj["tactic_script"],
            status=ProofStatus(obj["status"]),
            duration_ms=obj.get("duration_ms", 0),
            output_excerpt=obj.get("output_excerpt", ""),
        )


class BackendUnavailable(RuntimeError):
    pass


class CheckTimeout(RuntimeError):
    pass


class OutputUnparseable(RuntimeError):
    def __init__(self, message: str, raw_output: str):
        super().__init__(message)
        self.raw_output = raw_output


class UnknownFormula(KeyError):
    pass


def write_prooflite(theory: TheoryAst, formula_name: str, tactic: str) -> str:
    formulas = {
        d.name for d in theory.declarations if d.decl_kind is DeclKind.FORMULA_DECL
    }
    if formula_name not in formulas:
        raise UnknownFormula(formula_name)
    script = tactic.strip()
    if not script.startswith("("):
        script = f"({script})"
    lines = [
        f"%|- {formula_name} : PROOF",
        f"%|- {script}",
        "%|- QED",
    ]
    return print_theory(theory) + "\n" + "\n".join(lines) + "\n"


def _stub_check(theory_text: str, prelude: Optional[PreludeIndex]) -> CheckResult:
    started = time.monotonic()
    result = parse_theory(theory_text)
    diags = list(result.diagnostics)
    if result.ast is not None:
        diags.extend(lint(result.ast, prelude))
    parse_ok = result.ast is not None
    errors = [d for d in diags if d.severity is Severity.ERROR]
    return CheckResult(
        backend="stub",
        parse_ok=parse_ok,
        typecheck_ok=parse_ok and not errors,
        diagnostics=diags,
        raw_output="",
        duration_ms=int((time.monotonic() - started) * 1000),
    )


def _theory_name(theory_text: str) -> str:
    result = parse_theory(theory_text)
    if result.ast is not None:
        return result.ast.name
    m = re.search(r"([A-Za-z][A-Za-z0-9_?]*)\s*:\s*THEORY", theory_text)
    return m.group(1) if m else "theory"


def _run_backend(
    command_template: str, theory_text: str, cfg: BackendConfig
) -> tuple[str, int]:
    if not command_template.strip():
        raise BackendUnavailable("no backend command configured")
    workspace = tempfile.mkdtemp(prefix="autoformal-pvs-")
    name = _theory_name(theory_text)
    path = os.path.join(workspace, f"{name}.pvs")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(theory_text)
    command = command_template.format(file=path, theory=name)
    env = dict(os.environ)
    home = cfg.resolved_home()
    if home:
        env["PVS_HOME"] = home
        env["PATH"] = os.path.join(home, "bin") + os.pathsep + env.get("PATH", "")
    started = time.monotonic()
    try:
        proc = subprocess.run(
            shlex.split(command),
            capture_output=True,
            text=True,
            timeout=cfg.timeout_s,
            env=env,
            cwd=workspace,
        )
    except FileNotFoundError as exc:
        raise BackendUnavailable(f"backend command not found: {exc}") from exc
    except subprocess.TimeoutExpired as exc:
        partial = ""
        if exc.stdout:
            out = exc.stdout
            partial = out.decode("utf-8", "replace") if isinstance(out, bytes) else out
        raise CheckTimeout(partial) from exc
    duration_ms = int((time.monotonic() - started) * 1000)
    shutil.rmtree(workspace, ignore_errors=True)
    output = (proc.stdout or "") + (proc.stderr or "")
    return output[: cfg.raw_cap_bytes], duration_ms


def check(
    theory_text: str,
    cfg: Optional[BackendConfig] = None,
    prelude: Optional[PreludeIndex] = None,
) -> CheckResult:
    cfg = cfg or BackendConfig()
    if cfg.kind == "stub":
        return _stub_check(theory_text, prelude)
    output, duration_ms = _run_backend(cfg.check_command, theory_text, cfg)
    parse_error = re.search(cfg.patterns["parse_error"], output)
    type_error = re.search(cfg.patterns["type_error"], output)
    typechecked = re.search(cfg.patterns["typechecked"], output)
    if not (parse_error or type_error or typechecked):
        raise OutputUnparseable("no classification pattern matched", output)
    parse_ok = parse_error is None
    return CheckResult(
        backend="pvs",
        parse_ok=parse_ok,
        typecheck_ok=parse_ok and type_error is None and typechecked is not None,
        diagnostics=[],
        raw_output=output,
        duration_ms=duration_ms,
    )


def prove(
    theory_text: str,
    formula_name: str,
    tactic: str = "grind",
    cfg: Optional[BackendConfig] = None,
) -> ProofAttempt:
    cfg = cfg or BackendConfig()
    result = parse_theory(theory_text)
    if result.ast is not None:
        formulas = {
            d.name
            for d in result.ast.declarations
            if d.decl_kind is DeclKind.FORMULA_DECL
        }
        if formula_name not in formulas:
            raise UnknownFormula(formula_name)

    if cfg.kind == "stub":
        return ProofAttempt(
            formula_name=formula_name,
            tactic_script=tactic,
            status=ProofStatus.SKIPPED_STUB,
            duration_ms=0,
            output_excerpt="stub backend: proof not attempted",
        )

    if result.ast is None:
        raise OutputUnparseable("theory does not parse; cannot attach a proof script", "")
    scripted = write_prooflite(result.ast, formula_name, tactic)
    try:
        output, duration_ms = _run_backend(cfg.prove_command, scripted, cfg)
    except CheckTimeout as exc:
        return ProofAttempt(
            formula_name=formula_name,
            tactic_script=tactic,
            status=ProofStatus.TIMEOUT,
            duration_ms=int(cfg.timeout_s * 1000),
            output_excerpt=str(exc)[:2000],
        )
    if re.search(cfg.patterns["proved"], output) and not re.search(
        cfg.patterns["unfinished"], output
    ):
        status = ProofStatus.PROVED
    elif re.search(cfg.patterns["unfinished"], output):
        status = ProofStatus.UNFINISHED
    else:
        status = ProofStatus.ERROR
    return ProofAttempt(
        formula_name=formula_name,
        tactic_script=tactic,
        status=status,
        duration_ms=duration_ms,
        output_excerpt=output[-2000:],
    )
