"""Tests for the proof backend bridge: stub behaviour and the external runner."""

import os
import stat
import textwrap

import pytest

from autoformal.prover import (
    PVS_HOME_ENV,
    BackendConfig,
    BackendUnavailable,
    CheckResult,
    CheckTimeout,
    OutputUnparseable,
    ProofStatus,
    UnknownFormula,
    check,
    prove,
    write_prooflite,
)
from autoformal.pvs.parser import parse_theory

CLEAN = textwrap.dedent(
    """\
    Small: THEORY
    BEGIN
      IMPORTING sets
      double(n: nat): nat = n + n
      double_even: LEMMA FORALL (n: nat): even?(double(n))
    END Small
    """
)

# no theory header at all: recovery cannot salvage this one
BROKEN = ":::: not a theory\n"

LINT_ERROR = textwrap.dedent(
    """\
    Small: THEORY
    BEGIN
      n: nat
      n: nat
    END Small
    """
)


def _script_backend(tmp_path, body, name="fakepvs"):
    """Write an executable shell script and return a config that runs it."""
    path = tmp_path / name
    path.write_text("#!/bin/sh\n" + body)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return BackendConfig(
        kind="pvs",
        check_command=f"{path} {{file}}",
        prove_command=f"{path} {{file}}",
        timeout_s=5.0,
    )


# ----------------------------------------------------------------------
# stub backend


def test_stub_check_clean_theory():
    result = check(CLEAN)
    assert result.backend == "stub"
    assert result.parse_ok
    assert result.typecheck_ok
    assert result.diagnostics == []
    assert result.duration_ms >= 0


def test_stub_check_parse_failure():
    result = check(BROKEN)
    assert not result.parse_ok
    assert not result.typecheck_ok
    assert any(d.code == "E_PARSE" for d in result.diagnostics)


def test_stub_check_lint_failure():
    result = check(LINT_ERROR)
    assert result.parse_ok
    assert not result.typecheck_ok
    assert any(d.code == "E_DUP_DECL" for d in result.diagnostics)


def test_stub_prove_skips():
    attempt = prove(CLEAN, "double_even")
    assert attempt.status is ProofStatus.SKIPPED_STUB
    assert attempt.formula_name == "double_even"
    assert attempt.tactic_script == "grind"
    assert attempt.duration_ms == 0


def test_prove_unknown_formula():
    with pytest.raises(UnknownFormula):
        prove(CLEAN, "no_such_lemma")


def test_prove_rejects_non_formula_name():
    # double is a definition, not a formula
    with pytest.raises(UnknownFormula):
        prove(CLEAN, "double")


# ----------------------------------------------------------------------
# prooflite scripts


def test_write_prooflite_appends_script():
    ast = parse_theory(CLEAN).ast
    scripted = write_prooflite(ast, "double_even", "grind")
    lines = scripted.rstrip("\n").splitlines()
    assert lines[-3] == "%|- double_even : PROOF"
    assert lines[-2] == "%|- (grind)"
    assert lines[-1] == "%|- QED"
    # theory body precedes the script
    assert "double_even: LEMMA" in scripted


def test_write_prooflite_keeps_existing_parens():
    ast = parse_theory(CLEAN).ast
    scripted = write_prooflite(ast, "double_even", "(then (skosimp) (grind))")
    assert "%|- (then (skosimp) (grind))" in scripted
    assert "((then" not in scripted


def test_write_prooflite_unknown_formula():
    ast = parse_theory(CLEAN).ast
    with pytest.raises(UnknownFormula):
        write_prooflite(ast, "missing", "grind")


# ----------------------------------------------------------------------
# external backend via scripted commands


def test_backend_check_typechecked(tmp_path):
    cfg = _script_backend(tmp_path, 'echo "Theory Small typechecked in 0.1s"\n')
    result = check(CLEAN, cfg)
    assert result.backend == "pvs"
    assert result.parse_ok
    assert result.typecheck_ok
    assert "typechecked" in result.raw_output


def test_backend_check_parse_error(tmp_path):
    cfg = _script_backend(tmp_path, 'echo "Small.pvs:3:10 parse error"\n')
    result = check(CLEAN, cfg)
    assert not result.parse_ok
    assert not result.typecheck_ok


def test_backend_check_type_error(tmp_path):
    cfg = _script_backend(
        tmp_path, 'echo "Typecheck error: expecting nat, found bool"\n'
    )
    result = check(CLEAN, cfg)
    assert result.parse_ok
    assert not result.typecheck_ok


def test_backend_unclassifiable_output(tmp_path):
    cfg = _script_backend(tmp_path, 'echo "lorem ipsum"\n')
    with pytest.raises(OutputUnparseable) as exc:
        check(CLEAN, cfg)
    assert "lorem ipsum" in exc.value.raw_output


def test_backend_output_capped(tmp_path):
    cfg = _script_backend(tmp_path, 'yes "typechecked" | head -5000\n')
    cfg.raw_cap_bytes = 100
    result = check(CLEAN, cfg)
    assert len(result.raw_output) == 100


def test_backend_missing_command(tmp_path):
    cfg = BackendConfig(kind="pvs", check_command=str(tmp_path / "absent") + " {file}")
    with pytest.raises(BackendUnavailable):
        check(CLEAN, cfg)


def test_backend_blank_command():
    cfg = BackendConfig(kind="pvs", check_command="   ")
    with pytest.raises(BackendUnavailable):
        check(CLEAN, cfg)


def test_backend_timeout(tmp_path):
    cfg = _script_backend(tmp_path, "sleep 30\n")
    cfg.timeout_s = 0.2
    with pytest.raises(CheckTimeout):
        check(CLEAN, cfg)


def test_backend_receives_theory_file(tmp_path):
    sink = tmp_path / "seen.txt"
    cfg = _script_backend(
        tmp_path, f'cp "$1" {sink}\necho "typechecked"\n'
    )
    check(CLEAN, cfg)
    assert sink.read_text() == CLEAN
    assert "Small.pvs" not in os.listdir(tmp_path)  # workspace cleaned up


def test_backend_prove_proved(tmp_path):
    cfg = _script_backend(tmp_path, 'echo "double_even proved in 0.2s"\n')
    attempt = prove(CLEAN, "double_even", "grind", cfg)
    assert attempt.status is ProofStatus.PROVED
    assert attempt.duration_ms >= 0
    assert "proved" in attempt.output_excerpt


def test_backend_prove_unfinished(tmp_path):
    cfg = _script_backend(tmp_path, 'echo "proof of double_even is unfinished"\n')
    attempt = prove(CLEAN, "double_even", "grind", cfg)
    assert attempt.status is ProofStatus.UNFINISHED


def test_backend_prove_error(tmp_path):
    cfg = _script_backend(tmp_path, 'echo "segmentation fault in prover core"\n')
    attempt = prove(CLEAN, "double_even", "grind", cfg)
    assert attempt.status is ProofStatus.ERROR


def test_backend_prove_timeout_becomes_status(tmp_path):
    cfg = _script_backend(tmp_path, "sleep 30\n")
    cfg.timeout_s = 0.2
    attempt = prove(CLEAN, "double_even", "grind", cfg)
    assert attempt.status is ProofStatus.TIMEOUT
    assert attempt.duration_ms == 200


def test_backend_prove_requires_parse(tmp_path):
    cfg = _script_backend(tmp_path, 'echo "typechecked"\n')
    with pytest.raises(OutputUnparseable):
        prove(BROKEN, "anything", "grind", cfg)


# ----------------------------------------------------------------------
# configuration


def test_env_var_overrides_configured_home(monkeypatch):
    cfg = BackendConfig(pvs_home="/opt/from-config")
    monkeypatch.delenv(PVS_HOME_ENV, raising=False)
    assert cfg.resolved_home() == "/opt/from-config"
    monkeypatch.setenv(PVS_HOME_ENV, "/opt/from-env")
    assert cfg.resolved_home() == "/opt/from-env"


def test_backend_home_lands_in_path(tmp_path, monkeypatch):
    home = tmp_path / "pvs-home"
    (home / "bin").mkdir(parents=True)
    monkeypatch.setenv(PVS_HOME_ENV, str(home))
    cfg = _script_backend(tmp_path, 'echo "PVS_HOME=$PVS_HOME"\necho typechecked\n')
    result = check(CLEAN, cfg)
    assert f"PVS_HOME={home}" in result.raw_output


def test_backend_config_roundtrip():
    cfg = BackendConfig(kind="pvs", timeout_s=12.5, pvs_home="/opt/pvs")
    cfg.patterns["proved"] = r"\bQED\b"
    back = BackendConfig.from_json(cfg.to_json())
    assert back.kind == "pvs"
    assert back.timeout_s == 12.5
    assert back.pvs_home == "/opt/pvs"
    assert back.patterns["proved"] == r"\bQED\b"
    # unspecified patterns fall back to the defaults
    assert "unfinished" in back.patterns


def test_check_result_roundtrip():
    result = check(LINT_ERROR)
    back = CheckResult.from_json(result.to_json())
    assert back.parse_ok == result.parse_ok
    assert back.typecheck_ok == result.typecheck_ok
    assert [d.code for d in back.diagnostics] == [d.code for d in result.diagnostics]
