import json
import pathlib
import subprocess
import sys

import pytest

from paramjet.cli import main, parse_session, run_session
from paramjet.errors import ParseError, SemanticError
from paramjet.field import parse_ratfun

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def run_cli(tmp_path, name, *extra):
    out = tmp_path / (name + ".jsonl")
    code = main(["run", str(FIXTURES / name), "--out", str(out), "--quiet", *extra])
    return code, out.read_bytes() if out.exists() else b""


def records_of(payload: bytes):
    return [json.loads(line) for line in payload.decode().splitlines()]


def test_xt_prolong_certificate(tmp_path):
    code, payload = run_cli(tmp_path, "xt_prolong.session")
    assert code == 0
    recs = records_of(payload)
    assert recs[0]["record"] == "header"
    prolong = next(r for r in recs if r.get("command") == "prolong")
    assert prolong["derived"]["matrices"]["dx"] == [
        ["(t)/(x)", "(0)/(1)"],
        ["(-1)/(x)", "(t)/(x)"],
    ]
    assert prolong["derived"]["parent_rank"] == 1
    assert prolong["derived"]["q"] == 1


def test_ring_morphism_sessions(tmp_path):
    code_ok, payload_ok = run_cli(tmp_path, "ring_morphism_ok.session")
    assert code_ok == 0
    recs = records_of(payload_ok)
    assert recs[1]["verdict"] == "ok"
    extended = next(r for r in recs if r.get("command") == "extend-scalars")
    assert extended["derived"]["matrices"]["dx"] == [["(-1*y)/(1)"]]
    assert extended["derived"]["matrices"]["dy"] == [["(-1*x)/(1)"]]

    code_fail, payload_fail = run_cli(tmp_path, "ring_morphism_fail.session")
    assert code_fail == 4
    recs = records_of(payload_fail)
    morph = next(r for r in recs if r.get("command") == "check-morphism")
    assert morph["verdict"] == "integrability-fail"
    assert morph["witness"]["two_form"] == ["(-1)/(1)"]
    integ = next(r for r in recs if r.get("command") == "check-integrability")
    assert integ["verdict"] == "curved"


def test_malformed_session_exit_code(tmp_path):
    code, _ = run_cli(tmp_path, "malformed.session")
    assert code == 2


def test_undefined_name_is_semantic_error(tmp_path):
    bad = tmp_path / "bad.session"
    bad.write_text(
        "field x t\n"
        "structure\n  principal dx = 1, 0\n  parameter dt = 0, 1\n  constants t\nend\n"
        "command check-integrability NOPE\n"
    )
    code = main(["run", str(bad), "--quiet", "--out", str(tmp_path / "o.jsonl")])
    assert code == 3


def test_shape_mismatch_is_semantic_error(tmp_path):
    bad = tmp_path / "bad2.session"
    bad.write_text(
        "field x t\n"
        "structure\n  principal dx = 1, 0\n  parameter dt = 0, 1\n  constants t\nend\n"
        "module M rank 2\n  matrix dx\n    t/x\n  end\nend\n"
        "command check-integrability M\n"
    )
    code = main(["run", str(bad), "--quiet", "--out", str(tmp_path / "o.jsonl")])
    assert code == 3


def test_determinism_full_corpus(tmp_path):
    for name in sorted(p.name for p in FIXTURES.glob("*.session")):
        if name == "malformed.session":
            continue
        _, first = run_cli(tmp_path, name)
        _, second = run_cli(tmp_path, name)
        assert first == second and first, name


def test_round_trip_of_emitted_modules(tmp_path, xt):
    """Matrices in certificates re-parse to the library's exact values."""
    from paramjet.conn import DiffModule
    from paramjet.prolong import prolong_module

    spec, ps = xt
    code, payload = run_cli(tmp_path, "xt_prolong.session")
    assert code == 0
    recs = records_of(payload)
    prolong = next(r for r in recs if r.get("command") == "prolong")
    reingested = [
        [parse_ratfun(spec, cell) for cell in row]
        for row in prolong["derived"]["matrices"]["dx"]
    ]
    m = DiffModule(ps, 1, ([[parse_ratfun(spec, "t/x")]],))
    expected = prolong_module(m).core.conn[0]
    assert reingested == [list(r) for r in expected]


def test_session_requires_definitions_before_use():
    with pytest.raises((ParseError, SemanticError)):
        parse_session("command check-integrability M\nfield x t\n")


def test_session_rejects_duplicate_names():
    text = (
        "field x t\n"
        "structure\n  principal dx = 1, 0\n  parameter dt = 0, 1\n  constants t\nend\n"
        "module M rank 1\n  matrix dx\n    0\n  end\nend\n"
        "module M rank 1\n  matrix dx\n    0\n  end\nend\n"
    )
    with pytest.raises(ParseError):
        parse_session(text)


def test_console_entry_point(tmp_path):
    """The installed script runs and produces the same bytes as main()."""
    out1 = tmp_path / "a.jsonl"
    main(["run", str(FIXTURES / "xt_prolong.session"), "--out", str(out1), "--quiet"])
    proc = subprocess.run(
        [sys.executable, "-m", "paramjet.cli", "run", str(FIXTURES / "xt_prolong.session")],
        capture_output=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == out1.read_bytes()


def test_derived_names_chain(tmp_path):
    text = (
        "field x t\n"
        "structure\n  principal dx = 1, 0\n  parameter dt = 0, 1\n  constants t\nend\n"
        "module M rank 1\n  matrix dx\n    t/x\n  end\nend\n"
        "command prolong P = M\n"
        "command check-integrability P\n"
        "command at2 P\n"
    )
    f = tmp_path / "chain.session"
    f.write_text(text)
    out = tmp_path / "chain.jsonl"
    assert main(["run", str(f), "--quiet", "--out", str(out)]) == 0
    recs = records_of(out.read_bytes())
    at2 = next(r for r in recs if r.get("command") == "at2")
    # the invariant part of the twice-prolonged rank-2 module has rank 6
    assert at2["derived"]["rank"] == 6
    assert at2["derived"]["double_rank"] == 8


def test_prolong_of_curved_module_is_semantic_error(tmp_path):
    text = (
        "field x y t\n"
        "structure\n  principal dx = 1, 0, 0\n  principal dy = 0, 1, 0\n"
        "  parameter dt = 0, 0, 1\n  constants t\nend\n"
        "module C rank 1\n  matrix dx\n    -y\n  end\n  matrix dy\n    0\n  end\nend\n"
        "command prolong P = C\n"
    )
    f = tmp_path / "curved.session"
    f.write_text(text)
    assert main(["run", str(f), "--quiet", "--out", str(tmp_path / "c.jsonl")]) == 3
