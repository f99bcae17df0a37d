import json

import pytest

from src import cli, modp
from src.config import Settings

EULER = '{"p": 5, "vars": ["x", "y"], "images": {"x": "x", "y": "2*y"}}'
TWO_CHARTS = (
    '{"p": 2, "denominator": "s", "charts": [{"c": "s^3+s"}, {"c": "s^-1+s^-3"}],'
    ' "transitions": [{"i": 0, "j": 1, "a": "s^-2", "gamma": "0"}]}'
)


def test_identities(capsys):
    assert cli.main(["identities", "--primes", "2,3"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "IDENTITY wilson p=2 EXPECTED 1 (≡ -1) GOT 1 (≡ -1) PASS" in out
    assert " FAIL" not in out


def test_identities_json(capsys):
    assert cli.main(["identities", "--primes", "3", "--json"]) == cli.EXIT_OK
    records = json.loads(capsys.readouterr().out)
    assert {r["status"] for r in records} <= {"PASS", "INFO"}


def test_classify_multiplicative(capsys):
    assert cli.main(["classify", EULER]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "multiplicative"
    assert lines[1].startswith("fixed locus:")


def test_classify_from_file(tmp_path, capsys):
    path = tmp_path / "field.json"
    path.write_text('{"p": 3, "vars": ["x"], "images": {"x": "1"}}')
    assert cli.main(["classify", str(path)]) == cli.EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "additive"


def test_quotient(capsys):
    assert cli.main(["quotient", EULER, "--d", "5"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "invariants deg<=5: {1, x*y^2, x^3*y, x^5, y^5}" in out
    assert "IDENTITY eigen_dimension_sum p=5" in out


def test_radical_quotient(capsys):
    desc = '{"p": 3, "vars": ["x", "y", "t"], "shape": {"radical_ext": {"var": "t", "radicand": "x"}}, "images": {"t": "t^2"}}'
    assert cli.main(["quotient", desc, "--d", "2"]) == cli.EXIT_OK
    assert "filtration(1) deg<=2" in capsys.readouterr().out


def test_radical_descriptor_lists_radical_variable(capsys):
    desc = '{"p":3,"vars":["x","t"],"shape":{"radical_ext":{"var":"t","radicand":"x"}},"truncate":null,"images":{"t":"t^2"}}'
    assert cli.main(["classify", desc]) == cli.EXIT_OK
    assert capsys.readouterr().out.startswith("additive")


def test_radical_descriptor_without_radical_variable(capsys):
    desc = '{"p":3,"vars":["x"],"shape":{"radical_ext":{"var":"t","radicand":"x"}},"images":{"t":"t^2"}}'
    assert cli.main(["classify", desc]) == cli.EXIT_INPUT
    assert "❌" in capsys.readouterr().err


def test_torsor(capsys):
    assert cli.main(["torsor", TWO_CHARTS]) == cli.EXIT_OK
    assert "mutant_rejected" in capsys.readouterr().out


def test_torsor_section(capsys):
    desc = TWO_CHARTS[:-1] + ', "section": ["1", "s^-2"]}'
    assert cli.main(["torsor", desc]) == cli.EXIT_OK
    assert "section_rule" in capsys.readouterr().out


def test_blowup(capsys):
    assert cli.main(["blowup", '{"p": 5, "P": "x", "Q": "2*y"}']) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("type=multiplicative terminated=False cycles=1")


def test_adjunction(capsys):
    assert cli.main(["adjunction", "--primes", "2,3", "--samples", "3"]) == cli.EXIT_OK
    assert cli.main(["adjunction", '{"p": 3, "c": "1+x"}', "--samples", "3"]) == cli.EXIT_OK
    assert "adjunction_product" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", '{"p": 4, "vars": ["x"], "images": {"x": "1"}}'],
        ["classify", "{bad json"],
        ["classify", '{"p": 3, "vars": ["x"], "images": {"x": "1+"}}'],
        ["classify", '{"p": 3, "vars": ["x"], "images": {}}'],
        ["classify", "/nonexistent/field.json"],
        ["identities", "--primes", "4"],
        ["quotient", EULER, "--d", "-1"],
        ["blowup", '{"p": 3, "P": "x", "Q": "1"}'],
    ],
)
def test_bad_input_exits_with_two(argv, capsys):
    assert cli.main(argv) == cli.EXIT_INPUT
    assert "❌" in capsys.readouterr().err


def test_missing_subcommand():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_parse_primes():
    assert cli.parse_primes("2, 3,5") == (2, 3, 5)
    assert cli.parse_primes(None) is None


def test_run_all_is_deterministic():
    first = cli.run_all(7, Settings.quick())
    second = cli.run_all(7, Settings.quick())
    assert first.to_text() == second.to_text()
    assert first.report.to_json() == second.report.to_json()
    assert list(first.table["suite"]) == [name for name, _ in cli.SUITES]
    assert first.report.passed


def test_all_fails_with_broken_projectors(monkeypatch, capsys):
    original = modp.projector_polys
    monkeypatch.setattr(modp, "projector_polys", lambda pc: original(pc)[1:] + original(pc)[:1])
    monkeypatch.setattr(cli, "DEFAULT_SETTINGS", Settings.quick())
    assert cli.main(["all"]) == cli.EXIT_FAIL
    assert "❌ eigen decomposition" in capsys.readouterr().out


def test_save_report(tmp_path, capsys):
    argv = ["identities", "--primes", "3", "--save", "ids.json", "--reports-dir", str(tmp_path)]
    assert cli.main(argv) == cli.EXIT_OK
    saved = json.loads((tmp_path / "ids.json").read_text(encoding="utf-8"))
    assert saved[0]["name"] == "wilson"
