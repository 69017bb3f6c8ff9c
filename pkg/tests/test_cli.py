import json
from fractions import Fraction

import pytest

from qkzbench.cli import (
    CHECK_NAMES,
    RunConfig,
    emit,
    load_config,
    main,
    parse_sector,
    run,
)
from qkzbench.errors import (
    GenericPositionViolation,
    NonPositiveTolerance,
    ParseError,
)

RATIONAL_CFG = """\
# sample chain
model = rational
N = 2
n = 3
eta = 1/2
hbar = 1/3
x = [0, 2/5, 9/7]
g = [2, 3]
seed = 1
tol = 1e-10
mode = exact
"""

TRIG_CFG = """\
model = trigonometric
N = 2
n = 2
t = 2
h = 5/4
u = [1, 3/2]
g = [2, 3]
"""


@pytest.fixture
def rational_path(tmp_path):
    p = tmp_path / "rational.cfg"
    p.write_text(RATIONAL_CFG)
    return str(p)


@pytest.fixture
def trig_path(tmp_path):
    p = tmp_path / "trig.cfg"
    p.write_text(TRIG_CFG)
    return str(p)


# ------------------------------------------------------------------- parsing

def test_load_valid_config(rational_path):
    rc = load_config(rational_path)
    assert rc.model.N == 2 and rc.model.n == 3
    assert rc.model.eta == Fraction(1, 2)
    assert rc.model.x == (0, Fraction(2, 5), Fraction(9, 7))
    assert rc.seed == 1 and rc.mode == "exact"


def test_load_config_generic_position_violation(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text(
        "model = rational\nN = 2\nn = 2\neta = 1/2\nhbar = 1/3\n"
        "x = [0, 1/2]\ng = [2, 3]\n"
    )
    with pytest.raises(GenericPositionViolation, match="eta"):
        load_config(str(p))


def test_load_config_missing_t(tmp_path):
    p = tmp_path / "trig.cfg"
    p.write_text("model = trigonometric\nN = 2\nn = 2\nh = 5/4\nu = [1, 3/2]\ng = [2, 3]\n")
    with pytest.raises(ParseError, match="t"):
        load_config(str(p))


def test_load_config_rejects_zero_tol(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text(RATIONAL_CFG.replace("tol = 1e-10", "tol = 0"))
    with pytest.raises(NonPositiveTolerance):
        load_config(str(p))


def test_load_config_syntax_errors(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("model rational\n")
    with pytest.raises(ParseError, match="line 1"):
        load_config(str(p))
    p.write_text("model = rational\nmodel = rational\n")
    with pytest.raises(ParseError, match="duplicate"):
        load_config(str(p))
    p.write_text("bogus = 1\n")
    with pytest.raises(ParseError, match="unknown"):
        load_config(str(p))
    p.write_text("x = 1, 2\n")
    with pytest.raises(ParseError, match="list"):
        load_config(str(p))


def test_parse_sector():
    assert parse_sector("2,1", 2, 3) == (2, 1)
    with pytest.raises(ParseError):
        parse_sector("2,2", 2, 3)
    with pytest.raises(ParseError):
        parse_sector("1,1,1", 2, 3)


# ------------------------------------------------------------------- running

def test_run_single_check(rational_path):
    rc = load_config(rational_path)
    rc.checks = ["ybe"]
    report = run(rc)
    assert len(report.results) == 1
    assert report.results[0].passed
    assert report.overall == "pass"


def test_run_empty_check_list(rational_path):
    rc = load_config(rational_path)
    rc.checks = []
    report = run(rc)
    assert report.results == [] and report.overall == "pass"


def test_run_unknown_check(rational_path):
    rc = load_config(rational_path)
    rc.checks = ["nonsense"]
    with pytest.raises(ParseError):
        run(rc)


def test_run_full_suite(rational_path):
    rc = load_config(rational_path)
    report = run(rc)
    assert report.overall == "pass"
    names = {r.name for r in report.results}
    # exact mode: every applicable check ran, correspondence stayed out
    assert "det-identity" in names and "correspondence" not in names
    sector_rows = [r for r in report.results if r.name == "det-identity"]
    assert len(sector_rows) == 4


def test_run_correspondence_needs_float(rational_path):
    rc = load_config(rational_path)
    rc.checks = ["correspondence"]
    report = run(rc)
    assert report.overall == "fail"
    assert "NeedsFloat" in report.results[0].witness


def test_run_float_mode_correspondence(rational_path):
    rc = load_config(rational_path)
    rc.mode = "float"
    rc.tol = 1e-8
    rc.checks = ["correspondence"]
    rc.sectors = [(2, 1)]
    report = run(rc)
    assert report.overall == "pass"
    assert report.results[0].sector == (2, 1)


def test_trig_full_suite(trig_path):
    rc = load_config(trig_path)
    report = run(rc)
    assert report.overall == "pass"
    names = {r.name for r in report.results}
    assert "det-identity" not in names  # rational-only checks filtered from "all"


# ------------------------------------------------------------------ emitting

def test_emit_json_round_trip(rational_path):
    rc = load_config(rational_path)
    rc.checks = ["ybe", "sum-rule", "det-identity"]
    report = run(rc)
    doc = json.loads(emit(report, "json"))
    assert doc["overall"] == "pass"
    assert [r["status"] for r in doc["results"]] == ["pass"] * len(doc["results"])
    assert [r["name"] for r in doc["results"]] == [r.name for r in report.results]
    for got, r in zip(doc["results"], report.results):
        if isinstance(r.residual, Fraction):
            assert got["residual"] == str(r.residual)


def test_emit_json_deterministic(rational_path):
    rc = load_config(rational_path)
    rc.checks = ["ybe", "qkz-compat", "det-identity"]
    first = emit(run(rc), "json")
    second = emit(run(rc), "json")
    assert first == second


def test_emit_json_timings_are_opt_in(rational_path):
    rc = load_config(rational_path)
    rc.checks = ["ybe"]
    report = run(rc)
    assert "millis" not in emit(report, "json")
    assert "millis" in emit(report, "json", timings=True)


def test_emit_text_contains_table(rational_path):
    rc = load_config(rational_path)
    rc.checks = ["sum-rule"]
    text = emit(run(rc), "text")
    assert "sum-rule" in text and "overall: pass" in text


# ---------------------------------------------------------------- entry point

def test_main_verify_pass(rational_path, capsys):
    code = main(["verify", "--config", rational_path, "--check", "ybe"])
    out = capsys.readouterr().out
    assert code == 0 and "overall: pass" in out


def test_main_verify_failure_exit_code(rational_path, capsys):
    code = main(["verify", "--config", rational_path, "--check", "correspondence"])
    assert code == 1
    assert "fail" in capsys.readouterr().out


def test_main_config_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("model = rational\nN = 2\nn = 2\neta = 1/2\nhbar = 0\n"
                 "x = [0, 1/2]\ng = [2, 3]\n")
    code = main(["verify", "--config", str(p)])
    assert code == 2
    assert "x_2 - x_1 = eta" in capsys.readouterr().err


def test_main_missing_file(capsys):
    assert main(["verify", "--config", "/nonexistent.cfg"]) == 2


def test_main_rejects_bad_tol(rational_path, capsys):
    assert main(["verify", "--config", rational_path, "--tol", "0"]) == 2


def test_main_spectrum(rational_path, capsys):
    code = main(["spectrum", "--config", rational_path, "--sector", "2,1"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["sectors"][0]["sector"] == [2, 1]
    assert len(doc["sectors"][0]["states"]) == 3


def test_main_correspond(rational_path, capsys):
    code = main(["correspond", "--config", rational_path, "--sector", "2,1"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["overall"] == "pass"
    rows = doc["sectors"][0]["rows"]
    assert len(rows) == 3
    for row in rows:
        assert row["match_distance"] <= 1e-8


def test_check_registry_is_published():
    assert len(CHECK_NAMES) == 14
    assert "ybe" in CHECK_NAMES and "correspondence" in CHECK_NAMES
