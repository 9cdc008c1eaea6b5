import json

import pytest

from lbeta.cli import build_parser, main
import lbeta.logs

pytestmark = pytest.mark.unit


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


###
# Parser
###


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_global_options_in_either_position():
    parser = build_parser()
    before = parser.parse_args(["--precision-bits", "128", "context", "--lambda", "1"])
    after = parser.parse_args(["context", "--lambda", "1", "--precision-bits", "128"])
    assert before.precision_bits == after.precision_bits == 128


def test_parameter_options_are_exclusive(capsys):
    code, payload = run(capsys, "context", "--lambda", "1", "--tau", "3")
    assert code == 2
    assert payload is None


###
# Subcommands
###


def test_context(capsys):
    code, payload = run(capsys, "--precision-bits", "128", "context", "--lambda", "1.5")
    assert code == 0
    assert payload["i_lambda"] == 3
    assert payload["breakpoints"] == pytest.approx([0, 2 / 3, 1.2, 10 / 3])
    assert payload["ell_lambda"] == pytest.approx(6 / 11)
    assert payload["metadata"]["lambda"] == "1.5"
    assert payload["metadata"]["precision_bits"] == 128


def test_context_from_tau(capsys):
    code, payload = run(capsys, "context", "--tau", "5")
    assert code == 0
    assert payload["lambda"] == pytest.approx(1.6180339887498949)
    assert payload["metadata"]["tau"] == "5"


def test_code(capsys):
    code, payload = run(capsys, "code", "--lambda", "1", "--x", "2", "--n", "5")
    assert code == 0
    assert payload["digits"] == [1, 1, 0, 0, 0]
    assert payload["period_start"] == 2
    assert payload["period_length"] == 1
    assert payload["metadata"]["n"] == 5


def test_code_default_horizon(capsys):
    code, payload = run(capsys, "code", "--lambda", "1", "--x", "0.3")
    assert code == 0
    assert len(payload["digits"]) == 128
    assert payload["metadata"]["n"] == 128


def test_expand(capsys):
    code, payload = run(capsys, "expand", "--lambda", "1", "--x", "2", "--n", "4")
    assert code == 0
    assert payload["cf"] == [1, 2]
    assert payload["finite"] is True
    assert len(payload["convergents"]) == 4


def test_beta(capsys):
    code, payload = run(capsys, "beta", "--tau", "6")
    assert code == 0
    assert payload["beta"] == pytest.approx(5, abs=1e-9)
    assert payload["omega_prefix"] == "4" * 12
    assert payload["entropy"] == pytest.approx(1.6094379124341003)


def test_lambda(capsys):
    code, payload = run(capsys, "lambda", "--beta", "2")
    assert code == 0
    assert payload["lambda"] == pytest.approx(1, abs=1e-9)
    assert payload["beta"] == pytest.approx(2, abs=1e-9)


def test_phi(capsys):
    code, payload = run(capsys, "phi", "--lambda", "1", "--x", "2")
    assert code == 0
    assert payload["t"] == pytest.approx(0.75, abs=1e-9)
    assert payload["beta"] == pytest.approx(2, abs=1e-9)


def test_scan(capsys, tmp_path):
    out = tmp_path / "curve.csv"
    code, payload = run(
        capsys,
        "scan",
        "--tau-min", "6",
        "--tau-max", "6.5",
        "--step", "0.25",
        "--workers", "1",
        "--out", str(out),
    )  # fmt: skip
    assert code == 0
    assert payload["rows"] == 3
    assert payload["monotone"] is True
    assert payload["beta_min"] == pytest.approx(5, abs=1e-9)
    assert len(out.read_text().splitlines()) == 4
    assert payload["metadata"]["scan.config"]


def test_log_level_option(capsys):
    try:
        code, payload = run(
            capsys, "beta", "--lambda", "1", "--log-level", "lbeta.correspondence:debug"
        )
        assert code == 0
        assert lbeta.logs.filters["lbeta.correspondence"] == "DEBUG"
    finally:
        lbeta.logs.reset_filters()


###
# Exit codes
###


@pytest.mark.parametrize(
    "argv",
    [
        ["context", "--lambda", "2.5"],
        ["context", "--lambda", "0"],
        ["context", "--tau", "2"],
        ["code", "--lambda", "1", "--x", "-1"],
        ["code", "--lambda", "1", "--x", "1", "--n", "0"],
        ["lambda", "--beta", "1"],
        ["--precision-bits", "32", "context", "--lambda", "1"],
        ["context"],
    ],
)
def test_usage_errors(capsys, argv):
    code, payload = run(capsys, *argv)
    assert code == 2
    assert payload is None


def test_io_error(capsys, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    code, payload = run(
        capsys,
        "scan",
        "--tau-min", "6",
        "--tau-max", "6.25",
        "--step", "0.25",
        "--workers", "1",
        "--out", str(blocker / "curve.csv"),
    )  # fmt: skip
    assert code == 3
    assert payload is None


def test_negative_tolerance(capsys):
    code, payload = run(capsys, "beta", "--lambda", "1.5", "--tol", "-1")
    assert code == 2
    assert payload is None


def test_handler_entry_is_logged(capsys, caplog):
    code, _ = run(capsys, "context", "--lambda", "1")
    assert code == 0
    assert "Entering 'cmd_context'" in caplog.text


def test_error_is_logged(capsys, caplog):
    code, _ = run(capsys, "context", "--lambda", "2.5")
    assert code == 2
    assert "OutOfRange: " in caplog.text
