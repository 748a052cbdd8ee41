import io
import json
import math

import pytest

from cmvlab import io as cio
from cmvlab.cli import run
from cmvlab.errors import ParameterError


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_empty_records_give_header_only():
    assert cio.to_csv([], "resonance") == "n,delta,threshold,tail_prob,ci_lo,ci_hi,samples,master_seed\n"
    assert cio.to_json([], "resonance") == "[]\n"


def test_csv_roundtrip_and_precision():
    recs = [{"offset": 10, "mean_kernel": 1 / 3, "ci_lo": 0.1, "ci_hi": math.pi, "fitted_rate": 0.0690000351957}]
    text = cio.to_csv(recs, "edl")
    assert text.endswith("\n") and "0.33333333333333331" in text
    assert cio.parse_csv(text) == recs


def test_json_flat_and_null_for_nonfinite():
    text = cio.to_json([{"n": 3, "delta": float("nan"), "threshold": float("inf"), "tail_prob": 0.5}], "resonance")
    data = json.loads(text)
    assert data[0]["delta"] is None and data[0]["threshold"] is None and data[0]["tail_prob"] == 0.5
    assert list(data[0]) == cio.SCHEMAS["resonance"] and text.endswith("\n")


def test_emit_errors(tmp_path):
    with pytest.raises(ParameterError):
        cio.emit([], "edl", "xml")
    with pytest.raises(ParameterError):
        cio.emit([], "edl", "csv", tmp_path / "missing" / "x.csv")
    with pytest.raises(ParameterError):
        cio.emit([], "nope")


def test_config_grammar(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# comment\nseed = 5\nz-grid = 3  # trailing\n\n", encoding="utf-8")
    assert cio.read_config(p) == {"seed": "5", "z_grid": "3"}
    p.write_text("seed 5\n")
    with pytest.raises(ParameterError):
        cio.read_config(p)


def test_svg_chart():
    svg = cio.svg_line_chart([1, 2, 3], [1.0, 0.5, 0.0], "t<", "n", "p", fit=(-0.7, 0.0))
    assert svg.startswith("<svg") and "t&lt;" in svg and "polyline" in svg


def test_cli_lyapunov_anchor():
    code, out, _ = _run(["lyapunov", "--dist", "constant:0.5+0i", "--z-grid", "1", "--arc", "0,0", "--samples", "1"])
    assert code == 0
    row = cio.parse_csv(out)[0]
    assert row["gamma_hat"] == pytest.approx(math.acosh(2 / math.sqrt(3)), abs=1e-6)


@pytest.mark.parametrize("argv", [["lyapunov", "--dist", "atoms:(1.5,1)"], ["lyapunov", "--bogus"],
                                  ["ldt", "--n", "x"], ["frobnicate"], ["lyapunov", "--arc", "2,1"]])
def test_cli_parameter_errors(argv):
    code, _, err = _run(argv)
    assert code == 2 and "usage" in err


def test_cli_unwritable_output(tmp_path):
    code, _, _ = _run(["dump", "--size", "3", "--out", str(tmp_path / "no" / "x.csv")])
    assert code == 2


def test_cli_threads_byte_identical(tmp_path):
    outs = []
    for t in (1, 3):
        p = tmp_path / f"r{t}.json"
        code, _, _ = _run(["resonance", "--samples", "70", "--n", "3,6", "--threads", str(t), "--format", "json",
                           "--out", str(p)])
        assert code == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_cli_config_and_override(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("samples = 16\nn = 4\nseed = 3\n")
    _, a, _ = _run(["resonance", "--config", str(cfg)])
    _, b, _ = _run(["resonance", "--config", str(cfg), "--seed", "4"])
    rows_a, rows_b = cio.parse_csv(a), cio.parse_csv(b)
    assert rows_a[0]["samples"] == 16 and rows_a[0]["master_seed"] == 3 and rows_b[0]["master_seed"] == 4
    cfg.write_text("colour = red\n")
    assert _run(["resonance", "--config", str(cfg)])[0] == 2


def test_cli_verify_reports_failures_with_exit_one():
    code, out, err = _run(["verify", "--samples", "10", "--seed", "42"])
    data = json.loads(out)
    assert {d["check_name"] for d in data} >= {"halfline", "poisson", "green_correction"}
    failing = [d for d in data if d["failures"]]
    assert code == (1 if failing else 0)
    assert all(d["check_name"] in err for d in failing)


def test_cli_dump_and_svg(tmp_path):
    code, out, _ = _run(["dump", "--size", "2", "--a", "0", "--dist", "constant:0", "--matrix", "A", "--z", "0.5"])
    assert code == 0
    assert cio.parse_csv(out) == [{"row": 0, "col": 0, "re": -1, "im": 0}, {"row": 0, "col": 1, "re": 0.5, "im": 0},
                                  {"row": 1, "col": 0, "re": 0.5, "im": 0}, {"row": 1, "col": 1, "re": -1, "im": 0}]
    svg = tmp_path / "f.svg"
    code, _, err = _run(["regularity", "--samples", "40", "--n", "3,6", "--z-grid", "2", "--gamma-n", "500",
                         "--gamma-samples", "10", "--svg", str(svg)])
    assert code == 0 and svg.read_text().startswith("<svg") and "slope" in err
