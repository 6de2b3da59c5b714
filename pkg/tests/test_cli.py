import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from udwlab import cli
from udwlab.errors import QuadratureNoConvergence


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_grid():
    assert np.abs(cli.parse_grid("0:1:3") - [0, 0.5, 1]).max() == 0
    assert np.abs(cli.parse_grid("1:100:3:log") - [1, 10, 100]).max() < 1e-12
    assert cli.parse_grid("0.7:0.7:1").tolist() == [0.7]
    for bad in ("0:1", "0:1:0", "0:1:2000000", "0:1:3:log", "0:1:3:cubic", "a:1:3"):
        with pytest.raises(ValueError):
            cli.parse_grid(bad)


def test_csv_formatting():
    text = cli.to_csv([{"a": -0.0, "b": 0.1, "c": True, "d": 3}], ["a", "b", "c", "d"])
    assert text == "a,b,c,d\n0,0.10000000000000001,1,3\n"


def test_fig1_default(capsys):
    code, out, _ = run(capsys, "fig1")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 200
    assert list(rows[0]) == ["p", "entropy_diff", "petz_bound", "closed_form_fidelity"]
    for r in rows:
        assert float(r["entropy_diff"]) >= float(r["petz_bound"]) - 1e-9


def test_fig1_single_point(capsys):
    code, out, _ = run(capsys, "fig1", "--grid", "1:1:1")
    assert code == 0
    assert out.splitlines()[1] == "1,0,0,0"


def test_fig1_out_of_domain(capsys):
    code, _, err = run(capsys, "fig1", "--grid", "0.4:0.4:1")
    assert code == 2 and "p must lie" in err


def test_fig2(capsys):
    code, out, _ = run(capsys, "fig2", "--beta", "0.01", "--grid", "0.51:1:20")
    assert code == 0
    for r in rows_of(out):
        assert float(r["entropy_diff"]) < 1e-3
        assert float(r["entropy_diff"]) >= float(r["bound"]) - 1e-9
    code, out, _ = run(capsys, "fig2", "--beta", "0.5,2", "--grid", "0.51:1:100")
    assert len(rows_of(out)) == 200
    code, _, _ = run(capsys, "fig2", "--beta", "-1")
    assert code == 2


def test_fig3(capsys):
    code, out, _ = run(capsys, "fig3", "--jobs", "2")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 3 * 41
    for m in {r["mass"] for r in rows}:
        s2 = [float(r["S2_field"]) for r in rows if r["mass"] == m]
        assert np.all(np.diff(s2) >= -1e-12)
    code, out, _ = run(capsys, "fig3", "--lambda", "0", "--grid", "0.01:100:5:log")
    assert all(float(r["S2_field"]) == 0 for r in rows_of(out))


def test_fig3_golden(capsys):
    code, out, _ = run(capsys, "fig3", "--grid", "0.01:0.01:1", "--mass", "0")
    r = rows_of(out)[0]
    assert abs(float(r["W"]) - 0.00079603646319441877) < 1e-15
    assert abs(float(r["S2_field"]) - 0.0022950473195860743) < 1e-14


def test_wightman(capsys):
    code, out, _ = run(capsys, "wightman")
    rep = json.loads(out)
    assert abs(rep["W"] - 1 / (4 * math.pi)) < 1e-8
    assert set(rep) == {"W", "abserr", "nu", "p"}
    _, hot, _ = run(capsys, "wightman", "--beta", "0.1")
    assert json.loads(hot)["W"] > rep["W"]
    _, heavy, _ = run(capsys, "wightman", "--mass", "10")
    assert json.loads(heavy)["W"] < rep["W"]
    code, out, _ = run(capsys, "wightman", "--format", "csv")
    assert out.splitlines()[0] == "W,abserr,nu,p"


def test_exit_code_quadrature(capsys, monkeypatch):
    def boom(*a, **k):
        raise QuadratureNoConvergence("no")
    monkeypatch.setattr(cli, "smeared_wightman", boom)
    code, _, _ = run(capsys, "wightman")
    assert code == 3


def test_quad_tol_env(capsys, monkeypatch):
    monkeypatch.setenv("UDWLAB_QUAD_TOL", "1e-6")
    assert cli.quadrature_config().rel_tol == 1e-6
    monkeypatch.setenv("UDWLAB_QUAD_TOL", "abc")
    code, _, _ = run(capsys, "wightman")
    assert code == 2


def test_analyze_identity(capsys):
    code, out, _ = run(capsys, "analyze", "--W", "0")
    rep = json.loads(out)
    assert abs(rep["negativity"] - 0.5) < 1e-12
    assert rep["entanglement_breaking"] is False
    assert rep["cohering_power"] == 0 and rep["decohering_power"] == 0 and rep["S2_field"] == 0


def test_analyze_half(capsys):
    code, out, _ = run(capsys, "analyze", "--W", repr(math.log(2) / 2))
    rep = json.loads(out)
    assert abs(rep["nu_re"] - 0.5) < 1e-15 and abs(rep["p"] - 0.75) < 1e-15
    assert abs(rep["negativity"] - 0.25) < 1e-12
    assert rep["entanglement_breaking"] is False
    assert abs(rep["decohering_power"] - 0.5) < 1e-15
    assert rep["mixed_unitary_weights"] == [0.25, 0.25, 0.5]


def test_analyze_coherent(capsys):
    code, out, _ = run(capsys, "analyze", "--state", "coherent", "--nu", "0.5",
                       "--E-alpha", repr(math.pi / 4))
    rep = json.loads(out)
    assert abs(rep["cohering_power"] - 0.5) < 1e-12


def test_analyze_inconsistent_squeezing(capsys):
    code, _, _ = run(capsys, "analyze", "--state", "squeezed", "--W", "0.1", "--E-zeta", "0.2",
                     "--ReW-f-zeta", "-0.3", "--W-zeta", "0.3")
    assert code == 2


def test_analyze_complex_nu(capsys):
    code, out, _ = run(capsys, "analyze", "--nu", "0.3+0.4j", "--axis", "0,1,1")
    rep = json.loads(out)
    assert code == 0 and rep["kraus_labels"] == ["K0", "K1", "K2"]
    assert abs(rep["cohering_power"] - 0.4) < 1e-15
    code, _, _ = run(capsys, "analyze", "--nu", "2")
    assert code == 2


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle")
    rep = json.loads(out)
    assert code == 0 and rep["max_deviation"] < 1e-6 and rep["modulation_sign"] == -1
    code, out, _ = run(capsys, "oracle", "--r-f", "0")
    rep = json.loads(out)
    for k, v in rep.items():
        if k.endswith(("nu_deviation", "channel_deviation", "entropy_deviation")):
            assert v < 1e-15, k
    code, _, _ = run(capsys, "oracle", "--dim", "8", "--r-f", "1")
    assert code == 4
    code, out, _ = run(capsys, "oracle", "--mode", "weyl_squeeze", "--mode-param", "0.2,0.3")
    assert json.loads(out)["max_deviation"] < 1e-6


def test_sweep(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--out", str(out_path), "--plot")
    assert code == 0
    rows = rows_of(out_path.read_text())
    assert len(rows) == 50
    for r in rows:
        assert abs(float(r["S2_field"]) - float(r["S2_detector"])) < 1e-12
    assert out_path.with_suffix(".png").stat().st_size > 0
    code, out, _ = run(capsys, "sweep", "--param", "nu", "--grid", "0:1:5")
    rows = rows_of(out)
    assert rows[0]["entanglement_breaking"] == "1" and rows[-1]["negativity"] == "0.5"


def test_plot_needs_out(capsys):
    code, _, _ = run(capsys, "fig1", "--grid", "0.6:1:3", "--plot")
    assert code == 2


def test_json_table(capsys):
    code, out, _ = run(capsys, "fig1", "--grid", "0.6:1:3", "--format", "json")
    data = json.loads(out)
    assert len(data) == 3 and set(data[0]) == {"p", "entropy_diff", "petz_bound", "closed_form_fidelity"}


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('grid = "0.6:1:4"\n[fig2]\nbeta = "2"\ngrid = "0.7:1:3"\n')
    code, out, _ = run(capsys, "fig1", "--config", str(cfg))
    assert len(rows_of(out)) == 4
    code, out, _ = run(capsys, "fig2", "--config", str(cfg))
    rows = rows_of(out)
    assert len(rows) == 3 and rows[0]["beta_omega"] == "2"
    code, out, _ = run(capsys, "fig1", "--config", str(cfg), "--grid", "0.6:1:2")
    assert len(rows_of(out)) == 2
    code, _, _ = run(capsys, "fig1", "--config", str(tmp_path / "missing.toml"))
    assert code == 2


def test_jobs_preserve_order(capsys):
    _, a, _ = run(capsys, "fig2", "--jobs", "1")
    _, b, _ = run(capsys, "fig2", "--jobs", "4")
    assert a == b


def test_entry_point(tmp_path):
    out = tmp_path / "f.csv"
    res = subprocess.run([sys.executable, "-m", "udwlab.cli", "fig1", "--grid", "1:1:1", "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert out.read_bytes() == b"p,entropy_diff,petz_bound,closed_form_fidelity\n1,0,0,0\n"
