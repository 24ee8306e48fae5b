"""Command line surface: exit codes, artifact formats, reproducibility."""

import json

import pytest

from tracefluct.cli import main, parse_beta, parse_dist, parse_function
from tracefluct.combinatorics import MultiIndex


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# ------------------------------------------------------------------ parsing


def test_parse_beta():
    assert parse_beta("delta") == MultiIndex.delta()
    assert parse_beta("2delta") == MultiIndex.two_delta()
    assert parse_beta("delta+delta^3") == MultiIndex.delta_pair(3)
    assert parse_beta("0:1,2:2") == MultiIndex.from_counts({0: 1, 2: 2})
    assert parse_beta("zero") == MultiIndex.zero()
    with pytest.raises(ValueError):
        parse_beta("nonsense")


def test_parse_dist_and_function():
    assert parse_dist("rademacher").name == "rademacher"
    assert parse_dist("uniform:sqrt3").moment(4) == pytest.approx(1.8)
    assert parse_dist("uniform:2.0").bound == 2.0
    with pytest.raises(ValueError):
        parse_dist("cauchy")
    f = parse_function("poly:0,1,0,2")
    assert f.coefficient(3) == 2.0
    assert parse_function("exp:0.125").coefficient(0) == 1.0
    with pytest.raises(ValueError):
        parse_function("sin:1")


# -------------------------------------------------------------------- paths


def test_paths_table(capsys):
    code, out, _ = run_cli(["paths", "--k", "3"], capsys)
    assert code == 0
    assert "beta,count" in out
    assert "0:1,6" in out          # single flat: six paths
    assert "0:3,1" in out          # triple flat: one path


def test_paths_specific_beta(capsys):
    code, out, _ = run_cli(["paths", "--k", "4", "--beta", "2delta"], capsys)
    assert code == 0
    assert out.strip() == "8"


def test_paths_k0(capsys):
    code, out, _ = run_cli(["paths", "--k", "0"], capsys)
    assert code == 0
    assert "0,1" in out


def test_paths_cap_validation(capsys):
    code, _, err = run_cli(["paths", "--k", "20"], capsys)
    assert code == 2
    assert "cap" in err


# --------------------------------------------------------------- trace-poly


def test_trace_poly_stdout(capsys):
    code, out, _ = run_cli(["trace-poly", "--N", "5", "--k", "2"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert "sites,exponents,coefficient" in lines
    assert ",,8" in lines           # constant row: 2N - 2
    assert "1,2,1" in lines         # V(1)^2 with coefficient 1
    assert "5,2,1" in lines


def test_trace_poly_file_roundtrip(tmp_path, capsys):
    out_file = tmp_path / "poly.csv"
    code, _, _ = run_cli(["trace-poly", "--N", "6", "--k", "4", "--out", str(out_file)], capsys)
    assert code == 0
    first = out_file.read_text()
    run_cli(["trace-poly", "--N", "6", "--k", "4", "--out", str(out_file)], capsys)
    assert out_file.read_text() == first  # byte reproducible
    assert "# format_version=1" in first


# ------------------------------------------------------------------- verify


def test_verify_fast(tmp_path, capsys):
    report_path = tmp_path / "verify.json"
    code, _, _ = run_cli(["verify", "--level", "fast", "--json", str(report_path)], capsys)
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["checks_failed"] == 0
    assert report["checks_run"] > 50


def test_verify_fault_injection(capsys):
    code, out, err = run_cli(["verify", "--level", "fast", "--inject-fault"], capsys)
    assert code == 1
    assert "k=2" in err and "beta=" in err


def test_verify_level_validation(capsys):
    code, _, _ = run_cli(["verify", "--level", "fast"], capsys)
    assert code == 0


# ---------------------------------------------------------------- expansion


def test_expansion_k_mode(capsys):
    code, out, _ = run_cli(
        ["expansion", "--k", "4", "--alpha", "0.5", "--N", "30"], capsys)
    assert code == 0
    payload = json.loads(out)
    rep = payload["report"]
    assert rep["linear_coeff"] == 6.0
    assert rep["constant_coeff"] == -10.0
    assert rep["powersum_coeffs"]["2"] == 8.0


def test_expansion_f_mode_files(tmp_path, capsys):
    code, _, _ = run_cli(
        ["expansion", "--f", "poly:0,0,1", "--alpha", "0.3", "--N", "1000",
         "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "expansion_report.json").read_text())
    assert rep["report"]["m_cutoff"] == 3
    csv_text = (tmp_path / "expansion_terms.csv").read_text()
    assert "j,coefficient,powersum,contribution" in csv_text
    assert (tmp_path / "run_info.txt").exists()


def test_expansion_validation(capsys):
    code, _, err = run_cli(["expansion", "--alpha", "0.5", "--N", "30"], capsys)
    assert code == 2 and "exactly one" in err
    code, _, err = run_cli(
        ["expansion", "--k", "2", "--alpha", "-1", "--N", "30"], capsys)
    assert code == 2


# ----------------------------------------------------------------- simulate


def test_simulate_artifacts(tmp_path, capsys):
    code, _, err = run_cli(
        ["simulate", "--f", "poly:0,1", "--f", "poly:0,0,0,1",
         "--alpha", "0.3", "--n-grid", "100,400", "--replicas", "120",
         "--seed", "7", "--out", str(tmp_path), "--workers", "1"], capsys)
    assert code == 0, err
    samples = (tmp_path / "samples.csv").read_text().splitlines()
    header_idx = samples.index("replica,f_id,N,raw_trace,centered,scaled")
    data = samples[header_idx + 1:]
    assert len(data) == 120 * 2 * 2
    clt = json.loads((tmp_path / "clt_report.json").read_text())
    assert clt["t_scaling"] == pytest.approx(0.6)
    corr = (tmp_path / "correlation.csv").read_text()
    assert "N,f_i,f_j,correlation" in corr
    assert (tmp_path / "run_info.txt").exists()


def test_simulate_reproducible(tmp_path, capsys):
    args = ["simulate", "--f", "poly:0,1", "--alpha", "0.3", "--n-grid", "200",
            "--replicas", "16", "--seed", "3"]
    code, _, err = run_cli(args + ["--out", str(tmp_path / "a")], capsys)
    assert code == 0
    assert "skipping the variance report" in err  # M < 100
    run_cli(args + ["--out", str(tmp_path / "b")], capsys)
    assert ((tmp_path / "a" / "samples.csv").read_text()
            == (tmp_path / "b" / "samples.csv").read_text())


def test_simulate_mixed_case_rejected(tmp_path, capsys):
    code, _, err = run_cli(
        ["simulate", "--f", "poly:0,1", "--f", "poly:0,0,1", "--alpha", "0.2",
         "--n-grid", "100", "--replicas", "8", "--seed", "1",
         "--out", str(tmp_path)], capsys)
    assert code == 2
    assert "mix" in err


def test_simulate_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "f=poly:0,1\nalpha=0.3\nn_grid=100\nreplicas=8\nseed=11\n"
        f"out={tmp_path / 'from_file'}\n"
    )
    code, _, _ = run_cli(["simulate", "--config", str(cfg)], capsys)
    assert code == 0
    assert (tmp_path / "from_file" / "samples.csv").exists()
    # explicit flags win over the file
    code, _, _ = run_cli(
        ["simulate", "--config", str(cfg), "--out", str(tmp_path / "flag_wins")],
        capsys)
    assert code == 0
    assert (tmp_path / "flag_wins" / "samples.csv").exists()


# ------------------------------------------------------------------- accept


def test_accept_subset(tmp_path, capsys):
    code, out, _ = run_cli(["accept", "--only", "1,5", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "[PASS] criterion  1" in out
    payload = json.loads((tmp_path / "acceptance.json").read_text())
    assert [r["cid"] for r in payload["results"]] == [1, 5]


def test_accept_failing_criterion(capsys):
    code, out, _ = run_cli(["accept", "--only", "12"], capsys)
    assert code == 1
    assert "[FAIL] criterion 12" in out
