import csv
import io as stdio
import json

import pytest

from netconc.cli import main


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(stdio.StringIO(text)))


def test_compute_scenario1(data_dir, capsys):
    code, out, err = run(["compute", "--weights", data_dir / "weights_ref.csv",
                          "--network", data_dir / "scenario1.csv", "--p", 12 / 45], capsys)
    assert code == 0, err
    (row,) = rows(out)
    assert row["psi"] == "0.514438"
    assert row["psi_dens"] == "1.92914"
    assert row["hhi"] == "0.1758"
    assert float(row["psi_null"]) == pytest.approx(0.514438 * 45 / 12, rel=1e-5)


def test_compute_all_variants_jsonl(data_dir, capsys):
    code, out, err = run(["compute", "--weights", data_dir / "weights_ref.csv",
                          "--network", data_dir / "scenario1_intensity.csv",
                          "--transformed", data_dir / "scenario1.csv",
                          "--layer", data_dir / "scenario1.csv", "--alpha", 0.6,
                          "--layer", data_dir / "strong_layer.csv", "--alpha", 0.4,
                          "--deg-mode", "exact", "--exact-node-limit", 10, "--format", "jsonl"], capsys)
    assert code == 0, err
    rec = json.loads(out)
    assert rec["psi_transformed"] == pytest.approx(rec["psi"])
    assert 0 < rec["psi_weighted"] < rec["psi"]
    assert rec["psi_deg"] == pytest.approx(1.0)
    assert rec["psi_multilayer"] == pytest.approx(0.6 * rec["psi"] + 0.4 * 0.400 / 0.8242)


def test_compute_exact_degree_mode_node_limit(data_dir, capsys):
    # exact enumeration is capped at nine nodes by default
    code, _, err = run(["compute", "--weights", data_dir / "weights_ref.csv",
                        "--network", data_dir / "scenario1.csv", "--deg-mode", "exact"], capsys)
    assert code != 0 and "limited to 9 nodes" in err


def test_compute_alpha_validation(data_dir, capsys):
    code, _, err = run(["compute", "--weights", data_dir / "weights_ref.csv",
                        "--network", data_dir / "scenario1.csv",
                        "--layer", data_dir / "scenario1.csv", "--alpha", 0.7,
                        "--layer", data_dir / "strong_layer.csv", "--alpha", 0.4], capsys)
    assert code != 0 and "sum" in err


def test_compute_renormalization_notice(tmp_path, capsys):
    (tmp_path / "w.csv").write_text("node,weight\na,0.5\nb,0.499999\n")
    (tmp_path / "e.csv").write_text("source,target\na,b\n")
    code, out, err = run(["compute", "--weights", tmp_path / "w.csv", "--network", tmp_path / "e.csv"], capsys)
    assert code == 0 and "renormalized" in err
    assert rows(out)[0]["psi"] == "1"


def test_compute_negative_weight(tmp_path, capsys):
    (tmp_path / "w.csv").write_text("node,weight\na,0.5\nb,-0.5\nc,1\n")
    (tmp_path / "e.csv").write_text("source,target\na,b\n")
    code, _, err = run(["compute", "--weights", tmp_path / "w.csv", "--network", tmp_path / "e.csv"], capsys)
    assert code != 0 and "w.csv:3" in err and "negative" in err


def test_compute_label_mismatch(tmp_path, capsys):
    (tmp_path / "w.csv").write_text("node,weight\na,0.5\nb,0.5\n")
    (tmp_path / "e.csv").write_text("source,target\na,x\n")
    code, _, err = run(["compute", "--weights", tmp_path / "w.csv", "--network", tmp_path / "e.csv"], capsys)
    assert code != 0 and "x" in err


def test_compute_degenerate_is_zero_with_warning(tmp_path, capsys):
    (tmp_path / "w.csv").write_text("node,weight\na,1\nb,0\nc,0\n")
    (tmp_path / "e.csv").write_text("source,target\na,b\n")
    code, out, err = run(["compute", "--weights", tmp_path / "w.csv", "--network", tmp_path / "e.csv",
                          "--deg-mode", "none"], capsys)
    assert code == 0
    assert rows(out)[0]["psi"] == "0"
    assert "convention" in err


def test_simulate_joint_rows(tmp_path, capsys):
    out = tmp_path / "raw.csv"
    code, _, err = run(["simulate", "--experiment", "joint", "--r", 10, "--seed", 1, "--out", out,
                        "--summary", tmp_path / "s.csv", "--correlations", tmp_path / "c.csv"], capsys)
    assert code == 0, err
    data = rows(out.read_text())
    assert len(data) == 30
    assert {r["scenario"] for r in data} == {"core_periphery", "er_random", "peripheral"}
    assert len(rows((tmp_path / "c.csv").read_text())) == 7


def test_simulate_deterministic_and_thread_free(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["simulate", "--experiment", "fixed", "--r", 3, "--seed", 7, "--out", a], capsys)
    run(["simulate", "--experiment", "fixed", "--r", 3, "--seed", 7, "--out", b, "--threads", 2], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_seed_env_and_flag(tmp_path, capsys, monkeypatch):
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    monkeypatch.setenv("NETCONC_SEED", "5")
    run(["simulate", "--experiment", "fixed", "--r", 2, "--out", a], capsys)
    run(["simulate", "--experiment", "fixed", "--r", 2, "--out", b, "--seed", 5], capsys)
    run(["simulate", "--experiment", "fixed", "--r", 2, "--out", c, "--seed", 6], capsys)
    assert a.read_bytes() == b.read_bytes() != c.read_bytes()


def test_validate_er_default_grid(capsys):
    code, out, err = run(["validate-er", "--r", 300, "--seed", 3], capsys)
    data = rows(out)
    assert len(data) == 19
    assert list(data[0]) == ["p", "mean_psi", "se", "deviation", "within_3se"]
    assert code == (0 if all(r["within_3se"] == "true" for r in data) else 1)


def test_sweep(data_dir, capsys):
    code, out, err = run(["sweep", "--matrix", data_dir / "coefficients.csv",
                          "--weights", data_dir / "weights_sectors.csv", "--thetas", "log:0.01:0.5:8"], capsys)
    assert code == 0, err
    data = rows(out)
    assert len(data) == 8
    nci = [float(r["nci"]) for r in data]
    assert all(b <= a for a, b in zip(nci, nci[1:]))
    assert len({r["hhi"] for r in data}) == 1


def test_mst(data_dir, tmp_path, capsys):
    edges = tmp_path / "tree.csv"
    code, out, err = run(["mst", "--returns", data_dir / "prices.csv", "--prices",
                          "--weights", data_dir / "weights_assets.csv", "--edges-out", edges], capsys)
    assert code == 0, err
    assert len(edges.read_text().strip().splitlines()) == 1 + 5
    (row,) = rows(out)
    assert row["density"] == "0.333333"


def test_rolling(data_dir, capsys):
    code, out, err = run(["rolling", "--returns", data_dir / "prices.csv", "--prices",
                          "--weights", data_dir / "weights_assets.csv",
                          "--window", 120, "--step", 60, "--b", 40, "--seed", 1], capsys)
    assert code == 0, err
    data = rows(out)
    # 300 prices, 2 rows dropped, 297 returns: starts 0, 60, 120
    assert len(data) == 3
    assert all(float(r["ci_low"]) <= float(r["ci_high"]) for r in data)


def test_rolling_window_too_long(data_dir, capsys):
    code, _, err = run(["rolling", "--returns", data_dir / "prices.csv", "--prices",
                        "--weights", data_dir / "weights_assets.csv", "--window", 1000], capsys)
    assert code != 0
    assert "1000" in err and "297" in err


def test_rolling_transformation(data_dir, capsys):
    code, out, err = run(["rolling", "--returns", data_dir / "prices.csv", "--prices",
                          "--weights", data_dir / "weights_assets.csv", "--transformation", "absolute",
                          "--window", 297, "--b", 20], capsys)
    assert code == 0, err
    assert len(rows(out)) == 1


def test_bad_arguments(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--matrix", "x", "--weights", "y", "--thetas", "log:1:0.1:3"])
    assert exc.value.code != 0
