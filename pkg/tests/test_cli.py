import json

import pytest

from cogrelay import NumericError, hop_ber, outage_exact, qam_constants
from cogrelay.cli import main


def _write_config(tmp_path, name="config.json", **fields):
    payload = {"hop_count": 3, "ip_over_n0_db": 15.0, "gamma_th": 1.0}
    payload.update(fields)
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _rows(csv_text):
    lines = [l for l in csv_text.splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_analyze_sweep_shape_and_monotonicity(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main([
        "analyze", "--config", cfg, "--sweep", "ip_over_n0_db=0:30:1",
        "--outputs", "op_exact,op_asymptotic", "--no-timestamp",
    ]) == 0
    header, rows = _rows(capsys.readouterr().out)
    assert header == ["ip_over_n0_db", "op_exact", "op_asymptotic"]
    assert len(rows) == 31
    ops = [float(r["op_exact"]) for r in rows]
    assert all(a > b for a, b in zip(ops, ops[1:]))
    for r in rows:
        assert float(r["op_exact"]) <= float(r["op_asymptotic"]) + 1e-15


def test_analyze_single_hop_matches_direct_formulas(tmp_path, capsys):
    cfg = _write_config(tmp_path, hop_count=1, ip_over_n0_db=10.0)
    assert main([
        "analyze", "--config", cfg, "--outputs", "op_exact,ber_exact",
        "--no-timestamp",
    ]) == 0
    _, rows = _rows(capsys.readouterr().out)
    alpha = 0.060025 * 10.0
    assert float(rows[0]["op_exact"]) == pytest.approx(
        outage_exact([alpha], 1.0), rel=1e-10
    )
    assert float(rows[0]["ber_exact"]) == pytest.approx(
        hop_ber(alpha, qam_constants(4)), rel=1e-10
    )


def test_analyze_hop_count_list_sweep(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main([
        "analyze", "--config", cfg, "--sweep", "hop_count=1,2,3,5",
        "--outputs", "op_exact", "--no-timestamp",
    ]) == 0
    _, rows = _rows(capsys.readouterr().out)
    assert [r["hop_count"] for r in rows] == ["1", "2", "3", "5"]


def test_analyze_eta_and_pu_sweeps(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main([
        "analyze", "--config", cfg, "--sweep", "eta=2:6:2",
        "--outputs", "op_exact", "--no-timestamp",
    ]) == 0
    _, rows = _rows(capsys.readouterr().out)
    assert [r["eta"] for r in rows] == ["2", "4", "6"]
    assert main([
        "analyze", "--config", cfg, "--sweep", "pu_y=0.35:0.7:0.35",
        "--outputs", "capacity", "--no-timestamp",
    ]) == 0
    _, rows = _rows(capsys.readouterr().out)
    # a more distant primary receiver always helps
    assert float(rows[1]["capacity"]) > float(rows[0]["capacity"])


def test_analyze_mc_columns(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main([
        "analyze", "--config", cfg, "--outputs", "op_exact,mc_op",
        "--trials", "20000", "--seed", "5", "--no-timestamp",
    ]) == 0
    header, rows = _rows(capsys.readouterr().out)
    assert header == ["ip_over_n0_db", "op_exact", "mc_op", "mc_op_std_error", "trials"]
    assert rows[0]["trials"] == "20000"


def test_optimize_two_hops(tmp_path, capsys):
    cfg = _write_config(tmp_path, hop_count=2, ip_over_n0_db=20.0)
    assert main(["optimize", "--config", cfg, "--no-timestamp"]) == 0
    out = capsys.readouterr().out
    header, rows = _rows(out)
    assert header == ["hop", "d_data", "d_interference", "ratio"]
    assert float(rows[0]["d_data"]) == pytest.approx(0.5509, abs=5e-4)
    assert float(rows[1]["d_data"]) == pytest.approx(0.4491, abs=5e-4)
    meta = {
        line.split(":")[0][2:]: line.partition(":")[2].strip()
        for line in out.splitlines() if line.startswith("#") and ":" in line
    }
    assert "objective_gap" in meta
    assert float(meta["objective_gap"]) >= -1e-9
    assert "op_min" in meta and "ber_min" in meta


def test_optimize_single_hop_zero_gap(tmp_path, capsys):
    cfg = _write_config(tmp_path, hop_count=1)
    assert main(["optimize", "--config", cfg, "--no-timestamp"]) == 0
    out = capsys.readouterr().out
    _, rows = _rows(out)
    assert float(rows[0]["d_data"]) == 1.0
    gap = [l for l in out.splitlines() if l.startswith("# objective_gap")][0]
    assert abs(float(gap.split(":")[1])) <= 1e-9


def test_profiles_optimized_beats_uniform(tmp_path, capsys):
    cfg = _write_config(tmp_path, hop_count=2, ip_over_n0_db=20.0)
    assert main([
        "profiles", "--config", cfg, "--profiles", "uniform,optimized",
        "--no-timestamp",
    ]) == 0
    _, rows = _rows(capsys.readouterr().out)
    by_profile = {r["profile"]: float(r["op_exact"]) for r in rows}
    assert by_profile["optimized"] < by_profile["uniform"]


def test_profiles_accepts_explicit_table_distances(tmp_path, capsys):
    cfg = _write_config(
        tmp_path, hop_count=4,
        profiles=[{
            "name": "published",
            "distances": [0.1915, 0.1900, 0.2492, 0.3693],
        }],
    )
    assert main([
        "profiles", "--config", cfg, "--profiles", "published", "--no-timestamp",
    ]) == 0
    _, rows = _rows(capsys.readouterr().out)
    assert rows[0]["profile"] == "published"
    assert 0.0 < float(rows[0]["op_exact"]) < 1.0


def test_profiles_rejects_bad_distance_sum(tmp_path, capsys):
    cfg = _write_config(
        tmp_path, hop_count=2,
        profiles=[{"name": "broken", "distances": [0.1767, 0.8333]}],
    )
    assert main([
        "profiles", "--config", cfg, "--profiles", "broken", "--no-timestamp",
    ]) == 1


def test_profiles_random_reproducible(tmp_path, capsys):
    cfg = _write_config(tmp_path, hop_count=3)
    argv = ["profiles", "--config", cfg, "--profiles", "random",
            "--seed", "17", "--no-timestamp"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_mc_byte_identical_across_runs_and_chunks(tmp_path):
    cfg = _write_config(tmp_path)
    outputs = []
    for i, chunks in enumerate((1, 1, 4, 16)):
        path = tmp_path / f"mc{i}.csv"
        assert main([
            "mc", "--config", cfg, "--trials", "100000", "--seed", "42",
            "--chunks", str(chunks), "--out", str(path), "--no-timestamp",
        ]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2] == outputs[3]


def test_mc_output_contents(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main([
        "mc", "--config", cfg, "--trials", "5000", "--seed", "1",
        "--no-timestamp",
    ]) == 0
    out = capsys.readouterr().out
    header, rows = _rows(out)
    assert header == ["metric", "value", "std_error", "trials", "seed"]
    assert [r["metric"] for r in rows] == ["mc_op", "mc_ber", "mc_capacity"]
    assert "# seed: 1" in out and "# trials: 5000" in out


def test_exit_codes(tmp_path, capsys, monkeypatch):
    cfg = _write_config(tmp_path)
    assert main(["mc", "--config", cfg, "--trials", "0"]) == 1
    assert main(["analyze", "--config", str(tmp_path / "missing.json")]) == 1
    assert main(["analyze", "--config", cfg, "--sweep", "nonsense=0:1:1"]) == 1
    assert main(["analyze", "--config", cfg, "--bogus-flag"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["analyze", "--config", str(bad)]) == 1

    def explode(*args, **kwargs):
        raise NumericError("synthetic failure")

    monkeypatch.setattr("cogrelay.cli.solve_equal_ratio", explode)
    assert main(["optimize", "--config", cfg]) == 2
    capsys.readouterr()
