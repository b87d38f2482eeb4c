import json

import numpy as np
import pytest

from tiltedbh import SweepConfig, run_chaos_map, run_cut, validate_and_echo_config
from tiltedbh.sweep import (
    ConfigError,
    RESULT_COLUMNS,
    cached_diagonalize,
    exit_code_for,
)
from tiltedbh import FockBasis, ModelParams, build, diagonalize, mean_gap_ratio


BASE = {
    "system_sizes": [[3, 3]],
    "u_values": [0.5],
    "d_values": [0.5, 2.0],
    "diagnostics": ["gap_ratio"],
    "seed": 5,
}


def _config(**overrides):
    raw = dict(BASE)
    raw.update(overrides)
    return SweepConfig.from_dict(raw)


def test_defaults_are_filled():
    config = _config()
    assert config.workers == 1
    assert config.edge_discard == 0.1
    assert config.survival_sample_count == 200
    assert config.hole_window == [20.0, 1000.0]


def test_validation_errors_carry_field_paths():
    with pytest.raises(ConfigError, match="u_values"):
        _config(u_values=[0.5, -1.0])
    with pytest.raises(ConfigError, match="diagnostics"):
        _config(diagnostics=["spin"])
    with pytest.raises(ConfigError, match="diagnostics"):
        _config(diagnostics=[])
    with pytest.raises(ConfigError, match="system_sizes"):
        _config(system_sizes=[[0, 3]])
    with pytest.raises(ConfigError, match="unknown"):
        _config(banana=3)
    with pytest.raises(ConfigError, match="smoothing_window"):
        _config(smoothing_window=4)
    with pytest.raises(ConfigError, match="required"):
        SweepConfig.from_dict({"system_sizes": [[3, 3]]})


def test_energies_normalized_to_unit_hopping():
    config = _config(j=2.0, u_values=[1.0], d_values=[4.0], reference_u=1.0,
                     reference_d=1.6)
    assert config.j == 1.0
    assert config.u_values == [0.5]
    assert config.d_values == [2.0]
    assert config.reference_u == pytest.approx(0.5)
    assert config.reference_d == pytest.approx(0.8)


def test_echoed_config_revalidates_to_itself(tmp_path):
    cfg_file = tmp_path / "config.json"
    cfg_file.write_text(json.dumps(BASE))
    config = validate_and_echo_config(cfg_file, tmp_path / "out")
    echoed = tmp_path / "out" / "config_normalized.json"
    assert echoed.exists()
    again = SweepConfig.from_dict({
        k: v for k, v in json.loads(echoed.read_text()).items()
        if k not in ("config_hash", "version")
    })
    assert again == config
    assert again.config_hash == config.config_hash


def test_chaos_map_records_and_determinism(tmp_path):
    config = _config()
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    records = run_chaos_map(config, out1)
    assert len(records) == 2
    assert all(r["status"] == "ok" for r in records)
    for rec in records:
        assert rec["chaos_distance"] == pytest.approx(abs(rec["mean_r"] - 0.535))
        assert rec["dim"] == 10
    run_chaos_map(config, out2)
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()
    lines = (out1 / "results.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert lines[3].split(",")[0] == "n_bosons"
    assert lines[4].split(",")[0] == "3"  # sorted records follow the header


def test_resume_skips_completed_points(tmp_path):
    config = _config()
    out = tmp_path / "sweep"
    run_chaos_map(config, out)
    journal = (out / "records.jsonl").read_text().splitlines()
    # poison one journaled value; a resumed run must keep it untouched
    entry = json.loads(journal[0])
    entry["record"]["mean_r"] = 123.0
    (out / "records.jsonl").write_text(
        "\n".join([json.dumps(entry, sort_keys=True)] + journal[1:]) + "\n")
    records = run_chaos_map(config, out, resume=True)
    poisoned = [r for r in records if r["mean_r"] == 123.0]
    assert len(poisoned) == 1
    # without resume the point is recomputed
    records = run_chaos_map(config, out)
    assert not [r for r in records if r["mean_r"] == 123.0]


def test_single_point_cut_agrees_with_chaos_map(tmp_path):
    config = _config(d_values=[0.5])
    map_records = run_chaos_map(config, tmp_path / "map")
    cut_records = run_cut(config, tmp_path / "cut")
    assert map_records[0]["mean_r"] == cut_records[0]["mean_r"]


def test_cut_with_dynamics_and_artifacts(tmp_path):
    config = _config(
        system_sizes=[[4, 4]],
        u_values=[0.5],
        d_values=[0.5],
        diagnostics=["gap_ratio", "pr", "entropy", "imbalance", "survival",
                     "entropy_dynamics", "imbalance_dynamics"],
        survival_sample_count=6,
        entropy_sample_count=4,
        time_points=60,
        time_points_observables=40,
        hole_window=[5.0, 500.0],
        save_traces=True,
        save_eigenstate_profiles=True,
    )
    records = run_cut(config, tmp_path / "out")
    rec = records[0]
    assert rec["status"] == "ok"
    for column in ("mean_r", "pr_central_over_goe", "entropy_central_over_page",
                   "imbalance_central", "ipr", "sp_min", "hole_depth",
                   "hole_depth_over_goe", "entropy_relaxation",
                   "entropy_relaxation_over_page", "imbalance_relaxation"):
        assert isinstance(rec[column], float), column
    assert rec["u_over_nj"] == pytest.approx(0.5 / 4)
    assert rec["d_over_j"] == pytest.approx(0.5)
    stem = "4x4_u0.5_d0.5"
    for name in (f"traces/survival_{stem}.csv", f"traces/survival_{stem}.json",
                 f"traces/entropy_{stem}.csv", f"traces/imbalance_{stem}.csv",
                 f"eigenstates/{stem}.csv"):
        assert (tmp_path / "out" / name).exists(), name
    sidecar = json.loads((tmp_path / "out" / f"traces/survival_{stem}.json")
                         .read_text())
    assert sidecar["n_states"] == 6
    assert "hole_depth" in sidecar and "config_hash" in sidecar
    assert sidecar["protocol"]["rng_seed"] == 5


def test_dimension_limit_points_are_skipped(tmp_path):
    config = _config(system_sizes=[[3, 3], [10, 10]],
                     diagnostics=["gap_ratio", "pr"],
                     u_values=[0.5], d_values=[0.5])
    records = run_cut(config, tmp_path / "out")
    by_size = {r["n_bosons"]: r for r in records}
    assert by_size[3]["status"] == "ok"
    assert by_size[10]["status"] == "skipped_dimension"
    assert exit_code_for(records) == 3


def test_failed_points_are_recorded_not_raised(tmp_path):
    config = _config()
    config.u_values = [-1.0]  # bypasses from_dict validation on purpose
    records = run_chaos_map(config, tmp_path / "out")
    assert records[0]["status"] == "error"
    assert "ValueError" in records[0]["error"]
    assert exit_code_for(records) == 2
    assert exit_code_for([{"status": "ok"}]) == 0


def test_parallel_workers_reproduce_serial_results(tmp_path):
    serial = _config(d_values=[0.4, 0.9, 1.7])
    parallel = _config(d_values=[0.4, 0.9, 1.7], workers=2)
    run_chaos_map(serial, tmp_path / "serial")
    run_chaos_map(parallel, tmp_path / "parallel")
    a = (tmp_path / "serial" / "results.csv").read_text().splitlines()
    b = (tmp_path / "parallel" / "results.csv").read_text().splitlines()
    assert a[1:] == b[1:]  # identical rows; header hash differs with workers


def test_eigendata_cache_roundtrip(tmp_path):
    basis = FockBasis(3, 3)
    params = ModelParams(u=0.7, d=0.3)
    direct = diagonalize(build(basis, params))
    first = cached_diagonalize(basis, params, True, cache_dir=tmp_path)
    assert (tmp_path / "eig_3x3_u0.7_d0.3_vec.npz").exists()
    second = cached_diagonalize(basis, params, True, cache_dir=tmp_path)
    assert np.array_equal(first.eigenvalues, second.eigenvalues)
    assert np.array_equal(first.eigenvectors, second.eigenvectors)
    assert np.allclose(direct.eigenvalues, second.eigenvalues)
    stats_direct = mean_gap_ratio(direct.eigenvalues)
    stats_cached = mean_gap_ratio(second.eigenvalues)
    assert stats_direct == stats_cached
