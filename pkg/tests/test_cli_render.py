import json
import os

import numpy as np
import pytest

from morphoevo.cli import main
from morphoevo.render import heatmap_svg, line_chart_svg, read_aggregate, render_outputs


@pytest.fixture()
def batch_dir(tmp_path):
    out = tmp_path / "batch"
    rc = main(["run", "--preset", "am_no_tidy", "--set", "total_cycles=200",
               "--set", "runs=1", "--set", "snapshot_count=2",
               "--out", str(out)])
    assert rc == 0
    return out


def test_run_writes_artifacts(batch_dir):
    assert sorted(os.listdir(batch_dir)) == [
        "aggregate.csv", "config.json", "metrics.csv", "snapshots"]
    cfg = json.loads((batch_dir / "config.json").read_text())
    assert cfg["total_cycles"] == 200  # overrides echoed into the artifact


def test_exit_codes(tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path / "o")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text('{"preset": "am_tidy", "bogus": 1}')
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 4
    assert main(["run", "--preset", "am_tidy", "--set", "step.num_pivots=9",
                 "--out", str(tmp_path / "o")]) == 5


def test_failed_run_leaves_no_partial_dir(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--preset", "am_tidy", "--set", "step.num_pivots=9",
                 "--out", str(out)]) == 5
    assert not out.exists()


def test_help_lists_presets(capsys):
    with pytest.raises(SystemExit):
        main(["run", "--help"])
    text = capsys.readouterr().out
    for name in ("am_tidy", "alpha067", "edge_partition_k90", "meta_alpha1"):
        assert name in text


def test_env_seed_override(tmp_path, monkeypatch):
    monkeypatch.setenv("MORPHOEVO_SEED", "4242")
    out = tmp_path / "o"
    main(["run", "--preset", "am_tidy", "--set", "total_cycles=10",
          "--out", str(out)])
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["master_seed"] == 4242


def test_oracle_csv(capsys):
    assert main(["oracle", "--max-mn", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "m,n,k,N,p_i,p_j,p_0,oracle_match"
    assert "3,3,4,20,1/4,1/4,1/2,true" in lines
    assert all(line.endswith(",true") for line in lines[1:])


def test_sweep_alpha(tmp_path):
    out = tmp_path / "sweep"
    rc = main(["sweep-alpha", "--preset", "alpha02", "--set", "total_cycles=50",
               "--set", "runs=1", "--values", "0.1,0.5", "--out", str(out)])
    assert rc == 0
    for sub in ("alpha_0.1", "alpha_0.5"):
        cfg = json.loads((out / sub / "config.json").read_text())
        assert cfg["step"]["alpha"] == float(sub.split("_")[1])


def test_render_byte_identical(batch_dir, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["render", str(batch_dir), "--out", str(a)]) == 0
    assert main(["render", str(batch_dir), "--out", str(b)]) == 0
    for name in sorted(os.listdir(a)):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_render_missing_dir(tmp_path):
    assert main(["render", str(tmp_path / "nope")]) == 3


def test_line_chart_contains_ribbon_and_line():
    svg = line_chart_svg(np.array([0, 10, 20]), np.array([1.0, 2.0, 1.5]),
                         np.array([0.5, 1.5, 1.0]), np.array([1.5, 2.5, 2.0]),
                         "demo")
    assert svg.count("<polyline") == 1
    assert svg.count("<polygon") == 1


def test_uniform_heatmap_single_color():
    svg = heatmap_svg(np.zeros((3, 4), dtype=int))
    fills = {part.split('"')[0] for part in svg.split('fill="')[1:]}
    fills.discard("white")
    assert len(fills) == 1


def test_render_outputs_covers_snapshots(batch_dir):
    files = render_outputs(str(batch_dir))
    names = {os.path.basename(f) for f in files}
    assert "mean_theils_u.svg" in names
    assert any(n.startswith("run0_cycle") for n in names)
    series = read_aggregate(os.path.join(batch_dir, "aggregate.csv"))
    assert "mean_cond_entropy" in series
