import json

import numpy as np
import pytest

from morphoevo.cellfill import StepConfig
from morphoevo.errors import ConfigError, SchemaError
from morphoevo.lexicon import Lexicon
from morphoevo.runner import (HaltingSpec, LexiconSpec, PRESET_NAMES,
                              SimulationConfig, aggregate_records,
                              config_from_dict, config_to_dict,
                              is_absorbing_state, preset_experiment,
                              run_batch, run_simulation, with_overrides,
                              write_batch_outputs)
from morphoevo.sampling import SamplePlan


def small_cfg(**kw):
    base = dict(
        lexicon=LexiconSpec(num_lexemes=20, num_cells=4, inventory_sizes=3),
        step=StepConfig(plan=SamplePlan(evidence_fraction=0.5)),
        total_cycles=400, runs=3, master_seed=5)
    base.update(kw)
    return SimulationConfig(**base)


def test_run_record_shape():
    cfg = small_cfg(metric_interval=100, snapshot_count=4)
    rec = run_simulation(cfg, 0)
    cycles = [fr.cycle for fr in rec.frames]
    assert cycles == [0, 100, 200, 300, 400]
    assert [c for c, _ in rec.snapshots] == [0, 133, 266, 400]
    assert rec.final_cycle == 400
    assert rec.changed_cycles + rec.unchanged_cycles == 400


def test_run_deterministic():
    cfg = small_cfg()
    a = run_simulation(cfg, 1)
    b = run_simulation(cfg, 1)
    assert all((x == y).all() for (_, x), (_, y) in zip(a.snapshots, b.snapshots))
    assert [f.csv_row(1) for f in a.frames] == [f.csv_row(1) for f in b.frames]


def test_runs_bound_to_run_id_not_schedule():
    cfg = small_cfg()
    solo = run_simulation(cfg, 2)
    _, records = run_batch(cfg)
    assert (records[2].snapshots[-1][1] == solo.snapshots[-1][1]).all()


def test_shared_lexicon_policy():
    cfg = small_cfg(lexicon=LexiconSpec(num_lexemes=20, num_cells=4,
                                        inventory_sizes=3, init="shared"))
    _, records = run_batch(cfg)
    starts = [rec.snapshots[0][1] for rec in records]
    assert all((s == starts[0]).all() for s in starts)


def test_unchanged_streak_halts_on_uniform_start():
    cfg = small_cfg(
        lexicon=LexiconSpec(num_lexemes=10, num_cells=3, inventory_sizes=1),
        step=StepConfig(), total_cycles=5000,
        halting=HaltingSpec(mode="unchanged_streak", streak=25))
    rec = run_simulation(cfg, 0)
    assert rec.halted_early and rec.final_cycle == 25
    assert rec.frames[-1].class_count == 1


def test_uniform_state_is_absorbing():
    grid = np.full((30, 5), 2, dtype=np.int64)
    assert is_absorbing_state(grid)
    # two classes disagreeing everywhere, balanced sizes: every vote is won
    # strictly by the incumbent's own class
    two = np.array([[0, 0, 0, 0, 0]] * 10 + [[1, 1, 1, 1, 1]] * 10)
    assert is_absorbing_state(two)
    # a 1-lexeme splinter of a shared-pivot class is not stable
    frag = np.array([[0, 0, 0, 0, 0]] * 10 + [[0, 1, 1, 1, 1]])
    assert not is_absorbing_state(frag)


def test_aggregate_band_contains_mean():
    cfg = small_cfg(runs=5)
    agg, _ = run_batch(cfg)
    for rows in agg.series.values():
        for cycle, mean, p5, p95 in rows:
            assert p5 - 1e-9 <= mean <= p95 + 1e-9


def test_turnover_uses_gap_and_zeroes_at_fixed_point():
    cfg = small_cfg(
        lexicon=LexiconSpec(num_lexemes=10, num_cells=3, inventory_sizes=1),
        total_cycles=300, metric_interval=50)
    rec = run_simulation(cfg, 0)
    assert rec.frames[0].turnover is None
    assert all(fr.turnover == 0 for fr in rec.frames[1:] if fr.turnover is not None)


def test_class_count_one_is_terminal():
    cfg = small_cfg(total_cycles=3000, metric_interval=50,
                    lexicon=LexiconSpec(num_lexemes=15, num_cells=3, inventory_sizes=2))
    for rid in range(3):
        rec = run_simulation(cfg, rid)
        counts = [fr.class_count for fr in rec.frames]
        if 1 in counts:
            first = counts.index(1)
            assert all(c == 1 for c in counts[first:])


def test_preset_names_complete():
    expected = {
        "am_tidy", "am_no_tidy", "esher", "sample50", "sample20",
        "pivots2_20pc", "pivots4_20pc", "zipf_cells", "zipf_lexemes",
        "alpha01", "alpha02", "alpha05", "alpha067", "alpha075",
        "meta_alpha025", "meta_alpha05", "meta_alpha1",
        "edge_partition_k20", "edge_partition_k40", "edge_partition_k60",
        "edge_partition_k80", "edge_partition_k90",
    }
    assert expected <= set(PRESET_NAMES)
    with pytest.raises(ConfigError):
        preset_experiment("nope")


def test_preset_alpha05_settings():
    cfg = preset_experiment("alpha05")
    assert cfg.step.alpha == 0.5
    assert cfg.step.plan.num_pivots == 4
    assert cfg.step.plan.evidence_fraction == 0.2
    assert cfg.total_cycles == 50_000 and cfg.runs == 20


def test_preset_am_tidy_settings():
    cfg = preset_experiment("am_tidy")
    assert cfg.step.tidy_up and cfg.step.alpha == 0
    assert cfg.step.plan.evidence_fraction == 1.0
    assert cfg.total_cycles == 2500 and cfg.runs == 100


def test_config_round_trip():
    cfg = preset_experiment("zipf_cells")
    data = config_to_dict(cfg)
    back = config_from_dict(json.loads(json.dumps(data)))
    assert config_to_dict(back) == data


def test_config_unknown_keys_rejected():
    with pytest.raises(SchemaError):
        config_from_dict({"preset": "am_tidy", "bogus": 1})
    with pytest.raises(SchemaError):
        config_from_dict({"step": {"alpa": 0.5}})


def test_config_preset_override():
    cfg = config_from_dict({"preset": "am_no_tidy", "step": {"alpha": 0.5}})
    ref = preset_experiment("am_no_tidy")
    assert cfg.step.alpha == 0.5
    assert cfg.total_cycles == ref.total_cycles
    assert cfg.master_seed == ref.master_seed


def test_write_batch_outputs(tmp_path):
    cfg = small_cfg(runs=2, snapshot_count=2)
    agg, records = run_batch(cfg)
    write_batch_outputs(tmp_path, cfg, agg, records)
    assert (tmp_path / "config.json").exists()
    header = (tmp_path / "metrics.csv").read_text().splitlines()[0]
    assert header == ("run_id,cycle,mean_cond_entropy,mean_theils_u,classes,"
                      "mean_exponents_per_cell,turnover,largest_class,"
                      "second_class,zones")
    assert (tmp_path / "aggregate.csv").read_text().splitlines()[0] == \
        "cycle,metric,mean,p5,p95"
    snaps = sorted(p.name for p in (tmp_path / "snapshots").iterdir())
    assert "run0_cycle0.csv" in snaps and "run1_cycle400.csv" in snaps


def test_with_overrides():
    cfg = preset_experiment("am_tidy")
    assert with_overrides(cfg, total_cycles=10).total_cycles == 10


def test_absorbing_halting_guard():
    cfg = small_cfg(step=StepConfig(alpha=0.5, plan=SamplePlan(evidence_fraction=0.2)),
                    halting=HaltingSpec(mode="absorbing_state"))
    with pytest.raises(ConfigError):
        run_simulation(cfg, 0)
