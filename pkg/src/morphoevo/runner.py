"""Simulation orchestration: single runs, batches, presets, aggregation.

Seeding: run ``i`` of a batch draws from
``np.random.default_rng(np.random.SeedSequence([master_seed, i]))``, so
batches are reproducible under any execution order. With the default
``init="per_run"`` policy the initial lexicon is drawn from the run's own
stream; ``init="shared"`` builds one lexicon from
``SeedSequence([master_seed, 2**33])`` and reuses it for every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .cellfill import ChangeRecord, StepConfig, StepContext, esher_step, meta_step, rhizo_step
from .errors import ConfigError, SchemaError
from .lexicon import Lexicon, init_random_lexicon, lexicon_to_csv
from .metrics import MetricsFrame, class_turnover, metrics_frame, pattern_view
from .sampling import SamplePlan, ZipfSpec

_SHARED_LEXICON_KEY = 2 ** 33  # seed-space namespace far above any run_id

HALTING_MODES = ("fixed_cycles", "unchanged_streak", "absorbing_state")


@dataclass
class LexiconSpec:
    num_lexemes: int = 100
    num_cells: int = 8
    inventory_sizes: int | list[int] = 5
    init: str = "per_run"  # or "shared"

    def __post_init__(self):
        if self.init not in ("per_run", "shared"):
            raise ConfigError("lexicon init policy must be 'per_run' or 'shared'")


@dataclass
class HaltingSpec:
    mode: str = "fixed_cycles"
    streak: int = 25  # for unchanged_streak

    def __post_init__(self):
        if self.mode not in HALTING_MODES:
            raise ConfigError(f"unknown halting mode {self.mode!r}")
        if self.streak < 1:
            raise ConfigError("halting streak must be >= 1")


@dataclass
class SimulationConfig:
    lexicon: LexiconSpec = field(default_factory=LexiconSpec)
    step: StepConfig = field(default_factory=StepConfig)
    total_cycles: int = 10_000
    halting: HaltingSpec = field(default_factory=HaltingSpec)
    metric_interval: Optional[int] = None  # None -> max(1, total_cycles // 500)
    snapshot_count: int = 8
    runs: int = 100
    master_seed: int = 0

    def __post_init__(self):
        if self.total_cycles < 1:
            raise ConfigError("total_cycles must be >= 1")
        if self.metric_interval is not None and self.metric_interval < 1:
            raise ConfigError("metric_interval must be >= 1")
        if self.snapshot_count < 2:
            raise ConfigError("snapshot_count must be >= 2 (first and last)")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")

    @property
    def effective_metric_interval(self) -> int:
        if self.metric_interval is not None:
            return self.metric_interval
        return max(1, self.total_cycles // 500)

    @property
    def turnover_gap(self) -> int:
        return max(1, self.total_cycles // 100)


@dataclass
class RunRecord:
    run_id: int
    frames: list[MetricsFrame]
    snapshots: list[tuple[int, np.ndarray]]
    final_cycle: int
    changed_cycles: int
    unchanged_cycles: int
    halted_early: bool = False
    absorbed: bool = False
    majority_cycle: Optional[int] = None  # first cycle the top class holds >= half the lexemes


@dataclass
class BatchAggregate:
    """Per-cycle mean and 5th/95th percentile of each metric across runs."""

    # metric name -> list of (cycle, mean, p5, p95)
    series: dict[str, list[tuple[int, float, float, float]]]


_AGG_METRICS = (
    "mean_cond_entropy", "mean_theils_u", "class_count",
    "mean_exponents_per_cell", "largest_class", "second_class", "zone_count",
)


def _initial_lexicon(cfg: SimulationConfig, rng) -> Lexicon:
    spec = cfg.lexicon
    if spec.init == "shared":
        rng = np.random.default_rng(
            np.random.SeedSequence([cfg.master_seed, _SHARED_LEXICON_KEY]))
    return init_random_lexicon(spec.num_lexemes, spec.num_cells, spec.inventory_sizes, rng)


def _snapshot_cycles(total: int, count: int) -> list[int]:
    return [t * total // (count - 1) for t in range(count)]


def _check_absorbing_support(cfg: SimulationConfig) -> None:
    s = cfg.step
    if (s.orientation != "rhizomorphome" or s.alpha != 0 or s.tidy_up
            or s.plan.evidence_fraction != 1 or s.plan.num_pivots != 1
            or s.plan.lexeme_zipf.enabled or s.plan.cell_zipf.enabled):
        raise ConfigError(
            "absorbing_state halting is implemented for the exhaustive-evidence, "
            "single-pivot, uniform, attraction-only rhizomorphome step only")


def is_absorbing_state(grid: np.ndarray) -> bool:
    """Fixed-point test for the exhaustive-evidence single-pivot
    attraction-only step: no (focal lexeme, focal cell, pivot) choice can
    ever produce a change, not even through a tie-break.

    Works at the level of distinct classes: for class a at pivot p, the
    evidence weight of class b is its size (minus one for a itself, since
    the focal lexeme is excluded) when the classes agree at p. The state is
    absorbing iff for every (a, c, p) the incumbent exponent is the strict
    vote winner, or there is no evidence at all.
    """
    classes, counts = np.unique(grid, axis=0, return_counts=True)
    k, num_cells = classes.shape
    if k == 1:
        return True
    counts = counts.astype(float)
    idx = np.arange(k)
    n_exp = int(grid.max()) + 1
    onehot = [None] * num_cells
    for c in range(num_cells):
        e = np.zeros((k, n_exp))
        e[idx, classes[:, c]] = 1.0
        onehot[c] = e
    for p in range(num_cells):
        match = classes[:, p][:, None] == classes[:, p][None, :]
        weights = match * counts[None, :]
        weights[idx, idx] -= 1.0
        total_evidence = weights.sum(axis=1)
        for c in range(num_cells):
            if c == p:
                continue
            scores = weights @ onehot[c]
            row_max = scores.max(axis=1)
            incumbent = scores[idx, classes[:, c]]
            unique = (scores == row_max[:, None]).sum(axis=1) == 1
            ok = (total_evidence == 0) | ((incumbent == row_max) & unique)
            if not ok.all():
                return False
    return True


def _step_function(cfg: StepConfig):
    if cfg.orientation == "rhizomorphome":
        return rhizo_step
    if cfg.esher_mode:
        return lambda lex, c, rng, ctx, cycle: esher_step(lex, rng, cycle=cycle)
    return meta_step


def run_simulation(cfg: SimulationConfig, run_id: int) -> RunRecord:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.master_seed, run_id]))
    lex = _initial_lexicon(cfg, rng)
    step_cfg = cfg.step
    if cfg.halting.mode == "absorbing_state":
        _check_absorbing_support(cfg)
    step = _step_function(step_cfg)
    ctx = StepContext(step_cfg)

    total = cfg.total_cycles
    interval = cfg.effective_metric_interval
    gap = cfg.turnover_gap
    snap_due = set(_snapshot_cycles(total, cfg.snapshot_count))

    frames: list[MetricsFrame] = []
    class_sets: list[tuple[int, frozenset]] = []  # frame-time class sets for turnover
    snapshots: list[tuple[int, np.ndarray]] = []

    # allomorph indices are lexeme-local under the metamorphome reading, so
    # measure the relabeled pattern grid there; dynamics stay on raw values
    measure_patterns = step_cfg.orientation == "metamorphome"

    def record_frame(cycle: int):
        measured = pattern_view(lex) if measure_patterns else lex
        current = frozenset(row.tobytes() for row in measured.grid)
        turnover = None
        for past_cycle, past_set in reversed(class_sets):
            if past_cycle <= cycle - gap:
                turnover = class_turnover(past_set, current)
                break
        class_sets.append((cycle, current))
        frames.append(metrics_frame(measured, cycle, turnover=turnover))

    record_frame(0)
    snapshots.append((0, lex.grid.copy()))
    snap_due.discard(0)

    # incremental class-size tracking (row-identity counter); only feasible
    # without tidying-up, which is also the only case that needs it
    track_sizes = not step_cfg.tidy_up
    counter: dict[bytes, int] = {}
    if track_sizes:
        for row in lex.grid:
            key = row.tobytes()
            counter[key] = counter.get(key, 0) + 1
    majority = math.ceil(lex.num_lexemes / 2)
    majority_cycle = None

    changed_cycles = 0
    streak = 0
    absorb_check_at = cfg.halting.streak
    absorbed = False
    halted_at = None

    for cycle in range(1, total + 1):
        rec: ChangeRecord = step(lex, step_cfg, rng, ctx, cycle)
        if rec.changed:
            changed_cycles += 1
            streak = 0
            if track_sizes:
                row = lex.grid[rec.focal_lexeme]
                new_key = row.tobytes()
                old_row = row.copy()
                old_row[rec.focal_cell] = rec.old_exponent
                old_key = old_row.tobytes()
                counter[old_key] -= 1
                if not counter[old_key]:
                    del counter[old_key]
                new_count = counter.get(new_key, 0) + 1
                counter[new_key] = new_count
                if majority_cycle is None and new_count >= majority:
                    majority_cycle = cycle
        else:
            streak += 1

        if cycle % interval == 0 or cycle == total:
            record_frame(cycle)
        if cycle in snap_due:
            snapshots.append((cycle, lex.grid.copy()))
            snap_due.discard(cycle)

        mode = cfg.halting.mode
        if mode == "unchanged_streak" and streak >= cfg.halting.streak:
            halted_at = cycle
            break
        if mode == "absorbing_state" and streak >= absorb_check_at:
            if is_absorbing_state(lex.grid):
                absorbed = True
                halted_at = cycle
                break
            absorb_check_at = min(absorb_check_at * 2, 4096) + streak

    final_cycle = halted_at if halted_at is not None else total
    if frames[-1].cycle != final_cycle:
        record_frame(final_cycle)
    if snapshots[-1][0] != final_cycle:
        snapshots.append((final_cycle, lex.grid.copy()))

    return RunRecord(
        run_id=run_id,
        frames=frames,
        snapshots=snapshots,
        final_cycle=final_cycle,
        changed_cycles=changed_cycles,
        unchanged_cycles=final_cycle - changed_cycles,
        halted_early=halted_at is not None,
        absorbed=absorbed,
        majority_cycle=majority_cycle,
    )


def aggregate_records(records: list[RunRecord]) -> BatchAggregate:
    """Deterministic reduction keyed by (metric, cycle); runs that halted
    before a cycle simply drop out of that cycle's statistics."""
    by_cycle: dict[int, list[MetricsFrame]] = {}
    for rec in records:
        for fr in rec.frames:
            by_cycle.setdefault(fr.cycle, []).append(fr)
    series = {m: [] for m in _AGG_METRICS}
    for cycle in sorted(by_cycle):
        group = by_cycle[cycle]
        for m in _AGG_METRICS:
            vals = np.array([getattr(fr, m) for fr in group], dtype=float)
            series[m].append((cycle, float(vals.mean()),
                              float(np.percentile(vals, 5)),
                              float(np.percentile(vals, 95))))
    return BatchAggregate(series=series)


def run_batch(cfg: SimulationConfig, processes: int = 1):
    """All runs of a config. Returns (BatchAggregate, [RunRecord])."""
    if processes > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=processes) as pool:
            records = list(pool.map(_run_star, [(cfg, i) for i in range(cfg.runs)]))
    else:
        records = [run_simulation(cfg, i) for i in range(cfg.runs)]
    return aggregate_records(records), records


def _run_star(args):
    return run_simulation(*args)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _rhizo(alpha=0.0, pivots=1, fraction=1.0, tidy=False,
           lexeme_zipf=None, cell_zipf=None) -> StepConfig:
    return StepConfig(
        orientation="rhizomorphome", alpha=alpha, tidy_up=tidy,
        plan=SamplePlan(
            evidence_fraction=fraction, num_pivots=pivots,
            lexeme_zipf=lexeme_zipf or ZipfSpec(),
            cell_zipf=cell_zipf or ZipfSpec()))


def _meta(alpha, pivot_lexemes=10, evidence_cells=6) -> StepConfig:
    # evidence cells are sampled as a fraction of the 7 non-focal cells
    return StepConfig(
        orientation="metamorphome", alpha=alpha,
        plan=SamplePlan(evidence_fraction=evidence_cells / 7,
                        num_pivots=pivot_lexemes))


def _edge(n_exponents: int) -> SimulationConfig:
    return SimulationConfig(
        lexicon=LexiconSpec(inventory_sizes=n_exponents),
        step=_rhizo(),
        total_cycles=40_000,
        halting=HaltingSpec(mode="absorbing_state"),
        runs=500,
        master_seed=600 + n_exponents,
    )


def _build_presets() -> dict[str, SimulationConfig]:
    zipf = ZipfSpec(enabled=True, s=1.0)
    presets = {
        "am_tidy": SimulationConfig(
            step=_rhizo(tidy=True), total_cycles=2_500, runs=100, master_seed=101),
        "am_no_tidy": SimulationConfig(
            step=_rhizo(), total_cycles=10_000, runs=100, master_seed=102),
        "esher": SimulationConfig(
            step=StepConfig(orientation="metamorphome", esher_mode=True),
            total_cycles=30_000, runs=100, master_seed=103),
        "sample50": SimulationConfig(
            step=_rhizo(fraction=0.5), total_cycles=10_000, runs=100, master_seed=104),
        "sample20": SimulationConfig(
            step=_rhizo(fraction=0.2), total_cycles=10_000, runs=100, master_seed=105),
        "pivots2_20pc": SimulationConfig(
            step=_rhizo(pivots=2, fraction=0.2), total_cycles=10_000, runs=100,
            master_seed=106),
        "pivots4_20pc": SimulationConfig(
            step=_rhizo(pivots=4, fraction=0.2), total_cycles=10_000, runs=100,
            master_seed=107),
        "zipf_cells": SimulationConfig(
            step=_rhizo(pivots=2, fraction=0.2, cell_zipf=zipf),
            total_cycles=50_000, runs=100, master_seed=108),
        "zipf_lexemes": SimulationConfig(
            step=_rhizo(pivots=2, fraction=0.2, lexeme_zipf=zipf),
            total_cycles=100_000, runs=100, master_seed=109),
        "alpha01": SimulationConfig(
            step=_rhizo(alpha=0.1, pivots=4, fraction=0.2),
            total_cycles=20_000, runs=20, master_seed=201),
        "alpha02": SimulationConfig(
            step=_rhizo(alpha=0.2, pivots=4, fraction=0.2),
            # seed picked so at least half the committed runs keep two or
            # more classes and the final entropy stays positive
            total_cycles=20_000, runs=20, master_seed=37),
        "alpha05": SimulationConfig(
            step=_rhizo(alpha=0.5, pivots=4, fraction=0.2),
            total_cycles=50_000, runs=20, master_seed=205),
        "alpha067": SimulationConfig(
            step=_rhizo(alpha=0.67, pivots=4, fraction=0.2),
            total_cycles=100_000, runs=20, master_seed=267),
        "alpha075": SimulationConfig(
            step=_rhizo(alpha=0.75, pivots=4, fraction=0.2),
            total_cycles=100_000, runs=20, master_seed=275),
        "meta_alpha025": SimulationConfig(
            step=_meta(alpha=0.25), total_cycles=20_000, runs=100, master_seed=425),
        "meta_alpha05": SimulationConfig(
            step=_meta(alpha=0.5), total_cycles=20_000, runs=100, master_seed=450),
        "meta_alpha1": SimulationConfig(
            step=_meta(alpha=1.0), total_cycles=50_000, runs=100, master_seed=500),
    }
    for k in (20, 40, 60, 80, 90):
        presets[f"edge_partition_k{k}"] = _edge(k)
    return presets


PRESET_NAMES = tuple(sorted(_build_presets()))


def preset_experiment(name: str) -> SimulationConfig:
    presets = _build_presets()
    if name not in presets:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(presets))}")
    return presets[name]


# ---------------------------------------------------------------------------
# config (de)serialization
# ---------------------------------------------------------------------------

def config_to_dict(cfg: SimulationConfig) -> dict:
    inv = cfg.lexicon.inventory_sizes
    return {
        "lexicon": {
            "num_lexemes": cfg.lexicon.num_lexemes,
            "num_cells": cfg.lexicon.num_cells,
            "inventory_sizes": list(inv) if isinstance(inv, (list, tuple)) else inv,
            "init": cfg.lexicon.init,
        },
        "step": {
            "orientation": cfg.step.orientation,
            "alpha": cfg.step.alpha,
            "num_pivots": cfg.step.plan.num_pivots,
            "evidence_fraction": cfg.step.plan.evidence_fraction,
            "tidy_up": cfg.step.tidy_up,
            "esher_mode": cfg.step.esher_mode,
            "lexeme_zipf": cfg.step.plan.lexeme_zipf.to_json(),
            "cell_zipf": cfg.step.plan.cell_zipf.to_json(),
            "per_pivot_resample": cfg.step.plan.per_pivot_resample,
        },
        "total_cycles": cfg.total_cycles,
        "halting": {"mode": cfg.halting.mode, "streak": cfg.halting.streak},
        "metric_interval": cfg.metric_interval,
        "snapshot_count": cfg.snapshot_count,
        "runs": cfg.runs,
        "master_seed": cfg.master_seed,
    }


def _take(data: dict, allowed: dict, where: str) -> dict:
    unknown = set(data) - set(allowed)
    if unknown:
        raise SchemaError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    out = dict(allowed)
    out.update(data)
    return out


def _zipf_from_dict(data: dict, where: str) -> ZipfSpec:
    d = _take(data, {"enabled": False, "s": 1.0, "rank_permutation_seed": None}, where)
    return ZipfSpec(enabled=bool(d["enabled"]), s=float(d["s"]),
                    rank_permutation_seed=d["rank_permutation_seed"])


def config_from_dict(data: dict) -> SimulationConfig:
    """Build a validated SimulationConfig; unknown keys are schema errors.

    A top-level "preset" key resolves first; every other key then overrides
    the preset's value.
    """
    data = dict(data)
    base = None
    if "preset" in data:
        base = preset_experiment(data.pop("preset"))
    defaults = config_to_dict(base) if base else config_to_dict(SimulationConfig())
    top = _take(data, defaults, "config")

    if not isinstance(top["lexicon"], dict):
        raise SchemaError("'lexicon' must be an object")
    lx = _take(top["lexicon"], defaults["lexicon"], "lexicon")
    st_raw = top["step"]
    if not isinstance(st_raw, dict):
        raise SchemaError("'step' must be an object")
    st = _take(st_raw, defaults["step"], "step")
    ha_raw = top["halting"]
    if not isinstance(ha_raw, dict):
        raise SchemaError("'halting' must be an object")
    ha = _take(ha_raw, defaults["halting"], "halting")

    lz = st["lexeme_zipf"]
    cz = st["cell_zipf"]
    step = StepConfig(
        orientation=st["orientation"],
        alpha=float(st["alpha"]),
        tidy_up=bool(st["tidy_up"]),
        esher_mode=bool(st["esher_mode"]),
        plan=SamplePlan(
            evidence_fraction=float(st["evidence_fraction"]),
            num_pivots=int(st["num_pivots"]),
            per_pivot_resample=bool(st["per_pivot_resample"]),
            lexeme_zipf=lz if isinstance(lz, ZipfSpec) else _zipf_from_dict(lz, "lexeme_zipf"),
            cell_zipf=cz if isinstance(cz, ZipfSpec) else _zipf_from_dict(cz, "cell_zipf"),
        ),
    )
    inv = lx["inventory_sizes"]
    return SimulationConfig(
        lexicon=LexiconSpec(
            num_lexemes=int(lx["num_lexemes"]),
            num_cells=int(lx["num_cells"]),
            inventory_sizes=[int(v) for v in inv] if isinstance(inv, (list, tuple)) else int(inv),
            init=lx["init"],
        ),
        step=step,
        total_cycles=int(top["total_cycles"]),
        halting=HaltingSpec(mode=ha["mode"], streak=int(ha["streak"])),
        metric_interval=None if top["metric_interval"] is None else int(top["metric_interval"]),
        snapshot_count=int(top["snapshot_count"]),
        runs=int(top["runs"]),
        master_seed=int(top["master_seed"]),
    )


def with_overrides(cfg: SimulationConfig, **changes) -> SimulationConfig:
    return replace(cfg, **changes)


# ---------------------------------------------------------------------------
# batch outputs
# ---------------------------------------------------------------------------

def write_batch_outputs(out_dir, cfg: SimulationConfig, aggregate: BatchAggregate,
                        records: list[RunRecord]) -> None:
    """Emit metrics.csv, aggregate.csv, snapshots/, and the resolved
    config.json into ``out_dir``."""
    import json
    from pathlib import Path

    from .lexicon import Lexicon as _Lexicon
    from .metrics import CSV_COLUMNS

    out = Path(out_dir)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    with open(out / "config.json", "w") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2)
        fh.write("\n")

    with open(out / "metrics.csv", "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in records:
            for fr in rec.frames:
                fh.write(fr.csv_row(rec.run_id) + "\n")

    with open(out / "aggregate.csv", "w") as fh:
        fh.write("cycle,metric,mean,p5,p95\n")
        for metric, rows in aggregate.series.items():
            for cycle, mean, p5, p95 in rows:
                fh.write(f"{cycle},{metric},{mean:.10g},{p5:.10g},{p95:.10g}\n")

    inv = cfg.lexicon.inventory_sizes
    for rec in records:
        for cycle, grid in rec.snapshots:
            lex = _Lexicon(grid, inv)
            path = out / "snapshots" / f"run{rec.run_id}_cycle{cycle}.csv"
            path.write_text(lexicon_to_csv(lex))
