"""Watch an associative-only inflectional system level itself.

Every cycle copies evidence from lexemes that agree with the focal lexeme,
so frequent exponents get more frequent and the lexicon drifts toward a
single inflection class. This script runs a handful of simulations on a
shrunk grid and prints the trajectory, then dumps one run's snapshots as
crude ascii so you can watch the rows align.

Run:  python demos/collapse_to_one_class.py
"""

import numpy as np

from morphoevo.cellfill import StepConfig
from morphoevo.runner import (LexiconSpec, SimulationConfig, run_simulation,
                              with_overrides)

cfg = SimulationConfig(
    lexicon=LexiconSpec(num_lexemes=40, num_cells=6, inventory_sizes=4),
    step=StepConfig(),  # 1 pivot, all evidence, no repulsion
    total_cycles=3000,
    runs=5,
    metric_interval=300,
    snapshot_count=6,
    master_seed=11,
)

print("associative-only dynamics, %d lexemes x %d cells" %
      (cfg.lexicon.num_lexemes, cfg.lexicon.num_cells))
print()
print("%8s %10s %8s %8s" % ("cycle", "classes", "H(X|Y)", "U(X|Y)"))

records = [run_simulation(cfg, i) for i in range(cfg.runs)]
for frames in zip(*[r.frames for r in records]):
    cyc = frames[0].cycle
    k = np.mean([f.class_count for f in frames])
    h = np.mean([f.mean_cond_entropy for f in frames])
    u = np.mean([f.mean_theils_u for f in frames])
    print("%8d %10.1f %8.3f %8.3f" % (cyc, k, h, u))

print()
print("snapshots of run 0 (one letter per exponent, rows are lexemes):")
letters = np.array(list("abcdefghij"))
for cycle, grid in records[0].snapshots:
    print("  cycle %d:" % cycle)
    # 40 rows is too tall for a terminal, show every 5th lexeme
    for row in grid[::5]:
        print("    " + "".join(letters[row]))
print()
final = [r.frames[-1].class_count for r in records]
print("final class counts across runs:", final)
