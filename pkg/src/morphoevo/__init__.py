"""Seeded simulations of inflection-class and morphomic-zone evolution
under iterated analogical cell filling, with entropy-based metrics and an
exact combinatorial model of pairwise implicative structure."""

from .cellfill import (ChangeRecord, StepConfig, esher_step, meta_step,
                       rhizo_step, tidy_up)
from .combinatorics import (ContingencyProbabilities, brute_force_counts,
                            check_inequality, contingency_probabilities,
                            feasible_k_range)
from .errors import ConfigError, MorphoevoError, SchemaError
from .lexicon import (Lexicon, distinct_classes, init_random_lexicon,
                      lexicon_from_csv, lexicon_to_csv, zone_partition)
from .metrics import (MetricsFrame, cell_entropy, class_turnover,
                      conditional_entropy, largest_two_classes,
                      mean_conditional_entropy, mean_exponents_per_cell,
                      mean_theils_u, metrics_frame, pattern_view, theils_u)
from .runner import (BatchAggregate, HaltingSpec, LexiconSpec, RunRecord,
                     SimulationConfig, PRESET_NAMES, aggregate_records,
                     config_from_dict, config_to_dict, preset_experiment,
                     run_batch, run_simulation, with_overrides,
                     write_batch_outputs)
from .sampling import (SamplePlan, ZipfSpec, choose_focus,
                       sample_without_replacement, zipf_weights)

__version__ = "0.1.0"
