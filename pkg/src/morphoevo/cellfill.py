"""Cell-filling strategies.

One step = one paradigm-cell-filling event: pick a focal lexeme and focal
cell, gather evidence, vote, and write the winning exponent back into the
grid. Four strategies live here:

* ``rhizo_step``   -- inflection-class orientation; matching evidence votes
                      +1, contrasting evidence votes -alpha, per pivot cell.
* ``tidy_up``      -- deletion of lexemes that became row-identical to the
                      focal lexeme.
* ``esher_step``   -- allomorph-index orientation with a single evidence
                      lexeme and a probabilistic identity/contrast strategy.
* ``meta_step``    -- allomorph-index orientation scored as the exact dual
                      of ``rhizo_step`` (pivot lexemes x evidence cells).

Candidate exponents are only those observed in the gathered evidence. With
alpha = 0, contrasting evidence is inert and contributes no candidates; an
empty candidate set retains the incumbent. Ties are broken uniformly at
random.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .lexicon import Lexicon
from .sampling import SamplePlan

ORIENTATIONS = ("rhizomorphome", "metamorphome")


@dataclass
class StepConfig:
    orientation: str = "rhizomorphome"
    alpha: float = 0.0
    plan: SamplePlan = field(default_factory=SamplePlan)
    tidy_up: bool = False
    esher_mode: bool = False

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ConfigError(f"unknown orientation {self.orientation!r}")
        if self.alpha < 0:
            raise ConfigError("alpha must be non-negative")
        if self.tidy_up and self.orientation != "rhizomorphome":
            raise ConfigError("tidy_up only applies to the rhizomorphome orientation")
        if self.esher_mode and self.orientation != "metamorphome":
            raise ConfigError("esher_mode only applies to the metamorphome orientation")


@dataclass
class ChangeRecord:
    cycle: int
    focal_lexeme: int
    focal_cell: int
    old_exponent: int
    new_exponent: int
    changed: bool
    lexemes_deleted: int = 0


class _AxisDraw:
    """Cached focus/evidence distributions for one axis of a fixed length.

    Focus draws use reciprocal-weight renormalization (rarer items are more
    often foci); evidence draws use the weights directly via an exponential
    race. A None weight array means uniform, with cheaper code paths.
    """

    def __init__(self, n: int, weights: np.ndarray | None):
        self.n = n
        self.weights = weights
        if weights is None:
            self.focus_cdf = None
        else:
            inv = 1.0 / weights
            self.focus_cdf = np.cumsum(inv)

    def focus(self, rng) -> int:
        if self.focus_cdf is None:
            return int(rng.integers(self.n))
        return int(
            np.searchsorted(self.focus_cdf, rng.random() * self.focus_cdf[-1], side="right")
        )

    def sample_excluding(self, m: int, excluded: int, rng) -> np.ndarray:
        """m distinct indices != excluded, weight-biased without replacement."""
        if self.weights is None:
            keys = rng.random(self.n - 1)
        else:
            w = np.delete(self.weights, excluded)
            keys = rng.standard_exponential(self.n - 1) / w
        if m >= self.n - 1:
            idx = np.arange(self.n - 1)
        else:
            idx = np.argpartition(keys, m)[:m]
        idx = idx + (idx >= excluded)
        return idx

    def sample_matrix_excluding(self, m: int, excluded: int, rows: int, rng) -> np.ndarray:
        """``rows`` independent draws of m distinct indices != excluded,
        stacked as a (rows, m) matrix. One vectorized race per row."""
        if self.weights is None:
            keys = rng.random((rows, self.n - 1))
        else:
            w = np.delete(self.weights, excluded)
            keys = rng.standard_exponential((rows, self.n - 1)) / w
        if m >= self.n - 1:
            idx = np.broadcast_to(np.arange(self.n - 1), (rows, self.n - 1)).copy()
        else:
            idx = np.argpartition(keys, m, axis=1)[:, :m]
        idx += idx >= excluded
        return idx


class StepContext:
    """Per-run scratch state: axis caches keyed by current grid shape."""

    def __init__(self, cfg: StepConfig):
        self.cfg = cfg
        self._lex_axis: _AxisDraw | None = None
        self._cell_axis: _AxisDraw | None = None

    def lex_axis(self, n: int) -> _AxisDraw:
        if self._lex_axis is None or self._lex_axis.n != n:
            self._lex_axis = _AxisDraw(n, self.cfg.plan.lexeme_zipf.weights(n))
        return self._lex_axis

    def cell_axis(self, n: int) -> _AxisDraw:
        if self._cell_axis is None or self._cell_axis.n != n:
            self._cell_axis = _AxisDraw(n, self.cfg.plan.cell_zipf.weights(n))
        return self._cell_axis


def _pick_winner(scores, pos_mask, any_mask, alpha, incumbent, rng):
    """Argmax over the candidate set with uniform tie-break.

    With alpha = 0 only exponents seen in matching evidence compete; with
    alpha > 0 every observed exponent competes, even at a negative score.
    """
    cand = pos_mask if alpha == 0 else any_mask
    if not cand.any():
        return int(incumbent), False
    masked = np.where(cand, scores, -np.inf)
    best = masked.max()
    ties = np.flatnonzero(masked == best)
    if len(ties) == 1:
        winner = int(ties[0])
    else:
        winner = int(ties[rng.integers(len(ties))])
    return winner, winner != int(incumbent)


def rhizo_step(lexicon: Lexicon, cfg: StepConfig, rng, ctx: StepContext | None = None,
               cycle: int = 0) -> ChangeRecord:
    """One attraction(-repulsion) step over inflection classes.

    Per pivot cell, every sampled evidence lexeme votes for its own
    focal-cell exponent: +1 if it matches the focal lexeme at the pivot,
    -alpha otherwise. Votes sum over pivots; the winner is written into the
    focal cell.
    """
    if cfg.orientation != "rhizomorphome":
        raise ConfigError("rhizo_step requires rhizomorphome orientation")
    if ctx is None:
        ctx = StepContext(cfg)
    grid = lexicon.grid
    num_lex, num_cells = grid.shape
    plan = cfg.plan
    if plan.num_pivots > num_cells - 1:
        raise ConfigError("num_pivots must leave at least one non-pivot cell")
    if num_lex < 2:
        # sole lexeme: no evidence exists, incumbent always retained
        focal_cell = ctx.cell_axis(num_cells).focus(rng)
        inc = int(grid[0, focal_cell])
        return ChangeRecord(cycle, 0, focal_cell, inc, inc, False)

    lex_axis = ctx.lex_axis(num_lex)
    cell_axis = ctx.cell_axis(num_cells)
    focal_lex = lex_axis.focus(rng)
    focal_cell = cell_axis.focus(rng)
    pivots = cell_axis.sample_excluding(plan.num_pivots, focal_cell, rng)

    n_ev = math.ceil(plan.evidence_fraction * (num_lex - 1))
    alpha = cfg.alpha
    n_exp = int(lexicon.inventory_sizes[focal_cell])
    incumbent = grid[focal_lex, focal_cell]

    focal_col = grid[:, focal_cell]
    if n_ev == num_lex - 1:
        # exhaustive evidence: vote over full columns per pivot, then remove
        # the focal lexeme's own (always-matching) contributions
        scores = np.zeros(n_exp)
        pos_seen = np.zeros(n_exp, dtype=bool)
        any_seen = np.zeros(n_exp, dtype=bool)
        for p in pivots:
            match = grid[:, p] == grid[focal_lex, p]
            pos = np.bincount(focal_col[match], minlength=n_exp)
            pos[incumbent] -= 1
            scores += pos
            pos_seen |= pos > 0
            if alpha > 0:
                neg = np.bincount(focal_col[~match], minlength=n_exp)
                scores -= alpha * neg
                any_seen |= neg > 0
        any_seen |= pos_seen
    else:
        if plan.per_pivot_resample:
            ev = lex_axis.sample_matrix_excluding(n_ev, focal_lex, len(pivots), rng)
        else:
            one = lex_axis.sample_excluding(n_ev, focal_lex, rng)
            ev = np.broadcast_to(one, (len(pivots), n_ev))
        match = grid[ev, pivots[:, None]] == grid[focal_lex, pivots][:, None]
        ev_col = focal_col[ev]
        pos = np.bincount(ev_col[match], minlength=n_exp)
        scores = pos.astype(float)
        pos_seen = pos > 0
        if alpha > 0:
            neg = np.bincount(ev_col[~match], minlength=n_exp)
            scores -= alpha * neg
            any_seen = pos_seen | (neg > 0)
        else:
            any_seen = pos_seen

    winner, changed = _pick_winner(scores, pos_seen, any_seen, alpha, incumbent, rng)
    grid[focal_lex, focal_cell] = winner
    deleted = 0
    if cfg.tidy_up:
        deleted = tidy_up(lexicon, focal_lex)
    return ChangeRecord(cycle, focal_lex, focal_cell, int(incumbent), winner, changed, deleted)


def tidy_up(lexicon: Lexicon, focal_lexeme: int) -> int:
    """Delete every *other* lexeme whose row now equals the focal row."""
    grid = lexicon.grid
    dup = (grid == grid[focal_lexeme]).all(axis=1)
    dup[focal_lexeme] = False
    count = int(dup.sum())
    if count:
        lexicon.grid = grid[~dup]
    return count


def esher_step(lexicon: Lexicon, rng, cycle: int = 0) -> ChangeRecord:
    """Single-evidence allomorph-index step.

    One evidence lexeme decides the strategy: if it carries the same index
    in the pivot and focal cells, the focal lexeme copies its own pivot
    index into the focal cell; otherwise the focal cell receives a uniform
    pick among the distinct indices of the focal lexeme's other cells.
    """
    grid = lexicon.grid
    num_lex, num_cells = grid.shape
    if num_lex < 2 or num_cells < 2:
        raise ConfigError("need at least 2 lexemes and 2 cells")
    focal_lex = int(rng.integers(num_lex))
    focal_cell = int(rng.integers(num_cells))
    pivot = int(rng.integers(num_cells - 1))
    pivot += pivot >= focal_cell
    ev = int(rng.integers(num_lex - 1))
    ev += ev >= focal_lex

    incumbent = int(grid[focal_lex, focal_cell])
    if grid[ev, pivot] == grid[ev, focal_cell]:
        winner = int(grid[focal_lex, pivot])
    else:
        row = grid[focal_lex]
        others = np.unique(np.delete(row, focal_cell))
        winner = int(others[rng.integers(len(others))])
    grid[focal_lex, focal_cell] = winner
    return ChangeRecord(cycle, focal_lex, focal_cell, incumbent, winner,
                        winner != incumbent)


def meta_step(lexicon: Lexicon, cfg: StepConfig, rng, ctx: StepContext | None = None,
              cycle: int = 0) -> ChangeRecord:
    """Dual of ``rhizo_step`` over allomorph indices.

    Pivot lexemes play the pivot role, evidence cells the evidence role: a
    (pivot lexeme, evidence cell) pair supports the focal lexeme's index at
    that cell with +1 if the pivot lexeme carries identical indices in the
    evidence and focal cells, and opposes it with -alpha otherwise.
    Requires a shared index space, i.e. equal inventories in all cells.
    """
    if cfg.orientation != "metamorphome":
        raise ConfigError("meta_step requires metamorphome orientation")
    if cfg.esher_mode:
        raise ConfigError("esher_mode uses esher_step, not meta_step")
    inv = lexicon.inventory_sizes
    if not (inv == inv[0]).all():
        raise ConfigError("metamorphome steps require equal inventories in all cells")
    if ctx is None:
        ctx = StepContext(cfg)
    grid = lexicon.grid
    num_lex, num_cells = grid.shape
    plan = cfg.plan
    if plan.num_pivots > num_lex - 1:
        raise ConfigError("num_pivots must leave at least one non-pivot lexeme")

    lex_axis = ctx.lex_axis(num_lex)
    cell_axis = ctx.cell_axis(num_cells)
    focal_lex = lex_axis.focus(rng)
    focal_cell = cell_axis.focus(rng)
    pivot_lexemes = lex_axis.sample_excluding(plan.num_pivots, focal_lex, rng)

    n_ev = math.ceil(plan.evidence_fraction * (num_cells - 1))
    alpha = cfg.alpha
    n_exp = int(inv[0])
    incumbent = grid[focal_lex, focal_cell]

    if plan.per_pivot_resample:
        ev = cell_axis.sample_matrix_excluding(n_ev, focal_cell, len(pivot_lexemes), rng)
    else:
        shared = cell_axis.sample_excluding(n_ev, focal_cell, rng)
        ev = np.broadcast_to(shared, (len(pivot_lexemes), n_ev))

    pv = pivot_lexemes[:, None]
    identity = grid[pv, ev] == grid[pivot_lexemes, focal_cell][:, None]
    cand = grid[focal_lex][ev]
    pos = np.bincount(cand[identity], minlength=n_exp)
    scores = pos.astype(float)
    pos_seen = pos > 0
    if alpha > 0:
        neg = np.bincount(cand[~identity], minlength=n_exp)
        scores -= alpha * neg
        any_seen = pos_seen | (neg > 0)
    else:
        any_seen = pos_seen

    winner, changed = _pick_winner(scores, pos_seen, any_seen, alpha, incumbent, rng)
    grid[focal_lex, focal_cell] = winner
    return ChangeRecord(cycle, focal_lex, focal_cell, int(incumbent), winner, changed)
