"""Structure and complexity measures over a lexicon snapshot.

All probabilities are lexeme type frequencies (each current lexeme weighs
1) and all entropies are in bits. Pair means run over ordered pairs
(X, Y), X != Y; since the mean of an asymmetric quantity over ordered
pairs equals the mean of its symmetrized average over unordered pairs,
this choice is presentation-neutral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lexicon import Lexicon, cell_inventory_observed, zone_partition

CSV_COLUMNS = [
    "run_id", "cycle", "mean_cond_entropy", "mean_theils_u", "classes",
    "mean_exponents_per_cell", "turnover", "largest_class", "second_class",
    "zones",
]


@dataclass
class MetricsFrame:
    cycle: int
    mean_cond_entropy: float
    mean_theils_u: float
    class_count: int
    mean_exponents_per_cell: float
    largest_class: int
    second_class: int
    zone_count: int
    turnover: int | None = None

    def csv_row(self, run_id) -> str:
        turn = "" if self.turnover is None else str(self.turnover)
        return (
            f"{run_id},{self.cycle},{self.mean_cond_entropy:.10g},"
            f"{self.mean_theils_u:.10g},{self.class_count},"
            f"{self.mean_exponents_per_cell:.10g},{turn},"
            f"{self.largest_class},{self.second_class},{self.zone_count}"
        )


def _entropy_from_counts(counts: np.ndarray) -> float:
    n = counts.sum()
    p = counts[counts > 0] / n
    return float(-(p * np.log2(p)).sum())


def cell_entropy(lexicon: Lexicon, cell: int) -> float:
    """H(X) of one column, exponent probabilities = relative frequencies."""
    col = lexicon.grid[:, cell]
    return _entropy_from_counts(np.bincount(col))


def conditional_entropy(lexicon: Lexicon, x: int, y: int) -> float:
    """H(X|Y) from the joint frequency table of columns x and y."""
    if x == y:
        raise ValueError("conditional entropy needs two distinct cells")
    gx = lexicon.grid[:, x]
    gy = lexicon.grid[:, y]
    base = gx.max() + 1
    joint = np.bincount(gy * base + gx)
    return _entropy_from_counts(joint) - _entropy_from_counts(np.bincount(gy))


def theils_u(lexicon: Lexicon, x: int, y: int) -> float:
    """(H(X) - H(X|Y)) / H(X), defined as 0 when H(X) = 0."""
    hx = cell_entropy(lexicon, x)
    if hx == 0.0:
        return 0.0
    u = (hx - conditional_entropy(lexicon, x, y)) / hx
    # clamp tiny negative float noise
    return min(1.0, max(0.0, u))


def _pairwise(lexicon: Lexicon, fn) -> float:
    c = lexicon.num_cells
    total = 0.0
    for x in range(c):
        for y in range(c):
            if x != y:
                total += fn(lexicon, x, y)
    return total / (c * (c - 1))


def mean_conditional_entropy(lexicon: Lexicon) -> float:
    return _pairwise(lexicon, conditional_entropy)


def mean_theils_u(lexicon: Lexicon) -> float:
    return _pairwise(lexicon, theils_u)


def class_turnover(s1, s2) -> int:
    """|S1 u S2| - |S1 n S2|: classes present at one time slice but not the
    other."""
    s1, s2 = set(s1), set(s2)
    return len(s1 | s2) - len(s1 & s2)


def pattern_view(lexicon: Lexicon) -> Lexicon:
    """Relabel each lexeme's row by order of first appearance.

    Allomorph indices are lexeme-local labels; only the distribution
    pattern is comparable across lexemes, so [2,2,4,2] and [0,0,3,0]
    measure as the same row. Inventory bound is num_cells, the most
    distinct labels one row can hold.
    """
    grid = np.empty_like(lexicon.grid)
    for i, row in enumerate(lexicon.grid):
        seen = {}
        for j, v in enumerate(row):
            grid[i, j] = seen.setdefault(int(v), len(seen))
    return Lexicon(grid, inventory_sizes=max(2, lexicon.num_cells))


def largest_two_classes(lexicon: Lexicon) -> tuple[int, int]:
    _, counts = np.unique(lexicon.grid, axis=0, return_counts=True)
    counts = np.sort(counts)[::-1]
    second = int(counts[1]) if len(counts) > 1 else 0
    return int(counts[0]), second


def mean_exponents_per_cell(lexicon: Lexicon) -> float:
    return float(np.mean([len(cell_inventory_observed(lexicon, c))
                          for c in range(lexicon.num_cells)]))


def metrics_frame(lexicon: Lexicon, cycle: int, turnover: int | None = None) -> MetricsFrame:
    """Evaluate every measure at one cycle.

    Entropy computations share the per-column counts across the pair loop
    for speed; results equal the one-pair functions above.
    """
    grid = lexicon.grid
    c = grid.shape[1]
    cols = [grid[:, i] for i in range(c)]
    bases = [int(col.max()) + 1 for col in cols]
    h = [_entropy_from_counts(np.bincount(col)) for col in cols]

    sum_cond = 0.0
    sum_u = 0.0
    for x in range(c):
        for y in range(c):
            if x == y:
                continue
            joint = np.bincount(cols[y] * bases[x] + cols[x])
            hxy = _entropy_from_counts(joint) - h[y]
            sum_cond += hxy
            if h[x] > 0:
                sum_u += min(1.0, max(0.0, (h[x] - hxy) / h[x]))
    pairs = c * (c - 1)

    _, counts = np.unique(grid, axis=0, return_counts=True)
    sizes = np.sort(counts)[::-1]
    return MetricsFrame(
        cycle=cycle,
        mean_cond_entropy=sum_cond / pairs,
        mean_theils_u=sum_u / pairs,
        class_count=len(sizes),
        mean_exponents_per_cell=mean_exponents_per_cell(lexicon),
        largest_class=int(sizes[0]),
        second_class=int(sizes[1]) if len(sizes) > 1 else 0,
        zone_count=len(zone_partition(lexicon)),
        turnover=turnover,
    )
