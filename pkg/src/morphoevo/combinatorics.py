"""Exact combinatorics behind the four-part analogy heuristic.

Setting: cell 1 allows m exponents, cell 2 allows n, and the language
permits exactly k of the m*n combinations, with every exponent of both
cells used somewhere (every row and column of the m x n grid covered). One
combination, the pivot, is known to be permitted. The quantities computed
here are the number N of admissible completions and, for a representative
position sharing the pivot's row / column / neither, the probability that
it is also permitted (p_i, p_j, p_0). Everything is exact: integers and
rationals throughout, floats only at presentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import ConfigError

BRUTE_FORCE_LIMIT = 25


def _feasible(m: int, n: int, k: int) -> None:
    if m < 1 or n < 1:
        raise ConfigError("m and n must be at least 1")
    if k < max(m, n) or k >= m * n:
        raise ConfigError(
            f"k={k} infeasible for {m}x{n}: need max(m,n) <= k < m*n")


@dataclass
class ContingencyProbabilities:
    m: int
    n: int
    k: int
    N: int
    p_i: Fraction
    p_j: Fraction
    p_0: Fraction


def _incl_excl(m: int, n: int, k: int, fixed_rows: int, fixed_cols: int,
               placed: int) -> int:
    """Count placements of k-placed marks into the m x n grid covering all
    rows and columns, by inclusion-exclusion over deliberately-empty rows
    and columns. ``fixed_rows``/``fixed_cols`` rows and columns are already
    covered by the ``placed`` pre-placed marks and cannot be emptied."""
    total = 0
    for r in range(m - fixed_rows + 1):
        for s in range(n - fixed_cols + 1):
            cells = (m - r) * (n - s) - placed
            want = k - placed
            if want < 0 or want > cells:
                continue
            term = comb(m - fixed_rows, r) * comb(n - fixed_cols, s) * comb(cells, want)
            total += term if (r + s) % 2 == 0 else -term
    return total


def contingency_probabilities(m: int, n: int, k: int) -> ContingencyProbabilities:
    """N and the exact probabilities p_i, p_j, p_0 for given (m, n, k)."""
    _feasible(m, n, k)
    # N: one mark pre-placed at the pivot (covers 1 row, 1 column)
    n_total = _incl_excl(m, n, k, fixed_rows=1, fixed_cols=1, placed=1)
    # second mark elsewhere in the pivot row: covers 1 row, 2 columns
    c_i = _incl_excl(m, n, k, fixed_rows=1, fixed_cols=2, placed=2)
    # elsewhere in the pivot column: 2 rows, 1 column
    c_j = _incl_excl(m, n, k, fixed_rows=2, fixed_cols=1, placed=2)
    # away from both: 2 rows, 2 columns
    c_0 = _incl_excl(m, n, k, fixed_rows=2, fixed_cols=2, placed=2)
    if n_total <= 0:
        raise ConfigError(f"no admissible completions for (m={m}, n={n}, k={k})")
    return ContingencyProbabilities(
        m, n, k, n_total,
        Fraction(c_i, n_total), Fraction(c_j, n_total), Fraction(c_0, n_total))


def brute_force_counts(m: int, n: int, k: int):
    """Enumerate every admissible completion directly.

    Returns (N, count_same_row, count_same_col, count_other): the number of
    k-subsets of the grid that contain the pivot (0, 0) and cover every row
    and column, and how many of them contain a representative off-pivot
    position in the pivot's row, in its column, and away from both.
    """
    _feasible(m, n, k)
    if m * n > BRUTE_FORCE_LIMIT:
        raise ConfigError(f"brute force limited to m*n <= {BRUTE_FORCE_LIMIT}")
    cells = [(r, c) for r in range(m) for c in range(n) if (r, c) != (0, 0)]
    same_row = (0, 1)
    same_col = (1, 0)
    other = (1, 1)
    total = n_row = n_col = n_other = 0
    for rest in combinations(cells, k - 1):
        rows = {0} | {r for r, _ in rest}
        cols = {0} | {c for _, c in rest}
        if len(rows) < m or len(cols) < n:
            continue
        total += 1
        chosen = set(rest)
        n_row += same_row in chosen
        n_col += same_col in chosen
        n_other += other in chosen
    return total, n_row, n_col, n_other


def check_inequality(m: int, n: int, k: int):
    """Test 1 > p_0 >= p_i, p_j; reports whether the inner comparisons are
    strict. Returns (holds, strict).

    The upper bound p_0 < 1 presupposes some freedom in where the remaining
    marks go; at the minimum k = max(m, n) on a 2x2 grid the completion is
    fully forced and p_0 = 1, so the bound is only required once k exceeds
    the minimum.
    """
    cp = contingency_probabilities(m, n, k)
    upper = cp.p_0 < 1 or k == max(m, n)
    holds = upper and cp.p_0 >= cp.p_i and cp.p_0 >= cp.p_j
    strict = cp.p_0 < 1 and cp.p_0 > cp.p_i and cp.p_0 > cp.p_j
    return holds, strict


def feasible_k_range(m: int, n: int):
    return range(max(m, n), m * n)
