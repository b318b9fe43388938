"""Lexicon state: a rectangular grid of exponent indices plus structural queries.

Rows are lexemes, columns are paradigm cells. Each cell ``c`` owns an
inventory of ``inventory_sizes[c]`` exponents, stored simply as the integers
``0 .. inventory_sizes[c]-1``. Exponent identity is positional within its
cell; index 2 of cell 1 and index 2 of cell 5 are unrelated symbols (except
under the metamorphome reading, where the same integers are allomorph
indices shared across a lexeme's row).
"""

from __future__ import annotations

import io

import numpy as np

from .errors import ConfigError


class Lexicon:
    """Mutable simulation state. One simulation run owns exactly one Lexicon."""

    def __init__(self, grid: np.ndarray, inventory_sizes) -> None:
        grid = np.asarray(grid, dtype=np.int64)
        if grid.ndim != 2:
            raise ConfigError("grid must be 2-dimensional (lexemes x cells)")
        num_lexemes, num_cells = grid.shape
        if num_lexemes < 1:
            raise ConfigError("need at least one lexeme")
        if num_cells < 2:
            raise ConfigError("need at least two cells (a pivot distinct from the focus)")
        inv = np.asarray(inventory_sizes, dtype=np.int64)
        if inv.ndim == 0:
            inv = np.full(num_cells, int(inv))
        if inv.shape != (num_cells,):
            raise ConfigError("inventory_sizes must be scalar or one entry per cell")
        if np.any(inv < 1):
            raise ConfigError("every cell needs at least one exponent")
        if np.any(grid < 0) or np.any(grid >= inv[None, :]):
            raise ConfigError("grid entry outside its cell's inventory")
        self.grid = grid
        self.inventory_sizes = inv

    @property
    def num_lexemes(self) -> int:
        return self.grid.shape[0]

    @property
    def num_cells(self) -> int:
        return self.grid.shape[1]

    def copy(self) -> "Lexicon":
        return Lexicon(self.grid.copy(), self.inventory_sizes.copy())

    def delete_lexemes(self, rows) -> None:
        keep = np.ones(self.num_lexemes, dtype=bool)
        keep[list(rows)] = False
        self.grid = self.grid[keep]
        if self.num_lexemes < 1:
            raise ConfigError("cannot delete every lexeme")


def init_random_lexicon(num_lexemes, num_cells, inventory_sizes, rng) -> Lexicon:
    """Fill every cell of every lexeme with a uniform draw from its inventory."""
    if num_lexemes < 1 or num_cells < 2:
        raise ConfigError("num_lexemes >= 1 and num_cells >= 2 required")
    inv = np.asarray(inventory_sizes, dtype=np.int64)
    if inv.ndim == 0:
        inv = np.full(num_cells, int(inv))
    if inv.shape != (num_cells,):
        raise ConfigError("inventory_sizes must be scalar or one entry per cell")
    if np.any(inv < 1):
        raise ConfigError("every cell needs at least one exponent")
    grid = (rng.random((num_lexemes, num_cells)) * inv[None, :]).astype(np.int64)
    return Lexicon(grid, inv)


def distinct_classes(lexicon: Lexicon) -> set[tuple[int, ...]]:
    """The set of distinct rows; its size is the inflection class count."""
    return {tuple(row) for row in lexicon.grid.tolist()}


def cell_inventory_observed(lexicon: Lexicon, cell: int) -> set[int]:
    """Exponents actually occurring in one column (may be a strict subset of
    the available inventory)."""
    if not 0 <= cell < lexicon.num_cells:
        raise IndexError(f"cell index {cell} out of range")
    return set(np.unique(lexicon.grid[:, cell]).tolist())


def zone_partition(lexicon: Lexicon) -> list[list[int]]:
    """Partition cells into morphomic zones: cells i and j share a zone iff
    every lexeme carries the same index in both. Blocks are returned sorted
    by smallest member."""
    by_column: dict[bytes, list[int]] = {}
    col = np.ascontiguousarray(lexicon.grid.T)
    for c in range(lexicon.num_cells):
        by_column.setdefault(col[c].tobytes(), []).append(c)
    return sorted(by_column.values())


SNAPSHOT_HEADER = "cell_"


def lexicon_to_csv(lexicon: Lexicon) -> str:
    """Snapshot format: one row per lexeme, header cell_0..cell_{C-1}."""
    buf = io.StringIO()
    buf.write(",".join(f"cell_{c}" for c in range(lexicon.num_cells)) + "\n")
    for row in lexicon.grid.tolist():
        buf.write(",".join(str(v) for v in row) + "\n")
    return buf.getvalue()


def lexicon_from_csv(text: str, inventory_sizes=None) -> Lexicon:
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    if not all(h.startswith(SNAPSHOT_HEADER) for h in header):
        raise ConfigError("snapshot header must be cell_0,...,cell_{C-1}")
    rows = [[int(v) for v in ln.split(",")] for ln in lines[1:]]
    grid = np.asarray(rows, dtype=np.int64)
    if inventory_sizes is None:
        inventory_sizes = grid.max(axis=0) + 1
    return Lexicon(grid, inventory_sizes)
