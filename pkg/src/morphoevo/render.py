"""Static SVG output for batch results.

Reads the CSV files written by the runner and emits line charts (mean
plus 90% ribbon per metric) and per-snapshot heatmaps.  No plotting
library: the SVGs are assembled from strings so output is a pure
function of the input files and byte-identical across reruns.
"""

import csv
import os

import numpy as np

from .errors import SchemaError
from .metrics import CSV_COLUMNS

CHART_W = 640
CHART_H = 360
MARGIN = 48

# fills cycle for exponent indices past the palette end
PALETTE = (
    "#4878cf", "#d65f5f", "#59a14f", "#eecb41", "#8172b2",
    "#76b7b2", "#ff9e4a", "#b07aa1", "#9c755f", "#bab0ac",
    "#6b4c9a", "#c7c7c7", "#17becf", "#e377c2", "#8c564b",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
)


def _fmt(x):
    # fixed decimal places keep the files reproducible across platforms
    return "%.2f" % x


def _scale(vals, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span == 0:
        span = 1.0
    return out_lo + (np.asarray(vals, dtype=float) - lo) * (out_hi - out_lo) / span


def read_aggregate(path):
    """Parse aggregate.csv into {metric: (cycles, mean, p5, p95)} arrays."""
    series = {}
    with open(path, newline="") as fh:
        rdr = csv.reader(fh)
        header = next(rdr, None)
        if header != ["cycle", "metric", "mean", "p5", "p95"]:
            raise SchemaError("unexpected aggregate header: %r" % (header,))
        for row in rdr:
            if len(row) != 5:
                raise SchemaError("malformed aggregate row: %r" % (row,))
            cyc, name, mean, p5, p95 = row
            series.setdefault(name, []).append(
                (int(cyc), float(mean), float(p5), float(p95)))
    out = {}
    for name, rows in series.items():
        rows.sort()
        out[name] = tuple(np.array(col) for col in zip(*rows))
    return out


def line_chart_svg(cycles, mean, p5, p95, title):
    lo = min(0.0, float(np.min(p5)))
    hi = float(np.max(p95))
    if hi <= lo:
        hi = lo + 1.0
    x = _scale(cycles, float(cycles[0]), float(cycles[-1]), MARGIN, CHART_W - 16)
    ym = _scale(mean, lo, hi, CHART_H - MARGIN, 16)
    ylo = _scale(p5, lo, hi, CHART_H - MARGIN, 16)
    yhi = _scale(p95, lo, hi, CHART_H - MARGIN, 16)

    ribbon = " ".join("%s,%s" % (_fmt(a), _fmt(b)) for a, b in zip(x, yhi))
    ribbon += " " + " ".join(
        "%s,%s" % (_fmt(a), _fmt(b)) for a, b in zip(x[::-1], ylo[::-1]))
    line = " ".join("%s,%s" % (_fmt(a), _fmt(b)) for a, b in zip(x, ym))

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">'
        % (CHART_W, CHART_H),
        '<rect width="%d" height="%d" fill="white"/>' % (CHART_W, CHART_H),
        '<text x="%d" y="14" font-family="sans-serif" font-size="13">%s</text>'
        % (MARGIN, title),
        '<polygon points="%s" fill="#4878cf" fill-opacity="0.25" stroke="none"/>'
        % ribbon,
        '<polyline points="%s" fill="none" stroke="#30507c" stroke-width="1.5"/>'
        % line,
        '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="black"/>'
        % (MARGIN, CHART_H - MARGIN, CHART_W - 16, CHART_H - MARGIN),
        '<line x1="%d" y1="16" x2="%d" y2="%d" stroke="black"/>'
        % (MARGIN, MARGIN, CHART_H - MARGIN),
        '<text x="%d" y="%d" font-family="sans-serif" font-size="11">%d</text>'
        % (MARGIN, CHART_H - MARGIN + 14, int(cycles[0])),
        '<text x="%d" y="%d" font-family="sans-serif" font-size="11" '
        'text-anchor="end">%d</text>'
        % (CHART_W - 16, CHART_H - MARGIN + 14, int(cycles[-1])),
        '<text x="%d" y="%d" font-family="sans-serif" font-size="11" '
        'text-anchor="end">%s</text>' % (MARGIN - 4, CHART_H - MARGIN, _fmt(lo)),
        '<text x="%d" y="20" font-family="sans-serif" font-size="11" '
        'text-anchor="end">%s</text>' % (MARGIN - 4, _fmt(hi)),
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def heatmap_svg(grid, cell_px=14):
    """Lexemes x cells heatmap, one fill per exponent index."""
    grid = np.asarray(grid)
    nlex, ncell = grid.shape
    w = ncell * cell_px
    h = nlex * cell_px
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">' % (w, h)]
    for i in range(nlex):
        for j in range(ncell):
            fill = PALETTE[int(grid[i, j]) % len(PALETTE)]
            parts.append(
                '<rect x="%d" y="%d" width="%d" height="%d" fill="%s"/>'
                % (j * cell_px, i * cell_px, cell_px, cell_px, fill))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _read_snapshot_csv(path):
    with open(path, newline="") as fh:
        rdr = csv.reader(fh)
        header = next(rdr, None)
        if header is None or not all(c.startswith("cell_") for c in header):
            raise SchemaError("unexpected snapshot header in %s" % path)
        rows = [[int(v) for v in row] for row in rdr]
    if not rows:
        raise SchemaError("empty snapshot %s" % path)
    return np.array(rows, dtype=np.int64)


def render_outputs(batch_dir, out_dir=None):
    """Render every metric curve and snapshot below batch_dir.

    Returns the list of files written.  Output lands in
    <batch_dir>/plots unless out_dir is given.
    """
    out_dir = out_dir or os.path.join(batch_dir, "plots")
    os.makedirs(out_dir, exist_ok=True)
    written = []

    agg_path = os.path.join(batch_dir, "aggregate.csv")
    if os.path.exists(agg_path):
        # iterate in canonical column order so file ordering is stable
        series = read_aggregate(agg_path)
        for name in CSV_COLUMNS:
            if name not in series:
                continue
            cycles, mean, p5, p95 = series[name]
            svg = line_chart_svg(cycles, mean, p5, p95, name)
            dest = os.path.join(out_dir, "%s.svg" % name)
            with open(dest, "w") as fh:
                fh.write(svg)
            written.append(dest)

    snap_dir = os.path.join(batch_dir, "snapshots")
    if os.path.isdir(snap_dir):
        for fname in sorted(os.listdir(snap_dir)):
            if not fname.endswith(".csv"):
                continue
            grid = _read_snapshot_csv(os.path.join(snap_dir, fname))
            dest = os.path.join(out_dir, fname[:-4] + ".svg")
            with open(dest, "w") as fh:
                fh.write(heatmap_svg(grid))
            written.append(dest)

    return written
