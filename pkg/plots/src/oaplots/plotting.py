"""Render benchmark curves: faint per-state lines under bold mean lines.

Input is one or more CSV files sharing the benchmark column layout
(scheme, order, randomized, qdrift_mode, blocks, state_id,
instance_reps, metric, value, seconds).  Panels come either from
multiple input files, one panel per file, or from the distinct values
of a grouping column within a single file.  Both axes default to log
scale, with base 2 on the block axis so doubling steps are equidistant.
"""

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # must be selected before pyplot is first imported

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(Exception):
    """A referenced column is missing from the CSV header."""


class DataError(Exception):
    """The input parses but holds no usable rows or values."""


@dataclass(frozen=True)
class PlotSpec:
    csv_paths: tuple
    out_path: str
    panel_column: str | None = None
    line_column: str = "scheme"
    state_column: str = "state_id"
    x_column: str = "blocks"
    value_column: str = "value"
    log_x: bool = True
    log_y: bool = True

    def __post_init__(self):
        if not self.csv_paths:
            raise ValueError("need at least one csv path")
        if len(self.csv_paths) > 1 and self.panel_column:
            raise ValueError("a panel column cannot be combined with multiple files")


@dataclass(frozen=True)
class PanelData:
    title: str
    rows: tuple


@dataclass(frozen=True)
class RenderResult:
    figure: object
    panel_titles: tuple
    means: dict


def read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path} is empty")
        return list(reader.fieldnames), list(reader)


def _check_columns(header, needed, path):
    missing = [c for c in needed if c not in header]
    if missing:
        raise SchemaError(f"{path} lacks column(s): {', '.join(missing)}")


def build_panels(spec: PlotSpec) -> list[PanelData]:
    panels = []
    for path in spec.csv_paths:
        header, rows = read_rows(path)
        needed = [spec.line_column, spec.state_column, spec.x_column, spec.value_column]
        if spec.panel_column:
            needed.append(spec.panel_column)
        _check_columns(header, needed, path)
        if not rows:
            raise DataError(f"{path} has a header but no data rows")
        if spec.panel_column:
            order = []
            groups = {}
            for row in rows:
                key = row[spec.panel_column]
                if key not in groups:
                    groups[key] = []
                    order.append(key)
                groups[key].append(row)
            panels.extend(PanelData(key, tuple(groups[key])) for key in order)
        else:
            panels.append(PanelData(Path(path).stem, tuple(rows)))

    # duplicate titles would collide as result keys
    seen = {}
    unique = []
    for panel in panels:
        count = seen.get(panel.title, 0)
        seen[panel.title] = count + 1
        title = panel.title if count == 0 else f"{panel.title} ({count + 1})"
        unique.append(PanelData(title, panel.rows))
    return unique


def _float(row, column):
    try:
        return float(row[column])
    except (TypeError, ValueError):
        raise DataError(
            f"column {column} holds non-numeric value {row.get(column)!r}"
        ) from None


def _trajectory(rows, spec):
    points = sorted(
        (_float(r, spec.x_column), _float(r, spec.value_column)) for r in rows
    )
    return [p[0] for p in points], [p[1] for p in points]


def _mean_curve(rows, spec):
    acc = {}
    for row in rows:
        acc.setdefault(_float(row, spec.x_column), []).append(
            _float(row, spec.value_column)
        )
    xs = sorted(acc)
    return xs, [float(np.mean(acc[x])) for x in xs]


def _metric_label(rows):
    names = {row.get("metric", "") for row in rows}
    names.discard("")
    names.discard(None)
    if len(names) == 1:
        return names.pop().replace("_", " ")
    return "value"


def render(spec: PlotSpec) -> RenderResult:
    """Draw the figure, write it to spec.out_path and return the line data.

    The returned means dictionary maps (panel title, line label) to the
    (x, y) tuples handed to the bold line, so callers can audit exactly
    what was drawn.
    """
    panels = build_panels(spec)
    fig, axes = plt.subplots(
        1, len(panels), figsize=(4.8 * len(panels), 3.9), squeeze=False
    )
    means = {}
    for ax, panel in zip(axes[0], panels):
        labels = []
        by_line = {}
        for row in panel.rows:
            key = row[spec.line_column]
            if key not in by_line:
                by_line[key] = []
                labels.append(key)
            by_line[key].append(row)
        for label in labels:
            rows = by_line[label]
            states = []
            by_state = {}
            for row in rows:
                state = row[spec.state_column]
                if state not in by_state:
                    by_state[state] = []
                    states.append(state)
                by_state[state].append(row)
            # faint trajectories first so the mean line sits on top of them
            color = None
            for state in states:
                xs, ys = _trajectory(by_state[state], spec)
                (line,) = ax.plot(
                    xs,
                    ys,
                    alpha=0.25,
                    linewidth=0.8,
                    marker=".",
                    markersize=2.5,
                    color=color,
                    label="_nolegend_",
                )
                color = line.get_color()
            xs, ys = _mean_curve(rows, spec)
            ax.plot(
                xs,
                ys,
                linewidth=2.0,
                marker="o",
                markersize=3.5,
                color=color,
                label=label,
            )
            means[(panel.title, label)] = (tuple(xs), tuple(ys))
        if spec.log_x:
            ax.set_xscale("log", base=2)
        if spec.log_y:
            ax.set_yscale("log")
        ax.set_title(panel.title)
        ax.set_xlabel(spec.x_column)
        ax.set_ylabel(_metric_label(panel.rows))
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150)
    return RenderResult(fig, tuple(p.title for p in panels), means)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render benchmark CSV files as faint-trajectory, bold-mean charts.",
    )
    parser.add_argument(
        "--csv",
        action="append",
        required=True,
        metavar="PATH",
        help="input CSV; repeat the flag for one panel per file",
    )
    parser.add_argument("--out", required=True, metavar="PATH", help="image file to write")
    parser.add_argument(
        "--panel",
        metavar="COLUMN",
        help="split a single CSV into one panel per distinct value of this column",
    )
    parser.add_argument("--linear-x", action="store_true", help="linear x axis")
    parser.add_argument("--linear-y", action="store_true", help="linear y axis")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        spec = PlotSpec(
            csv_paths=tuple(args.csv),
            out_path=args.out,
            panel_column=args.panel,
            log_x=not args.linear_x,
            log_y=not args.linear_y,
        )
        result = render(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except csv.Error as exc:
        print(f"error: bad csv input: {exc}", file=sys.stderr)
        return 3
    except (SchemaError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    plt.close(result.figure)
    print(
        f"wrote {spec.out_path}: {len(result.panel_titles)} panel(s), "
        f"{len(result.means)} mean lines"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
