"""Render regret-curve figures from harness CSV output.

One panel per experiment; each curve is a policy's mean cumulative regret
with a shaded band between the 10th and 90th percentile columns. Values are
plotted exactly as they appear in the CSVs, no smoothing or rescaling.

Invoked as `render-figures --spec plots.toml`.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

EXPECTED_HEADER = ["t", "mean_regret", "p10", "p90"]


class PlotSpecError(ValueError):
    """The plot spec or one of its referenced CSVs is unusable."""


@dataclass(frozen=True)
class Curve:
    label: str
    csv_path: Path


@dataclass(frozen=True)
class Panel:
    title: str
    curves: tuple[Curve, ...]


@dataclass(frozen=True)
class PlotSpec:
    panels: tuple[Panel, ...]
    output: Path
    log_scale: bool = False


@dataclass(frozen=True)
class CurveData:
    t: np.ndarray
    mean: np.ndarray
    p10: np.ndarray
    p90: np.ndarray


def load_plot_spec(path: str | Path) -> PlotSpec:
    path = Path(path)
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    try:
        out = doc["output"]["path"]
        raw_panels = doc["panel"]
    except KeyError as exc:
        raise PlotSpecError(f"plot spec missing required key: {exc}")
    if not raw_panels:
        raise PlotSpecError("plot spec defines no panels")
    base = path.parent
    panels = []
    for rp in raw_panels:
        raw_curves = rp.get("curve", [])
        if not raw_curves:
            raise PlotSpecError(f"panel {rp.get('title', '?')!r} has no curves")
        curves = tuple(
            Curve(label=c["label"], csv_path=(base / c["csv"]).resolve())
            for c in raw_curves
        )
        panels.append(Panel(title=rp.get("title", ""), curves=curves))
    return PlotSpec(
        panels=tuple(panels),
        output=(base / out).resolve(),
        log_scale=bool(doc["output"].get("log_scale", False)),
    )


def read_curve(path: Path) -> CurveData:
    if not path.exists():
        raise PlotSpecError(f"missing CSV: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != EXPECTED_HEADER:
        raise PlotSpecError(
            f"{path}: expected header {','.join(EXPECTED_HEADER)}, "
            f"got {','.join(rows[0]) if rows else 'empty file'}"
        )
    body = rows[1:]
    if not body:
        raise PlotSpecError(f"{path}: no data rows")
    try:
        data = np.array([[float(x) for x in row] for row in body])
    except ValueError as exc:
        raise PlotSpecError(f"{path}: non-numeric data ({exc})")
    if data.shape[1] != 4:
        raise PlotSpecError(f"{path}: expected 4 columns, got {data.shape[1]}")
    return CurveData(t=data[:, 0], mean=data[:, 1], p10=data[:, 2], p90=data[:, 3])


def render(spec: PlotSpec):
    """Draw the figure and write it as PNG and SVG; returns the figure."""
    n = len(spec.panels)
    fig, axes = plt.subplots(1, n, figsize=(6 * n, 4.5), squeeze=False)
    for ax, panel in zip(axes[0], spec.panels):
        for curve in panel.curves:
            data = read_curve(curve.csv_path)
            (line,) = ax.plot(data.t, data.mean, label=curve.label)
            ax.fill_between(
                data.t, data.p10, data.p90, alpha=0.2, color=line.get_color()
            )
        ax.set_title(panel.title)
        ax.set_xlabel("round t")
        ax.set_ylabel("cumulative regret")
        if spec.log_scale:
            ax.set_yscale("log")
        ax.legend()
    fig.tight_layout()
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output.with_suffix(".png"))
    fig.savefig(spec.output.with_suffix(".svg"))
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-figures",
        description="Render regret-curve panels from harness CSV files",
    )
    parser.add_argument("--spec", required=True, help="TOML plot description")
    args = parser.parse_args(argv)
    try:
        spec = load_plot_spec(args.spec)
        fig = render(spec)
    except (PlotSpecError, OSError, tomllib.TOMLDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    plt.close(fig)
    print(f"wrote {spec.output.with_suffix('.png')} and {spec.output.with_suffix('.svg')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
