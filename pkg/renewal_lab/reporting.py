"""
Result emission
CSV and JSON writers plus standalone SVG histograms and line charts
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402

logger = logging.getLogger(__name__)

# Text as paths and fixed ids keep the SVG self-contained and stable
SVG_RC = {"svg.fonttype": "path", "svg.hashsalt": "renewal-lab"}


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    return value


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
    """
    Write rows under a header; floats are written with repr

    Args:
        path: Output file
        columns: Header and column order
        rows: Mappings holding at least the columns

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0

    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[name]) for name in columns])
            count += 1

    logger.info(f"Wrote {count} row(s) to {path}")
    return path


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    logger.info(f"Wrote {path}")
    return path


def _save(fig: Figure, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info(f"Wrote plot {path}")
    return path


def plot_histogram(
    path: Path,
    samples: Sequence[float],
    title: str,
    xlabel: str,
    bins: Union[int, Sequence[float]] = 50,
    reference: Optional[Sequence[Sequence[float]]] = None
) -> Path:
    """
    Density histogram with an optional reference curve

    Args:
        path: Output .svg file
        samples: Values to bin
        title: Plot title
        xlabel: X axis label
        bins: Number of bins
        reference: (x, y) pair drawn as a line over the histogram
    """
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot()
    ax.hist(samples, bins=bins, density=True, color="#4c72b0", alpha=0.75, label="empirical")
    if reference is not None:
        ax.plot(reference[0], reference[1], color="#c44e52", linewidth=1.5, label="analytic")
        ax.legend()
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    fig.tight_layout()
    return _save(fig, path)


def plot_lines(
    path: Path,
    x: Sequence[float],
    series: Dict[str, Sequence[float]],
    title: str,
    xlabel: str,
    ylabel: str,
    errors: Optional[Dict[str, Sequence[float]]] = None
) -> Path:
    """Line chart with one polyline per series, optional error bars"""
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot()
    for name, values in series.items():
        if errors and name in errors:
            ax.errorbar(x, values, yerr=errors[name], marker="o", capsize=3, label=name)
        else:
            ax.plot(x, values, marker="o", label=name)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def summary_line(label: str, estimate: float, target: Optional[float], passed: Optional[bool]) -> str:
    """One-line result banner for standard output"""
    parts: List[str] = [f"{label}: estimate={estimate!r}"]
    if target is not None:
        parts.append(f"target={target!r}")
    if passed is not None:
        parts.append("PASS" if passed else "FAIL")
    return " ".join(parts)
