"""Result presentation: the final text report, champion files, histograms.

Counts appear both with and without thousands separators so the report is
both readable and diff-friendly. Best ASPL is printed as the exact fraction
first, decimal second; rounding never touches the stored value. The
histogram lands as TSV (bucket_lo, bucket_hi, frequency) plus a rendered
bar-chart PNG next to it.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Optional

from .filters import SearchResult, emit_task_histogram


def fmt_count(x: int) -> str:
    return f"{x:,} ({x})"


def fmt_aspl(value: Fraction) -> str:
    return f"{value} = {float(value):.6f}"


def fmt_rate(count: int, elapsed_secs: float) -> str:
    if elapsed_secs <= 0:
        return "n/a"
    return f"{count / elapsed_secs:.1f} graphs/s"


def build_report(result: SearchResult, elapsed_secs: float, *,
                 split_level: Optional[int] = None,
                 champions_path: Optional[str] = None,
                 histogram_path: Optional[str] = None,
                 checkpoint_path: Optional[str] = None,
                 resumed_tasks: int = 0,
                 stats: Optional[dict[str, int]] = None) -> list[str]:
    """Human-readable summary lines for a finished run."""
    spec, f = result.spec, result.filter
    lines = [f"order {spec.n} degree {spec.k}"]
    if split_level is not None:
        lines.append(f"split level {split_level}, tasks {result.tasks_done}")
    lines.append(f"total graphs: {fmt_count(result.total_count)}")
    if not f.inert:
        if result.raw_count is not None:
            lines.append(f"raw leaves: {fmt_count(result.raw_count)}")
        else:
            lines.append("raw leaves: not tracked over the wire")
    if f.max_diameter is not None:
        lines.append(f"diameter cap: {f.max_diameter}")
    if f.track_min_aspl:
        if result.best_aspl is not None:
            lines.append(f"best ASPL: {fmt_aspl(result.best_aspl)}")
            kept = len(result.champions)
            lines.append(f"champions: {result.champion_count} found, {kept} kept")
        else:
            lines.append("best ASPL: none (no graph passed the filter)")
    if champions_path is not None:
        lines.append(f"champions file: {champions_path}")
    if histogram_path is not None:
        lines.append(f"histogram: {histogram_path} and {png_sibling(histogram_path)}")
    if checkpoint_path is not None:
        extra = f" (resumed {resumed_tasks} tasks)" if resumed_tasks else ""
        lines.append(f"checkpoint: {checkpoint_path}{extra}")
    lines.append(f"elapsed: {elapsed_secs:.2f} s")
    lines.append(f"throughput: {fmt_rate(result.total_count, elapsed_secs)}")
    if stats:
        pairs = ", ".join(f"{k}={v}" for k, v in sorted(stats.items()))
        lines.append(f"messages: {pairs}")
    return lines


def write_champions(path: str, champions: list[str]) -> int:
    """One graph6 string per line; returns the number written."""
    with open(path, "w", encoding="ascii") as fh:
        for g6 in champions:
            fh.write(g6 + "\n")
    return len(champions)


def png_sibling(tsv_path: str) -> str:
    root, ext = os.path.splitext(tsv_path)
    return (root if ext else tsv_path) + ".png"


def write_histogram(tsv_path: str, result: SearchResult) -> list[tuple[int, int, int]]:
    """Write bucket_lo<TAB>bucket_hi<TAB>frequency rows plus a PNG sibling."""
    rows = emit_task_histogram(result)
    with open(tsv_path, "w", encoding="ascii") as fh:
        for lo, hi, freq in rows:
            fh.write(f"{lo}\t{hi}\t{freq}\n")
    render_histogram_png(png_sibling(tsv_path), rows, result)
    return rows


def render_histogram_png(png_path: str, rows: list[tuple[int, int, int]],
                         result: SearchResult) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [str(lo) if lo == hi else f"{lo}-{hi}" for lo, hi, _ in rows]
    freqs = [freq for _, _, freq in rows]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(rows)), 4.0))
    ax.bar(range(len(rows)), freqs, color="#4878a8", edgecolor="black", linewidth=0.5)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_xlabel("graphs per sub-task")
    ax.set_ylabel("sub-tasks")
    spec = result.spec
    ax.set_title(f"Per-task yield, {spec.n}-vertex {spec.k}-regular "
                 f"({result.tasks_done} sub-tasks)")
    for i, freq in enumerate(freqs):
        if freq:
            ax.text(i, freq, str(freq), ha="center", va="bottom", fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
