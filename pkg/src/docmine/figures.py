"""Render corpus statistics as figures next to the delimited outputs."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_histograms(histograms, out_dir, prefix=""):
    """One bar-chart PNG per histogram; returns the written paths.

    Histogram buckets are value -> count maps; a 'blank' bucket, when
    present, is drawn as the last bar.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, buckets in histograms.items():
        if not buckets:
            continue
        labels = sorted((k for k in buckets if k != "blank"), key=_bucket_sort_key)
        if "blank" in buckets:
            labels.append("blank")
        counts = [buckets[k] for k in labels]
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.bar(range(len(labels)), counts, color="#4878a8")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels([str(l) for l in labels], rotation=45 if len(labels) > 12 else 0)
        ax.set_xlabel(name)
        ax.set_ylabel("count")
        ax.set_title(f"{prefix}{name}")
        fig.tight_layout()
        path = out_dir / f"{prefix}{name}.png"
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
        written.append(path)
    return written


def render_stage_counts(stage_counts, out_dir, prefix=""):
    if not stage_counts:
        return None
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stages = list(stage_counts)
    counts = [stage_counts[s] for s in stages]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(range(len(stages)), counts, color="#a85548")
    ax.set_xticks(range(len(stages)))
    ax.set_xticklabels(stages, rotation=20)
    ax.set_ylabel("pairs")
    ax.set_title(f"{prefix}pipeline stage counts")
    fig.tight_layout()
    path = out_dir / f"{prefix}stage_counts.png"
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def render_metric_bars(table_rows, out_dir, prefix=""):
    """Per-metric bar charts across systems from display-scaled aggregates."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not table_rows:
        return []
    systems = [row["system"] for row in table_rows]
    written = []
    metric_names = [k for k in table_rows[0] if k not in ("system", "pairs", "excluded_empty")]
    for metric in metric_names:
        values = [row[metric] for row in table_rows]
        if all(v is None for v in values):
            continue
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.bar(range(len(systems)), [0.0 if v is None else v for v in values], color="#5a9367")
        ax.set_xticks(range(len(systems)))
        ax.set_xticklabels(systems, rotation=20)
        ax.set_ylabel(metric)
        ax.set_title(f"{prefix}{metric} by system")
        fig.tight_layout()
        path = out_dir / f"{prefix}metric_{metric}.png"
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
        written.append(path)
    return written


def _bucket_sort_key(value):
    try:
        return (0, float(value))
    except (TypeError, ValueError):
        return (1, str(value))
