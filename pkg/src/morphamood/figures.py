"""PNG figure rendering for the report commands.

Uses matplotlib Figure objects directly (Agg canvas, no global pyplot
state) so headless runs are safe and repeated renders of the same data
produce identical files.
"""
from __future__ import annotations

from typing import Mapping, Sequence

from matplotlib.figure import Figure

from .analysis import GroupStats
from .session import DurationReport
from .stimuli import SelectionResult, StimulusRecord

PNG_METADATA = {"Software": "morphamood"}

_CATEGORY_COLORS = {
    "strong": "tab:red",
    "weak": "tab:blue",
    "balanced": "tab:green",
    "neutral_valence": "tab:orange",
    "neutral_arousal": "tab:purple",
}


def _save(fig: Figure, path: str) -> None:
    fig.savefig(path, format="png", dpi=100, metadata=PNG_METADATA)


def selection_figure(
    corpus: Sequence[StimulusRecord], result: SelectionResult, path: str
) -> None:
    """Centered valence/arousal scatter with the 16 picks highlighted."""
    fig = Figure(figsize=(6.0, 6.0))
    ax = fig.subplots()
    category_of: dict[str, str] = {}
    for slot, rid in result.by_slot.items():
        head, tail = slot.split(".")
        category_of[rid] = head if head.startswith("neutral") else tail
    usable = [r for r in corpus if r.usable]
    rest = [r.centered for r in usable if r.id not in category_of]
    ax.scatter([p[0] for p in rest], [p[1] for p in rest],
               s=12, c="lightgray", label="corpus")
    for category, color in _CATEGORY_COLORS.items():
        picked = [r.centered for r in usable if category_of.get(r.id) == category]
        if picked:
            ax.scatter([p[0] for p in picked], [p[1] for p in picked],
                       s=40, c=color, label=category)
    ax.axhline(0.0, color="black", linewidth=0.6)
    ax.axvline(0.0, color="black", linewidth=0.6)
    ax.set_xlabel("valence (centered)")
    ax.set_ylabel("arousal (centered)")
    ax.set_title("stimulus selection")
    ax.legend(loc="upper left", fontsize=8)
    _save(fig, path)


def method_means_figure(
    stats: Mapping[str, GroupStats], path: str, ylabel: str = "score"
) -> None:
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.subplots()
    methods = list(stats)
    means = [stats[m].mean for m in methods]
    sds = [stats[m].sd for m in methods]
    ax.bar(methods, means, yerr=sds, capsize=4, color="tab:blue")
    ax.set_ylabel(ylabel)
    ax.set_title("per-method means")
    _save(fig, path)


def mean_difference_figure(
    methods: Sequence[str], matrix: Sequence[Sequence[float]], path: str
) -> None:
    fig = Figure(figsize=(5.0, 4.5))
    ax = fig.subplots()
    image = ax.imshow(matrix, cmap="viridis")
    ax.set_xticks(range(len(methods)), labels=methods)
    ax.set_yticks(range(len(methods)), labels=methods)
    for i in range(len(methods)):
        for j in range(len(methods)):
            ax.text(j, i, f"{matrix[i][j]:.3f}", ha="center", va="center",
                    color="white", fontsize=8)
    ax.set_title("absolute mean differences")
    fig.colorbar(image, ax=ax)
    _save(fig, path)


def durations_figure(report: DurationReport, path: str) -> None:
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.subplots()
    per_method = report.per_method()
    methods = sorted(per_method)
    means = [per_method[m].mean_s for m in methods]
    sds = [per_method[m].sd_s for m in methods]
    ax.bar(methods, means, yerr=sds, capsize=4, color="tab:orange")
    ax.set_ylabel("seconds")
    ax.set_title("rating duration per method")
    _save(fig, path)
