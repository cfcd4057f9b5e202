"""Plain-text report rendering for the command-line tools.

Every report is a deterministic tab-delimited document: stable section
order, stable row order (sorted keys), and all numbers printed with six
decimal places so identical inputs produce byte-identical output.
"""
from __future__ import annotations

import json
from typing import Mapping, Sequence

from .analysis import (
    GroupStats,
    ICCResult,
    ICCSummary,
    RatingRecord,
    mean_difference_matrix,
    per_method_means,
    scores_by_method,
)
from .expression import Cursor, PolarMap, interpolate_expression, interpolate_va
from .session import DurationReport, ReplayResult
from .stimuli import SelectionResult


def fmt(x: float) -> str:
    # the +0.0 folds negative zero into plain zero
    return f"{x + 0.0:.6f}"


def interp_report(pmap: PolarMap, cursor: Cursor) -> str:
    fv = interpolate_expression(pmap, cursor)
    va = interpolate_va(pmap, cursor)
    lines = [
        f"cursor.r\t{fmt(cursor.r)}",
        f"cursor.phi\t{fmt(cursor.phi)}",
    ]
    lines += [f"fv.{name}\t{fmt(value)}" for name, value in zip(fv.schema.names, fv.values)]
    lines.append(f"va.valence\t{fmt(va.valence)}")
    lines.append(f"va.arousal\t{fmt(va.arousal)}")
    return "\n".join(lines) + "\n"


def map_summary(pmap: PolarMap) -> str:
    lines = [
        "map\tvalid",
        f"features\t{len(pmap.schema.names)}",
        f"expressions\t{len(pmap.expressions())}",
        f"fields\t{len(pmap.fields)}",
    ]
    for expr in pmap.expressions():
        lines.append(
            f"expression\t{expr.name}\t{expr.ring}\t{fmt(expr.angle_deg)}"
            f"\t{fmt(expr.va.valence)}\t{fmt(expr.va.arousal)}"
        )
    return "\n".join(lines) + "\n"


def selection_report(result: SelectionResult) -> str:
    return json.dumps(result.to_dict(), indent=2) + "\n"


def _durations_lines(report: DurationReport) -> list[str]:
    lines = ["# durations", f"ratings\t{len(report.ratings)}", f"excluded\t{report.excluded}"]
    lines.append("scope\tkey\tcount\tmean_s\tsd_s")
    for mode in sorted(report.per_mode()):
        agg = report.per_mode()[mode]
        lines.append(f"mode\t{mode}\t{agg.count}\t{fmt(agg.mean_s)}\t{fmt(agg.sd_s)}")
    for method in sorted(report.per_method()):
        agg = report.per_method()[method]
        lines.append(f"method\t{method}\t{agg.count}\t{fmt(agg.mean_s)}\t{fmt(agg.sd_s)}")
    for method, stimulus in sorted(
        report.per_method_stimulus(), key=lambda k: (k[0], k[1] or "")
    ):
        agg = report.per_method_stimulus()[(method, stimulus)]
        lines.append(
            f"method_stimulus\t{method}/{stimulus or '-'}"
            f"\t{agg.count}\t{fmt(agg.mean_s)}\t{fmt(agg.sd_s)}"
        )
    return lines


def durations_report(report: DurationReport) -> str:
    return "\n".join(_durations_lines(report)) + "\n"


def replay_report(result: ReplayResult, durations: DurationReport) -> str:
    lines = [
        "# replay",
        f"sessions\t{len(result.final_states)}",
        f"events\t{result.events}",
        f"protocol_errors\t{result.protocol_errors}",
        "# committed",
    ]
    feature_names: tuple[str, ...] = ()
    if result.ratings:
        feature_names = result.ratings[0].rating.fv.schema.names
    header = "session\tsubject\tmethod\tstimulus\tr\tphi\tvalence\tarousal"
    if feature_names:
        header += "\t" + "\t".join(feature_names)
    lines.append(header)
    for entry in result.ratings:
        rating = entry.rating
        row = (
            f"{entry.session_id}\t{entry.subject_id}\t{entry.method}\t{rating.stimulus_id}"
            f"\t{fmt(rating.cursor.r)}\t{fmt(rating.cursor.phi)}"
            f"\t{fmt(rating.va.valence)}\t{fmt(rating.va.arousal)}"
        )
        row += "".join(f"\t{fmt(v)}" for v in rating.fv.values)
        lines.append(row)
    lines += _durations_lines(durations)
    return "\n".join(lines) + "\n"


def _icc_lines(label: str, result: ICCResult) -> str:
    ms = result.ms
    return (
        f"icc\t{label}\t{ms.n_targets}\t{ms.k_raters}\t{fmt(result.icc)}"
        f"\t{fmt(result.ci_low)}\t{fmt(result.ci_high)}\t{result.classification}"
    )


def icc_report(
    records: Sequence[RatingRecord],
    summary: ICCSummary | None,
    single: ICCResult | None,
    alpha: float,
) -> str:
    """Agreement report: ICC table plus descriptive statistics.

    Exactly one of ``summary`` (grouped input, per-stimulus matrices) and
    ``single`` (one matrix) is given.
    """
    lines = [
        "# icc two-way absolute-agreement average-measures",
        "# rows are rated targets, columns are rating methods",
        f"alpha\t{fmt(alpha)}",
        "scope\tlabel\tn_targets\tk_raters\ticc\tci_low\tci_high\tclassification",
    ]
    if summary is not None:
        for stimulus, result in summary.per_stimulus:
            lines.append(_icc_lines(stimulus, result))
        lines.append(f"average\t-\t-\t-\t{fmt(summary.average_icc)}\t-\t-\t{summary.classification}")
    if single is not None:
        lines.append(_icc_lines("all", single))
    by_method = scores_by_method(records)
    lines.append("# per-method means")
    lines.append("method\tcount\tmean\tsd")
    stats = per_method_means(by_method)
    for method in stats:
        group = stats[method]
        lines.append(f"{method}\t{group.count}\t{fmt(group.mean)}\t{fmt(group.sd)}")
    if len(by_method) >= 2:
        methods, matrix = mean_difference_matrix(by_method)
        lines.append("# absolute mean differences")
        lines.append("method\t" + "\t".join(methods))
        for name, row in zip(methods, matrix):
            lines.append(name + "".join(f"\t{fmt(v)}" for v in row))
    return "\n".join(lines) + "\n"
