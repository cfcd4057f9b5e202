"""Agreement and descriptive statistics over rating tables.

The central statistic is the two-way, absolute-agreement, average-measures
intraclass correlation ICC(A,k): rows are rated targets, columns are raters,
and the estimate is

    ICC(A,k) = (MS_R - MS_E) / (MS_R + (MS_C - MS_E) / n)

with a confidence interval obtained from the single-measure interval via a
Satterthwaite degrees-of-freedom approximation and a Spearman-Brown step-up.
Alongside it live the Cicchetti reliability labels, per-method descriptive
statistics, pairwise absolute mean differences, and the F-distribution
helpers the interval needs. Everything here is a pure computation; plotting
and report formatting live elsewhere.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import special

__all__ = [
    "AnalysisError",
    "DegenerateMatrixError",
    "GroupStats",
    "ICCResult",
    "ICCSummary",
    "MeanSquares",
    "RatingRecord",
    "RatingsFormatError",
    "classify_cicchetti",
    "f_cdf",
    "f_quantile",
    "group_by_stimulus",
    "icc_a_k",
    "icc_by_stimulus",
    "mean_difference_matrix",
    "mean_squares",
    "per_method_means",
    "pivot",
    "read_ratings_csv",
    "scores_by_method",
]


class AnalysisError(ValueError):
    """Raised for statistically invalid inputs."""


class DegenerateMatrixError(AnalysisError):
    """Raised when a ratings matrix has no between-target variance."""


class RatingsFormatError(ValueError):
    """Raised when a ratings table cannot be parsed."""


# ---------------------------------------------------------------------------
# F distribution


def _check_df(df: float, name: str) -> None:
    if not (isinstance(df, (int, float)) and math.isfinite(df) and df > 0):
        raise AnalysisError(f"{name} must be a positive finite number, got {df!r}")


def f_cdf(x: float, df1: float, df2: float) -> float:
    """Cumulative F(df1, df2) distribution via the regularized beta function."""
    _check_df(df1, "df1")
    _check_df(df2, "df2")
    if math.isnan(x):
        raise AnalysisError("x must not be NaN")
    if x <= 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    z = df1 * x / (df1 * x + df2)
    return float(special.betainc(df1 / 2.0, df2 / 2.0, z))


def f_quantile(p: float, df1: float, df2: float) -> float:
    """Inverse of f_cdf, computed by inverting the regularized beta function.

    Degrees of freedom may be non-integral; the Satterthwaite approximation
    in the ICC confidence interval produces real-valued df2.
    """
    _check_df(df1, "df1")
    _check_df(df2, "df2")
    if not (isinstance(p, (int, float)) and 0.0 < p < 1.0):
        raise AnalysisError(f"p must lie in (0, 1), got {p!r}")
    w = float(special.betaincinv(df1 / 2.0, df2 / 2.0, p))
    return df2 * w / (df1 * (1.0 - w))


# ---------------------------------------------------------------------------
# ICC


def classify_cicchetti(icc: float) -> str:
    """Reliability label for an ICC: poor, fair, good, or excellent."""
    if not math.isfinite(icc):
        raise AnalysisError("ICC must be finite to classify")
    if icc < 0.40:
        return "poor"
    if icc < 0.60:
        return "fair"
    if icc < 0.75:
        return "good"
    return "excellent"


@dataclass(frozen=True)
class MeanSquares:
    rows: float
    cols: float
    error: float
    n_targets: int
    k_raters: int


def _as_matrix(matrix: Sequence[Sequence[float]]) -> np.ndarray:
    try:
        arr = np.asarray(matrix, dtype=float)
    except (TypeError, ValueError) as exc:
        raise AnalysisError(f"not a rectangular numeric matrix: {exc}") from None
    if arr.ndim != 2:
        raise AnalysisError("ratings matrix must be two-dimensional")
    n, k = arr.shape
    if n < 2 or k < 2:
        raise AnalysisError(f"need at least 2 targets and 2 raters, got {n}x{k}")
    if not np.isfinite(arr).all():
        raise AnalysisError("ratings matrix contains non-finite cells")
    return arr


def mean_squares(matrix: Sequence[Sequence[float]]) -> MeanSquares:
    """Two-way decomposition of a complete targets-by-raters matrix."""
    x = _as_matrix(matrix)
    n, k = x.shape
    grand = x.mean()
    row_means = x.mean(axis=1)
    col_means = x.mean(axis=0)
    ss_rows = k * float(((row_means - grand) ** 2).sum())
    ss_cols = n * float(((col_means - grand) ** 2).sum())
    resid = x - row_means[:, None] - col_means[None, :] + grand
    ss_error = float((resid**2).sum())
    return MeanSquares(
        rows=ss_rows / (n - 1),
        cols=ss_cols / (k - 1),
        error=ss_error / ((n - 1) * (k - 1)),
        n_targets=n,
        k_raters=k,
    )


@dataclass(frozen=True)
class ICCResult:
    icc: float
    ci_low: float
    ci_high: float
    classification: str
    ms: MeanSquares
    alpha: float


def icc_a_k(matrix: Sequence[Sequence[float]], alpha: float = 0.05) -> ICCResult:
    """ICC(A,k) with a two-sided (1 - alpha) confidence interval.

    The interval follows the absolute-agreement convention: compute the
    single-measure bounds with F quantiles at a Satterthwaite-approximated
    denominator df, then step both bounds up to average measures.
    """
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha < 1.0):
        raise AnalysisError(f"alpha must lie in (0, 1), got {alpha!r}")
    ms = mean_squares(matrix)
    n, k = ms.n_targets, ms.k_raters
    if ms.rows == 0.0:
        raise DegenerateMatrixError("no between-target variance: all row means equal")
    denom = ms.rows + (ms.cols - ms.error) / n
    if denom == 0.0:
        raise DegenerateMatrixError("degenerate variance decomposition")
    icc = (ms.rows - ms.error) / denom
    if ms.cols == 0.0 and ms.error == 0.0:
        # perfect absolute agreement: the interval collapses
        return ICCResult(icc, 1.0, 1.0, classify_cicchetti(icc), ms, float(alpha))
    denom1 = ms.rows + (k - 1) * ms.error + k * (ms.cols - ms.error) / n
    if denom1 == 0.0:
        raise DegenerateMatrixError("degenerate variance decomposition")
    icc1 = (ms.rows - ms.error) / denom1
    a = k * icc1 / (n * (1.0 - icc1))
    b = 1.0 + k * icc1 * (n - 1) / (n * (1.0 - icc1))
    v = (a * ms.cols + b * ms.error) ** 2 / (
        (a * ms.cols) ** 2 / (k - 1) + (b * ms.error) ** 2 / ((n - 1) * (k - 1))
    )
    q = 1.0 - alpha / 2.0
    f_low = f_quantile(q, n - 1, v)
    f_up = f_quantile(q, v, n - 1)
    low1 = n * (ms.rows - f_low * ms.error) / (
        f_low * (k * ms.cols + (k * n - k - n) * ms.error) + n * ms.rows
    )
    up1 = n * (f_up * ms.rows - ms.error) / (
        k * ms.cols + (k * n - k - n) * ms.error + n * f_up * ms.rows
    )
    ci_low = low1 * k / (1.0 + (k - 1) * low1)
    ci_high = up1 * k / (1.0 + (k - 1) * up1)
    return ICCResult(icc, ci_low, ci_high, classify_cicchetti(icc), ms, float(alpha))


# ---------------------------------------------------------------------------
# descriptive statistics


@dataclass(frozen=True)
class GroupStats:
    count: int
    mean: float
    sd: float


def _group_stats(values: Sequence[float], owner: str) -> GroupStats:
    vals = [float(v) for v in values]
    if not vals:
        raise AnalysisError(f"{owner}: empty score group")
    if any(not math.isfinite(v) for v in vals):
        raise AnalysisError(f"{owner}: non-finite score")
    first = vals[0]
    if all(v == first for v in vals):
        # constant groups (including singletons) get an exact zero spread
        return GroupStats(len(vals), first, 0.0)
    m = sum(vals) / len(vals)
    var = sum((v - m) ** 2 for v in vals) / (len(vals) - 1)
    return GroupStats(len(vals), m, math.sqrt(var))


def per_method_means(data: Mapping[str, Sequence[float]]) -> dict[str, GroupStats]:
    """Mean and sample SD per method, in the mapping's own order."""
    if not data:
        raise AnalysisError("no methods given")
    return {str(name): _group_stats(scores, str(name)) for name, scores in data.items()}


def mean_difference_matrix(
    data: Mapping[str, Sequence[float]],
) -> tuple[tuple[str, ...], tuple[tuple[float, ...], ...]]:
    """Pairwise absolute differences of method means.

    Returns the method names (mapping order) and a symmetric matrix whose
    (i, j) entry is |mean_i - mean_j|. Purely descriptive; no significance
    testing is attached.
    """
    if len(data) < 2:
        raise AnalysisError("need at least two methods")
    methods = tuple(str(name) for name in data)
    means = [_group_stats(data[name], str(name)).mean for name in data]
    matrix = tuple(tuple(abs(mi - mj) for mj in means) for mi in means)
    return methods, matrix


# ---------------------------------------------------------------------------
# ratings ingestion


RATINGS_HEADER = ("target_id", "method", "score")
RATINGS_HEADER_GROUPED = ("stimulus_id", "target_id", "method", "score")


@dataclass(frozen=True)
class RatingRecord:
    stimulus_id: str | None
    target_id: str
    method: str
    score: float


def read_ratings_csv(path: str) -> list[RatingRecord]:
    """Read a ratings table.

    Two headers are accepted: ``target_id,method,score`` for a single
    matrix, and ``stimulus_id,target_id,method,score`` when rows are grouped
    per stimulus.
    """
    records: list[RatingRecord] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(h.strip() for h in next(reader))
        except StopIteration:
            raise RatingsFormatError("ratings file is empty") from None
        if header == RATINGS_HEADER:
            grouped = False
        elif header == RATINGS_HEADER_GROUPED:
            grouped = True
        else:
            raise RatingsFormatError(
                "ratings header must be "
                f"{','.join(RATINGS_HEADER)} or {','.join(RATINGS_HEADER_GROUPED)}"
            )
        width = len(header)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise RatingsFormatError(f"line {lineno}: expected {width} fields")
            cells = [c.strip() for c in row]
            stimulus = cells[0] if grouped else None
            target, method, raw = cells[-3], cells[-2], cells[-1]
            if grouped and not stimulus:
                raise RatingsFormatError(f"line {lineno}: empty stimulus_id")
            if not target or not method:
                raise RatingsFormatError(f"line {lineno}: empty identifier")
            try:
                score = float(raw)
            except ValueError:
                raise RatingsFormatError(f"line {lineno}: non-numeric score") from None
            if not math.isfinite(score):
                raise RatingsFormatError(f"line {lineno}: non-finite score")
            records.append(RatingRecord(stimulus, target, method, score))
    if not records:
        raise RatingsFormatError("ratings file has no data rows")
    return records


def pivot(
    records: Iterable[RatingRecord],
) -> tuple[tuple[str, ...], tuple[str, ...], tuple[tuple[float, ...], ...]]:
    """Arrange records into a complete targets-by-methods matrix.

    Targets and methods are sorted so the layout is reproducible. Duplicate
    and missing cells are rejected; the agreement statistics require a
    complete table.
    """
    cells: dict[tuple[str, str], float] = {}
    for rec in records:
        key = (rec.target_id, rec.method)
        if key in cells:
            raise RatingsFormatError(
                f"duplicate cell for target {rec.target_id!r} method {rec.method!r}"
            )
        cells[key] = rec.score
    targets = tuple(sorted({t for t, _ in cells}))
    methods = tuple(sorted({m for _, m in cells}))
    matrix = []
    for target in targets:
        row = []
        for method in methods:
            if (target, method) not in cells:
                raise RatingsFormatError(
                    f"missing score for target {target!r} method {method!r}"
                )
            row.append(cells[(target, method)])
        matrix.append(tuple(row))
    return targets, methods, tuple(matrix)


def group_by_stimulus(records: Iterable[RatingRecord]) -> dict[str, list[RatingRecord]]:
    groups: dict[str, list[RatingRecord]] = {}
    for rec in records:
        if rec.stimulus_id is None:
            raise RatingsFormatError("record has no stimulus_id; use the grouped header")
        groups.setdefault(rec.stimulus_id, []).append(rec)
    return groups


def scores_by_method(records: Iterable[RatingRecord]) -> dict[str, list[float]]:
    """Scores per method (methods sorted, scores in record order)."""
    raw: dict[str, list[float]] = {}
    for rec in records:
        raw.setdefault(rec.method, []).append(rec.score)
    return {m: raw[m] for m in sorted(raw)}


@dataclass(frozen=True)
class ICCSummary:
    per_stimulus: tuple[tuple[str, ICCResult], ...]
    average_icc: float
    classification: str


def icc_by_stimulus(records: Iterable[RatingRecord], alpha: float = 0.05) -> ICCSummary:
    """ICC(A,k) per stimulus plus the arithmetic mean of the estimates.

    Each stimulus contributes one complete matrix with rated targets as rows
    and methods as raters; the summary averages the per-stimulus estimates.
    """
    groups = group_by_stimulus(records)
    if not groups:
        raise AnalysisError("no stimuli found")
    results = []
    for stimulus in sorted(groups):
        _, _, matrix = pivot(groups[stimulus])
        results.append((stimulus, icc_a_k(matrix, alpha)))
    average = sum(r.icc for _, r in results) / len(results)
    return ICCSummary(tuple(results), average, classify_cicchetti(average))
