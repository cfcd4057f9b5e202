"""Straight-line variance-components reference for agreement statistics.

Pure-Python sums of squares plus scipy.stats for F quantiles. Kept
deliberately separate from the package implementation so the two can be
compared as independent routes.
"""
from __future__ import annotations

from scipy import stats


def mean(xs):
    return sum(xs) / len(xs)


def mean_squares(rows):
    n = len(rows)
    k = len(rows[0])
    grand = mean([x for row in rows for x in row])
    row_means = [mean(row) for row in rows]
    col_means = [mean([rows[i][j] for i in range(n)]) for j in range(k)]
    ss_r = k * sum((rm - grand) ** 2 for rm in row_means)
    ss_c = n * sum((cm - grand) ** 2 for cm in col_means)
    ss_e = 0.0
    for i in range(n):
        for j in range(k):
            ss_e += (rows[i][j] - row_means[i] - col_means[j] + grand) ** 2
    return ss_r / (n - 1), ss_c / (k - 1), ss_e / ((n - 1) * (k - 1))


def icc_a_k(rows, alpha=0.05):
    """Two-way absolute-agreement average-measures ICC with its CI."""
    n = len(rows)
    k = len(rows[0])
    ms_r, ms_c, ms_e = mean_squares(rows)
    icc = (ms_r - ms_e) / (ms_r + (ms_c - ms_e) / n)
    if ms_c == 0.0 and ms_e == 0.0:
        return icc, 1.0, 1.0
    icc1 = (ms_r - ms_e) / (ms_r + (k - 1) * ms_e + k * (ms_c - ms_e) / n)
    a = k * icc1 / (n * (1.0 - icc1))
    b = 1.0 + k * icc1 * (n - 1) / (n * (1.0 - icc1))
    v = (a * ms_c + b * ms_e) ** 2 / (
        (a * ms_c) ** 2 / (k - 1) + (b * ms_e) ** 2 / ((n - 1) * (k - 1)))
    f1 = stats.f.ppf(1.0 - alpha / 2.0, n - 1, v)
    f2 = stats.f.ppf(1.0 - alpha / 2.0, v, n - 1)
    low1 = n * (ms_r - f1 * ms_e) / (
        f1 * (k * ms_c + (k * n - k - n) * ms_e) + n * ms_r)
    up1 = n * (f2 * ms_r - ms_e) / (
        k * ms_c + (k * n - k - n) * ms_e + n * f2 * ms_r)
    low = low1 * k / (1.0 + (k - 1) * low1)
    up = up1 * k / (1.0 + (k - 1) * up1)
    return icc, low, up


def f_quantile(p, df1, df2):
    return float(stats.f.ppf(p, df1, df2))
