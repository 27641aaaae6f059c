"""Paired t-test over per-task scores."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float  # two-sided
    degenerate: bool = False  # zero variance in the differences


def student_t_two_sided(t: float, df: int) -> float:
    """P(|T| >= |t|) for Student's t with `df` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return float(betainc(0.5 * df, 0.5, df / (df + t * t)))


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """
    Test whether paired samples share a mean, on the differences d = a - b.

    t = mean(d) / (std(d) / √n) with the n-1 sample standard deviation. When every
    difference is equal the test is degenerate: p is 1.0 for a zero mean and 0.0
    otherwise.

    Raises:
        ValueError: Unequal lengths or fewer than 2 pairs.
    """
    a_arr = np.asarray(a, dtype=np.float64).reshape(-1)
    b_arr = np.asarray(b, dtype=np.float64).reshape(-1)
    if a_arr.shape != b_arr.shape:
        raise ValueError(f"paired samples differ in length: {a_arr.size} vs {b_arr.size}")
    n = a_arr.size
    if n < 2:
        raise ValueError(f"paired t-test needs at least 2 pairs, got {n}")
    d = a_arr - b_arr
    df = n - 1
    mean = float(np.mean(d))
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(t=0.0, df=df, p=1.0, degenerate=True)
        return TTestResult(t=math.copysign(math.inf, mean), df=df, p=0.0, degenerate=True)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t=t, df=df, p=student_t_two_sided(t, df))


def pvalue_matrix(scores_by_method: Mapping[str, Sequence[float]]) -> tuple[list[str], np.ndarray]:
    """
    Pairwise paired-t p-values between methods scored on the same tasks.

    Returns:
        (methods, P) where P[i, j] is the p-value of methods[i] vs methods[j] and the
        diagonal is NaN.
    """
    methods = list(scores_by_method)
    k = len(methods)
    out = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i + 1, k):
            p = paired_t_test(scores_by_method[methods[i]], scores_by_method[methods[j]]).p
            out[i, j] = out[j, i] = p
    return methods, out
