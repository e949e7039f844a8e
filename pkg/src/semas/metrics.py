"""Detection / regression metrics and the small statistics toolkit.

Everything here is dependency-free on purpose: the two-sided p-values come
from an in-repo regularized incomplete beta function so runs are exactly
reproducible across environments.
"""

from dataclasses import dataclass, field
from math import exp, lgamma, log, sqrt
from typing import Sequence

import numpy as np

from .errors import LengthMismatch, SingleClass, TooFewIterations, TooFewSamples

__all__ = [
    "ConfusionCounts",
    "ClassificationMetrics",
    "IterationReport",
    "classification_metrics",
    "roc_auc",
    "regression_metrics",
    "welch_t",
    "cohen_d",
    "delta_f1",
    "student_t_cdf",
    "student_t_ppf",
    "mean_ci",
]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ClassificationMetrics:
    counts: ConfusionCounts
    precision: float
    recall: float
    f1: float
    accuracy: float


@dataclass
class IterationReport:
    """One evaluation pass over the test block."""

    iteration: int
    f1: float
    precision: float
    recall: float
    accuracy: float
    roc_auc: float
    delta_f1: float
    latency_ms: float
    policy: dict = field(default_factory=dict)

    def as_dict(self, include_latency: bool = True) -> dict:
        d = {
            "iteration": self.iteration,
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
            "accuracy": self.accuracy,
            "roc_auc": self.roc_auc,
            "delta_f1": self.delta_f1,
            "policy": dict(self.policy),
        }
        if include_latency:
            d["latency_ms"] = self.latency_ms
        return d


def classification_metrics(predictions, labels) -> ClassificationMetrics:
    """Confusion counts plus P/R/F1/accuracy for binary arrays.

    Zero-denominator conventions: precision is 0 when nothing is predicted
    positive, recall is 0 when no positives exist, F1 is 0 when P + R = 0.
    """
    pred = np.asarray(predictions).astype(np.int64).ravel()
    lab = np.asarray(labels).astype(np.int64).ravel()
    if pred.shape != lab.shape:
        raise LengthMismatch(f"{pred.shape} vs {lab.shape}")
    tp = int(np.sum((pred == 1) & (lab == 1)))
    fp = int(np.sum((pred == 1) & (lab == 0)))
    tn = int(np.sum((pred == 0) & (lab == 0)))
    fn = int(np.sum((pred == 0) & (lab == 1)))
    counts = ConfusionCounts(tp, fp, tn, fn)
    precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
    recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0
    accuracy = (tp + tn) / counts.total if counts.total > 0 else 0.0
    return ClassificationMetrics(counts, precision, recall, f1, accuracy)


def roc_auc(scores, labels) -> float:
    """Ranking quality of the scores; ties contribute 1/2 a concordant pair.

    Computed with average ranks, which is algebraically the normalized
    Mann-Whitney U statistic.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).astype(np.int64).ravel()
    if s.shape != y.shape:
        raise LengthMismatch(f"{s.shape} vs {y.shape}")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC-AUC needs both classes")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty_like(s)
    sorted_s = s[order]
    # average ranks within tie groups (1-based)
    i = 0
    n = len(s)
    while i < n:
        j = i
        while j + 1 < n and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    r_pos = float(np.sum(ranks[y == 1]))
    return (r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def regression_metrics(preds, truths) -> tuple[float, float]:
    """(MAE, RMSE) over paired arrays."""
    p = np.asarray(preds, dtype=np.float64).ravel()
    t = np.asarray(truths, dtype=np.float64).ravel()
    if p.shape != t.shape:
        raise LengthMismatch(f"{p.shape} vs {t.shape}")
    err = p - t
    mae = float(np.mean(np.abs(err)))
    rmse = float(sqrt(np.mean(err * err)))
    return mae, rmse


def delta_f1(reports: Sequence) -> float:
    """Final-iteration F1 minus first-iteration F1."""
    if len(reports) < 2:
        raise TooFewIterations("need at least 2 iterations")
    vals = [r.f1 if isinstance(r, IterationReport) else float(r) for r in reports]
    return vals[-1] - vals[0]


# ---------------------------------------------------------------------------
# Student-t machinery (regularized incomplete beta, continued fraction).
# ---------------------------------------------------------------------------

_BETA_EPS = 1e-15
_BETA_FPMIN = 1e-300
_BETA_MAX_ITER = 300


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_FPMIN:
        d = _BETA_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            break
    return h


def regularized_betainc(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x)
    front = exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(t: float, dof: float) -> float:
    if dof <= 0:
        raise ValueError("dof must be positive")
    if t == 0.0:
        return 0.5
    x = dof / (dof + t * t)
    tail = 0.5 * regularized_betainc(dof / 2.0, 0.5, x)
    return 1.0 - tail if t > 0 else tail


def student_t_ppf(q: float, dof: float) -> float:
    """Inverse CDF by bisection on the in-repo CDF."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must be in (0, 1)")
    lo, hi = -1e6, 1e6
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, dof) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class WelchResult:
    t: float
    dof: float
    p: float


def welch_t(sample_a, sample_b) -> WelchResult:
    """Welch's unequal-variance t statistic, Welch-Satterthwaite dof,
    two-sided p-value.

    Degenerate conventions: equal means give t = 0 / p = 1 even with zero
    variance; unequal means with zero pooled variance give an infinite t.
    """
    a = np.asarray(sample_a, dtype=np.float64).ravel()
    b = np.asarray(sample_b, dtype=np.float64).ravel()
    if len(a) < 2 or len(b) < 2:
        raise TooFewSamples("each sample needs n >= 2")
    na, nb = len(a), len(b)
    va = float(np.var(a, ddof=1))
    vb = float(np.var(b, ddof=1))
    diff = float(np.mean(a) - np.mean(b))
    se2 = va / na + vb / nb
    if se2 == 0.0:
        if diff == 0.0:
            return WelchResult(0.0, float(na + nb - 2), 1.0)
        return WelchResult(float("inf") if diff > 0 else float("-inf"), float(na + nb - 2), 0.0)
    t = diff / sqrt(se2)
    dof = se2 * se2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    p = 2.0 * (1.0 - student_t_cdf(abs(t), dof))
    return WelchResult(t, dof, min(1.0, max(0.0, p)))


def cohen_d(sample_a, sample_b) -> float:
    """Effect size with the pooled standard deviation."""
    a = np.asarray(sample_a, dtype=np.float64).ravel()
    b = np.asarray(sample_b, dtype=np.float64).ravel()
    if len(a) < 2 or len(b) < 2:
        raise TooFewSamples("each sample needs n >= 2")
    na, nb = len(a), len(b)
    va = float(np.var(a, ddof=1))
    vb = float(np.var(b, ddof=1))
    pooled = sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2))
    diff = float(np.mean(a) - np.mean(b))
    if pooled == 0.0:
        return 0.0 if diff == 0.0 else float("inf") if diff > 0 else float("-inf")
    return diff / pooled


def mean_ci(values, level: float = 0.95) -> tuple[float, float]:
    """(mean, half-width) of the t-based confidence interval."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if len(v) < 2:
        return float(np.mean(v)), 0.0
    n = len(v)
    s = float(np.std(v, ddof=1))
    tq = student_t_ppf(0.5 + level / 2.0, n - 1)
    return float(np.mean(v)), tq * s / sqrt(n)
