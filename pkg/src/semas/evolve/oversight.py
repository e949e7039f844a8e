"""Meta-agent oversight: drift detection and the policy deployment gate.

A candidate policy ships only when it stays inside the hard ranges, the
latest metric window shows no statistically significant F1 regression
against the previous one (Welch, alpha = 0.05), and the attribution
report for the decision surrogate satisfies the efficiency axiom.  When
the drift detector has fired, the regression gate is waived: metric drops
under a shifted distribution are expected and blocking adaptation there
would freeze the system on a stale operating point.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .. import config
from ..errors import InsufficientHistory
from ..metrics import welch_t
from .shapley import ShapleyReport
from .ppo import PolicyTunables

PH_DELTA = 0.005
PH_THRESHOLD = 300.0
PH_WARMUP = 30


class PageHinkley:
    """Two-sided Page-Hinkley change detector over a score stream.

    Deviations are standardized by running mean/variance (Welford) before
    accumulation, so the threshold is calibrated in sigma units and the
    detector behaves the same whatever the raw score scale.  The first
    `warmup` samples only feed the moment estimates.
    """

    def __init__(
        self,
        delta: float = PH_DELTA,
        threshold: float = PH_THRESHOLD,
        warmup: int = PH_WARMUP,
    ):
        self.delta = delta
        self.threshold = threshold
        self.warmup = warmup
        self.reset()

    def reset(self) -> None:
        self.n = 0
        self.mean = 0.0
        self._m2 = 0.0
        self.m_up = 0.0
        self.m_up_min = 0.0
        self.m_dn = 0.0
        self.m_dn_max = 0.0
        self.drifted = False

    def update(self, x: float) -> bool:
        self.n += 1
        delta_mean = x - self.mean
        self.mean += delta_mean / self.n
        self._m2 += delta_mean * (x - self.mean)
        if self.n <= self.warmup:
            return self.drifted
        std = max(np.sqrt(self._m2 / (self.n - 1)), 1e-9)
        z = (x - self.mean) / std
        self.m_up += z - self.delta
        self.m_up_min = min(self.m_up_min, self.m_up)
        self.m_dn += z + self.delta
        self.m_dn_max = max(self.m_dn_max, self.m_dn)
        if (self.m_up - self.m_up_min > self.threshold) or (
            self.m_dn_max - self.m_dn > self.threshold
        ):
            self.drifted = True
        return self.drifted

    @property
    def state(self) -> str:
        return "drift" if self.drifted else "stable"


def detect_drift(scores: Sequence[float], delta: float = PH_DELTA, threshold: float = PH_THRESHOLD) -> str:
    """Run the detector over a finite stream; empty history is stable."""
    ph = PageHinkley(delta, threshold)
    for x in scores:
        ph.update(float(x))
    return ph.state


@dataclass(frozen=True)
class ValidationResult:
    accepted: bool
    reason: str
    p_value: Optional[float] = None


def validate_policy(
    candidate: PolicyTunables,
    recent_windows: Sequence[Sequence[float]],
    shapley_report: Optional[ShapleyReport] = None,
    drift_state: str = "stable",
    alpha: float = 0.05,
) -> ValidationResult:
    """Gate a candidate policy before deployment."""
    if len(recent_windows) < 2:
        raise InsufficientHistory("need at least two evaluation windows")

    lo_w, hi_w = config.W_RANGE
    lo_r, hi_r = config.RHO_RANGE
    lo_t, hi_t = config.TAU_RANGE
    in_range = (
        lo_w <= candidate.w1 <= hi_w
        and lo_w <= candidate.w2 <= hi_w
        and abs(candidate.w1 + candidate.w2 - 1.0) <= 1e-9
        and lo_r <= candidate.rho <= hi_r
        and lo_t <= candidate.tau <= hi_t
    )
    if not in_range:
        return ValidationResult(False, "out_of_range")

    if shapley_report is not None and not shapley_report.consistent:
        return ValidationResult(False, "attribution_inconsistent")

    prev = np.asarray(recent_windows[-2], dtype=np.float64)
    curr = np.asarray(recent_windows[-1], dtype=np.float64)
    res = welch_t(curr, prev)
    regressed = res.p < alpha and float(np.mean(curr)) < float(np.mean(prev))
    if regressed and drift_state != "drift":
        return ValidationResult(False, "significant_regression", res.p)
    return ValidationResult(True, "ok", res.p)


# ---------------------------------------------------------------------------
# Decision surrogate for the attribution reports: an averaged bundle of
# depth-1 stumps distilled from the consensus decisions on a small,
# correlation-selected feature subset.
# ---------------------------------------------------------------------------


@dataclass
class StumpSurrogate:
    feature_idx: np.ndarray  # columns of the full feature space
    stump_feature: np.ndarray  # index into feature_idx per stump
    stump_threshold: np.ndarray
    left_value: np.ndarray
    right_value: np.ndarray
    baseline: np.ndarray = field(default=None)

    def predict_sub(self, X_sub) -> np.ndarray:
        """Predict from the selected-feature view (m, k)."""
        X_sub = np.atleast_2d(np.asarray(X_sub, dtype=np.float64))
        out = np.zeros(X_sub.shape[0])
        for f, thr, lv, rv in zip(
            self.stump_feature, self.stump_threshold, self.left_value, self.right_value
        ):
            out += np.where(X_sub[:, f] <= thr, lv, rv)
        return out / len(self.stump_feature)

    def predict(self, X_full) -> np.ndarray:
        X_full = np.atleast_2d(np.asarray(X_full, dtype=np.float64))
        return self.predict_sub(X_full[:, self.feature_idx])


def fit_surrogate(
    X, decisions, max_features: int = 8, n_stumps: int = 24, seed: int = 0
) -> StumpSurrogate:
    """Distill binary consensus decisions into a stump bundle."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(decisions, dtype=np.float64).ravel()
    rng = np.random.default_rng(seed)
    d = X.shape[1]

    y_c = y - y.mean()
    X_c = X - X.mean(axis=0)
    denom = X_c.std(axis=0) * (y_c.std() + 1e-12) + 1e-12
    corr = np.abs((X_c * y_c[:, None]).mean(axis=0) / denom)
    k = min(max_features, d)
    feature_idx = np.sort(np.argsort(-corr, kind="stable")[:k])

    stump_feature = np.empty(n_stumps, dtype=np.int64)
    stump_threshold = np.empty(n_stumps)
    left_value = np.empty(n_stumps)
    right_value = np.empty(n_stumps)
    quantiles = rng.uniform(0.2, 0.8, size=n_stumps)
    for s in range(n_stumps):
        f = s % k
        col = X[:, feature_idx[f]]
        thr = float(np.quantile(col, quantiles[s]))
        mask = col <= thr
        left = float(y[mask].mean()) if mask.any() else float(y.mean())
        right = float(y[~mask].mean()) if (~mask).any() else float(y.mean())
        stump_feature[s] = f
        stump_threshold[s] = thr
        left_value[s] = left
        right_value[s] = right
    return StumpSurrogate(
        feature_idx=feature_idx,
        stump_feature=stump_feature,
        stump_threshold=stump_threshold,
        left_value=left_value,
        right_value=right_value,
        baseline=X[:, feature_idx].mean(axis=0),
    )
