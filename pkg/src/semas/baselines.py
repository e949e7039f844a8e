"""The two comparison systems: a static ensemble and a rule-based adapter.

Baseline 1 fuses three detector scores with frozen weights (0.4, 0.4, 0.2)
and a threshold calibrated exactly once; its outputs must be bit-identical
across iterations.  Baseline 2 keeps the same members but combines their
binary votes with performance-proportional weights and retunes
contamination / threshold between iterations with fixed-step rules.

The third member is the sequence scorer (sigmoid-head LSTM) standing in
for the attention model of the original lineup at the same 0.2 weight;
every emitted report declares the substitution.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .detect import IsolationForestModel, OcsvmModel, if_fit, ocsvm_fit
from .errors import AllZeroPerformance, SingleClass, UnfittedMember
from .neural import LstmRegressor, train_bce
from .rul import make_sequences

STATIC_WEIGHTS = (0.4, 0.4, 0.2)
SEQ_MEMBER_NOTE = "sequence member: LSTM classifier substituted for the attention model at weight 0.2"

RHO_BOUNDS = (0.01, 0.49)
TAU_BOUNDS = (0.01, 0.99)


def combine_static(a_ocsvm: float, a_if: float, a_seq: float) -> float:
    """Fixed-weight fusion: 0.4, 0.4, 0.2."""
    w = STATIC_WEIGHTS
    return w[0] * a_ocsvm + w[1] * a_if + w[2] * a_seq


def calibrate_threshold_once(scores, labels, grid=None) -> float:
    """One-time threshold pick: argmax F1 over the candidate grid, smallest
    grid point on ties; frozen afterwards."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).astype(np.int64).ravel()
    if len(np.unique(y)) < 2:
        raise SingleClass("threshold calibration needs both classes")
    if grid is None:
        grid = np.round(np.arange(0.05, 0.951, 0.05), 4)
    best_tau = float(grid[0])
    best_f1 = -1.0
    for tau in grid:
        pred = s > tau
        tp = np.sum(pred & (y == 1))
        fp = np.sum(pred & (y == 0))
        fn = np.sum(~pred & (y == 1))
        f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) > 0 else 0.0
        if f1 > best_f1:
            best_f1 = f1
            best_tau = float(tau)
    return best_tau


@dataclass
class StaticEnsemble:
    ocsvm: Optional[OcsvmModel]
    iforest: Optional[IsolationForestModel]
    seq: Optional[LstmRegressor]
    seq_len: int
    tau: float = 0.5
    weights: tuple = STATIC_WEIGHTS
    val_idx: Optional[np.ndarray] = None  # calibration slice of the train block

    def _check(self):
        if self.ocsvm is None or self.iforest is None or self.seq is None:
            raise UnfittedMember("static ensemble has unfitted members")

    def member_scores(self, z, seq_window) -> tuple:
        self._check()
        a_ocsvm = self.ocsvm.score(z)
        a_if = self.iforest.score(z)
        a_seq = float(self.seq.forward(np.asarray(seq_window)[None, :, :])[0, 0])
        return a_ocsvm, a_if, a_seq

    def score(self, z, seq_window) -> float:
        return combine_static(*self.member_scores(z, seq_window))

    def member_votes(self, z, seq_window) -> tuple:
        """Binary member decisions (used by the rule-based adapter)."""
        self._check()
        a_ocsvm, a_if, a_seq = self.member_scores(z, seq_window)
        return (
            int(self.ocsvm.decision_value(z) < 0.0),
            int(a_if > self.iforest.vote_threshold),
            int(a_seq > 0.5),
        )


def fit_static_ensemble(
    train_features,
    train_labels,
    rho: float = 0.32,
    nu: float = 0.25,
    seq_len: int = 10,
    seed: int = 42,
    val_fraction: float = 0.2,
    lstm_epochs: int = 50,
) -> StaticEnsemble:
    """Fit all members and calibrate the fused threshold once on a held-out
    slice of the training block."""
    X = np.asarray(train_features, dtype=np.float64)
    y = np.asarray(train_labels).astype(np.int64)
    if len(np.unique(y)) < 2:
        raise SingleClass("baseline fitting needs both classes")

    ens = StaticEnsemble(
        ocsvm=ocsvm_fit(X, nu=nu, seed=seed),
        iforest=if_fit(X, rho, seed=seed),
        seq=LstmRegressor(X.shape[1], head="sigmoid", seq_len=seq_len, seed=seed),
        seq_len=seq_len,
    )
    sequences = make_sequences(X, np.arange(len(X)), seq_len)
    rng = np.random.default_rng(seed)
    n_val = max(1, int(round(val_fraction * len(X))))
    order = rng.permutation(len(X))
    val_idx, fit_idx = order[:n_val], order[n_val:]
    train_bce(ens.seq, sequences[fit_idx], y[fit_idx], epochs=lstm_epochs, seed=seed)

    a_ocsvm = ens.ocsvm.score_batch(X[val_idx])
    a_if = ens.iforest.score_batch(X[val_idx])
    a_seq = ens.seq.forward(sequences[val_idx])[:, 0]
    fused = STATIC_WEIGHTS[0] * a_ocsvm + STATIC_WEIGHTS[1] * a_if + STATIC_WEIGHTS[2] * a_seq
    ens.tau = calibrate_threshold_once(fused, y[val_idx])
    ens.val_idx = val_idx
    return ens


# ---------------------------------------------------------------------------
# Rule-based adaptation (three fixed-step update rules)
# ---------------------------------------------------------------------------


@dataclass
class RuleState:
    rho: float
    tau: float
    weights: np.ndarray = field(default_factory=lambda: np.array(STATIC_WEIGHTS))
    iteration: int = 1


def rule_update_contamination(rho: float, f1: float) -> float:
    if f1 < 0.6:
        rho = rho + 0.02
    elif f1 > 0.7:
        rho = rho - 0.02
    return float(np.clip(rho, *RHO_BOUNDS))


def rule_update_threshold(tau: float, precision: float, recall: float) -> float:
    """Fixed-step correction, applied only when |P - R| exceeds 0.05."""
    if abs(precision - recall) > 0.05:
        tau = tau - 0.05 * (precision - recall)
    return float(np.clip(tau, *TAU_BOUNDS))


def rule_update_weights(member_f1s) -> np.ndarray:
    f1s = np.asarray(member_f1s, dtype=np.float64)
    total = f1s.sum()
    if total <= 0.0:
        raise AllZeroPerformance("every member scored zero F1")
    return f1s / total


def rule_step(state: RuleState, f1: float, precision: float, recall: float, member_f1s) -> RuleState:
    """Apply all three rules after an evaluation pass."""
    return RuleState(
        rho=rule_update_contamination(state.rho, f1),
        tau=rule_update_threshold(state.tau, precision, recall),
        weights=rule_update_weights(member_f1s),
        iteration=state.iteration + 1,
    )


def fused_vote(votes, weights) -> float:
    v = np.asarray(votes, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    return float(v @ w)
