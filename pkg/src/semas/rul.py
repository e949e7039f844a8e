"""Remaining-useful-life regression, triggered on confirmed anomalies.

An LSTM over the last T fused feature vectors regresses hours-to-failure
under MAE.  The model only ever runs when the consensus stage has raised
an alert; the harness enforces that trigger contract.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDataset, Untrained, WrongWindowLength
from .neural import LstmRegressor, TrainLog, train_mae

SEQ_LEN = 10

# internal target scaling: hours in [5, 100] map to [0, 1] so the default
# learning rate moves the head a meaningful distance
_Y_OFFSET = 5.0
_Y_SCALE = 95.0


@dataclass
class RulModel:
    core: LstmRegressor
    trained: bool = False
    train_log: TrainLog = field(default=None, repr=False)

    @property
    def seq_len(self) -> int:
        return self.core.seq_len


def rul_build(input_dim: int, seq_len: int = SEQ_LEN, seed: int = 0) -> RulModel:
    core = LstmRegressor(
        input_dim, hidden=(64, 32, 32), head="linear", dropout=0.2, seq_len=seq_len, seed=seed
    )
    return RulModel(core)


def rul_train(
    model: RulModel,
    sequences,
    labels,
    epochs: int = 10,
    batch: int = 32,
    lr: float = 1e-3,
    seed: int = 0,
) -> RulModel:
    """Fit on (n, T, d) windows labeled with hours; keeps the best
    validation checkpoint (90/10 split)."""
    X = np.asarray(sequences, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if len(y) == 0:
        raise EmptyDataset("no RUL sequences")
    if X.ndim != 3 or X.shape[1] != model.seq_len:
        raise WrongWindowLength(f"sequences must be (n, {model.seq_len}, d)")
    y_scaled = (y - _Y_OFFSET) / _Y_SCALE
    model.train_log = train_mae(
        model.core, X, y_scaled, epochs=epochs, batch=batch, lr=lr, seed=seed
    )
    model.trained = True
    return model


def rul_predict(model: RulModel, window) -> float:
    """Hours of remaining life for one (T, d) window, clamped at 0."""
    if not model.trained:
        raise Untrained("call rul_train first")
    W = np.asarray(window, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != model.seq_len:
        raise WrongWindowLength(f"expected ({model.seq_len}, d) window, got {W.shape}")
    scaled = float(model.core.forward(W[None, :, :], training=False)[0, 0])
    return max(0.0, scaled * _Y_SCALE + _Y_OFFSET)


def make_sequences(features: np.ndarray, anchor_idx, seq_len: int = SEQ_LEN) -> np.ndarray:
    """Sliding windows of the standardized row stream ending at each anchor
    row; anchors earlier than T-1 are front-padded with the first row."""
    X = np.asarray(features, dtype=np.float64)
    out = np.empty((len(anchor_idx), seq_len, X.shape[1]))
    for j, t in enumerate(anchor_idx):
        start = t - seq_len + 1
        if start >= 0:
            out[j] = X[start : t + 1]
        else:
            pad = np.repeat(X[:1], -start, axis=0)
            out[j] = np.vstack([pad, X[: t + 1]])
    return out
