"""Mini-batch training loops with early stopping and best-checkpoint restore."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDataset
from .losses import CLAMP, bce, mae
from .optim import Adam

log = logging.getLogger(__name__)


@dataclass
class TrainLog:
    train_losses: list = field(default_factory=list)
    val_losses: list = field(default_factory=list)
    stopped_epoch: int = 0
    best_val: float = float("inf")
    degenerate: bool = False


def _split(X, y, val_fraction: float, rng):
    n = len(y)
    idx = rng.permutation(n)
    n_val = int(round(val_fraction * n))
    if n_val == 0 or n_val == n:
        return X[idx], y[idx], X[idx[:0]], y[idx[:0]]
    val, tr = idx[:n_val], idx[n_val:]
    return X[tr], y[tr], X[val], y[val]


def _run_training(
    net,
    X,
    y,
    loss_fn,
    epochs: int,
    batch: int,
    patience: int,
    val_fraction: float,
    lr: float,
    seed: int,
) -> TrainLog:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    if len(y) == 0:
        raise EmptyDataset("no training samples")
    rng = np.random.default_rng(seed)
    Xt, yt, Xv, yv = _split(X, y, val_fraction, rng)
    opt = Adam(lr=lr)
    result = TrainLog()
    best_state = net.get_state()
    best_train = float("inf")
    stale = 0

    for epoch in range(epochs):
        order = rng.permutation(len(yt))
        epoch_loss = 0.0
        for start in range(0, len(yt), batch):
            idx = order[start : start + batch]
            pred = net.forward(Xt[idx], training=True)
            loss, grad = loss_fn(pred, yt[idx])
            net.backward(grad)
            opt.step(net.params(), net.grads())
            epoch_loss += loss * len(idx)
        epoch_loss /= len(yt)
        result.train_losses.append(epoch_loss)

        if len(yv):
            val_pred = net.forward(Xv, training=False)
            val_loss, _ = loss_fn(val_pred, yv)
        else:
            val_loss = epoch_loss
        result.val_losses.append(val_loss)
        if val_loss < result.best_val:
            result.best_val = val_loss
            best_state = net.get_state()

        if epoch_loss < best_train - 1e-12:
            best_train = epoch_loss
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                result.stopped_epoch = epoch + 1
                break
    else:
        result.stopped_epoch = epochs

    net.set_state(best_state)
    return result


def train_bce(
    net,
    X,
    y,
    epochs: int = 50,
    batch: int = 32,
    early_stop_patience: int = 10,
    val_fraction: float = 0.1,
    lr: float = 1e-3,
    seed: int = 0,
) -> TrainLog:
    """Binary-classifier training; a single-class dataset short-circuits to
    predicting the class prior."""
    y_arr = np.asarray(y, dtype=np.float64).ravel()
    if len(y_arr) == 0:
        raise EmptyDataset("no training samples")
    prior = float(y_arr.mean())
    if prior in (0.0, 1.0):
        log.warning("single-class dataset: net will predict the prior %.3f", prior)
        p = min(1.0 - CLAMP, max(CLAMP, prior))
        head = net.head if hasattr(net, "head") else net.layers[-1]
        head.W[...] = 0.0
        head.b[...] = np.log(p / (1.0 - p)) if head.activation == "sigmoid" else p
        out = TrainLog(degenerate=True)
        return out
    return _run_training(net, X, y_arr, bce, epochs, batch, early_stop_patience, val_fraction, lr, seed)


def train_mae(
    net,
    X,
    y,
    epochs: int = 10,
    batch: int = 32,
    val_fraction: float = 0.1,
    lr: float = 1e-3,
    seed: int = 0,
) -> TrainLog:
    """Regression training on mean absolute error (no early-stop window)."""
    return _run_training(net, X, y, mae, epochs, batch, epochs + 1, val_fraction, lr, seed)
