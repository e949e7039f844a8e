"""Loss functions returning (value, gradient-w.r.t.-prediction)."""

import numpy as np

CLAMP = 1e-7


def bce(pred, target) -> tuple[float, np.ndarray]:
    """Binary cross-entropy with predictions clamped away from {0, 1}."""
    p = np.clip(np.asarray(pred, dtype=np.float64), CLAMP, 1.0 - CLAMP)
    y = np.asarray(target, dtype=np.float64).reshape(p.shape)
    n = p.size
    loss = float(-np.sum(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)) / n)
    grad = (p - y) / (p * (1.0 - p)) / n
    return loss, grad


def mae(pred, target) -> tuple[float, np.ndarray]:
    p = np.asarray(pred, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64).reshape(p.shape)
    n = p.size
    err = p - y
    return float(np.sum(np.abs(err)) / n), np.sign(err) / n


def mse(pred, target) -> tuple[float, np.ndarray]:
    p = np.asarray(pred, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64).reshape(p.shape)
    n = p.size
    err = p - y
    return float(np.sum(err * err) / n), 2.0 * err / n
