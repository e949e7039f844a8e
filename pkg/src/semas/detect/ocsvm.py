"""One-class SVM member: random Fourier features plus a linear nu-model.

The RBF kernel (gamma = 1/n_features) is approximated with D random
cosine features; w and the offset are fitted by subgradient descent on
the nu-one-class objective.  After descent the offset is re-anchored to
the empirical nu-quantile of the training projections, which pins the
training anomaly-vote fraction to nu up to rank rounding.
"""

from dataclasses import dataclass
from math import ceil

import numpy as np

from ..errors import DimensionMismatch, EmptyTrainSet, InvalidNu


@dataclass
class OcsvmModel:
    omega: np.ndarray  # d x D projection
    phase: np.ndarray  # D
    w: np.ndarray  # D
    offset: float
    nu: float
    dim: int
    score_scale: float  # std of train decision values, for [0,1] mapping

    def _features(self, X: np.ndarray) -> np.ndarray:
        D = self.omega.shape[1]
        return np.sqrt(2.0 / D) * np.cos(X @ self.omega + self.phase)

    def decision_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected {self.dim} features, got {X.shape[1]}")
        return self._features(X) @ self.w - self.offset

    def decision_value(self, z) -> float:
        return float(self.decision_batch(np.asarray(z))[0])

    def vote(self, z) -> int:
        """Anomaly when the decision function is negative."""
        return int(self.decision_value(z) < 0.0)

    def score(self, z) -> float:
        """Monotone [0,1] mapping of the decision value (0.5 at the margin)."""
        return float(1.0 / (1.0 + np.exp(self.decision_value(z) / self.score_scale)))

    def score_batch(self, X) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(self.decision_batch(X) / self.score_scale))


def ocsvm_fit(
    train_features,
    nu: float = 0.25,
    feature_dim: int = 256,
    seed: int = 42,
    gamma: float = None,
    epochs: int = 40,
    batch: int = 64,
    lr: float = 0.05,
) -> OcsvmModel:
    if not (0.0 < nu < 1.0):
        raise InvalidNu(f"nu={nu} outside (0, 1)")
    X = np.asarray(train_features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    if n == 0:
        raise EmptyTrainSet("one-class SVM needs training data")
    if gamma is None:
        gamma = 1.0 / d

    rng = np.random.default_rng(seed)
    omega = rng.normal(0.0, np.sqrt(2.0 * gamma), size=(d, feature_dim))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=feature_dim)
    phi = np.sqrt(2.0 / feature_dim) * np.cos(X @ omega + phase)

    w = np.zeros(feature_dim)
    offset = 0.0
    step = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start : start + batch]
            pb = phi[idx]
            proj = pb @ w
            viol = proj < offset
            m = len(idx)
            grad_w = w - (pb[viol].sum(axis=0) / (nu * m) if viol.any() else 0.0)
            grad_off = -1.0 + viol.sum() / (nu * m)
            eta = lr / (1.0 + 0.01 * step)
            w -= eta * grad_w
            offset -= eta * grad_off
            step += 1

    # anchor the offset at the nu-quantile of training projections so the
    # training vote fraction honors nu regardless of descent residue
    proj = phi @ w
    k = min(n, max(1, ceil(nu * n)))
    offset = float(np.sort(proj)[k - 1])
    decisions = proj - offset
    scale = float(np.std(decisions))
    return OcsvmModel(omega, phase, w, offset, nu, d, scale if scale > 0 else 1.0)
