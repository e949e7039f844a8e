"""Elliptic envelope: Mahalanobis gate on the empirical Gaussian fit.

Plain mean/covariance with a trace-scaled ridge (no robust re-weighting);
the vote threshold is the contamination quantile of training distances.
"""

from dataclasses import dataclass
from math import ceil

import numpy as np

from ..errors import DegenerateCovariance, DimensionMismatch, EmptyTrainSet


@dataclass
class EllipticModel:
    mean: np.ndarray
    precision: np.ndarray
    train_scores_desc: np.ndarray
    vote_threshold: float
    rho: float

    @property
    def dim(self) -> int:
        return len(self.mean)

    def score_batch(self, X) -> np.ndarray:
        """Squared Mahalanobis distance to the training mean."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected {self.dim} features, got {X.shape[1]}")
        diff = X - self.mean
        return np.einsum("ij,jk,ik->i", diff, self.precision, diff)

    def score(self, z) -> float:
        return float(self.score_batch(np.asarray(z))[0])

    def vote(self, z) -> int:
        # strict: the quantile boundary point itself is not an anomaly
        return int(self.score(z) > self.vote_threshold)

    def set_contamination(self, rho: float) -> None:
        self.rho = float(rho)
        n = len(self.train_scores_desc)
        k = min(n, max(1, ceil(rho * n)))
        self.vote_threshold = float(self.train_scores_desc[k - 1])


def elliptic_fit(train_features, rho: float = 0.32) -> EllipticModel:
    X = np.asarray(train_features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    if n == 0:
        raise EmptyTrainSet("elliptic envelope needs training data")
    mean = X.mean(axis=0)
    cov = np.cov(X, rowvar=False, bias=True).reshape(d, d)
    ridge = 1e-6 * np.trace(cov) / d
    if ridge <= 0.0:
        ridge = 1e-12
    cov = cov + ridge * np.eye(d)
    try:
        np.linalg.cholesky(cov)
        precision = np.linalg.inv(cov)
    except np.linalg.LinAlgError as exc:
        raise DegenerateCovariance("covariance not PD after ridge") from exc

    model = EllipticModel(
        mean=mean,
        precision=precision,
        train_scores_desc=np.zeros(n),
        vote_threshold=0.0,
        rho=rho,
    )
    model.train_scores_desc = np.sort(model.score_batch(X))[::-1].copy()
    model.set_contamination(rho)
    return model
