"""Local outlier factor, brute force over the training set.

Exact k-nearest-neighbor LOF (k exactly, ties broken by index) computed
from chunked distance blocks so the memory stays bounded at desk scale.
Scores near 1 mean the query sits in typical local density.
"""

from dataclasses import dataclass
from math import ceil

import numpy as np

from .._accel import sq_dist_block
from ..errors import DimensionMismatch, TooFewNeighbors

_CHUNK = 512


def _knn_from_block(d2_block: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.argpartition(d2_block, k - 1, axis=1)[:, :k]
    rows = np.arange(d2_block.shape[0])[:, None]
    d = np.sqrt(d2_block[rows, idx])
    order = np.argsort(d, axis=1, kind="stable")
    return np.take_along_axis(idx, order, axis=1), np.take_along_axis(d, order, axis=1)


def _lrd(reach_mean: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(reach_mean > 0.0, 1.0 / reach_mean, np.inf)


@dataclass
class LofModel:
    train: np.ndarray
    k: int
    k_dist: np.ndarray  # per training point
    lrd: np.ndarray  # per training point
    train_scores_desc: np.ndarray
    vote_threshold: float
    rho: float

    @property
    def dim(self) -> int:
        return self.train.shape[1]

    def score_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected {self.dim} features, got {X.shape[1]}")
        out = np.empty(X.shape[0])
        for start in range(0, X.shape[0], _CHUNK):
            block = X[start : start + _CHUNK]
            d2 = sq_dist_block(np.ascontiguousarray(block), self.train)
            nb_idx, nb_dist = _knn_from_block(d2, self.k)
            reach = np.maximum(self.k_dist[nb_idx], nb_dist)
            lrd_q = _lrd(reach.mean(axis=1))
            nb_lrd_mean = self.lrd[nb_idx].mean(axis=1)
            with np.errstate(invalid="ignore", divide="ignore"):
                ratio = nb_lrd_mean / lrd_q
            # inf/inf (duplicated points): uniform density, LOF = 1
            ratio = np.where(np.isinf(lrd_q) & np.isinf(nb_lrd_mean), 1.0, ratio)
            out[start : start + len(block)] = ratio
        return out

    def score(self, z) -> float:
        return float(self.score_batch(np.asarray(z))[0])

    def vote(self, z) -> int:
        return int(self.score(z) > self.vote_threshold)

    def set_contamination(self, rho: float) -> None:
        self.rho = float(rho)
        n = len(self.train_scores_desc)
        k = min(n, max(1, ceil(rho * n)))
        self.vote_threshold = float(self.train_scores_desc[k - 1])


def lof_fit(train_features, k: int = 20, rho: float = 0.32) -> LofModel:
    X = np.ascontiguousarray(train_features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n <= k:
        raise TooFewNeighbors(f"need more than k={k} training points, got {n}")

    nb_idx = np.empty((n, k), dtype=np.int64)
    nb_dist = np.empty((n, k))
    for start in range(0, n, _CHUNK):
        block = X[start : start + _CHUNK]
        d2 = sq_dist_block(block, X)
        # a training point is not its own neighbor
        rows = np.arange(start, start + len(block))
        d2[np.arange(len(block)), rows] = np.inf
        bi, bd = _knn_from_block(d2, k)
        nb_idx[start : start + len(block)] = bi
        nb_dist[start : start + len(block)] = bd

    k_dist = nb_dist[:, -1].copy()
    reach = np.maximum(k_dist[nb_idx], nb_dist)
    lrd = _lrd(reach.mean(axis=1))

    with np.errstate(invalid="ignore", divide="ignore"):
        scores = lrd[nb_idx].mean(axis=1) / lrd
    scores = np.where(np.isinf(lrd), 1.0, scores)

    model = LofModel(
        train=X,
        k=k,
        k_dist=k_dist,
        lrd=lrd,
        train_scores_desc=np.sort(scores)[::-1].copy(),
        vote_threshold=0.0,
        rho=rho,
    )
    model.set_contamination(rho)
    return model


def lof_score(model: LofModel, z) -> float:
    return model.score(z)
