"""Isolation forest scorer built on flat node arrays.

Trees isolate points by random axis-aligned cuts; the anomaly score is
2^(-E[h(x)] / c(n)) where h is the path length (leaf depth plus the
unsuccessful-BST correction for the leaf population) and c(n) is that
correction at the subsample size.  Node arrays keep the per-sample
traversal inside the accelerated kernels.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil, log2

import numpy as np

from .._accel import forest_path_sums
from ..errors import DimensionMismatch, EmptyTrainSet


@lru_cache(maxsize=None)
def _harmonic(m: int) -> float:
    return float(np.sum(1.0 / np.arange(1, m + 1)))


def average_path_length(n: int) -> float:
    """c(n): expected unsuccessful-search path length in a BST of n points."""
    if n <= 1:
        return 0.0
    return 2.0 * _harmonic(n - 1) - 2.0 * (n - 1) / n


def anomaly_score_from_path(mean_path: float, n: int) -> float:
    """Score mapping only: 2^(-mean_path / c(n))."""
    return float(2.0 ** (-mean_path / average_path_length(n)))


class _TreeBuilder:
    def __init__(self, rng, feature, threshold, left, right, adjust):
        self.rng = rng
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.adjust = adjust

    def _new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.adjust.append(0.0)
        return len(self.feature) - 1

    def build(self, X: np.ndarray, idx: np.ndarray, depth: int, limit: int) -> int:
        node = self._new_node()
        m = len(idx)
        if m <= 1 or depth >= limit:
            self.adjust[node] = average_path_length(m)
            return node
        d = X.shape[1]
        lo = hi = 0.0
        q = -1
        for _ in range(3):
            cand = int(self.rng.integers(0, d))
            col = X[idx, cand]
            lo, hi = col.min(), col.max()
            if hi > lo:
                q = cand
                break
        if q < 0:
            spans = X[idx].max(axis=0) - X[idx].min(axis=0)
            usable = np.flatnonzero(spans > 0.0)
            if usable.size == 0:
                # all points identical: terminal node
                self.adjust[node] = average_path_length(m)
                return node
            q = int(usable[self.rng.integers(0, usable.size)])
            col = X[idx, q]
            lo, hi = col.min(), col.max()
        p = self.rng.uniform(lo, hi)
        mask = X[idx, q] < p
        left_idx = idx[mask]
        right_idx = idx[~mask]
        if len(left_idx) == 0 or len(right_idx) == 0:
            self.adjust[node] = average_path_length(m)
            return node
        self.feature[node] = q
        self.threshold[node] = p
        self.left[node] = self.build(X, left_idx, depth + 1, limit)
        self.right[node] = self.build(X, right_idx, depth + 1, limit)
        return node


@dataclass
class IsolationForestModel:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    adjust: np.ndarray
    roots: np.ndarray
    n_trees: int
    subsample_size: int
    dim: int
    rho: float
    vote_threshold: float = 0.0
    train_scores_desc: np.ndarray = field(default=None, repr=False)

    @property
    def c_norm(self) -> float:
        return average_path_length(self.subsample_size)

    def score_batch(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected {self.dim} features, got {X.shape[1]}")
        if self.c_norm == 0.0:
            # single-point subsamples carry no depth signal
            return np.full(X.shape[0], 0.5)
        sums = forest_path_sums(
            self.feature, self.threshold, self.left, self.right, self.adjust, self.roots, X
        )
        mean_path = sums / self.n_trees
        return 2.0 ** (-mean_path / self.c_norm)

    def score(self, z) -> float:
        return float(self.score_batch(np.asarray(z))[0])

    def vote(self, z) -> int:
        return int(self.score(z) > self.vote_threshold)

    def set_contamination(self, rho: float) -> None:
        """Recalibrate the vote threshold only; trees are untouched."""
        self.rho = float(rho)
        self.vote_threshold = _quantile_threshold(self.train_scores_desc, rho)

    def state_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "adjust": self.adjust,
            "roots": self.roots,
            "train_scores_desc": self.train_scores_desc,
            "meta": np.array(
                [self.n_trees, self.subsample_size, self.dim], dtype=np.int64
            ),
            "calib": np.array([self.rho, self.vote_threshold]),
        }

    @classmethod
    def from_state_dict(cls, state: dict) -> "IsolationForestModel":
        n_trees, subsample, dim = (int(v) for v in state["meta"])
        rho, thr = (float(v) for v in state["calib"])
        return cls(
            feature=np.asarray(state["feature"]),
            threshold=np.asarray(state["threshold"]),
            left=np.asarray(state["left"]),
            right=np.asarray(state["right"]),
            adjust=np.asarray(state["adjust"]),
            roots=np.asarray(state["roots"]),
            n_trees=n_trees,
            subsample_size=subsample,
            dim=dim,
            rho=rho,
            vote_threshold=thr,
            train_scores_desc=np.asarray(state["train_scores_desc"]),
        )


def _quantile_threshold(scores_desc: np.ndarray, rho: float) -> float:
    """The ceil(rho * n)-th largest score; votes use strict >."""
    n = len(scores_desc)
    k = min(n, max(1, ceil(rho * n)))
    return float(scores_desc[k - 1])


def if_fit(
    train_features,
    rho: float,
    n_trees: int = 200,
    max_samples: int = 256,
    seed: int = 42,
) -> IsolationForestModel:
    X = np.ascontiguousarray(train_features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n == 0:
        raise EmptyTrainSet("isolation forest needs training data")
    if not (0.0 < rho < 0.5):
        raise ValueError("contamination must be in (0, 0.5)")
    rng = np.random.default_rng(seed)
    subsample = min(max_samples, n)
    limit = max(1, int(ceil(log2(max(2, subsample)))))

    feature, threshold, left, right, adjust = [], [], [], [], []
    builder = _TreeBuilder(rng, feature, threshold, left, right, adjust)
    roots = np.empty(n_trees, dtype=np.int64)
    for t in range(n_trees):
        idx = rng.choice(n, size=subsample, replace=False)
        roots[t] = builder.build(X, idx, 0, limit)

    model = IsolationForestModel(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        adjust=np.asarray(adjust, dtype=np.float64),
        roots=roots,
        n_trees=n_trees,
        subsample_size=subsample,
        dim=X.shape[1],
        rho=rho,
    )
    train_scores = model.score_batch(X)
    model.train_scores_desc = np.sort(train_scores)[::-1].copy()
    model.set_contamination(rho)
    return model


def if_score(model: IsolationForestModel, z) -> float:
    return model.score(z)
