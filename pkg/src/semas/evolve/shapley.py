"""Exact Shapley attributions by full subset enumeration.

Absent features are imputed from a baseline vector; with n <= 12 features
all 2^n coalitions are evaluated once and the classic weighted marginals
are assembled from the cached values.  Efficiency is checked on every
report: the attributions must sum to f(full) - f(baseline).
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from ..errors import TooManyFeatures

MAX_FEATURES = 12
EFFICIENCY_TOL = 1e-9


@dataclass(frozen=True)
class ShapleyReport:
    phi: np.ndarray
    base_value: float
    full_value: float
    efficiency_residual: float
    verdict: str

    @property
    def consistent(self) -> bool:
        return self.verdict == "ok"


def shapley_exact(model_fn, baseline, instance, feature_idx=None) -> ShapleyReport:
    """Exact attributions for `instance` against `baseline`.

    model_fn must accept an (m, d) array and return (m,) predictions.
    feature_idx restricts the game to a subset of columns; the rest stay
    at their baseline values.
    """
    base = np.asarray(baseline, dtype=np.float64).ravel()
    inst = np.asarray(instance, dtype=np.float64).ravel()
    if base.shape != inst.shape:
        raise ValueError("baseline and instance must have equal length")
    if feature_idx is None:
        feature_idx = np.arange(len(inst))
    feature_idx = np.asarray(feature_idx, dtype=np.int64)
    n = len(feature_idx)
    if n > MAX_FEATURES:
        raise TooManyFeatures(f"{n} features exceed the exact-enumeration cap {MAX_FEATURES}")

    n_masks = 1 << n
    X = np.tile(base, (n_masks, 1))
    for j in range(n):
        bit = 1 << j
        on = (np.arange(n_masks) & bit) > 0
        X[on, feature_idx[j]] = inst[feature_idx[j]]
    values = np.asarray(model_fn(X), dtype=np.float64).ravel()
    if values.shape != (n_masks,):
        raise ValueError("model_fn must return one value per row")

    sizes = np.array([int(m).bit_count() for m in range(n_masks)])
    fact = [factorial(k) for k in range(n + 1)]
    weight_by_size = np.array(
        [fact[s] * fact[n - s - 1] / fact[n] for s in range(n)] + [0.0]
    )

    phi = np.zeros(n)
    masks = np.arange(n_masks)
    for j in range(n):
        bit = 1 << j
        without = masks[(masks & bit) == 0]
        w = weight_by_size[sizes[without]]
        phi[j] = float(np.sum(w * (values[without | bit] - values[without])))

    base_value = float(values[0])
    full_value = float(values[n_masks - 1])
    residual = float(np.sum(phi) - (full_value - base_value))
    verdict = "ok" if abs(residual) <= EFFICIENCY_TOL else "efficiency_violated"
    return ShapleyReport(phi, base_value, full_value, residual, verdict)
