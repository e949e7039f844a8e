"""Hot numeric kernels: numba-jitted loops with a pure-numpy fallback.

The backend is chosen once at import time.  Set ``SEMAS_NUMBA=0`` in the
environment to force the numpy path (useful on machines without a working
numba toolchain, and for the benchmark in ``benchmarks/bench_kernels.py``).
Both paths compute the same quantities; the forest kernel is add-order
identical, the distance kernel agrees to ~1e-9 relative.
"""

import os

import numpy as np


def _flag_enabled() -> bool:
    raw = os.environ.get("SEMAS_NUMBA", "1").strip().lower()
    return raw not in ("0", "false", "off", "no")


USE_NUMBA = False
if _flag_enabled():
    try:
        from numba import njit

        USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# Isolation-forest path lengths.
#
# A forest is flattened into parallel node arrays.  Internal nodes carry a
# split (feature, threshold) and child indices; leaves have feature == -1 and
# an additive path adjustment (the subsample normalizer for the leaf size).
# ---------------------------------------------------------------------------


def _forest_path_sums_numpy(feature, threshold, left, right, adjust, roots, X):
    n = X.shape[0]
    total = np.zeros(n, dtype=np.float64)
    all_idx = np.arange(n)
    for root in roots:
        node = np.full(n, root, dtype=np.int64)
        depth = np.zeros(n, dtype=np.float64)
        active = all_idx
        while active.size:
            cur = node[active]
            is_leaf = feature[cur] < 0
            live = active[~is_leaf]
            if live.size == 0:
                break
            cur = node[live]
            go_left = X[live, feature[cur]] < threshold[cur]
            node[live] = np.where(go_left, left[cur], right[cur])
            depth[live] += 1.0
            active = live
        # one add per tree keeps the accumulation order identical to the
        # jitted per-sample loop
        total += depth + adjust[node]
    return total


def _make_forest_kernel():
    @njit(cache=True)
    def _forest_path_sums_jit(feature, threshold, left, right, adjust, roots, X):  # pragma: no cover - compiled
        n = X.shape[0]
        total = np.zeros(n, dtype=np.float64)
        for i in range(n):
            acc = 0.0
            for t in range(roots.shape[0]):
                node = roots[t]
                depth = 0.0
                while feature[node] >= 0:
                    if X[i, feature[node]] < threshold[node]:
                        node = left[node]
                    else:
                        node = right[node]
                    depth += 1.0
                acc += depth + adjust[node]
            total[i] = acc
        return total

    return _forest_path_sums_jit


# ---------------------------------------------------------------------------
# Squared-distance blocks (LOF and friends).  Callers chunk the rows of A to
# bound memory; the kernel returns the dense (len(A), len(B)) block.
# ---------------------------------------------------------------------------


def _sq_dist_block_numpy(A, B):
    aa = np.einsum("ij,ij->i", A, A)
    bb = np.einsum("ij,ij->i", B, B)
    d2 = aa[:, None] + bb[None, :] - 2.0 * (A @ B.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def _make_dist_kernel():
    @njit(cache=True)
    def _sq_dist_block_jit(A, B):  # pragma: no cover - compiled
        na, d = A.shape
        nb = B.shape[0]
        out = np.empty((na, nb), dtype=np.float64)
        for i in range(na):
            for j in range(nb):
                acc = 0.0
                for k in range(d):
                    diff = A[i, k] - B[j, k]
                    acc += diff * diff
                out[i, j] = acc
        return out

    return _sq_dist_block_jit


if USE_NUMBA:
    forest_path_sums = _make_forest_kernel()
    sq_dist_block = _make_dist_kernel()
else:
    forest_path_sums = _forest_path_sums_numpy
    sq_dist_block = _sq_dist_block_numpy
