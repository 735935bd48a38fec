"""Extremely randomized trees regression ensemble, built from scratch.

Growth rule per node, on the node's own samples:

* stop and emit a mean leaf when fewer than ``n_min`` samples remain, when
  the targets are constant, or when every feature is constant;
* otherwise draw ``k`` candidate features without replacement (default: all
  of them), draw one uniform cut-point strictly inside each candidate's
  (min, max), and keep the split with the highest relative variance
  reduction.  Ties go to the lowest feature index, then the lower cut-point.

Samples with feature value strictly below the cut go left, so both children
are always non-empty.  Prediction is the uniform average of per-tree leaf
means, hence always bounded by the target range.

Determinism: every tree consumes its own splitmix64 stream derived from
(seed, tree index), so refits are bit-identical regardless of build order or
thread count.  The kernels are numba-compiled and may build trees in
parallel; the pure-Python mirror used by the test suite must match them
node for node.
"""

from __future__ import annotations

import os

os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

_U64_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_U64_STREAM = np.uint64(0xD1342543DE82EF95)
_U64_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_U64_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0

_PREDICT_CHUNKS = 16


@dataclass(frozen=True)
class ExtraTreesConfig:
    n_trees: int = 60
    n_min: int = 3              # minimum node size eligible for splitting
    k_features: int | None = None   # candidates per node; None = input dimension

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.n_min < 2:
            raise ValueError("n_min must be >= 2")
        if self.k_features is not None and self.k_features < 1:
            raise ValueError("k_features must be >= 1 when given")


@dataclass(frozen=True)
class Forest:
    """Flattened ensemble; tree t owns nodes offsets[t]:offsets[t]+counts[t].

    ``feature`` is -1 at leaves; child indices are tree-local.  Trees sit in
    equal-stride slots, so ``offsets`` is uniform; ``counts`` gives the
    populated prefix of each slot.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    offsets: np.ndarray
    counts: np.ndarray
    n_features: int
    config: ExtraTreesConfig
    seed: int

    @property
    def n_trees(self) -> int:
        return len(self.counts)


@njit(cache=True, inline="always")
def _next_rand(state):
    state = state + _U64_GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _U64_MIX1
    z = (z ^ (z >> np.uint64(27))) * _U64_MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)) * _INV_2_53, state


@njit(cache=True)
def _grow_tree(X, y, n_min, k, state, feature, threshold, left, right, value):
    n_total = X.shape[0]
    d = X.shape[1]
    idx = np.empty(n_total, dtype=np.int64)
    tmp = np.empty(n_total, dtype=np.int64)
    stack_lo = np.empty(n_total + 2, dtype=np.int64)
    stack_hi = np.empty(n_total + 2, dtype=np.int64)
    stack_node = np.empty(n_total + 2, dtype=np.int64)
    cand = np.empty(d, dtype=np.int64)
    fmin = np.empty(d, dtype=np.float64)
    fmax = np.empty(d, dtype=np.float64)
    cut = np.empty(d, dtype=np.float64)
    nl = np.empty(d, dtype=np.int64)
    sl = np.empty(d, dtype=np.float64)
    ssl = np.empty(d, dtype=np.float64)
    for i in range(n_total):
        idx[i] = i

    n_nodes = 1
    top = 0
    stack_lo[0] = 0
    stack_hi[0] = n_total
    stack_node[0] = 0

    while top >= 0:
        lo = stack_lo[top]
        hi = stack_hi[top]
        node = stack_node[top]
        top -= 1
        n = hi - lo

        s = 0.0
        ss = 0.0
        ymin = y[idx[lo]]
        ymax = ymin
        for p in range(lo, hi):
            v = y[idx[p]]
            s += v
            ss += v * v
            if v < ymin:
                ymin = v
            if v > ymax:
                ymax = v
        mean = s / n
        value[node] = mean
        feature[node] = -1

        if n < n_min or ymin == ymax:
            continue

        for f in range(d):
            fmin[f] = X[idx[lo], f]
            fmax[f] = fmin[f]
        for p in range(lo + 1, hi):
            row = idx[p]
            for f in range(d):
                v = X[row, f]
                if v < fmin[f]:
                    fmin[f] = v
                elif v > fmax[f]:
                    fmax[f] = v

        n_cand = 0
        for f in range(d):
            if fmin[f] < fmax[f]:
                cand[n_cand] = f
                n_cand += 1
        if n_cand == 0:
            continue
        if k < n_cand:
            # partial Fisher-Yates, then ascending order for tie-breaking
            for i in range(k):
                r, state = _next_rand(state)
                j = i + int(r * (n_cand - i))
                t = cand[i]
                cand[i] = cand[j]
                cand[j] = t
            n_cand = k
            cand[:n_cand].sort()

        node_var = ss / n - mean * mean
        if node_var < 0.0:
            node_var = 0.0

        # one cut per candidate (drawn in ascending feature order), scored in
        # a single pass over the node's samples
        for ci in range(n_cand):
            f = cand[ci]
            r, state = _next_rand(state)
            c = fmin[f] + r * (fmax[f] - fmin[f])
            # rounding onto an endpoint disqualifies the candidate
            cut[ci] = c if fmin[f] < c < fmax[f] else np.nan
            nl[ci] = 0
            sl[ci] = 0.0
            ssl[ci] = 0.0
        for p in range(lo, hi):
            row = idx[p]
            v = y[row]
            for ci in range(n_cand):
                if X[row, cand[ci]] < cut[ci]:
                    nl[ci] += 1
                    sl[ci] += v
                    ssl[ci] += v * v

        best_score = -1.0
        best_f = -1
        best_cut = 0.0
        for ci in range(n_cand):
            if not cut[ci] == cut[ci]:  # NaN: degenerate candidate
                continue
            n_l = nl[ci]
            n_r = n - n_l
            var_l = ssl[ci] / n_l - (sl[ci] / n_l) * (sl[ci] / n_l)
            if var_l < 0.0:
                var_l = 0.0
            s_r = s - sl[ci]
            ss_r = ss - ssl[ci]
            var_r = ss_r / n_r - (s_r / n_r) * (s_r / n_r)
            if var_r < 0.0:
                var_r = 0.0
            if node_var > 0.0:
                score = 1.0 - (n_l * var_l + n_r * var_r) / (n * node_var)
            else:
                score = 0.0
            if score > best_score:
                best_score = score
                best_f = cand[ci]
                best_cut = cut[ci]
        if best_f < 0:
            continue

        # stable partition: left block keeps original order, then right block
        w = 0
        for p in range(lo, hi):
            if X[idx[p], best_f] < best_cut:
                tmp[w] = idx[p]
                w += 1
        mid = lo + w
        for p in range(lo, hi):
            if not (X[idx[p], best_f] < best_cut):
                tmp[w] = idx[p]
                w += 1
        for i in range(n):
            idx[lo + i] = tmp[i]

        feature[node] = best_f
        threshold[node] = best_cut
        left[node] = n_nodes
        right[node] = n_nodes + 1
        n_nodes += 2

        top += 1
        stack_lo[top] = mid
        stack_hi[top] = hi
        stack_node[top] = right[node]
        top += 1
        stack_lo[top] = lo
        stack_hi[top] = mid
        stack_node[top] = left[node]

    return n_nodes


@njit(cache=True, parallel=True)
def _fit_forest(X, y, n_trees, n_min, k, seed):
    n = X.shape[0]
    stride = 2 * n + 1
    feature = np.full(n_trees * stride, -1, dtype=np.int64)
    threshold = np.zeros(n_trees * stride, dtype=np.float64)
    left = np.zeros(n_trees * stride, dtype=np.int64)
    right = np.zeros(n_trees * stride, dtype=np.int64)
    value = np.zeros(n_trees * stride, dtype=np.float64)
    counts = np.zeros(n_trees, dtype=np.int64)

    for t in prange(n_trees):
        base = t * stride
        state = np.uint64(seed) + np.uint64(t) * _U64_STREAM
        counts[t] = _grow_tree(
            X, y, n_min, k, state,
            feature[base:base + stride], threshold[base:base + stride],
            left[base:base + stride], right[base:base + stride],
            value[base:base + stride])

    return feature, threshold, left, right, value, counts


@njit(cache=True, parallel=True)
def _predict_batch(feature, threshold, left, right, value, stride, n_trees, X, out):
    n_rows = X.shape[0]
    n_chunks = min(_PREDICT_CHUNKS, n_rows)
    step = (n_rows + n_chunks - 1) // n_chunks
    inv = 1.0 / n_trees
    for c in prange(n_chunks):
        m0 = c * step
        m1 = min(m0 + step, n_rows)
        # tree-outer within the chunk keeps each tree's nodes cache-resident
        for m in range(m0, m1):
            out[m] = 0.0
        for t in range(n_trees):
            base = t * stride
            for m in range(m0, m1):
                node = base
                while feature[node] >= 0:
                    if X[m, feature[node]] < threshold[node]:
                        node = base + left[node]
                    else:
                        node = base + right[node]
                out[m] += value[node]
        for m in range(m0, m1):
            out[m] *= inv


def fit(inputs: np.ndarray, targets: np.ndarray,
        config: ExtraTreesConfig | None = None, seed: int = 0) -> Forest:
    """Fit an ensemble; identical (data, config, seed) refits bit-identically."""
    config = config or ExtraTreesConfig()
    X = np.ascontiguousarray(inputs, dtype=np.float64)
    y = np.ascontiguousarray(targets, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"inputs must be a 2-d matrix, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("cannot fit on an empty dataset")
    if y.shape != (X.shape[0],):
        raise ValueError(f"targets shape {y.shape} does not match {X.shape[0]} rows")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise ValueError("inputs and targets must be finite")
    k = config.k_features if config.k_features is not None else X.shape[1]
    feature, threshold, left, right, value, counts = _fit_forest(
        X, y, config.n_trees, config.n_min, k, seed)
    stride = 2 * X.shape[0] + 1
    offsets = np.arange(config.n_trees + 1, dtype=np.int64) * stride
    return Forest(feature=feature, threshold=threshold, left=left, right=right,
                  value=value, offsets=offsets, counts=counts,
                  n_features=X.shape[1], config=config, seed=seed)


def predict(forest: Forest, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (forest.n_features,):
        raise ValueError(f"expected a vector of length {forest.n_features}, got {x.shape}")
    return float(predict_batch(forest, x[None, :])[0])


def predict_batch(forest: Forest, X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise ValueError(f"expected shape (*, {forest.n_features}), got {X.shape}")
    out = np.empty(X.shape[0])
    stride = int(forest.offsets[1] - forest.offsets[0])
    _predict_batch(forest.feature, forest.threshold, forest.left, forest.right,
                   forest.value, stride, forest.n_trees, X, out)
    return out


def dump_stats(forest: Forest) -> dict:
    """Debug summary: node counts and depth histogram across trees."""
    depths = []
    for t in range(forest.n_trees):
        base = int(forest.offsets[t])
        n_nodes = int(forest.counts[t])
        depth = np.zeros(n_nodes, dtype=int)
        for i in range(n_nodes):
            f = forest.feature[base + i]
            if f >= 0:
                depth[forest.left[base + i]] = depth[i] + 1
                depth[forest.right[base + i]] = depth[i] + 1
        leaf_mask = forest.feature[base:base + n_nodes] < 0
        depths.extend(depth[leaf_mask].tolist())
    return {
        "n_trees": forest.n_trees,
        "total_nodes": int(forest.counts.sum()),
        "max_depth": int(max(depths)) if depths else 0,
        "mean_leaf_depth": float(np.mean(depths)) if depths else 0.0,
    }
