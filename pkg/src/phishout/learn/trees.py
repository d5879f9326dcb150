"""Random tree and its bagged ensemble."""
from __future__ import annotations

import math

import numpy as np

from ._base import PhishClassifier

LEAF = -1


def _entropy2(pos, n):
    """Binary entropy (bits) of ``pos`` positives out of ``n``, vectorized; 0 where n == 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, pos / np.where(n > 0, n, 1), 0.0)
        q = 1.0 - p
        h = -(np.where(p > 0, p * np.log2(np.where(p > 0, p, 1)), 0.0) + np.where(q > 0, q * np.log2(np.where(q > 0, q, 1)), 0.0))
    return h


def _best_split_on(x, y, min_leaf):
    """Best threshold on one column: (gain, threshold), or None when the column cannot split."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = len(xs)
    pos_left = np.cumsum(ys)[:-1]
    n_left = np.arange(1, n)
    valid = (xs[1:] != xs[:-1]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
    if not valid.any():
        return None
    total_pos = ys.sum()
    parent = _entropy2(np.array(total_pos), np.array(n))
    child = (n_left * _entropy2(pos_left, n_left) + (n - n_left) * _entropy2(total_pos - pos_left, n - n_left)) / n
    child = np.where(valid, child, np.inf)
    i = int(np.argmin(child))
    return float(parent - child[i]), float((xs[i] + xs[i + 1]) / 2.0)


def grow_tree(X, y, n_candidates, min_leaf, rng):
    """Grow one random tree; returns parallel node arrays (feature, threshold, left, right, value)."""
    n_features = X.shape[1]
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[idx].mean()))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)))]
    while stack:
        node, idx = stack.pop()
        ys = y[idx]
        if len(idx) < 2 * min_leaf or ys.min() == ys.max():
            continue
        # sample k attributes; keep drawing from the rest until one gives positive gain
        order = rng.permutation(n_features)
        best = None
        for pos, j in enumerate(order):
            if pos >= n_candidates and best is not None and best[0] > 1e-12:
                break
            found = _best_split_on(X[idx, j], ys, min_leaf)
            if found is not None and (best is None or found[0] > best[0]):
                best = (found[0], found[1], int(j))
        if best is None or best[0] <= 1e-12:
            continue
        _, thr, j = best
        go_left = X[idx, j] <= thr
        li, ri = idx[go_left], idx[~go_left]
        feature[node], threshold[node] = j, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri))
        stack.append((left[node], li))
    return {
        "feature": np.asarray(feature, dtype=np.int64),
        "threshold": np.asarray(threshold, dtype=np.float64),
        "left": np.asarray(left, dtype=np.int64),
        "right": np.asarray(right, dtype=np.int64),
        "value": np.asarray(value, dtype=np.float64),
    }


def tree_leaf_values(tree, X):
    node = np.zeros(X.shape[0], dtype=np.int64)
    feat = tree["feature"]
    while True:
        active = feat[node] != LEAF
        if not active.any():
            return tree["value"][node]
        a = np.flatnonzero(active)
        n = node[a]
        go_left = X[a, feat[n]] <= tree["threshold"][n]
        node[a] = np.where(go_left, tree["left"][n], tree["right"][n])


def _default_candidates(n_features):
    return int(math.log2(n_features) + 1) if n_features > 1 else 1


def _tree_to_json(tree):
    return {k: v.tolist() for k, v in tree.items()}


def _tree_from_json(d):
    ints = {"feature", "left", "right"}
    return {k: np.asarray(v, dtype=np.int64 if k in ints else np.float64) for k, v in d.items()}


class RandomTree(PhishClassifier):
    """Unpruned tree choosing the best IG split among a random subset of features per node.

    ``n_candidates=None`` samples ``floor(log2(n_features) + 1)`` features.
    """

    kind = "rt"

    def __init__(self, n_candidates=None, min_samples_leaf=1, random_state=42):
        self.n_candidates = n_candidates
        self.min_samples_leaf = min_samples_leaf
        self.random_state = random_state

    def _fit(self, X, y):
        k = self.n_candidates or _default_candidates(X.shape[1])
        rng = np.random.default_rng(self.random_state)
        self.tree_ = grow_tree(X, y, k, self.min_samples_leaf, rng)

    def _phish_proba(self, X):
        return tree_leaf_values(self.tree_, X)

    def _state(self):
        return {"tree": _tree_to_json(self.tree_)}

    def _load_state(self, state):
        self.tree_ = _tree_from_json(state["tree"])


class RandomForest(PhishClassifier):
    """Bootstrap-aggregated random trees; probability is the fraction of trees voting phish.

    Tree ``i`` draws its bootstrap sample and feature subsets from seed
    ``random_state + i``, so the forest does not depend on build order.
    """

    kind = "rf"

    def __init__(self, n_estimators=100, n_candidates=None, min_samples_leaf=1, random_state=42):
        self.n_estimators = n_estimators
        self.n_candidates = n_candidates
        self.min_samples_leaf = min_samples_leaf
        self.random_state = random_state

    def _fit(self, X, y):
        k = self.n_candidates or _default_candidates(X.shape[1])
        n = len(y)
        self.trees_ = []
        for i in range(int(self.n_estimators)):
            rng = np.random.default_rng(self.random_state + i)
            boot = rng.integers(0, n, n)
            self.trees_.append(grow_tree(X[boot], y[boot], k, self.min_samples_leaf, rng))

    def tree_votes(self, X):
        return np.vstack([tree_leaf_values(t, X) >= 0.5 for t in self.trees_]).astype(np.float64)

    def _phish_proba(self, X):
        return self.tree_votes(X).mean(axis=0)

    def _state(self):
        return {"trees": [_tree_to_json(t) for t in self.trees_]}

    def _load_state(self, state):
        self.trees_ = [_tree_from_json(t) for t in state["trees"]]
