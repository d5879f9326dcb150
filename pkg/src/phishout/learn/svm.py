"""Linear soft-margin SVM solved in the dual by SMO with maximal-violating-pair selection."""
from __future__ import annotations

import logging

import numpy as np
from numba import njit
from sklearn.preprocessing import StandardScaler

from ._base import PhishClassifier, scaler_from_state, scaler_state

log = logging.getLogger(__name__)


@njit(cache=True)
def _smo(K, y, C, tol, max_iter):
    """Solve min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0 with Q = yy' * K.

    Returns (alpha, bias, iterations, final KKT gap).
    """
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    gap = np.inf
    it = 0
    while it < max_iter:
        # i maximises -y*grad over I_up, j minimises it over I_low
        i = -1
        j = -1
        g_max = -np.inf
        g_min = np.inf
        for t in range(n):
            v = -y[t] * grad[t]
            up = (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0)
            low = (y[t] < 0 and alpha[t] < C) or (y[t] > 0 and alpha[t] > 0)
            if up and v > g_max:
                g_max = v
                i = t
            if low and v < g_min:
                g_min = v
                j = t
        gap = g_max - g_min
        if i < 0 or j < 0 or gap < tol:
            break
        curv = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if curv <= 1e-12:
            curv = 1e-12
        step = gap / curv
        # step along (+y_i on alpha_i, -y_j on alpha_j) while staying in the box
        if y[i] > 0:
            step = min(step, C - alpha[i])
        else:
            step = min(step, alpha[i])
        if y[j] > 0:
            step = min(step, alpha[j])
        else:
            step = min(step, C - alpha[j])
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        for t in range(n):
            grad[t] += step * y[t] * (K[t, i] - K[t, j])
        it += 1

    total = 0.0
    n_free = 0
    ub = np.inf
    lb = -np.inf
    for t in range(n):
        v = -y[t] * grad[t]
        if 0.0 < alpha[t] < C:
            total += v
            n_free += 1
        else:
            up = (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0)
            if up:
                lb = max(lb, v)
            else:
                ub = min(ub, v)
    if n_free > 0:
        bias = total / n_free
    elif np.isfinite(ub) and np.isfinite(lb):
        bias = (ub + lb) / 2.0
    else:
        bias = lb if np.isfinite(lb) else (ub if np.isfinite(ub) else 0.0)
    return alpha, bias, it, gap


class LinearSVM(PhishClassifier):
    """Linear SVM on standardized inputs with hard {0, 1} probabilities.

    Optimisation stops when the maximal KKT violation falls below ``tol``.
    """

    kind = "svm"

    def __init__(self, C=1.0, tol=1e-3, max_iter=1_000_000):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def _fit(self, X, y):
        self.scaler_ = StandardScaler().fit(X)
        Z = self.scaler_.transform(X)
        signs = np.where(y == 1, 1.0, -1.0)
        alpha, bias, it, gap = _smo(Z @ Z.T, signs, float(self.C), float(self.tol), int(self.max_iter))
        if gap >= self.tol:
            log.warning("SMO stopped after %d iterations with KKT gap %.3g", it, gap)
        self.n_iter_ = int(it)
        self.coef_ = (alpha * signs) @ Z
        self.intercept_ = float(bias)

    def decision_function(self, X):
        return self.scaler_.transform(X) @ self.coef_ + self.intercept_

    def _phish_proba(self, X):
        return (self.decision_function(X) >= 0).astype(np.float64)

    def _state(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_, "scaler": scaler_state(self.scaler_)}

    def _load_state(self, state):
        self.coef_ = np.asarray(state["coef"], dtype=np.float64)
        self.intercept_ = float(state["intercept"])
        self.scaler_ = scaler_from_state(state["scaler"])
