import numpy as np
from scipy.special import logsumexp

from ._base import PhishClassifier


class GaussianNaiveBayes(PhishClassifier):
    """Per-class Gaussian likelihoods with frequency priors.

    Per-feature variances are floored at ``var_floor`` so constant columns
    (``isAtPresent`` is all zero in most ham) do not divide by zero.
    """

    kind = "nb"

    def __init__(self, var_floor=1e-9):
        self.var_floor = var_floor

    def _fit(self, X, y):
        self.class_prior_ = np.array([np.mean(y == c) for c in (0, 1)])
        self.theta_ = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
        var = np.vstack([X[y == c].var(axis=0) for c in (0, 1)])
        self.var_ = np.maximum(var, self.var_floor)

    def _joint_log_likelihood(self, X):
        jll = []
        for c in (0, 1):
            log_norm = -0.5 * np.sum(np.log(2.0 * np.pi * self.var_[c]))
            sq = -0.5 * np.sum((X - self.theta_[c]) ** 2 / self.var_[c], axis=1)
            jll.append(np.log(self.class_prior_[c]) + log_norm + sq)
        return np.column_stack(jll)

    def _phish_proba(self, X):
        jll = self._joint_log_likelihood(X)
        return np.exp(jll[:, 1] - logsumexp(jll, axis=1))

    def _state(self):
        return {"class_prior": self.class_prior_.tolist(), "theta": self.theta_.tolist(), "var": self.var_.tolist()}

    def _load_state(self, state):
        self.class_prior_ = np.asarray(state["class_prior"], dtype=np.float64)
        self.theta_ = np.asarray(state["theta"], dtype=np.float64)
        self.var_ = np.asarray(state["var"], dtype=np.float64)
