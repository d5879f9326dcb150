"""One-hidden-layer sigmoid network trained by per-instance backpropagation with momentum."""
from __future__ import annotations

import math

import numpy as np
from numba import njit
from scipy.special import expit
from sklearn.preprocessing import StandardScaler

from ._base import PhishClassifier, scaler_from_state, scaler_state


@njit(cache=True)
def _sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z)) if z >= 0 else math.exp(z) / (1.0 + math.exp(z))


@njit(cache=True)
def _backprop(W1, b1, w2, b2, x, t, gW1, gb1, gw2):
    """Squared-error gradient for one instance, accumulated into gW1/gb1/gw2.

    Returns (gb2, 0.5 * (out - t)**2).
    """
    n_hidden, n_in = W1.shape
    h = np.empty(n_hidden)
    z = b2
    for k in range(n_hidden):
        a = b1[k]
        for j in range(n_in):
            a += W1[k, j] * x[j]
        h[k] = _sigmoid(a)
        z += w2[k] * h[k]
    out = _sigmoid(z)
    delta_out = (out - t) * out * (1.0 - out)
    for k in range(n_hidden):
        gw2[k] += delta_out * h[k]
        delta_h = delta_out * w2[k] * h[k] * (1.0 - h[k])
        gb1[k] += delta_h
        for j in range(n_in):
            gW1[k, j] += delta_h * x[j]
    return delta_out, 0.5 * (out - t) ** 2


@njit(cache=True)
def _batch_gradient(W1, b1, w2, b2, X, T):
    gW1 = np.zeros_like(W1)
    gb1 = np.zeros_like(b1)
    gw2 = np.zeros_like(w2)
    gb2 = 0.0
    loss = 0.0
    for i in range(X.shape[0]):
        g, e = _backprop(W1, b1, w2, b2, X[i], T[i], gW1, gb1, gw2)
        gb2 += g
        loss += e
    return loss, gW1, gb1, gw2, gb2


@njit(cache=True)
def _train_sgd(W1, b1, w2, b2, X, T, order, lr, momentum, epochs):
    vW1 = np.zeros_like(W1)
    vb1 = np.zeros_like(b1)
    vw2 = np.zeros_like(w2)
    vb2 = 0.0
    gW1 = np.zeros_like(W1)
    gb1 = np.zeros_like(b1)
    gw2 = np.zeros_like(w2)
    for _ in range(epochs):
        for i in order:
            gW1[:] = 0.0
            gb1[:] = 0.0
            gw2[:] = 0.0
            gb2, _e = _backprop(W1, b1, w2, b2, X[i], T[i], gW1, gb1, gw2)
            vW1 = momentum * vW1 - lr * gW1
            vb1 = momentum * vb1 - lr * gb1
            vw2 = momentum * vw2 - lr * gw2
            vb2 = momentum * vb2 - lr * gb2
            W1 += vW1
            b1 += vb1
            w2 += vw2
            b2 += vb2
    return b2


def _forward(W1, b1, w2, b2, X):
    return expit(expit(X @ W1.T + b1) @ w2 + b2)


class MultilayerPerceptron(PhishClassifier):
    """Sigmoid MLP on standardized inputs.

    ``hidden_units=None`` uses ``ceil((n_features + 2) / 2)`` units. Training
    visits instances in one seeded random order, updating after each instance.
    """

    kind = "nn"

    def __init__(self, hidden_units=None, learning_rate=0.3, momentum=0.2, epochs=500, random_state=42):
        self.hidden_units = hidden_units
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.epochs = epochs
        self.random_state = random_state

    def _init_weights(self, n_in, rng):
        n_hidden = self.hidden_units or math.ceil((n_in + 2) / 2)
        W1 = rng.uniform(-0.5, 0.5, size=(n_hidden, n_in))
        b1 = rng.uniform(-0.5, 0.5, size=n_hidden)
        w2 = rng.uniform(-0.5, 0.5, size=n_hidden)
        b2 = float(rng.uniform(-0.5, 0.5))
        return W1, b1, w2, b2

    def _fit(self, X, y):
        rng = np.random.default_rng(self.random_state)
        self.scaler_ = StandardScaler().fit(X)
        Z = self.scaler_.transform(X)
        W1, b1, w2, b2 = self._init_weights(X.shape[1], rng)
        order = rng.permutation(len(y)).astype(np.int64)
        b2 = _train_sgd(W1, b1, w2, b2, Z, y.astype(np.float64), order,
                        float(self.learning_rate), float(self.momentum), int(self.epochs))
        self.coefs_ = (W1, b1, w2, float(b2))

    def _phish_proba(self, X):
        return _forward(*self.coefs_, self.scaler_.transform(X))

    def loss_gradient(self, X, y, coefs=None):
        """Summed half squared error and its gradient w.r.t. (W1, b1, w2, b2) on standardized ``X``."""
        W1, b1, w2, b2 = coefs if coefs is not None else self.coefs_
        return _batch_gradient(np.asarray(W1, float), np.asarray(b1, float), np.asarray(w2, float),
                               float(b2), np.asarray(X, float), np.asarray(y, float))

    def _state(self):
        W1, b1, w2, b2 = self.coefs_
        return {"W1": W1.tolist(), "b1": b1.tolist(), "w2": w2.tolist(), "b2": b2,
                "scaler": scaler_state(self.scaler_)}

    def _load_state(self, state):
        self.coefs_ = (np.asarray(state["W1"], float), np.asarray(state["b1"], float),
                       np.asarray(state["w2"], float), float(state["b2"]))
        self.scaler_ = scaler_from_state(state["scaler"])
