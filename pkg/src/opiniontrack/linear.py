"""Regularized logistic models shared by the disambiguation and sentiment
classifiers: stable loss/gradient kernels and a deterministic full-batch
descent loop with backtracking.

Objectives (lam = L2 strength; biases are not penalized, so in the
lam -> inf limit predictions tend to the class priors):

    binary:      mean log-loss        + lam * ||w||^2
    multinomial: mean cross-entropy   + lam * ||W||^2
"""

from __future__ import annotations

import numpy as np

from ._accel import NUMBA_ENABLED, njit


# --- binary logistic ---------------------------------------------------

def binary_loss_grad_np(X, y, w, b, lam):
    n = X.shape[0]
    z = X @ w + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + lam * float(w @ w)
    p = 1.0 / (1.0 + np.exp(-z))
    resid = (p - y) / n
    grad_w = X.T @ resid + 2.0 * lam * w
    grad_b = float(np.sum(resid))
    return loss, grad_w, grad_b


@njit(cache=True)
def binary_loss_grad_nb(X, y, w, b, lam):  # pragma: no cover - numba path
    n, d = X.shape
    loss = 0.0
    grad_w = np.zeros(d)
    grad_b = 0.0
    for i in range(n):
        z = b
        for j in range(d):
            z += X[i, j] * w[j]
        if z > 0.0:
            loss += z + np.log1p(np.exp(-z)) - y[i] * z
        else:
            loss += np.log1p(np.exp(z)) - y[i] * z
        p = 1.0 / (1.0 + np.exp(-z))
        r = (p - y[i]) / n
        grad_b += r
        for j in range(d):
            grad_w[j] += X[i, j] * r
    loss = loss / n
    for j in range(d):
        loss += lam * w[j] * w[j]
        grad_w[j] += 2.0 * lam * w[j]
    return loss, grad_w, grad_b


# --- multinomial logistic ----------------------------------------------

def multinomial_loss_grad_np(X, y, W, b, lam):
    n = X.shape[0]
    scores = X @ W.T + b
    m = scores.max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp(scores - m).sum(axis=1))
    loss = float(np.mean(lse - scores[np.arange(n), y])) + lam * float(np.sum(W * W))
    P = np.exp(scores - lse[:, None])
    P[np.arange(n), y] -= 1.0
    P /= n
    grad_W = P.T @ X + 2.0 * lam * W
    grad_b = P.sum(axis=0)
    return loss, grad_W, grad_b


@njit(cache=True)
def multinomial_loss_grad_nb(X, y, W, b, lam):  # pragma: no cover - numba path
    n, d = X.shape
    k = W.shape[0]
    loss = 0.0
    grad_W = np.zeros((k, d))
    grad_b = np.zeros(k)
    scores = np.empty(k)
    for i in range(n):
        m = -1e300
        for c in range(k):
            s = b[c]
            for j in range(d):
                s += W[c, j] * X[i, j]
            scores[c] = s
            if s > m:
                m = s
        tot = 0.0
        for c in range(k):
            tot += np.exp(scores[c] - m)
        lse = m + np.log(tot)
        loss += lse - scores[y[i]]
        for c in range(k):
            p = np.exp(scores[c] - lse)
            if c == y[i]:
                p -= 1.0
            p /= n
            grad_b[c] += p
            for j in range(d):
                grad_W[c, j] += p * X[i, j]
    loss = loss / n
    for c in range(k):
        for j in range(d):
            loss += lam * W[c, j] * W[c, j]
            grad_W[c, j] += 2.0 * lam * W[c, j]
    return loss, grad_W, grad_b


if NUMBA_ENABLED:
    binary_loss_grad = binary_loss_grad_nb
    multinomial_loss_grad = multinomial_loss_grad_nb
else:
    binary_loss_grad = binary_loss_grad_np
    multinomial_loss_grad = multinomial_loss_grad_np


# --- descent loop ------------------------------------------------------

def fit_binary(X, y, lam=1e-3, max_iter=500, tol=1e-6, step0=1.0):
    """Full-batch proximal descent with per-iteration backtracking: take a
    step along the data-loss gradient, then shrink the weights by the exact
    closed form for the L2 term. The objective is non-increasing by
    construction, stable for any lam, and the result is deterministic."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w = np.zeros(X.shape[1])
    b = 0.0

    def objective_and_grads(w_, b_):
        data_loss, gw, gb = binary_loss_grad(X, y, w_, b_, 0.0)
        return data_loss + lam * float(w_ @ w_), gw, gb

    loss, grad_w, grad_b = objective_and_grads(w, b)
    history = [loss]
    for _ in range(max_iter):
        step = step0
        for _ in range(60):
            w_try = (w - step * grad_w) / (1.0 + 2.0 * step * lam)
            b_try = b - step * grad_b
            new_loss, new_gw, new_gb = objective_and_grads(w_try, b_try)
            if new_loss <= loss:
                break
            step *= 0.5
        else:
            break
        w, b = w_try, b_try
        grad_w, grad_b = new_gw, new_gb
        history.append(new_loss)
        if loss - new_loss < tol:
            loss = new_loss
            break
        loss = new_loss
    return w, b, history


def fit_multinomial(X, y, n_classes, lam=1e-3, max_iter=500, tol=1e-6, step0=1.0):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    W = np.zeros((n_classes, X.shape[1]))
    b = np.zeros(n_classes)

    def objective_and_grads(W_, b_):
        data_loss, gW, gb = multinomial_loss_grad(X, y, W_, b_, 0.0)
        return data_loss + lam * float(np.sum(W_ * W_)), gW, gb

    loss, grad_W, grad_b = objective_and_grads(W, b)
    history = [loss]
    for _ in range(max_iter):
        step = step0
        for _ in range(60):
            W_try = (W - step * grad_W) / (1.0 + 2.0 * step * lam)
            b_try = b - step * grad_b
            new_loss, new_gW, new_gb = objective_and_grads(W_try, b_try)
            if new_loss <= loss:
                break
            step *= 0.5
        else:
            break
        W, b = W_try, b_try
        grad_W, grad_b = new_gW, new_gb
        history.append(new_loss)
        if loss - new_loss < tol:
            loss = new_loss
            break
        loss = new_loss
    return W, b, history


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


def softmax(scores: np.ndarray) -> np.ndarray:
    e = np.exp(scores - scores.max())
    return e / e.sum()
