"""Comparators: full-dictionary online learner and the hindsight oracle.

The full-dictionary learner updates every kernel's model each round and
combines them with multiplicative weights (no node sampling, no importance
weighting), so its per-round cost grows linearly with the dictionary size.
The hindsight oracle solves each kernel's regularized batch least-squares
problem in closed form over the whole stream and keeps the best kernel;
it is the comparator for regret curves.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import backends
from .kernels import kernel_loss_and_grad


def run_full_dictionary(features: np.ndarray, targets: np.ndarray,
                        psi_stack: np.ndarray, eta: float, lam: float,
                        ) -> np.ndarray:
    """One pass of the all-kernels learner; returns per-round predictions."""
    n, num_rf = psi_stack.shape[0], psi_stack.shape[1]
    thetas = np.zeros((n, 2 * num_rf))
    w = np.ones(n)
    all_idx = np.arange(n, dtype=np.intp)
    preds_out = np.empty(targets.shape[0])
    for t in range(targets.shape[0]):
        x = np.ascontiguousarray(features[t], dtype=float)
        y = float(targets[t])
        z, preds = backends.evaluate_subset(psi_stack, thetas, all_idx, x)
        preds_out[t] = float((w / w.sum()) @ preds)
        losses = np.empty(n)
        grads = np.empty_like(z)
        for i in range(n):
            losses[i], grads[i] = kernel_loss_and_grad(thetas[i], z[i], y, lam)
        thetas -= eta * grads
        w *= np.exp(-eta * losses)
        w /= w.max()
    return preds_out


@dataclass
class HindsightOracle:
    """Per-kernel batch ridge solutions over the stream and the best kernel."""

    thetas: np.ndarray            # (N, 2D)
    cumulative_losses: np.ndarray  # (N,)
    best_index: int
    psi_stack: np.ndarray

    def predict(self, x: np.ndarray) -> float:
        idx = np.array([self.best_index], dtype=np.intp)
        _, pred = backends.evaluate_subset(
            self.psi_stack, self.thetas, idx, np.ascontiguousarray(x, dtype=float))
        return float(pred[0])

    def predictions(self, features: np.ndarray) -> np.ndarray:
        z = _feature_matrix(self.psi_stack[self.best_index], features)
        return z @ self.thetas[self.best_index]


def _feature_matrix(psi: np.ndarray, features: np.ndarray) -> np.ndarray:
    proj = features @ psi.T                           # (T, D)
    return np.concatenate([np.sin(proj), np.cos(proj)], axis=1) / np.sqrt(psi.shape[0])


def fit_hindsight(features: np.ndarray, targets: np.ndarray,
                  psi_stack: np.ndarray, lam: float) -> HindsightOracle:
    """Closed-form ridge solve per kernel: minimizes
    sum_t (theta.z_i(x_t) - y_t)^2 + lam T ||theta||^2, then picks the
    kernel with smallest cumulative (clipped) loss, lowest index on ties."""
    n, num_rf = psi_stack.shape[0], psi_stack.shape[1]
    t_count = targets.shape[0]
    thetas = np.empty((n, 2 * num_rf))
    cum_losses = np.empty(n)
    for i in range(n):
        z = _feature_matrix(psi_stack[i], features)   # (T, 2D)
        gram = z.T @ z + lam * t_count * np.eye(2 * num_rf)
        rhs = z.T @ targets
        try:
            theta = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            warnings.warn(f"singular ridge system for kernel {i}; using pseudo-solution")
            theta, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
        thetas[i] = theta
        resid = z @ theta - targets
        reg = lam * float(theta @ theta)
        cum_losses[i] = float(np.minimum(resid**2 + reg, 1.0).sum())
    best = int(np.argmin(cum_losses))
    return HindsightOracle(thetas=thetas, cumulative_losses=cum_losses,
                           best_index=best, psi_stack=psi_stack)


def regret_curve(learner_losses: np.ndarray, oracle_losses: np.ndarray) -> np.ndarray:
    """Partial sums of the loss gap between a learner and the oracle."""
    learner_losses = np.asarray(learner_losses, dtype=float)
    oracle_losses = np.asarray(oracle_losses, dtype=float)
    if learner_losses.shape != oracle_losses.shape:
        raise ValueError("loss series must have equal length")
    return np.cumsum(learner_losses - oracle_losses)
