"""Pure-NumPy round-evaluation core (fallback backend)."""
import numpy as np


def evaluate_subset(psi_stack: np.ndarray, thetas: np.ndarray,
                    subset: np.ndarray, x: np.ndarray):
    """Feature vectors and predictions for the selected kernels.

    psi_stack: (N, D, d) spectral samples, thetas: (N, 2D) coefficients,
    subset: kernel indices, x: (d,) input. Returns (Z, preds) with Z of
    shape (len(subset), 2D) and preds[k] = thetas[subset[k]] . Z[k].
    """
    num_rf = psi_stack.shape[1]
    proj = psi_stack[subset] @ x                      # (m, D)
    z = np.concatenate([np.sin(proj), np.cos(proj)], axis=1) / np.sqrt(num_rf)
    preds = np.einsum("kj,kj->k", thetas[subset], z)
    return z, preds
