"""Gaussian-RBF kernel dictionary and random Fourier feature maps.

A dictionary entry is a standardized shift-invariant Gaussian kernel
kappa(rho) = exp(-||rho||^2 / (2 sigma^2)). Each kernel is approximated by
2D random Fourier features built from D i.i.d. samples of its spectral
density (an isotropic Gaussian with per-coordinate std 1/sigma).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class KernelSpec:
    """One dictionary entry: a Gaussian-RBF kernel with bandwidth sigma."""

    index: int
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def default_dictionary(n: int = 41) -> list[KernelSpec]:
    """The standard 41-kernel grid: sigma_i = 10^((i - 21) / 10), i = 1..n."""
    return [KernelSpec(index=i, sigma=10.0 ** ((i - 21) / 10)) for i in range(1, n + 1)]


def eval_kernel(spec: KernelSpec, rho: np.ndarray) -> float:
    """Evaluate kappa(rho) = exp(-||rho||^2 / (2 sigma^2)); in (0, 1]."""
    rho = np.asarray(rho, dtype=float)
    return float(np.exp(-np.dot(rho, rho) / (2.0 * spec.sigma**2)))


@dataclass(frozen=True)
class FeatureMap:
    """D spectral samples defining the 2D-dimensional feature transform."""

    kernel_index: int
    num_rf: int
    input_dim: int
    spectral_samples: np.ndarray  # (D, d)

    def __post_init__(self):
        if self.spectral_samples.shape != (self.num_rf, self.input_dim):
            raise ValueError(
                f"spectral samples shape {self.spectral_samples.shape} does not "
                f"match (D, d) = ({self.num_rf}, {self.input_dim})"
            )


@dataclass
class PerKernelModel:
    """Coefficients of one kernel's RF predictor; dimension 2D, fixed over time."""

    theta: np.ndarray  # (2D,)


def sample_spectral(spec: KernelSpec, num_rf: int, input_dim: int,
                    rng: np.random.Generator) -> FeatureMap:
    """Draw D i.i.d. spectral samples (Gaussian, per-coordinate std 1/sigma)."""
    if num_rf < 1:
        raise ValueError("num_rf must be >= 1")
    samples = rng.normal(scale=1.0 / spec.sigma, size=(num_rf, input_dim))
    return FeatureMap(kernel_index=spec.index, num_rf=num_rf,
                      input_dim=input_dim, spectral_samples=samples)


def rf_features(fmap: FeatureMap, x: np.ndarray) -> np.ndarray:
    """Feature vector z(x) = [sin(psi_j.x); cos(psi_j.x)] / sqrt(D); ||z|| = 1."""
    x = np.asarray(x, dtype=float)
    if x.shape != (fmap.input_dim,):
        raise ValueError(f"x has shape {x.shape}, expected ({fmap.input_dim},)")
    proj = fmap.spectral_samples @ x
    return np.concatenate([np.sin(proj), np.cos(proj)]) / np.sqrt(fmap.num_rf)


def kernel_loss(theta: np.ndarray, z: np.ndarray, y: float, lam: float) -> float:
    """Regularized per-kernel loss (theta.z - y)^2 + lam ||theta||^2, clipped to [0, 1]."""
    raw = (float(theta @ z) - y) ** 2 + lam * float(theta @ theta)
    return min(raw, 1.0)


def kernel_loss_and_grad(theta: np.ndarray, z: np.ndarray, y: float,
                         lam: float) -> tuple[float, np.ndarray]:
    """Clipped loss and its gradient.

    The gradient of the unclipped loss is 2(theta.z - y) z + 2 lam theta;
    clipped rounds use a zero gradient so the gradient stays bounded.
    """
    err = float(theta @ z) - y
    raw = err**2 + lam * float(theta @ theta)
    if raw >= 1.0:
        return 1.0, np.zeros_like(theta)
    return raw, 2.0 * err * z + 2.0 * lam * theta


def spectral_stack(fmaps: list[FeatureMap]) -> np.ndarray:
    """Stack N feature maps into a (N, D, d) array for the round-evaluation core."""
    return np.ascontiguousarray(np.stack([fm.spectral_samples for fm in fmaps]))
