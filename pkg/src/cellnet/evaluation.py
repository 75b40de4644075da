"""Blending per-cell linear functions into the global approximation.

The normalized weights form a partition of unity, so the blended value is an
affine combination of the cell functions; the denominator never drops below 1
because the nearest cell always contributes relative weight 1.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import BINARY
from .optim import NumericalError

# The nearest cell is interior, so the weight normalizer is >= 1 up to rounding.
_MIN_WEIGHT_SUM = 1.0 - 1e-12


@dataclass
class EvalBreakdown:
    raw_weights: np.ndarray  # (k,) relative weights
    weights: np.ndarray      # (k,) normalized, sum to 1
    cell_values: np.ndarray  # (k,) per-cell linear values
    value: float             # blended approximation


def linear_value(net, cell: int, point) -> float:
    """The cell's affine function at point: beta[0] + beta[1:] . point."""
    p = np.asarray(point, dtype=np.float64)
    b = net.betas[cell]
    return float(b[0] + b[1:] @ p)


def linear_values(net, X) -> np.ndarray:
    """All cells' affine values at each row of X; shape (n, k)."""
    return X @ net.betas[:, 1:].T + net.betas[:, 0]


def _weight_sums(wrel) -> np.ndarray:
    S = wrel.sum(axis=1)
    if S.min(initial=np.inf) < _MIN_WEIGHT_SUM:
        raise NumericalError("weight normalizer below 1; no interior cell found")
    return S


def evaluate(net, point) -> EvalBreakdown:
    """Full per-point breakdown: relative weights, normalized weights, blend."""
    p = np.asarray(point, dtype=np.float64)
    if p.shape != (net.dimensions,):
        raise ValueError(f"point must have dimension {net.dimensions}")
    wrel, _, _ = kernels.forward(net.centers, net.alphas, p[None, :])
    S = _weight_sums(wrel)
    weights = wrel[0] / S[0]
    values = linear_values(net, p[None, :])[0]
    return EvalBreakdown(wrel[0], weights, values, float(weights @ values))


def evaluate_batch(net, X, deterministic=False) -> np.ndarray:
    """Blended values at each row of X; shape (n,)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.dimensions:
        raise ValueError(f"points must be an n x {net.dimensions} matrix")
    wrel, _, _ = kernels.forward(net.centers, net.alphas, X, deterministic=deterministic)
    S = _weight_sums(wrel)
    return np.einsum("nk,nk->n", wrel, linear_values(net, X)) / S


def sigmoid(z):
    """Overflow-safe logistic function, elementwise."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _require_binary(net):
    if net.mode != BINARY:
        raise ValueError("model is not a classifier")


def probability(net, point) -> float:
    """Class probability sigmoid(f(point)) for a binary-mode network."""
    _require_binary(net)
    return float(sigmoid(np.float64(evaluate(net, point).value)))


def probability_batch(net, X, deterministic=False) -> np.ndarray:
    _require_binary(net)
    return sigmoid(evaluate_batch(net, X, deterministic=deterministic))
