"""Quadratic-trace complexity scores for strategy matrices and distance matrices."""

from __future__ import annotations

import numpy as np

from .exceptions import DegenerateInstanceError, InvalidArgumentError
from .validation import check_distance_matrix, check_strategy_matrix


def covariance_matrix(S) -> np.ndarray:
    """Variance-covariance matrix of the agents' strategy rows.

    Each row is centered on its own mean over the steps and the products
    are divided by the number of steps (population convention), so every
    entry lies in [-1, 1].
    """
    S = check_strategy_matrix(S)
    steps = S.shape[1]
    if steps < 2:
        raise InvalidArgumentError("covariance needs at least two steps (columns)")
    centered = S - S.mean(axis=1, keepdims=True)
    V = centered @ centered.T / steps
    return (V + V.T) / 2.0


def quadratic_trace(V, size: int | None = None) -> float:
    """``tr(V @ V) / size**2`` for symmetric ``V``, computed as the squared-entry sum."""
    V = np.asarray(V, dtype=np.float64)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {V.shape}")
    size = V.shape[0] if size is None else size
    if size != V.shape[0]:
        raise InvalidArgumentError(f"size {size} does not match matrix order {V.shape[0]}")
    return float(np.sum(V * V)) / size**2


def quadratic_trace_system(V, N: int | None = None) -> float:
    """System complexity ``C(A) = tr(V^2) / N^2`` of an N x N covariance matrix."""
    return quadratic_trace(V, N)


def normalized_distance_matrix(d) -> np.ndarray:
    d = check_distance_matrix(d, allow_degenerate=True)
    d_max = float(d.max())
    if d_max <= 0:
        raise DegenerateInstanceError("all distances are zero")
    return d / d_max


def problem_complexity(d) -> float:
    """Problem complexity ``C(p) = tr(M^2) / n^2`` with ``M = d / d_max``."""
    return quadratic_trace(normalized_distance_matrix(d))


def system_complexity(S) -> float:
    """``C(A)`` straight from a strategy matrix."""
    V = covariance_matrix(S)
    return quadratic_trace_system(V, V.shape[0])
