"""Ordinary least squares on small dense design matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OlsFit:
    coef: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    sse: float
    rank: int


def add_intercept(x: np.ndarray) -> np.ndarray:
    """Design matrix ``[x, 1]`` for a single regressor."""
    x = np.asarray(x, dtype=float).reshape(-1)
    return np.column_stack([x, np.ones_like(x)])


def least_squares(X: np.ndarray, y: np.ndarray) -> OlsFit:
    """Solve ``min ||X b - y||`` via SVD (``numpy.linalg.lstsq``)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    fitted = X @ coef
    residuals = y - fitted
    return OlsFit(coef, fitted, residuals, float(residuals @ residuals), int(rank))


def total_sum_of_squares(y: np.ndarray) -> float:
    y = np.asarray(y, dtype=float)
    centered = y - y.mean()
    return float(centered @ centered)


def has_variance(y: np.ndarray, rtol: float = 1e-12) -> bool:
    """False when every value equals the mean up to ``rtol`` of its magnitude."""
    y = np.asarray(y, dtype=float)
    scale = max(float(np.max(np.abs(y))), 1e-300)
    return float(np.ptp(y)) > rtol * scale
