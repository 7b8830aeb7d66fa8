"""Squared Pearson correlations between subbands and the derived distance.

The squared correlation rho2[u, v] is read as a Gaussian kernel value
exp(-2 * d**2), so the induced pseudo-Euclidean distance is
d = sqrt(-0.5 * ln(rho2)); rho2 = 0 maps to +inf, represented as ``np.inf``
(the sentinel the graph module honors), never as a large finite float.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "center_features",
    "pearson_squared",
    "rho_to_distance",
]


def center_features(features) -> np.ndarray:
    """Remove each column's mean; needs at least two rows."""
    features = np.asarray(features, dtype=float)
    if features.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {features.shape}")
    if features.shape[0] < 2:
        raise ValueError(
            f"need at least 2 rows to correlate features, got {features.shape[0]}"
        )
    return features - features.mean(axis=0)


def pearson_squared(centered) -> tuple:
    """Squared Pearson correlation of all column pairs of a centered matrix.

    Returns ``(rho2, degenerate)`` where ``degenerate`` flags columns that are
    identically zero after centering. Such columns get rho2 = 0 against every
    other column and 1 on the diagonal, so no NaN ever propagates. The output
    is symmetric by construction (upper triangle mirrored) with entries in
    [0, 1] and an exact unit diagonal.
    """
    y = np.asarray(centered, dtype=float)
    if y.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {y.shape}")
    gram = y.T @ y
    power = np.diag(gram).copy()
    degenerate = power == 0.0
    safe = np.where(degenerate, 1.0, power)
    rho2 = gram**2 / np.outer(safe, safe)
    rho2[degenerate, :] = 0.0
    rho2[:, degenerate] = 0.0
    np.clip(rho2, 0.0, 1.0, out=rho2)
    upper = np.triu(rho2, k=1)
    rho2 = upper + upper.T
    np.fill_diagonal(rho2, 1.0)
    return rho2, degenerate


def rho_to_distance(rho2) -> np.ndarray:
    """Invert the Gaussian-kernel identity: d = sqrt(-0.5 * ln(rho2)).

    Strictly decreasing on (0, 1]; rho2 = 1 gives 0 and rho2 = 0 gives +inf.
    """
    rho2 = np.asarray(rho2, dtype=float)
    if np.any(rho2 < 0) or np.any(rho2 > 1):
        raise ValueError("correlation entries must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        squared = -0.5 * np.log(rho2)
    return np.sqrt(np.maximum(squared, 0.0))
