"""Quantitative helicity metrics for 3-D embeddings.

A helical embedding shows two things: azimuths in some plane that track the
pitch-class phase theta(u) = 2*pi*(u mod Q)/Q, and a third axis that grows
monotonically with the bin index. ``chroma_alignment`` measures the first
with a squared circular-circular (Fisher-Lee) correlation; a linear
correlation would misbehave at the angular wrap-around.
``height_monotonicity`` measures the second with a Spearman rank correlation.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

__all__ = [
    "DegenerateChromaPlaneError",
    "HelicityReport",
    "chroma_alignment",
    "height_monotonicity",
    "select_axes",
    "helicity_report",
]


class DegenerateChromaPlaneError(ValueError):
    """All points collapse onto the origin of the chroma plane."""


def _coordinates(emb) -> np.ndarray:
    coords = np.asarray(getattr(emb, "coordinates", emb), dtype=float)
    if coords.ndim != 2:
        raise ValueError(f"expected (n, dims) coordinates, got shape {coords.shape}")
    return coords


@dataclass(frozen=True)
class HelicityReport:
    """How helical an embedding is, plus which axes played which role."""

    chroma_alignment: float
    height_monotonicity: float
    variance_profile: tuple
    n_components_used: int
    height_axis: int
    chroma_plane: tuple
    degenerate_chroma: bool = False
    constant_height: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variance_profile"] = [float(x) for x in self.variance_profile]
        d["chroma_plane"] = [int(x) for x in self.chroma_plane]
        return d


def _circular_corr_squared(alpha: np.ndarray, beta: np.ndarray) -> float:
    sin_a = np.sin(alpha[:, None] - alpha[None, :])
    sin_b = np.sin(beta[:, None] - beta[None, :])
    denom = np.sqrt(np.sum(sin_a**2) * np.sum(sin_b**2))
    if denom == 0.0:
        raise DegenerateChromaPlaneError("angles carry no pairwise variation")
    r = np.sum(sin_a * sin_b) / denom
    return float(r**2)


def chroma_alignment(emb, q: int, plane: tuple = (0, 1), bin_indices=None) -> float:
    """Squared circular correlation between plane azimuths and chroma phase.

    Invariant to any rotation or uniform scaling of the plane. Raises
    :class:`DegenerateChromaPlaneError` when the points collapse onto the
    plane's origin (no azimuth is defined there).
    """
    coords = _coordinates(emb)
    n = coords.shape[0]
    if coords.shape[1] < 2:
        raise ValueError("embedding needs at least 2 dimensions")
    if n < 2 * q:
        raise ValueError(f"need at least 2Q = {2 * q} points, got {n}")
    a_axis, b_axis = plane
    x = coords[:, a_axis]
    y = coords[:, b_axis]
    radii = np.hypot(x, y)
    scale = np.max(np.abs(coords))
    if np.max(radii) <= 1e-6 * max(scale, 1e-300):
        raise DegenerateChromaPlaneError(
            "all points lie at the origin of the chroma plane"
        )
    azimuth = np.arctan2(y, x)
    u = np.arange(n) if bin_indices is None else np.asarray(bin_indices)
    theta = 2 * np.pi * (u % q) / q
    return _circular_corr_squared(azimuth, theta)


def height_monotonicity(emb, axis: int) -> float:
    """Spearman rank correlation between bin index and one coordinate.

    Returns 0.0 for a constant coordinate (``helicity_report`` flags that
    case). Invariant to strictly increasing transforms of the coordinate.
    """
    coords = _coordinates(emb)
    n = coords.shape[0]
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    column = coords[:, axis]
    if np.ptp(column) == 0.0:
        return 0.0
    ranks = rankdata(column)
    index_ranks = np.arange(1, n + 1, dtype=float)
    rc = ranks - ranks.mean()
    ri = index_ranks - index_ranks.mean()
    r = np.dot(rc, ri) / np.sqrt(np.dot(rc, rc) * np.dot(ri, ri))
    return float(np.clip(r, -1.0, 1.0))


def select_axes(coords) -> tuple:
    """Pick the height axis (max |Spearman| vs index) among the first three;
    the remaining pair is the chroma plane."""
    coords = _coordinates(coords)
    if coords.shape[1] < 3:
        raise ValueError("axis selection needs a 3-D embedding")
    strengths = [abs(height_monotonicity(coords, axis)) for axis in range(3)]
    height_axis = int(np.argmax(strengths))
    plane = tuple(axis for axis in range(3) if axis != height_axis)
    return height_axis, plane


def helicity_report(emb, q: int, bin_indices=None) -> HelicityReport:
    """Assemble the full helicity diagnosis of a 3-D embedding."""
    coords = _coordinates(emb)
    height_axis, plane = select_axes(coords)
    monotonicity = height_monotonicity(coords, height_axis)
    constant_height = bool(np.ptp(coords[:, height_axis]) == 0.0)
    try:
        alignment = chroma_alignment(coords, q, plane=plane, bin_indices=bin_indices)
        degenerate = False
    except DegenerateChromaPlaneError:
        alignment = 0.0
        degenerate = True
    variance = getattr(emb, "explained_variance", None)
    profile = tuple(float(x) for x in (variance[:3] if variance is not None else ()))
    return HelicityReport(
        chroma_alignment=float(alignment),
        height_monotonicity=float(monotonicity),
        variance_profile=profile,
        n_components_used=3,
        height_axis=height_axis,
        chroma_plane=plane,
        degenerate_chroma=degenerate,
        constant_height=constant_height,
    )
