"""Pointwise loudness mappings applied to scalogram magnitudes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VALID_KINDS = ("logarithmic", "linear", "cubic_root")

__all__ = [
    "VALID_KINDS",
    "LoudnessMode",
    "LOGARITHMIC",
    "LINEAR",
    "CUBIC_ROOT",
    "loudness_map",
]


@dataclass(frozen=True)
class LoudnessMode:
    """Loudness compression choice; ``clip_floor`` applies to the log mode only."""

    kind: str
    clip_floor: float = -100.0

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError(f"kind must be one of {VALID_KINDS}, got {self.kind!r}")
        if self.clip_floor >= 0:
            raise ValueError(f"clip_floor must be negative, got {self.clip_floor}")


LOGARITHMIC = LoudnessMode("logarithmic")
LINEAR = LoudnessMode("linear")
CUBIC_ROOT = LoudnessMode("cubic_root")


def loudness_map(x, mode: LoudnessMode = LOGARITHMIC) -> np.ndarray:
    """Map nonnegative magnitudes elementwise; shape is preserved.

    logarithmic: max(clip_floor, 10*log10(x)), with x=0 clipping to the floor
    (never -Inf or NaN). linear: identity. cubic_root: x**(1/3).
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("magnitudes must be finite")
    if np.any(x < 0):
        raise ValueError("magnitudes must be >= 0")
    if mode.kind == "logarithmic":
        with np.errstate(divide="ignore"):
            out = 10.0 * np.log10(x)
        return np.maximum(out, mode.clip_floor)
    if mode.kind == "linear":
        return x.copy()
    return np.cbrt(x)
