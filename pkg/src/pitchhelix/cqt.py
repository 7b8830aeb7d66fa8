"""Constant-Q wavelet filterbank and scalogram extraction.

The filterbank holds one Hann-windowed complex exponential per bin, with
geometrically spaced center frequencies f_min * 2^(k/Q) for k = 0..Q*J-1 and
window lengths ceil(Q * fs / f_c) samples, so bandwidth scales as f_c / Q.
Kernels are L1-normalized, which makes the pure-tone response amplitude the
same in every bin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy.signal import get_window

from .synth import Signal

DEFAULT_F_MIN = 32.70  # Hz (pitch C1)
PEAK_WINDOW = 0.093  # seconds; short-term energy window for frame selection

__all__ = [
    "DEFAULT_F_MIN",
    "PEAK_WINDOW",
    "FilterbankParams",
    "Filterbank",
    "build_filterbank",
    "cqt_transform",
    "cqt_frame",
    "peak_frame",
    "scalogram_row",
]


@dataclass(frozen=True)
class FilterbankParams:
    """Constant-Q filterbank geometry: Q bins per octave over J octaves."""

    q: int = 24
    octaves: int = 3
    f_min: float = DEFAULT_F_MIN
    sample_rate: int = 44100
    window: str = "hann"

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.octaves < 1:
            raise ValueError(f"octaves must be >= 1, got {self.octaves}")
        if self.f_min <= 0:
            raise ValueError(f"f_min must be positive, got {self.f_min}")
        nyquist = self.sample_rate / 2
        if self.f_min * 2.0**self.octaves > nyquist:
            raise ValueError(
                f"f_min * 2^octaves = {self.f_min * 2.0 ** self.octaves:g} Hz "
                f"exceeds Nyquist ({nyquist:g} Hz)"
            )

    @property
    def n_bins(self) -> int:
        return self.q * self.octaves


class Filterbank:
    """Immutable bank of bandpass kernels; build with :func:`build_filterbank`."""

    def __init__(self, params: FilterbankParams, center_freqs, kernels):
        self.params = params
        self.center_freqs = center_freqs
        self.kernels = kernels
        self.max_length = max(len(k) for k in kernels)

    @property
    def n_bins(self) -> int:
        return self.params.n_bins

    def __len__(self):
        return self.n_bins


def build_filterbank(params: FilterbankParams) -> Filterbank:
    """One L1-normalized, phase-centered kernel per bin."""
    q, fs = params.q, params.sample_rate
    bins = np.arange(params.n_bins)
    # Written as (exact power of 2) * (fractional part) so that bins an octave
    # apart have center-frequency ratio exactly 2.0 in floating point.
    center_freqs = params.f_min * np.exp2(bins // q + 0.0) * np.exp2((bins % q) / q)
    kernels = []
    for f_c in center_freqs:
        length = int(np.ceil(q * fs / f_c))
        window = get_window(params.window, length, fftbins=False)
        m = np.arange(length)
        phase = 2 * np.pi * f_c * (m - (length - 1) / 2) / fs
        kernels.append(window * np.exp(1j * phase) / window.sum())
    return Filterbank(params, center_freqs, kernels)


def _check_signal(signal: Signal, fb: Filterbank):
    if signal.sample_rate != fb.params.sample_rate:
        raise ValueError(
            f"signal sample rate {signal.sample_rate} does not match "
            f"filterbank sample rate {fb.params.sample_rate}"
        )
    if len(signal) < fb.max_length:
        raise ValueError(
            f"signal has {len(signal)} samples but the longest kernel needs "
            f"at least {fb.max_length}"
        )


def _pad_reflect(x: np.ndarray, pad: int) -> np.ndarray:
    return np.pad(x, pad, mode="reflect")


def cqt_transform(signal: Signal, fb: Filterbank, hop: int = 256) -> np.ndarray:
    """Complex CQT matrix of shape (n_bins, n_frames), frames at t = 0, hop, ...

    Entry [u, i] is the inner product of the signal with kernel u centered at
    sample i * hop. Computed by FFT cross-correlation on a reflect-padded
    signal; matches direct time-domain evaluation to better than 1e-9.
    """
    _check_signal(signal, fb)
    if hop < 1:
        raise ValueError(f"hop must be >= 1, got {hop}")
    x = signal.samples
    pad = fb.max_length // 2
    xp = _pad_reflect(x, pad)
    frames = np.arange(0, len(x), hop)
    nfft = scipy.fft.next_fast_len(len(xp) + fb.max_length)
    spectrum = scipy.fft.fft(xp, nfft)
    out = np.empty((fb.n_bins, len(frames)), dtype=complex)
    for u, kernel in enumerate(fb.kernels):
        length = len(kernel)
        corr = scipy.fft.ifft(spectrum * np.conj(scipy.fft.fft(kernel, nfft)))
        out[u] = corr[frames + pad - (length - 1) // 2]
    return out


def cqt_frame(signal: Signal, fb: Filterbank, sample: int) -> np.ndarray:
    """CQT values of all bins at one sample index, by direct inner products."""
    _check_signal(signal, fb)
    if not 0 <= sample < len(signal):
        raise ValueError(f"sample {sample} outside signal of length {len(signal)}")
    pad = fb.max_length // 2
    xp = _pad_reflect(signal.samples, pad)
    out = np.empty(fb.n_bins, dtype=complex)
    for u, kernel in enumerate(fb.kernels):
        length = len(kernel)
        start = sample + pad - (length - 1) // 2
        out[u] = np.vdot(kernel, xp[start : start + length])
    return out


def _frame_geometry(signal: Signal, window: float):
    win = int(round(window * signal.sample_rate))
    if len(signal) <= win:
        raise ValueError(
            f"signal has {len(signal)} samples; needs more than the "
            f"{win}-sample energy window"
        )
    hop = max(1, win // 2)
    return win, hop


def peak_frame(signal: Signal, window: float = PEAK_WINDOW) -> int:
    """Index of the frame (hop = window/2) with highest short-term RMS energy.

    Ties break toward the lowest index.
    """
    win, hop = _frame_geometry(signal, window)
    x = signal.samples
    starts = range(0, len(x) - win + 1, hop)
    energies = np.array([np.dot(x[s : s + win], x[s : s + win]) for s in starts])
    return int(np.argmax(energies))


def _peak_center_sample(signal: Signal, window: float) -> int:
    win, hop = _frame_geometry(signal, window)
    return peak_frame(signal, window) * hop + win // 2


def scalogram_row(
    signal: Signal, fb: Filterbank, peak_window: float = PEAK_WINDOW
) -> np.ndarray:
    """CQT magnitudes at the center of the highest-energy frame; length Q*J."""
    center = _peak_center_sample(signal, peak_window)
    return np.abs(cqt_frame(signal, fb, center))
