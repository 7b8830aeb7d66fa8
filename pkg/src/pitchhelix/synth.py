"""Synthetic audio stimuli: harmonic tones, odd-partial morphs, glissandi, corpora.

All generators return :class:`Signal` objects that are peak-normalized to 0.9
(headroom for 16-bit WAV export) and wrapped in short raised-cosine fades to
avoid spectral splatter at the note boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_FADE = 0.010  # seconds of raised-cosine fade at each end
PEAK_LEVEL = 0.9

__all__ = [
    "DEFAULT_FADE",
    "PEAK_LEVEL",
    "Signal",
    "HarmonicSpec",
    "harmonic_tone",
    "odd_partial_morph",
    "octave_glissando",
    "synth_corpus",
]


@dataclass(frozen=True)
class Signal:
    """A sampled waveform: finite float samples plus a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain NaN or Inf")
        if int(self.sample_rate) < 8000:
            raise ValueError(f"sample_rate must be >= 8000 Hz, got {self.sample_rate}")
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class HarmonicSpec:
    """Additive-synthesis recipe: partial p has frequency (p+1)*f0.

    ``partial_amplitudes[p]`` is the linear amplitude of partial number p+1.
    """

    f0: float
    partial_amplitudes: tuple = field(default=(1.0,))
    duration: float = 1.0
    fade: float = DEFAULT_FADE

    def __post_init__(self):
        amps = tuple(float(a) for a in np.atleast_1d(self.partial_amplitudes))
        object.__setattr__(self, "partial_amplitudes", amps)
        if self.f0 <= 0:
            raise ValueError(f"f0 must be positive, got {self.f0}")
        if self.duration <= 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.fade < 0:
            raise ValueError(f"fade must be >= 0, got {self.fade}")
        if len(amps) == 0:
            raise ValueError("partial_amplitudes must not be empty")
        if any(a < 0 or not np.isfinite(a) for a in amps):
            raise ValueError("partial amplitudes must be finite and >= 0")
        if not any(a > 0 for a in amps):
            raise ValueError("at least one partial amplitude must be > 0")


def _raised_cosine_fade(x: np.ndarray, n_fade: int) -> np.ndarray:
    if n_fade <= 0:
        return x
    n_fade = min(n_fade, len(x) // 2)
    if n_fade == 0:
        return x
    ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(n_fade) / n_fade)
    x[:n_fade] *= ramp
    x[-n_fade:] *= ramp[::-1]
    return x


def _normalize_and_fade(x: np.ndarray, sample_rate: int, fade: float) -> np.ndarray:
    peak = np.max(np.abs(x))
    if peak > 0:
        x = x * (PEAK_LEVEL / peak)
    return _raised_cosine_fade(x, int(round(fade * sample_rate)))


def harmonic_tone(spec: HarmonicSpec, sample_rate: int) -> Signal:
    """Sum of sinusoids at integer multiples of ``spec.f0``.

    Partials with zero amplitude are allowed anywhere; every partial with a
    positive amplitude must lie strictly below Nyquist, otherwise the
    offending partial index is reported.
    """
    nyquist = sample_rate / 2
    amps = np.asarray(spec.partial_amplitudes, dtype=float)
    for p, a in enumerate(amps):
        freq = (p + 1) * spec.f0
        if a > 0 and freq >= nyquist:
            raise ValueError(
                f"partial {p} at {freq:g} Hz is at or above Nyquist "
                f"({nyquist:g} Hz for sample_rate={sample_rate})"
            )
    n = int(round(spec.duration * sample_rate))
    if n < 1:
        raise ValueError("duration too short for one sample")
    t = np.arange(n) / sample_rate
    x = np.zeros(n)
    for p, a in enumerate(amps):
        if a > 0:
            x += a * np.sin(2 * np.pi * (p + 1) * spec.f0 * t)
    x = _normalize_and_fade(x, sample_rate, spec.fade)
    return Signal(x, sample_rate)


def odd_partial_morph(
    f0: float,
    alpha: float,
    n_partials: int,
    duration: float,
    sample_rate: int,
    fade: float = DEFAULT_FADE,
) -> Signal:
    """Harmonic series at f0 whose odd-numbered partials are scaled by alpha.

    alpha=1 gives the full series; alpha=0 keeps only the even-numbered
    partials, which form the complete harmonic series of 2*f0 (the perceived
    pitch rises by an octave as alpha goes from 1 to 0).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if n_partials < 1:
        raise ValueError(f"n_partials must be >= 1, got {n_partials}")
    amps = tuple(alpha if (p + 1) % 2 == 1 else 1.0 for p in range(n_partials))
    spec = HarmonicSpec(f0=f0, partial_amplitudes=amps, duration=duration, fade=fade)
    return harmonic_tone(spec, sample_rate)


def octave_glissando(
    f_start: float,
    octaves: float,
    duration: float,
    sample_rate: int,
    fade: float = DEFAULT_FADE,
) -> Signal:
    """Exponential chirp sweeping ``octaves`` octaves over ``duration`` seconds.

    Instantaneous frequency is f_start * 2^(octaves * t / duration); the phase
    is the exact closed-form integral of that frequency, so there is no
    cumulative drift. octaves=0 degenerates to a constant-frequency sine.
    """
    if f_start <= 0:
        raise ValueError(f"f_start must be positive, got {f_start}")
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    nyquist = sample_rate / 2
    f_end = f_start * 2.0**octaves
    if max(f_start, f_end) >= nyquist:
        raise ValueError(
            f"glissando reaches {max(f_start, f_end):g} Hz, at or above "
            f"Nyquist ({nyquist:g} Hz)"
        )
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    if octaves == 0:
        phase = 2 * np.pi * f_start * t
    else:
        rate = octaves * np.log(2.0) / duration
        phase = 2 * np.pi * f_start * (np.exp2(octaves * t / duration) - 1.0) / rate
    x = _normalize_and_fade(np.sin(phase), sample_rate, fade)
    return Signal(x, sample_rate)


def synth_corpus(
    n_notes: int,
    f0_range: tuple,
    partial_decay_range: tuple,
    seed: int,
    duration: float = 1.0,
    sample_rate: int = 22050,
    max_partials: int = 16,
    fade: float = DEFAULT_FADE,
) -> list:
    """Randomized corpus of harmonic notes; a surrogate for an isolated-note dataset.

    Fundamentals are sampled log-uniformly over ``f0_range`` so every pitch
    class is equally likely; partial amplitudes follow a_p = r**p with the
    decay r drawn uniformly from ``partial_decay_range``. Deterministic for a
    fixed seed. Returns a list of (Signal, metadata) pairs where metadata
    records the per-note f0 and decay.
    """
    if n_notes < 1:
        raise ValueError(f"n_notes must be >= 1, got {n_notes}")
    lo, hi = (float(f0_range[0]), float(f0_range[1]))
    if lo > hi:
        raise ValueError(f"empty f0 range: [{lo}, {hi}]")
    nyquist = sample_rate / 2
    if lo <= 20.0 or hi >= nyquist / 8:
        raise ValueError(
            f"f0 range [{lo}, {hi}] must lie within (20, {nyquist / 8:g}) Hz"
        )
    dlo, dhi = (float(partial_decay_range[0]), float(partial_decay_range[1]))
    if dlo > dhi:
        raise ValueError(f"empty decay range: [{dlo}, {dhi}]")
    if dlo < 0 or dhi > 1:
        raise ValueError(f"decay range [{dlo}, {dhi}] must lie within [0, 1]")

    rng = np.random.default_rng(seed)
    f0s = np.exp2(rng.uniform(np.log2(lo), np.log2(hi), size=n_notes))
    decays = rng.uniform(dlo, dhi, size=n_notes)

    corpus = []
    for i in range(n_notes):
        f0 = float(f0s[i])
        r = float(decays[i])
        n_p = max(1, min(max_partials, int(np.ceil(nyquist / f0)) - 1))
        amps = r ** np.arange(n_p)  # 0**0 == 1, so r=0 yields a pure tone
        spec = HarmonicSpec(
            f0=f0, partial_amplitudes=tuple(amps), duration=duration, fade=fade
        )
        meta = {"index": i, "f0": f0, "decay": r}
        corpus.append((harmonic_tone(spec, sample_rate), meta))
    return corpus
