"""Audio ingestion (RIFF/WAV), corpus manifests, and subset filtering.

Manifests are single JSON documents rather than directory-name conventions,
so corpora with different layouts can feed the same pipeline. Entry paths are
resolved relative to the manifest's directory.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .synth import Signal

log = logging.getLogger(__name__)

DYNAMICS_LEVELS = ("pp", "mf", "ff")

_PCM16_SCALE = 32767.0
_PCM24_SCALE = 8388607.0

__all__ = [
    "DYNAMICS_LEVELS",
    "ManifestEntry",
    "CorpusManifest",
    "read_wav",
    "write_wav",
    "load_manifest",
    "save_manifest",
    "load_corpus",
]


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    instrument: str
    dynamics: str
    technique: str
    f0_label: float | None = None

    def __post_init__(self):
        if self.dynamics not in DYNAMICS_LEVELS:
            raise ValueError(
                f"dynamics must be one of {DYNAMICS_LEVELS}, got {self.dynamics!r}"
            )


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple
    root: Path

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "root", Path(self.root))
        if not self.entries:
            raise ValueError("manifest has no entries")
        paths = [e.path for e in self.entries]
        if len(set(paths)) != len(paths):
            dupes = sorted({p for p in paths if paths.count(p) > 1})
            raise ValueError(f"duplicate paths in manifest: {dupes}")


def read_wav(path) -> Signal:
    """Read PCM 16/24-bit or 32-bit float WAV; stereo is downmixed by averaging.

    Samples come back as float64 normalized to [-1, 1].
    """
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise ValueError(f"{path}: truncated WAV header ({len(data)} bytes)")
    if data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ValueError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    frames = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id, chunk_size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise ValueError(f"{path}: truncated fmt chunk ({len(body)} bytes)")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise ValueError(
                    f"{path}: data chunk declares {chunk_size} bytes but only "
                    f"{len(body)} are present"
                )
            frames = body
        pos += 8 + chunk_size + (chunk_size & 1)
    if fmt is None:
        raise ValueError(f"{path}: missing fmt chunk")
    if frames is None:
        raise ValueError(f"{path}: missing data chunk")

    audio_format, channels, sample_rate, _byte_rate, block_align, bits = fmt
    supported = {(1, 16), (1, 24), (3, 32)}
    if (audio_format, bits) not in supported or channels not in (1, 2):
        raise ValueError(
            f"{path}: unsupported WAV encoding (fmt chunk: format={audio_format}, "
            f"channels={channels}, bits={bits}); expected PCM 16/24-bit or "
            "32-bit float, mono or stereo"
        )
    if block_align != channels * bits // 8:
        raise ValueError(
            f"{path}: inconsistent fmt chunk (block_align={block_align} for "
            f"{channels} channels at {bits} bits)"
        )
    n_frames = len(frames) // block_align
    frames = frames[: n_frames * block_align]

    if (audio_format, bits) == (1, 16):
        x = np.frombuffer(frames, dtype="<i2").astype(float) / _PCM16_SCALE
    elif (audio_format, bits) == (1, 24):
        raw = np.frombuffer(frames, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        value = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        value -= (value & 0x800000) << 1  # sign-extend 24 -> 32 bits
        x = value.astype(float) / _PCM24_SCALE
    else:
        x = np.frombuffer(frames, dtype="<f4").astype(float)

    x = x.reshape(n_frames, channels).mean(axis=1)
    return Signal(np.clip(x, -1.0, 1.0), sample_rate)


def write_wav(path, signal: Signal, encoding: str = "pcm16"):
    """Write a Signal as RIFF/WAV: pcm16, pcm24, or float32, mono."""
    x = np.clip(signal.samples, -1.0, 1.0)
    if encoding == "pcm16":
        fmt_code, bits = 1, 16
        payload = np.round(x * _PCM16_SCALE).astype("<i2").tobytes()
    elif encoding == "pcm24":
        fmt_code, bits = 1, 24
        as_int32 = np.round(x * _PCM24_SCALE).astype("<i4")
        payload = as_int32.view(np.uint8).reshape(-1, 4)[:, :3].tobytes()
    elif encoding == "float32":
        fmt_code, bits = 3, 32
        payload = x.astype("<f4").tobytes()
    else:
        raise ValueError(f"unsupported encoding {encoding!r}")
    block_align = bits // 8
    fmt_body = struct.pack(
        "<HHIIHH", fmt_code, 1, signal.sample_rate,
        signal.sample_rate * block_align, block_align, bits,
    )
    chunks = [(b"fmt ", fmt_body)]
    if fmt_code == 3:
        chunks.append((b"fact", struct.pack("<I", len(x))))
    chunks.append((b"data", payload))
    body = b""
    for chunk_id, chunk_body in chunks:
        body += struct.pack("<4sI", chunk_id, len(chunk_body)) + chunk_body
        if len(chunk_body) & 1:
            body += b"\x00"
    with open(path, "wb") as f:
        f.write(struct.pack("<4sI4s", b"RIFF", 4 + len(body), b"WAVE") + body)


def load_manifest(path) -> CorpusManifest:
    path = Path(path)
    document = json.loads(path.read_text())
    raw_entries = document.get("entries")
    if not isinstance(raw_entries, list) or not raw_entries:
        raise ValueError(f"{path}: manifest must contain a non-empty 'entries' list")
    entries = []
    for i, row in enumerate(raw_entries):
        try:
            entries.append(
                ManifestEntry(
                    path=row["path"],
                    instrument=row["instrument"],
                    dynamics=row["dynamics"],
                    technique=row["technique"],
                    f0_label=row.get("f0_label"),
                )
            )
        except KeyError as missing:
            raise ValueError(f"{path}: entry {i} is missing field {missing}") from None
    return CorpusManifest(entries=tuple(entries), root=path.parent)


def save_manifest(manifest: CorpusManifest, path):
    rows = []
    for e in manifest.entries:
        row = {
            "path": e.path,
            "instrument": e.instrument,
            "dynamics": e.dynamics,
            "technique": e.technique,
        }
        if e.f0_label is not None:
            row["f0_label"] = e.f0_label
        rows.append(row)
    Path(path).write_text(json.dumps({"entries": rows}, indent=2, sort_keys=True))


def _as_set(value):
    if value is None:
        return None
    if isinstance(value, str):
        return {value}
    return set(value)


def load_corpus(
    manifest: CorpusManifest,
    instruments=None,
    dynamics=None,
    technique=None,
) -> list:
    """Load (Signal, metadata) pairs in manifest order, filters conjunctive.

    Filter values may be single strings or iterables of allowed values.
    Raises when no entry survives the filters.
    """
    wanted_instruments = _as_set(instruments)
    wanted_dynamics = _as_set(dynamics)
    wanted_technique = _as_set(technique)
    selected = []
    for e in manifest.entries:
        if wanted_instruments is not None and e.instrument not in wanted_instruments:
            continue
        if wanted_dynamics is not None and e.dynamics not in wanted_dynamics:
            continue
        if wanted_technique is not None and e.technique not in wanted_technique:
            continue
        selected.append(e)
    if not selected:
        raise ValueError(
            f"no manifest entries match filters (instruments={instruments!r}, "
            f"dynamics={dynamics!r}, technique={technique!r})"
        )
    log.info("loading %d of %d manifest entries", len(selected), len(manifest.entries))
    corpus = []
    for e in selected:
        signal = read_wav(manifest.root / e.path)
        meta = {
            "path": e.path,
            "instrument": e.instrument,
            "dynamics": e.dynamics,
            "technique": e.technique,
        }
        if e.f0_label is not None:
            meta["f0_label"] = e.f0_label
        corpus.append((signal, meta))
    return corpus
