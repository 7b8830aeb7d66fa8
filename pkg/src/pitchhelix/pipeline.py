"""End-to-end orchestration: corpus -> scalogram -> correlations -> graph ->
geodesics -> embedding -> helicity report, with every stage materialized as a
CSV/JSON artifact so stages can be rerun and inspected independently.

All artifact writers format floats with ``repr``, which round-trips float64
exactly and makes repeated runs byte-identical.
"""

from __future__ import annotations

import colorsys
import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .correlation import center_features, pearson_squared, rho_to_distance
from .corpus_io import CorpusManifest, load_corpus
from .cqt import DEFAULT_F_MIN, Filterbank, FilterbankParams, build_filterbank, scalogram_row
from .graph import (
    DisconnectedGraphError,
    InsufficientNeighborsError,
    NeighborGraph,
    connected_components,
    geodesics,
    knn_graph,
)
from .loudness import LOGARITHMIC, LoudnessMode, loudness_map
from .mds import Embedding, embed
from .metrics import helicity_report, select_axes
from .synth import synth_corpus

__all__ = [
    "SyntheticCorpusSpec",
    "PipelineConfig",
    "extract_scalogram",
    "analyze_corpus",
    "run_pipeline",
    "export_plot",
    "format_variance_line",
    "read_embedding_csv",
    "read_matrix_csv",
]

PLOT_FORMATS = ("ply", "svg")


@dataclass(frozen=True)
class SyntheticCorpusSpec:
    """Recipe for an in-memory randomized corpus of harmonic notes."""

    n_notes: int = 1200
    f0_range: tuple = (65.4, 523.2)
    partial_decay_range: tuple = (0.5, 0.9)
    duration: float = 1.0
    sample_rate: int = 22050
    max_partials: int = 16


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of the pipeline; defaults follow the main protocol
    (Q=24, J=3, K=3, logarithmic loudness, 3-D embedding)."""

    q: int = 24
    octaves: int = 3
    f_min: float = DEFAULT_F_MIN
    loudness: LoudnessMode = LOGARITHMIC
    knn: int = 3
    dims: int = 3
    seed: int = 42
    out_dir: Path = Path("pitchhelix_out")
    plot_formats: tuple = ()
    largest_component: bool = False

    def __post_init__(self):
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        for fmt in self.plot_formats:
            if fmt not in PLOT_FORMATS:
                raise ValueError(f"unsupported plot format {fmt!r}; use {PLOT_FORMATS}")


def _materialize_corpus(config: PipelineConfig, source) -> list:
    if isinstance(source, SyntheticCorpusSpec):
        return synth_corpus(
            source.n_notes,
            source.f0_range,
            source.partial_decay_range,
            seed=config.seed,
            duration=source.duration,
            sample_rate=source.sample_rate,
            max_partials=source.max_partials,
        )
    if isinstance(source, CorpusManifest):
        return load_corpus(source)
    return list(source)  # already a list of (Signal, metadata)


def extract_scalogram(corpus, q: int, octaves: int, f_min: float):
    """Scalogram matrix (one row per note) plus the per-row metadata.

    Filterbanks are built per sample rate and cached, so mixed-rate corpora
    still land on the same Q*J bin grid.
    """
    banks: dict[int, Filterbank] = {}
    rows, metas = [], []
    for signal, meta in corpus:
        fs = signal.sample_rate
        if fs not in banks:
            banks[fs] = build_filterbank(
                FilterbankParams(q=q, octaves=octaves, f_min=f_min, sample_rate=fs)
            )
        rows.append(scalogram_row(signal, banks[fs]))
        metas.append(meta)
    return np.array(rows), metas


def _finite_distance_components(d: np.ndarray) -> list:
    n = d.shape[0]
    edges = [
        (u, v, 1.0)
        for u in range(n)
        for v in range(u + 1, n)
        if np.isfinite(d[u, v])
    ]
    return connected_components(NeighborGraph(n, edges)) if n > 1 else [[0]]


def _induced_subgraph(g: NeighborGraph, vertices) -> NeighborGraph:
    position = {u: i for i, u in enumerate(vertices)}
    edges = [
        (position[u], position[v], w)
        for u, v, w in g.edges
        if u in position and v in position
    ]
    return NeighborGraph(len(vertices), edges)


def analyze_corpus(config: PipelineConfig, source) -> dict:
    """Corpus -> geodesic matrix, writing the analysis-stage artifacts.

    ``source`` is a :class:`CorpusManifest`, a :class:`SyntheticCorpusSpec`,
    or an explicit list of (Signal, metadata) pairs. Raises
    :class:`DisconnectedGraphError` (with the component partition attached)
    when the K-NN graph is disconnected, unless ``largest_component`` is set,
    in which case the analysis is restricted to the largest component and the
    report is stamped accordingly.
    """
    corpus = _materialize_corpus(config, source)
    scalogram, metas = extract_scalogram(corpus, config.q, config.octaves, config.f_min)
    loud = loudness_map(scalogram, config.loudness)
    centered = center_features(loud)
    rho2, degenerate = pearson_squared(centered)
    distances = rho_to_distance(rho2)

    try:
        g = knn_graph(distances, config.knn)
    except InsufficientNeighborsError as e:
        raise DisconnectedGraphError(_finite_distance_components(distances)) from e

    components = connected_components(g)
    used_bins = list(range(g.n_vertices))
    restricted = False
    if len(components) > 1:
        if not config.largest_component:
            raise DisconnectedGraphError(components)
        used_bins = max(components, key=len)
        g = _induced_subgraph(g, used_bins)
        restricted = True

    geo = geodesics(g)

    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "scalogram": out / "scalogram.csv",
        "rho2": out / "rho2.csv",
        "knn_edges": out / "knn_edges.csv",
        "geodesics": out / "geodesics.csv",
    }
    write_scalogram_csv(paths["scalogram"], scalogram, metas)
    write_matrix_csv(paths["rho2"], rho2)
    write_edges_csv(paths["knn_edges"], g, used_bins)
    write_matrix_csv(paths["geodesics"], geo, labels=used_bins)
    return {
        "scalogram": scalogram,
        "metadata": metas,
        "rho2": rho2,
        "degenerate": degenerate,
        "distances": distances,
        "graph": g,
        "components": components,
        "geodesics": geo,
        "used_bins": used_bins,
        "restricted": restricted,
        "paths": paths,
    }


def run_pipeline(config: PipelineConfig, source) -> dict:
    """Run the whole pipeline and write every artifact into config.out_dir.

    Prints the explained-variance line ("e1 A% e2 B% e3 C%") and returns the
    in-memory results of every stage.
    """
    state = analyze_corpus(config, source)
    used_bins = state["used_bins"]
    embedding = embed(state["geodesics"], config.dims)
    report = helicity_report(embedding, config.q, bin_indices=used_bins)

    out = config.out_dir
    paths = state["paths"]
    paths["embedding"] = out / "embedding.csv"
    paths["helicity"] = out / "helicity.json"
    write_embedding_csv(
        paths["embedding"], embedding, config.q, used_bins, state["restricted"]
    )
    stamp = {
        "largest_component_only": state["restricted"],
        "component_sizes": [len(c) for c in state["components"]],
        "degenerate_bins": [int(u) for u in np.flatnonzero(state["degenerate"])],
        "config": {
            "q": config.q,
            "octaves": config.octaves,
            "f_min": config.f_min,
            "loudness": config.loudness.kind,
            "clip_floor": config.loudness.clip_floor,
            "knn": config.knn,
            "dims": config.dims,
            "seed": config.seed,
        },
    }
    write_helicity_json(paths["helicity"], report, stamp)
    for fmt in config.plot_formats:
        plot_path = out / f"plot.{fmt}"
        export_plot(embedding, config.q, fmt, plot_path, bin_indices=used_bins)
        paths[f"plot_{fmt}"] = plot_path

    print(format_variance_line(embedding.explained_variance))
    state.update({"embedding": embedding, "report": report})
    return state


# ---------------------------------------------------------------------------
# formatting helpers


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def variance_percentages(ratios) -> list:
    """Ratios as percentages floored to 0.1, so the printed sum never
    exceeds 100."""
    return [math.floor(float(r) * 1000.0) / 10.0 for r in ratios]


def format_variance_line(ratios) -> str:
    parts = [
        f"e{m + 1} {pct:.1f}%"
        for m, pct in enumerate(variance_percentages(ratios))
    ]
    return " ".join(parts)


# ---------------------------------------------------------------------------
# artifact writers / readers


def write_matrix_csv(path, matrix, labels=None):
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    labels = list(range(n)) if labels is None else list(labels)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["bin"] + [str(label) for label in labels])
        for label, row in zip(labels, matrix):
            writer.writerow([str(label)] + [repr(float(v)) for v in row])


def read_matrix_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    labels = [int(c) for c in rows[0][1:]]
    matrix = np.array([[float(c) for c in row[1:]] for row in rows[1:]])
    return labels, matrix


def write_scalogram_csv(path, scalogram, metas):
    scalogram = np.asarray(scalogram)
    meta_keys = list(metas[0].keys()) if metas else []
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(meta_keys + [f"bin{u}" for u in range(scalogram.shape[1])])
        for meta, row in zip(metas, scalogram):
            writer.writerow(
                [_fmt(meta[k]) for k in meta_keys] + [repr(float(v)) for v in row]
            )


def write_edges_csv(path, g: NeighborGraph, bin_labels=None):
    labels = list(range(g.n_vertices)) if bin_labels is None else list(bin_labels)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["u", "v", "weight"])
        for u, v, w in g.edges:
            writer.writerow([str(labels[u]), str(labels[v]), repr(float(w))])


def write_embedding_csv(path, embedding: Embedding, q: int, bin_labels, restricted: bool):
    coords = embedding.coordinates
    dims = coords.shape[1]
    lines = [
        "# pitchhelix embedding",
        f"# q: {q}",
        "# eigenvalues: " + ",".join(repr(float(v)) for v in embedding.eigenvalues),
        "# explained_variance: "
        + ",".join(repr(float(v)) for v in embedding.explained_variance),
        f"# variance_line: {format_variance_line(embedding.explained_variance)}",
        f"# largest_component_only: {str(restricted).lower()}",
    ]
    header = ["bin", "chroma_class"] + [f"e{m + 1}" for m in range(dims)]
    body = [",".join(header)]
    for label, row in zip(bin_labels, coords):
        cells = [str(label), str(label % q)] + [repr(float(v)) for v in row]
        body.append(",".join(cells))
    Path(path).write_text("\n".join(lines + body) + "\n")


def read_embedding_csv(path) -> dict:
    meta = {}
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            if ":" in line:
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            continue
        if line:
            rows.append(line.split(","))
    bins = [int(r[0]) for r in rows[1:]]
    coords = np.array([[float(c) for c in r[2:]] for r in rows[1:]])
    eigenvalues = np.array([float(v) for v in meta["eigenvalues"].split(",")])
    explained = np.array([float(v) for v in meta["explained_variance"].split(",")])
    return {
        "bins": bins,
        "embedding": Embedding(coords, eigenvalues, explained),
        "q": int(meta["q"]),
        "largest_component_only": meta["largest_component_only"] == "true",
        "variance_line": meta["variance_line"],
    }


def write_helicity_json(path, report, stamp: dict):
    payload = dict(report.to_dict())
    payload.update(stamp)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# plots


def _hue_rgb(u: int, q: int) -> tuple:
    r, g, b = colorsys.hsv_to_rgb((u % q) / q, 1.0, 1.0)
    return round(255 * r), round(255 * g), round(255 * b)


def export_plot(embedding, q: int, fmt: str, path, bin_indices=None):
    """Write a static plot file of a 3-D embedding.

    ply: colored point cloud (hue encodes chroma class) with the polyline
    from each bin to the next as edge elements. svg: orthographic projection
    onto the chroma plane with the same coloring and a grey polyline.
    """
    coords = np.asarray(getattr(embedding, "coordinates", embedding), dtype=float)
    if coords.shape[1] < 3:
        raise ValueError("plots need a 3-D embedding")
    n = coords.shape[0]
    bins = list(range(n)) if bin_indices is None else list(bin_indices)
    if fmt == "ply":
        _write_ply(path, coords, bins, q)
    elif fmt == "svg":
        _write_svg(path, coords, bins, q)
    else:
        raise ValueError(f"unsupported plot format {fmt!r}; use one of {PLOT_FORMATS}")
    return Path(path)


def _write_ply(path, coords, bins, q):
    n = len(bins)
    lines = [
        "ply",
        "format ascii 1.0",
        "comment pitchhelix embedding; hue encodes chroma class",
        f"element vertex {n}",
        "property float x",
        "property float y",
        "property float z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        f"element edge {max(n - 1, 0)}",
        "property int vertex1",
        "property int vertex2",
        "end_header",
    ]
    for u, row in zip(bins, coords):
        r, g, b = _hue_rgb(u, q)
        xyz = " ".join(f"{v:.9g}" for v in row[:3])
        lines.append(f"{xyz} {r} {g} {b}")
    for i in range(n - 1):
        lines.append(f"{i} {i + 1}")
    Path(path).write_text("\n".join(lines) + "\n")


def _write_svg(path, coords, bins, q, size: int = 640, margin: int = 40):
    _, plane = select_axes(coords)
    x = coords[:, plane[0]]
    y = coords[:, plane[1]]
    span = max(np.ptp(x), np.ptp(y), 1e-12)
    scale = (size - 2 * margin) / span
    cx = margin + (x - x.min()) * scale
    cy = size - margin - (y - y.min()) * scale  # SVG y grows downward
    points = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(cx, cy))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'  <polyline fill="none" stroke="#888888" stroke-width="1.5" '
        f'points="{points}"/>',
    ]
    for u, a, b in zip(bins, cx, cy):
        r, g, bl = _hue_rgb(u, q)
        lines.append(
            f'  <circle cx="{a:.3f}" cy="{b:.3f}" r="6" '
            f'fill="#{r:02x}{g:02x}{bl:02x}"/>'
        )
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n")
