"""Command-line front end.

Subcommands mirror the pipeline stages; each reads its predecessor's
artifacts from --out, so partial reruns are possible:

  synth    write a randomized WAV corpus plus its manifest
  analyze  corpus -> scalogram.csv, rho2.csv, knn_edges.csv, geodesics.csv
  embed    geodesics.csv -> embedding.csv (prints the variance line)
  report   embedding.csv -> helicity.json
  plot     embedding.csv -> plot.ply / plot.svg
  all      the whole pipeline in one go

Exit codes: 0 success, 2 configuration error, 3 disconnected neighbor graph,
4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .corpus_io import (
    CorpusManifest,
    ManifestEntry,
    load_manifest,
    save_manifest,
    write_wav,
)
from .cqt import DEFAULT_F_MIN
from .graph import DisconnectedGraphError
from .loudness import LoudnessMode
from .mds import embed as mds_embed
from .metrics import helicity_report
from .pipeline import (
    PipelineConfig,
    SyntheticCorpusSpec,
    analyze_corpus,
    export_plot,
    format_variance_line,
    read_embedding_csv,
    read_matrix_csv,
    run_pipeline,
    write_embedding_csv,
    write_helicity_json,
)
from .synth import synth_corpus

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DISCONNECTED = 3
EXIT_IO = 4

_LOUDNESS_KINDS = {"log": "logarithmic", "linear": "linear", "cbrt": "cubic_root"}


def _add_cqt_args(p):
    p.add_argument("--q", type=int, default=24, help="bins per octave")
    p.add_argument("--octaves", type=int, default=3, help="number of octaves")
    p.add_argument("--fmin", type=float, default=DEFAULT_F_MIN,
                   help="center frequency of the lowest bin (Hz)")


def _add_loudness_args(p):
    p.add_argument("--loudness", choices=sorted(_LOUDNESS_KINDS), default="log")
    p.add_argument("--clip-db", type=float, default=-100.0,
                   help="floor for the logarithmic mapping (dB)")


def _add_source_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest", type=Path, help="corpus manifest (JSON)")
    src.add_argument("--synth-notes", type=int,
                     help="size of an in-memory synthetic corpus")
    _add_synth_knobs(p)


def _add_synth_knobs(p):
    p.add_argument("--f0-min", type=float, default=65.4)
    p.add_argument("--f0-max", type=float, default=523.2)
    p.add_argument("--decay-min", type=float, default=0.5)
    p.add_argument("--decay-max", type=float, default=0.9)
    p.add_argument("--duration", type=float, default=1.0)
    p.add_argument("--sample-rate", type=int, default=22050)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pitchhelix",
        description="Discover the helical topology of pitch from audio.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic WAV corpus + manifest")
    p.add_argument("--synth-notes", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    _add_synth_knobs(p)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("analyze", help="corpus -> correlation/geodesic matrices")
    _add_source_args(p)
    _add_cqt_args(p)
    _add_loudness_args(p)
    p.add_argument("--knn", type=int, default=3)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--largest-component", action="store_true",
                   help="restrict analysis to the largest component instead "
                        "of failing on a disconnected graph")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("embed", help="geodesics.csv -> embedding.csv")
    p.add_argument("--q", type=int, default=24)
    p.add_argument("--dims", type=int, default=3)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("report", help="embedding.csv -> helicity.json")
    p.add_argument("--q", type=int, default=None,
                   help="bins per octave (default: the value stored in "
                        "embedding.csv)")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("plot", help="embedding.csv -> plot file")
    p.add_argument("--plot", choices=("ply", "svg"), default="ply")
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("all", help="run the whole pipeline")
    _add_source_args(p)
    _add_cqt_args(p)
    _add_loudness_args(p)
    p.add_argument("--knn", type=int, default=3)
    p.add_argument("--dims", type=int, default=3)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--plot", choices=("ply", "svg"), default=None)
    p.add_argument("--out", type=Path, required=True)

    return parser


def _config_from_args(args) -> PipelineConfig:
    plot = getattr(args, "plot", None)
    return PipelineConfig(
        q=args.q,
        octaves=args.octaves,
        f_min=args.fmin,
        loudness=LoudnessMode(_LOUDNESS_KINDS[args.loudness], clip_floor=args.clip_db),
        knn=args.knn,
        dims=getattr(args, "dims", 3),
        seed=args.seed,
        out_dir=args.out,
        plot_formats=(plot,) if plot else (),
        largest_component=args.largest_component,
    )


def _source_from_args(args):
    if args.manifest is not None:
        return load_manifest(args.manifest)
    return SyntheticCorpusSpec(
        n_notes=args.synth_notes,
        f0_range=(args.f0_min, args.f0_max),
        partial_decay_range=(args.decay_min, args.decay_max),
        duration=args.duration,
        sample_rate=args.sample_rate,
    )


def _cmd_synth(args) -> int:
    corpus = synth_corpus(
        args.synth_notes,
        (args.f0_min, args.f0_max),
        (args.decay_min, args.decay_max),
        seed=args.seed,
        duration=args.duration,
        sample_rate=args.sample_rate,
    )
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for signal, meta in corpus:
        name = f"note{meta['index']:05d}.wav"
        write_wav(out / name, signal)
        entries.append(
            ManifestEntry(
                path=name,
                instrument="synthetic",
                dynamics="mf",
                technique="ordinario",
                f0_label=meta["f0"],
            )
        )
    save_manifest(CorpusManifest(entries=tuple(entries), root=out), out / "manifest.json")
    print(f"wrote {len(entries)} notes and manifest.json to {out}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    state = analyze_corpus(_config_from_args(args), _source_from_args(args))
    print(f"analyzed {state['scalogram'].shape[0]} notes into {args.out}")
    return EXIT_OK


def _cmd_all(args) -> int:
    run_pipeline(_config_from_args(args), _source_from_args(args))
    return EXIT_OK


def _cmd_embed(args) -> int:
    labels, geo = read_matrix_csv(args.out / "geodesics.csv")
    embedding = mds_embed(geo, dims=args.dims)
    write_embedding_csv(
        args.out / "embedding.csv",
        embedding,
        args.q,
        labels,
        restricted=labels != list(range(len(labels))),
    )
    print(format_variance_line(embedding.explained_variance))
    return EXIT_OK


def _cmd_report(args) -> int:
    loaded = read_embedding_csv(args.out / "embedding.csv")
    q = args.q if args.q is not None else loaded["q"]
    report = helicity_report(loaded["embedding"], q, bin_indices=loaded["bins"])
    stamp = {"largest_component_only": loaded["largest_component_only"]}
    write_helicity_json(args.out / "helicity.json", report, stamp)
    print(
        f"chroma_alignment={report.chroma_alignment:.3f} "
        f"height_monotonicity={report.height_monotonicity:.3f}"
    )
    return EXIT_OK


def _cmd_plot(args) -> int:
    loaded = read_embedding_csv(args.out / "embedding.csv")
    q = args.q if args.q is not None else loaded["q"]
    path = args.out / f"plot.{args.plot}"
    export_plot(loaded["embedding"], q, args.plot, path, bin_indices=loaded["bins"])
    print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "analyze": _cmd_analyze,
    "embed": _cmd_embed,
    "report": _cmd_report,
    "plot": _cmd_plot,
    "all": _cmd_analyze,  # analyze already runs the full pipeline
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DisconnectedGraphError as e:
        print(f"error: {e}", file=sys.stderr)
        for i, component in enumerate(e.components):
            print(f"  component {i}: {component}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
