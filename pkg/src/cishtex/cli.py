"""Command-line entry point: one subcommand per pipeline stage."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import RunConfig, apply_overrides, load_config
from .errors import PipelineError
from .pipeline import (StageResult, run_aggregate, run_cluster, run_extract,
                       run_pipeline, run_reduce, run_render, run_sample,
                       run_sweep)

_STAGES = {
    "extract": run_extract,
    "reduce": run_reduce,
    "cluster": run_cluster,
    "sweep": run_sweep,
    "render": run_render,
    "sample": run_sample,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--seed", type=int, help="global 64-bit seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--image", help="input RGB raster (PNG or TIFF)")
    parser.add_argument("--mask", help="binary tissue mask PNG")
    parser.add_argument("--pixel-size-um", type=float, dest="pixel_size_um")
    parser.add_argument("--tile-um", type=float, dest="tile_um",
                        help="tile diameter in micrometers")
    parser.add_argument("--step-um", type=float, dest="step_um",
                        help="tile lattice step in micrometers")
    parser.add_argument("--bins", type=int, help="gray levels for the GLCM")
    parser.add_argument("--distance", type=int, help="co-occurrence distance in px")
    parser.add_argument("--method", choices=("svd", "pca"),
                        help="dimensionality-reduction method")
    parser.add_argument("--clusters", type=int, help="fuzzy c-means cluster count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cishtex",
        description="Texture-based tile classification of CISH slide images",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("extract", "tile the image and write features.csv"),
        ("reduce", "reduce features.csv to 2-D scores"),
        ("cluster", "fuzzy c-means on reduced.csv"),
        ("sweep", "FPC validity sweep over a cluster-count range"),
        ("render", "paint the class color map"),
        ("sample", "sample blinded tiles for expert grading"),
        ("pipeline", "run extract through sample and write the run manifest"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)

    agg = sub.add_parser("aggregate", help="aggregate annotation CSVs into report.json")
    agg.add_argument("--annotations", type=Path, nargs="+", required=True,
                     help="one or more annotations.csv files")
    agg.add_argument("--manifest", type=Path,
                     help="sampling manifest.json (enables confusion matrices)")
    agg.add_argument("--out", required=True, help="output directory")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return apply_overrides(
        cfg,
        image=args.image,
        mask=args.mask,
        pixel_size_um=args.pixel_size_um,
        tile_diameter_um=args.tile_um,
        tile_step_um=args.step_um,
        bins=args.bins,
        distance=args.distance,
        method=args.method,
        clusters=args.clusters,
        seed=args.seed,
        out_dir=args.out,
    )


def _report(results: list[StageResult]) -> None:
    for res in results:
        for note in res.warnings:
            print(f"[{res.stage}] warning: {note}", file=sys.stderr)
        summary = ", ".join(f"{k}={v}" for k, v in res.counts.items())
        print(f"[{res.stage}] done ({summary})")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "aggregate":
            res = run_aggregate(args.out, list(args.annotations), args.manifest)
            _report([res])
        elif args.command == "pipeline":
            cfg = _config_from_args(args)
            cfg.validate()
            _report(run_pipeline(cfg))
        else:
            cfg = _config_from_args(args)
            cfg.validate(require_image=args.command in ("extract", "render", "sample"))
            _report([_STAGES[args.command](cfg)])
    except PipelineError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
