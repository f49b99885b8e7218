"""Command-line entry points for the scenario extraction pipeline.

Each stage subcommand runs the pipeline up to that stage (reusing cached
artifacts), so `scenex filter --out runs/a` followed by `scenex run
--out runs/a` recomputes only the stages after the filter.

Exit codes: 0 success, 1 stage failure (the failing stage is named on
stderr), 2 usage error, 3 no relevant scenarios found by the filter.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from scenex import __version__, pipeline, server, synth
from scenex.pipeline import PipelineConfig, StageError

EXIT_OK = 0
EXIT_STAGE_FAILED = 1
EXIT_NO_SCENARIOS = 3


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="pipeline configuration JSON file")
    p.add_argument("--out", required=True, help="artifact output directory")
    p.add_argument("--seed", type=int, default=None, help="override the configured seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scenex",
        description="Unsupervised extraction and clustering of urban traffic scenarios.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic recording with ground truth")
    _add_common(p)
    p.add_argument(
        "--template",
        action="append",
        metavar="NAME=COUNT",
        help=f"instance counts (repeatable); templates: {', '.join(synth.TEMPLATE_NAMES)}",
    )
    p.add_argument("--frame-rate", type=float, default=None, help="frames per second")

    p = sub.add_parser("ingest", help="validate and canonicalize a recorded dataset")
    p.add_argument("--tracks", required=True, help="tracks CSV path")
    p.add_argument("--tracks-meta", required=True, help="track metadata CSV path")
    p.add_argument("--recording-meta", required=True, help="recording metadata CSV path")
    p.add_argument("--labels", default=None, help="optional label set JSON")
    p.add_argument("--out", required=True, help="artifact output directory")

    for name, help_text in (
        ("filter", "run through the proximity filter stage"),
        ("pfa", "run through the feature analysis stage"),
        ("grids", "run through the scenario grid stage"),
        ("cluster", "run through the clustering stage"),
        ("validate", "run the full pipeline including validation"),
        ("run", "run the full pipeline"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "grids":
            p.add_argument("--png", action="store_true", help="also export channel PNGs")

    p = sub.add_parser("serve", help="serve pipeline artifacts over HTTP")
    p.add_argument("--out", required=True, help="artifact directory to serve")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--ui", default=None, help="static UI bundle directory")
    return parser


def _parse_templates(entries) -> tuple[tuple[str, int], ...]:
    counts: dict[str, int] = {}
    for entry in entries:
        name, sep, count = entry.partition("=")
        if not sep:
            raise ValueError(f"expected NAME=COUNT, got {entry!r}")
        if name not in synth.TEMPLATES:
            raise ValueError(f"unknown template {name!r}")
        counts[name] = counts.get(name, 0) + int(count)
    return tuple(sorted(counts.items()))


def _config_for(args) -> PipelineConfig:
    cfg = pipeline.load_config(args.config) if args.config else PipelineConfig()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _run_to(args, stop_after: str | None) -> int:
    cfg = _config_for(args)
    result = pipeline.run(cfg, args.out, stop_after=stop_after)
    if result.status == "no_relevant_scenarios":
        print("no relevant scenarios: the filter accepted no road-user pairs")
        return EXIT_NO_SCENARIOS
    ran = [n for n, s in result.manifest["stages"].items() if not s["cached"]]
    skipped = [n for n, s in result.manifest["stages"].items() if s["cached"]]
    print(f"status {result.status}: ran {ran or 'nothing'}, cached {skipped or 'nothing'}")
    print(f"artifacts under {result.out_dir}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    cfg = _config_for(args)
    if cfg.synth_templates is None:
        print("synth: the configuration selects recorded input, not synthesis", file=sys.stderr)
        return EXIT_STAGE_FAILED
    if args.template:
        cfg = replace(cfg, synth_templates=_parse_templates(args.template))
    if args.frame_rate is not None:
        cfg = replace(cfg, synth_frame_rate=args.frame_rate)
    pipeline.run(cfg, args.out, stop_after="input")
    print(f"synthetic recording written under {Path(args.out) / 'input'}")
    return EXIT_OK


def _cmd_ingest(args) -> int:
    cfg = PipelineConfig(
        synth_templates=None,
        tracks_path=args.tracks,
        tracks_meta_path=args.tracks_meta,
        recording_meta_path=args.recording_meta,
        labels_path=args.labels,
    )
    pipeline.run(cfg, args.out, stop_after="input")
    print(f"canonical recording written under {Path(args.out) / 'input'}")
    return EXIT_OK


def _cmd_grids(args) -> int:
    code = _run_to(args, "grids")
    if code == EXIT_OK and args.png:
        from scenex import grids as grids_mod

        out = Path(args.out)
        png_dir = out / "grids_png"
        count = 0
        for path in sorted((out / "grids").glob("*.json")):
            tensor = grids_mod.tensor_from_dict(pipeline._load_json(path))
            grids_mod.export_tensor_png(tensor, png_dir)
            count += 1
        print(f"wrote channel PNGs for {count} scenarios to {png_dir}")
    return code


def _cmd_serve(args) -> int:
    server.serve(args.out, host=args.host, port=args.port, ui_dir=args.ui)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "grids":
            return _cmd_grids(args)
        stop = {"filter": "filter", "pfa": "pfa", "cluster": "cluster"}.get(args.command)
        return _run_to(args, stop)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE_FAILED
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE_FAILED


if __name__ == "__main__":
    sys.exit(main())
