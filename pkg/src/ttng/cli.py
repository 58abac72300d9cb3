"""Command-line entry point.

Subcommand groups: motif (enumerate/classify/glyphs), graph (validate/render),
dataset (craft/align/write/generate/build-study), metrics (report), study
(serve/analyze). Every subcommand accepts --json for machine-readable output.
Exit codes: 0 success, 1 domain error, 2 usage error.

Settings precedence: flags > --config JSON file > TTNG_* environment
variables > built-in defaults. Provider tokens are only ever read from the
environment so argv and journals stay shareable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import metrics as metrics_mod
from . import motifs as motifs_mod
from .errors import TtngError
from .model import graph_from_json, load_graph, validate
from .pipeline import (
    GenerationConfig,
    align_theme_entity,
    alignment_from_json,
    alignment_to_json,
    build_study_dataset,
    context_from_json,
    context_to_json,
    craft_context,
    generate_chapter,
    load_dataset,
    save_dataset,
    story_to_json,
    verify_chapter,
    Story,
)
from .providers import (
    HttpCompletionProvider,
    JournalingCompletionProvider,
    MockCompletionProvider,
    ProviderConfig,
    RequestJournal,
)
from .render import RenderOptions, node_positions, render_motif_glyph, render_ttng_svg
from .study import Study, accuracy_stats, confusion_matrix, load_journal


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text())


def _setting(flag_value, config: dict, key: str, env: str, default):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    if env in os.environ:
        return os.environ[env]
    return default


def _build_provider(args, config: dict):
    kind = _setting(getattr(args, "provider", None), config, "provider", "TTNG_PROVIDER", "mock")
    word_target = int(_setting(None, config, "word_target", "TTNG_WORD_TARGET", 100))
    if kind == "mock":
        provider = MockCompletionProvider(word_target=word_target)
    elif kind == "remote":
        endpoint = _setting(getattr(args, "endpoint", None), config, "endpoint", "TTNG_ENDPOINT", None)
        model = _setting(getattr(args, "model", None), config, "model", "TTNG_MODEL", None)
        if not endpoint or not model:
            raise TtngError("remote provider needs --endpoint and --model (or config/env)")
        provider = HttpCompletionProvider(
            ProviderConfig(
                endpoint=endpoint,
                model=model,
                auth_env=_setting(None, config, "auth_env", "TTNG_AUTH_ENV", "TTNG_API_TOKEN"),
                timeout=float(_setting(None, config, "timeout", "TTNG_TIMEOUT", 30.0)),
                retries=int(_setting(None, config, "retries", "TTNG_RETRIES", 3)),
            )
        )
    else:
        raise TtngError(f"unknown provider {kind!r} (use mock or remote)")
    journal = getattr(args, "journal", None)
    if journal:
        provider = JournalingCompletionProvider(
            RequestJournal(journal), inner=provider, mode=args.journal_mode
        )
    return provider


def _gen_config(args, config: dict) -> GenerationConfig:
    return GenerationConfig(
        seed=int(_setting(getattr(args, "seed", None), config, "seed", "TTNG_SEED", 0)),
        topic=_setting(getattr(args, "topic", None), config, "topic", "TTNG_TOPIC", "city affairs"),
        structure=_setting(getattr(args, "structure", None), config, "structure", "TTNG_STRUCTURE", "Arch"),
        word_target=int(_setting(None, config, "word_target", "TTNG_WORD_TARGET", 100)),
        max_retries=int(_setting(None, config, "max_retries", "TTNG_MAX_RETRIES", 3)),
        reading_level=_setting(None, config, "reading_level", "TTNG_READING_LEVEL", "CEFR Level A1"),
    )


def _emit(args, data: dict, human_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        for line in human_lines:
            print(line)


def _write_or_print(args, text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    elif not args.json:
        print(text, end="" if text.endswith("\n") else "\n")


# --- motif commands -------------------------------------------------------------


def cmd_motif_enumerate(args, config):
    classes = motifs_mod.enumerate_classes(args.rows, args.cols, args.nodes)
    data = {
        "rows": args.rows,
        "cols": args.cols,
        "nodes": args.nodes,
        "classes": [
            {
                "name": c.name.value if c.name else None,
                "category": c.name.category if c.name else None,
                "cells": [list(rc) for rc in c.canonical.coords()],
                "members": c.members,
            }
            for c in classes
        ],
    }
    lines = [f"{len(classes)} classes on a {args.rows}x{args.cols} grid with {args.nodes} nodes:"]
    for c in data["classes"]:
        label = c["name"] or "(unnamed)"
        lines.append(f"  {label:<12} members={c['members']:<3} cells={c['cells']}")
    _emit(args, data, lines)
    return 0


def _matrix_from_file(path: str) -> motifs_mod.OccupancyMatrix:
    data = json.loads(Path(path).read_text())
    if "matrix" in data:
        return motifs_mod.OccupancyMatrix(tuple(tuple(row) for row in data["matrix"]))
    coords = [tuple(rc) for rc in data["cells"]]
    return motifs_mod.OccupancyMatrix.from_coords(
        coords, rows=data.get("rows"), cols=data.get("cols")
    )


def cmd_motif_classify(args, config):
    matrix = _matrix_from_file(args.file)
    name = motifs_mod.classify(matrix)
    _emit(args, {"name": name.value, "category": name.category},
          [f"{name.value} ({name.category})"])
    return 0


def cmd_motif_glyphs(args, config):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in motifs_mod.MOTIF_NAMES:
        path = out_dir / f"{name.value}.svg"
        path.write_text(render_motif_glyph(name))
        written.append(str(path))
    catalog_path = out_dir / "catalog.json"
    catalog_path.write_text(json.dumps(motifs_mod.catalog(), indent=2) + "\n")
    _emit(
        args,
        {"glyphs": written, "catalog": str(catalog_path)},
        [f"wrote {len(written)} glyphs and catalog.json to {out_dir}"],
    )
    return 0


# --- graph commands ---------------------------------------------------------------


def cmd_graph_validate(args, config):
    graph = load_graph(args.file)
    report = validate(graph)
    data = {
        "valid": report.valid,
        "temporal_violations": [list(e) for e in report.temporal_violations],
        "exclusivity_violations": list(report.exclusivity_violations),
        "adjacency_cost": report.adjacency_cost,
    }
    _emit(args, data, [str(report)])
    return 0 if report.valid else 1


def cmd_graph_render(args, config):
    graph = load_graph(args.file)
    svg = render_ttng_svg(graph)
    Path(args.out).write_text(svg)
    lines = [f"wrote {args.out}"]
    data = {"out": args.out}
    if args.coords_out:
        coords = node_positions(graph)
        Path(args.coords_out).write_text(json.dumps(coords, indent=2) + "\n")
        lines.append(f"wrote {args.coords_out}")
        data["coords_out"] = args.coords_out
    _emit(args, data, lines)
    return 0


# --- dataset commands ----------------------------------------------------------------


def cmd_dataset_craft(args, config):
    cfg = _gen_config(args, config)
    provider = _build_provider(args, config)
    ctx = craft_context(cfg.topic, cfg.structure, provider, seed=cfg.seed, config=cfg)
    text = json.dumps(context_to_json(ctx), indent=2) + "\n"
    _write_or_print(args, text, args.out)
    _emit(args, context_to_json(ctx), [] if not args.out else [f"wrote {args.out}"])
    return 0


def cmd_dataset_align(args, config):
    cfg = _gen_config(args, config)
    ctx = context_from_json(json.loads(Path(args.context).read_text()))
    alignment = align_theme_entity(ctx, cfg.seed)
    data = alignment_to_json(alignment)
    text = json.dumps(data, indent=2) + "\n"
    _write_or_print(args, text, args.out)
    _emit(args, data, [] if not args.out else [f"wrote {args.out}"])
    return 0


def cmd_dataset_write(args, config):
    cfg = _gen_config(args, config)
    provider = _build_provider(args, config)
    ctx = context_from_json(json.loads(Path(args.context).read_text()))
    alignment = alignment_from_json(json.loads(Path(args.alignment).read_text()))
    chapters = []
    flags: list[str] = []
    cache: dict[str, str] = {}
    for node_id, details in alignment.items():
        prev = "\n\n".join(cache[p] for p in details.prev)
        chapter = generate_chapter(node_id, details, prev, provider, cfg)
        flags.extend(f"{node_id}: {v}" for v in verify_chapter(chapter, details, cfg))
        cache[node_id] = chapter.content
        chapters.append(chapter)
    story = Story(
        topic=cfg.topic, structure=ctx.name, seed=cfg.seed, chapters=tuple(chapters),
        context=ctx, alignment=alignment, flags=tuple(flags),
    )
    text = json.dumps(story_to_json(story), indent=2) + "\n"
    _write_or_print(args, text, args.out)
    _emit(args, story_to_json(story), [] if not args.out else [f"wrote {args.out}"])
    return 0


def cmd_dataset_generate(args, config):
    from .pipeline import generate_story

    cfg = _gen_config(args, config)
    provider = _build_provider(args, config)
    story = generate_story(cfg.topic, cfg.structure, cfg.seed, provider, cfg)
    text = json.dumps(story_to_json(story), indent=2) + "\n"
    _write_or_print(args, text, args.out)
    _emit(args, story_to_json(story), [] if not args.out else [f"wrote {args.out}"])
    return 0


def cmd_dataset_build_study(args, config):
    cfg = _gen_config(args, config)
    provider = _build_provider(args, config)
    dataset = build_study_dataset(cfg, provider, sets=args.sets)
    save_dataset(dataset, args.out_dir)
    data = {
        "out_dir": args.out_dir,
        "stories": len(dataset.stories),
        "announcements": dataset.announcement_count(),
        "sets": dataset.sets,
    }
    _emit(args, data, [
        f"wrote {data['stories']} stories ({data['announcements']} announcements) to {args.out_dir}"
    ])
    return 0


# --- metrics command --------------------------------------------------------------------


def cmd_metrics_report(args, config):
    dataset = load_dataset(args.dataset)
    report = metrics_mod.pairwise_report(dataset)
    if args.out:
        metrics_mod.save_report(report, args.out)
    if args.csv_out:
        Path(args.csv_out).write_text(metrics_mod.report_to_csv(report))
    data = metrics_mod.report_to_json(report)
    lines = []
    for row in data["summaries"]:
        lines.append(
            f"{row['metric']:<10} {row['label']:<16} median={row['median']:.4f} "
            f"q1={row['q1']:.4f} q3={row['q3']:.4f} n={row['count']}"
        )
    for metric, test in data["tests"].items():
        lines.append(f"{metric:<10} welch t={test['t']:.3f} df={test['df']:.1f} p={test['p']:.3g}")
    if args.out:
        lines.append(f"wrote {args.out}")
    _emit(args, data, lines)
    return 0


# --- study commands -------------------------------------------------------------------------


def cmd_study_serve(args, config):
    from .service import serve

    dataset = load_dataset(args.dataset)
    study = Study(dataset, journal_path=args.journal, training_count=args.training)
    ui_dir = args.ui_dir
    if ui_dir is None:
        candidate = Path("frontend") / "dist"
        ui_dir = candidate if candidate.is_dir() else None
    print(f"serving study on http://127.0.0.1:{args.port} (journal: {args.journal})")
    serve(study, port=args.port, ui_dir=ui_dir)
    return 0


def cmd_study_analyze(args, config):
    responses, tags, sessions = load_journal(args.journal)
    truth: dict[str, str] = {}
    if args.dataset:
        dataset = load_dataset(args.dataset)
        truth = {s.story_id: s.motif for s in dataset.stories}
    else:
        for line in Path(args.journal).read_text().splitlines():
            if line.strip():
                event = json.loads(line)
                if event.get("event") == "truth":
                    truth = event["labels"]
    if not truth:
        raise TtngError("no ground truth: pass --dataset or use a journal with a truth event")
    matrix = confusion_matrix(responses, truth)
    stats = accuracy_stats(responses, truth)
    data = {"confusion": matrix.to_json(), "accuracy": stats}
    lines = [matrix.to_csv().rstrip()]
    lines.append(
        f"participants={stats['participants']} responses={stats['responses']} "
        f"mean_correct={stats['mean_correct']:.2f} temporal_match={stats['temporal_match_rate']:.3f}"
    )
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "confusion.csv").write_text(matrix.to_csv())
        (out / "accuracy.json").write_text(json.dumps(stats, indent=2) + "\n")
        lines.append(f"wrote {out}/confusion.csv and {out}/accuracy.json")
    _emit(args, data, lines)
    return 0


# --- parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit machine-readable JSON to stdout")
    common.add_argument("--config", help="JSON config file (flags take precedence)")

    gen = argparse.ArgumentParser(add_help=False)
    gen.add_argument("--seed", type=int, help="deterministic seed")
    gen.add_argument("--topic", help="story topic")
    gen.add_argument("--provider", choices=("mock", "remote"), help="completion provider")
    gen.add_argument("--endpoint", help="remote completion endpoint URL")
    gen.add_argument("--model", help="remote model identifier")
    gen.add_argument("--journal", help="record/replay journal file")
    gen.add_argument("--journal-mode", choices=("record", "replay"), default="record")

    parser = argparse.ArgumentParser(prog="ttng", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    motif = sub.add_parser("motif", help="motif enumeration and classification")
    motif_sub = motif.add_subparsers(dest="subcommand", required=True)
    p = motif_sub.add_parser("enumerate", parents=[common])
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.set_defaults(func=cmd_motif_enumerate)
    p = motif_sub.add_parser("classify", parents=[common])
    p.add_argument("file", help='occupancy JSON: {"cells": [[r,c],...]} or {"matrix": [[...]]}')
    p.set_defaults(func=cmd_motif_classify)
    p = motif_sub.add_parser("glyphs", parents=[common])
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_motif_glyphs)

    graph = sub.add_parser("graph", help="graph validation and rendering")
    graph_sub = graph.add_subparsers(dest="subcommand", required=True)
    p = graph_sub.add_parser("validate", parents=[common])
    p.add_argument("file")
    p.set_defaults(func=cmd_graph_validate)
    p = graph_sub.add_parser("render", parents=[common])
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--coords-out", help="sidecar JSON of node coordinates")
    p.set_defaults(func=cmd_graph_render)

    dataset = sub.add_parser("dataset", help="graph-to-text generation")
    dataset_sub = dataset.add_subparsers(dest="subcommand", required=True)
    p = dataset_sub.add_parser("craft", parents=[common, gen])
    p.add_argument("--structure", help="motif or structure name")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dataset_craft)
    p = dataset_sub.add_parser("align", parents=[common, gen])
    p.add_argument("context", help="crafted context JSON file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dataset_align)
    p = dataset_sub.add_parser("write", parents=[common, gen])
    p.add_argument("context")
    p.add_argument("alignment")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dataset_write)
    p = dataset_sub.add_parser("generate", parents=[common, gen])
    p.add_argument("--structure", help="motif or structure name")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dataset_generate)
    p = dataset_sub.add_parser("build-study", parents=[common, gen])
    p.add_argument("--sets", type=int, default=3)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_dataset_build_study)

    metrics = sub.add_parser("metrics", help="dataset validation metrics")
    metrics_sub = metrics.add_subparsers(dest="subcommand", required=True)
    p = metrics_sub.add_parser("report", parents=[common])
    p.add_argument("dataset", help="dataset directory (manifest.json + stories/)")
    p.add_argument("--out", help="full report JSON (or .csv for the summary)")
    p.add_argument("--csv-out", help="summary CSV path")
    p.set_defaults(func=cmd_metrics_report)

    study = sub.add_parser("study", help="study service and analytics")
    study_sub = study.add_subparsers(dest="subcommand", required=True)
    p = study_sub.add_parser("serve", parents=[common])
    p.add_argument("--dataset", required=True)
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--journal", default="study-journal.jsonl")
    p.add_argument("--ui-dir", help="built study UI directory (default: frontend/dist if present)")
    p.add_argument("--training", type=int, default=2, help="training tasks per session")
    p.set_defaults(func=cmd_study_serve)
    p = study_sub.add_parser("analyze", parents=[common])
    p.add_argument("journal")
    p.add_argument("--dataset", help="dataset directory for ground truth")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_study_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except TtngError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
