"""Command line front door for the whole workflow.

Subcommands: ingest, preprocess, corrupt, score, graph, pipeline and
print-config. Exit codes are stable: 0 on success, 1 for data errors, 2 for
configuration errors. All outputs are UTF-8 and byte-deterministic for
unchanged inputs; no command mutates its input files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import (
    DEFAULT_CONFIG_TEXT,
    ENV_CONFIG_VAR,
    ConfigError,
    ToolkitConfig,
    default_config,
    load_config,
)
from .corpus import (
    Corpus,
    CorpusError,
    dump_corpus,
    load_corpus,
    load_summary_file,
)
from .hypergraph import GraphError, build_graph, export_graph_record, export_html, slugify
from .noise import NoiseConfig, apply_window_denoise, serialize_pairs
from .preprocess import (
    TranslateError,
    build_qr_text,
    get_adapter,
    make_summary_pairs,
    preprocess_corpus,
)
from .report import (
    format_score_table,
    render_score_figure,
    score_report_record,
    write_score_report,
)
from .rouge import score_corpus

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_CONFIG_ERROR = 2


def _plural(word: str, count: int) -> str:
    return word if count == 1 else word + "s"


def _positive_int(value: str) -> int:
    parsed = int(value)
    if parsed < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return parsed


def _resolve_path(value: str | None, cfg: ToolkitConfig, key: str) -> Path:
    if value:
        return Path(value)
    fallback = cfg.paths.get(key)
    if fallback:
        return Path(fallback)
    flag = "--" + key.replace("_", "-")
    raise ConfigError(f"missing {flag} (and no paths.{key} in the config file)")


def _load_cfg(args: argparse.Namespace) -> ToolkitConfig:
    config_path = getattr(args, "config", None) or os.environ.get(ENV_CONFIG_VAR)
    if config_path:
        return load_config(config_path)
    return default_config()


def _noise_cfg(args: argparse.Namespace, cfg: ToolkitConfig) -> NoiseConfig:
    if getattr(args, "seed", None) is not None:
        return dataclasses.replace(cfg.noise, seed=args.seed)
    return cfg.noise


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


# ---------------------------------------------------------------------------
# Stages shared between single commands and the pipeline
# ---------------------------------------------------------------------------

def _stage_preprocess(corpus: Corpus, cfg: ToolkitConfig, out_dir: Path) -> tuple[Corpus, int]:
    processed = preprocess_corpus(corpus, cfg.clean, get_adapter(cfg.adapter), cfg.target_lang)
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_corpus(processed, out_dir / "corpus.jsonl")
    qr_dir = out_dir / "qr"
    qr_dir.mkdir(exist_ok=True)
    used: dict[str, str] = {}
    for dialogue in processed.dialogues:
        name = f"{slugify(dialogue.interview_id)}.txt"
        if name in used:
            raise CorpusError(
                f"interview ids {used[name]!r} and {dialogue.interview_id!r}"
                f" map to the same q/r file name {name!r}"
            )
        used[name] = dialogue.interview_id
        _write_text(qr_dir / name, build_qr_text(dialogue) + "\n")
    return processed, len(used)


def _corrupt_task(task: tuple) -> object:
    dialogue, noise_cfg, replica = task
    return apply_window_denoise(dialogue, noise_cfg, replica)


def _stage_corrupt(corpus: Corpus, noise_cfg: NoiseConfig, replicas: int,
                   jobs: int, output: Path) -> int:
    tasks = [
        (dialogue, noise_cfg, replica)
        for dialogue in corpus.dialogues
        for replica in range(replicas)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            pairs = list(executor.map(_corrupt_task, tasks))
    else:
        pairs = [_corrupt_task(task) for task in tasks]
    _write_text(output, serialize_pairs(pairs))
    return len(pairs)


def _stage_graph(corpus: Corpus, entries: list[tuple[str, str]], cfg: ToolkitConfig,
                 out_dir: Path):
    pairs = make_summary_pairs(corpus, entries)
    graph = build_graph(corpus, pairs, cfg.lexicon, cfg.segment_size)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_text(out_dir / "graph.jsonl", export_graph_record(graph))
    manifest = export_html(graph, out_dir / "site")
    return graph, manifest


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_ingest(args: argparse.Namespace, cfg: ToolkitConfig) -> int:
    corpus = load_corpus(_resolve_path(args.input, cfg, "input"))
    dump_corpus(corpus, _resolve_path(args.output, cfg, "output"))
    dialogues, turns = len(corpus.dialogues), corpus.n_turns()
    print(f"{dialogues} {_plural('dialogue', dialogues)}, {turns} {_plural('turn', turns)}")
    return EXIT_OK


def cmd_preprocess(args: argparse.Namespace, cfg: ToolkitConfig) -> int:
    corpus = load_corpus(_resolve_path(args.input, cfg, "input"))
    out_dir = _resolve_path(args.output, cfg, "output")
    processed, files = _stage_preprocess(corpus, cfg, out_dir)
    dialogues = len(processed.dialogues)
    print(
        f"{dialogues} {_plural('dialogue', dialogues)} preprocessed,"
        f" {files} q/r text {_plural('file', files)}"
    )
    return EXIT_OK


def cmd_corrupt(args: argparse.Namespace, cfg: ToolkitConfig) -> int:
    corpus = load_corpus(_resolve_path(args.input, cfg, "input"))
    output = _resolve_path(args.output, cfg, "output")
    count = _stage_corrupt(corpus, _noise_cfg(args, cfg), args.replicas, args.jobs, output)
    print(f"wrote {count} denoise {_plural('pair', count)} to {output}")
    return EXIT_OK


def cmd_score(args: argparse.Namespace, cfg: ToolkitConfig) -> int:
    candidate_entries = load_summary_file(_resolve_path(args.candidates, cfg, "candidates"))
    reference_entries = load_summary_file(_resolve_path(args.references, cfg, "references"))
    candidates = _unique_by_id(candidate_entries, "candidates")
    references = _unique_by_id(reference_entries, "references")

    unmatched = sorted(set(candidates) ^ set(references))
    if unmatched:
        print(f"unmatched dialogue_id(s): {', '.join(unmatched)}", file=sys.stderr)
        return EXIT_DATA_ERROR

    pairs = [(candidates[i], references[i]) for i in sorted(candidates)]
    scores = score_corpus(pairs, cfg.rouge_ns)
    print(format_score_table(scores, len(pairs)))
    output = args.output or cfg.paths.get("output")
    if output:
        report_path = Path(output)
        write_score_report(report_path, scores, len(pairs))
        figure_path = report_path.with_suffix(".png")
        render_score_figure(figure_path, scores)
        print(f"report: {report_path}")
        print(f"figure: {figure_path}")
    else:
        # no file destination: still emit the report record on stdout
        print(json.dumps(score_report_record(scores, len(pairs)), sort_keys=True))
    return EXIT_OK


def _unique_by_id(entries: list[tuple[str, str]], what: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for dialogue_id, summary in entries:
        if dialogue_id in out:
            raise CorpusError(f"duplicate dialogue_id '{dialogue_id}' in {what}")
        out[dialogue_id] = summary
    return out


def cmd_graph(args: argparse.Namespace, cfg: ToolkitConfig) -> int:
    corpus = load_corpus(_resolve_path(args.input, cfg, "input"))
    out_dir = _resolve_path(args.out_dir, cfg, "out_dir")
    entries: list[tuple[str, str]] = []
    summaries_path = args.summaries or cfg.paths.get("summaries")
    if summaries_path:
        entries = load_summary_file(Path(summaries_path))
    graph, manifest = _stage_graph(corpus, entries, cfg, out_dir)
    print(f"{len(graph.nodes)} nodes, {len(graph.edges)} edges")
    print(f"site: {out_dir / 'site'} ({len(manifest)} files)")
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace, cfg: ToolkitConfig) -> int:
    corpus = load_corpus(_resolve_path(args.input, cfg, "input"))
    out_dir = _resolve_path(args.out_dir, cfg, "out_dir")
    out_dir.mkdir(parents=True, exist_ok=True)

    dump_corpus(corpus, out_dir / "ingested.jsonl")
    dialogues, turns = len(corpus.dialogues), corpus.n_turns()
    print(f"ingest: {dialogues} {_plural('dialogue', dialogues)}, {turns} {_plural('turn', turns)}")

    processed, files = _stage_preprocess(corpus, cfg, out_dir / "preprocessed")
    print(f"preprocess: {files} q/r text {_plural('file', files)}")

    count = _stage_corrupt(
        processed, _noise_cfg(args, cfg), args.replicas, args.jobs,
        out_dir / "denoise_pairs.jsonl",
    )
    print(f"corrupt: {count} denoise {_plural('pair', count)}")

    entries: list[tuple[str, str]] = []
    summaries_path = args.summaries or cfg.paths.get("summaries")
    if summaries_path:
        entries = load_summary_file(Path(summaries_path))
    graph, _ = _stage_graph(processed, entries, cfg, out_dir / "graph")
    print(f"graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges")
    print(f"pipeline complete: {out_dir}")
    return EXIT_OK


def cmd_print_config(args: argparse.Namespace, cfg: ToolkitConfig) -> int:
    print(DEFAULT_CONFIG_TEXT, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_config_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config", "-c",
        help=f"config file (INI); falls back to ${ENV_CONFIG_VAR}, then defaults",
    )


def _add_noise_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--replicas", type=_positive_int, default=1,
                        help="denoise pairs per dialogue (default 1)")
    parser.add_argument("--jobs", type=_positive_int, default=1,
                        help="parallel workers (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypersumm",
        description="Interview-dialogue toolkit: ingestion, cleaning, denoising "
                    "corruption pairs, ROUGE scoring and hypertext graph export.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sub = subparsers.add_parser("ingest", help="validate and canonicalize a corpus file")
    sub.add_argument("--input", "-i", help="line-delimited turn records")
    sub.add_argument("--output", "-o", help="canonical corpus output file")
    _add_config_flag(sub)
    sub.set_defaults(func=cmd_ingest)

    sub = subparsers.add_parser("preprocess", help="translate stage, cleaning and q/r texts")
    sub.add_argument("--input", "-i", help="corpus file")
    sub.add_argument("--output", "-o", help="output directory")
    _add_config_flag(sub)
    sub.set_defaults(func=cmd_preprocess)

    sub = subparsers.add_parser("corrupt", help="emit seeded denoise pairs")
    sub.add_argument("--input", "-i", help="corpus file")
    sub.add_argument("--output", "-o", help="denoise pair output file")
    _add_config_flag(sub)
    _add_noise_flags(sub)
    sub.set_defaults(func=cmd_corrupt)

    sub = subparsers.add_parser("score", help="ROUGE-score candidate summaries")
    sub.add_argument("--candidates", help="candidate summary file")
    sub.add_argument("--references", help="reference summary file")
    sub.add_argument("--output", "-o", help="write a report record here, plus a .png figure")
    _add_config_flag(sub)
    sub.set_defaults(func=cmd_score)

    sub = subparsers.add_parser("graph", help="build and export the hypertext graph")
    sub.add_argument("--input", "-i", help="corpus file")
    sub.add_argument("--summaries", help="summary file for summary nodes")
    sub.add_argument("--out-dir", help="output directory (graph.jsonl + site/)")
    _add_config_flag(sub)
    sub.set_defaults(func=cmd_graph)

    sub = subparsers.add_parser("pipeline", help="ingest, preprocess, corrupt and graph in one run")
    sub.add_argument("--input", "-i", help="corpus file")
    sub.add_argument("--summaries", help="summary file for summary nodes")
    sub.add_argument("--out-dir", help="output directory for all stages")
    _add_config_flag(sub)
    _add_noise_flags(sub)
    sub.set_defaults(func=cmd_pipeline)

    sub = subparsers.add_parser("print-config", help="print the default configuration")
    sub.set_defaults(func=cmd_print_config)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_cfg(args)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (CorpusError, GraphError, TranslateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
