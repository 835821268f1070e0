"""Command-line entry point.

Subcommands: train, augment, search, retrain, selftrain, infer, eval,
serve-check.  Exit codes: 0 success, 1 usage error, 2 data error,
3 remote-scorer failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import corpusio, evaluation, lm, pipeline, remote, templates
from .errors import DataError, RemoteUnavailable
from .match import MatchPatterns, load_patterns
from .pipeline import PipelineConfig
from .tabular import parse_mr, tokenize


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tabletext",
        description="Few-shot data-to-text generation with coverage repair.")
    parser.add_argument("--config", help="key=value pipeline config file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--rules", help="phrase rule file (default: bundled E2E rules)")
    parser.add_argument("--patterns", help="soft-match pattern file")
    parser.add_argument("--scorer", default=None,
                        help="'builtin' or a remote endpoint (host:port / stdio:cmd); "
                             "overrides the config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit the stage-1 model")
    p.add_argument("--data", required=True, help="parallel corpus file")
    p.add_argument("--out", required=True, help="model file to write")

    p = sub.add_parser("augment", help="synthesize tables by recombination")
    p.add_argument("--data", required=True, help="parallel corpus file")
    p.add_argument("--n", type=int, required=True, help="number of tables")
    p.add_argument("--out", required=True, help="unlabeled corpus file to write")

    p = sub.add_parser("search", help="decode and repair unlabeled tables")
    p.add_argument("--model", required=True)
    p.add_argument("--tables", required=True, help="unlabeled corpus file")
    p.add_argument("--out", required=True, help="pseudo corpus file to write")
    p.add_argument("--data", help="parallel corpus for slot statistics")
    p.add_argument("--trace", help="write insertion steps as JSON lines")

    p = sub.add_parser("retrain", help="fit the stage-2 model on human + pseudo")
    p.add_argument("--data", required=True, help="parallel corpus file")
    p.add_argument("--pseudo", required=True, help="pseudo corpus file")
    p.add_argument("--out", required=True)

    p = sub.add_parser("selftrain", help="retrain on raw decodes (baseline)")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("infer", help="decode tables with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--out", required=True, help="text file, one output per line")

    p = sub.add_parser("eval", help="score outputs against their tables")
    p.add_argument("--outputs", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--refs", help="reference file enables the plumbing BLEU")
    p.add_argument("--out", help="also write the report as JSON")

    p = sub.add_parser("serve-check", help="handshake with a remote scorer")
    return parser


def _load_config(args) -> PipelineConfig:
    config = (PipelineConfig.from_file(args.config) if args.config
              else PipelineConfig())
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    return config


def _load_rules(args) -> templates.RuleSet:
    if args.rules:
        return templates.load_rules(args.rules)
    return templates.e2e_rules()


def _load_patterns(args) -> MatchPatterns:
    if args.patterns:
        return load_patterns(args.patterns)
    return MatchPatterns.empty()


def _scorer_endpoint(args, config) -> str:
    return args.scorer or config.scorer or "builtin"


def _scorer_for(args, model, config):
    endpoint = _scorer_endpoint(args, config)
    if endpoint != "builtin":
        return remote.RemoteScorer(endpoint)
    return lm.LocalScorer(model, config.length_normalize)


def _cmd_train(args, config) -> int:
    corpus = pipeline.load_parallel_corpus(args.data)
    model = pipeline.stage1(corpus, config)
    lm.save_model(model, args.out)
    print(f"trained on {model.meta['n_pairs']} pairs -> {args.out}")
    return 0


def _cmd_augment(args, config) -> int:
    corpus = pipeline.load_parallel_corpus(args.data)
    tables = pipeline.recombine([s.table for s in corpus.parallel],
                                args.n, config.seed)
    corpusio.write_unlabeled(args.out, tables)
    print(f"wrote {len(tables)} recombined tables -> {args.out}")
    return 0


def _cmd_search(args, config) -> int:
    model = lm.load_model(args.model)
    tables = corpusio.read_unlabeled(args.tables)
    ruleset = _load_rules(args)
    stats = corpusio.read_parallel(args.data) if args.data else None
    scorer = _scorer_for(args, model, config)
    trace_fh = open(args.trace, "w", encoding="utf-8") if args.trace else None
    sink = None
    if trace_fh:
        sink = lambda rec: trace_fh.write(
            json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
    try:
        samples = pipeline.build_pseudo_corpus(
            model, tables, ruleset, config, stats_corpus=stats,
            scorer=scorer, trace_sink=sink)
    finally:
        if trace_fh:
            trace_fh.close()
    corpusio.write_pseudo(
        args.out, [(s.table, s.sentence, s.provenance) for s in samples])
    print(f"wrote {len(samples)} pseudo pairs -> {args.out}")
    return 0


def _cmd_retrain(args, config) -> int:
    corpus = pipeline.load_parallel_corpus(args.data)
    pseudo = pipeline.load_pseudo_samples(args.pseudo)
    model = pipeline.stage2(corpus, pseudo, config)
    lm.save_model(model, args.out)
    print(f"retrained on {model.meta['n_pairs']} pairs -> {args.out}")
    return 0


def _cmd_selftrain(args, config) -> int:
    model = lm.load_model(args.model)
    corpus = pipeline.load_parallel_corpus(args.data)
    tables = corpusio.read_unlabeled(args.tables)
    retrained = pipeline.self_train(model, corpus, tables, config)
    lm.save_model(retrained, args.out)
    print(f"self-trained on {retrained.meta['n_pairs']} pairs -> {args.out}")
    return 0


def _cmd_infer(args, config) -> int:
    model = lm.load_model(args.model)
    tables = corpusio.read_unlabeled(args.tables)
    outputs = [pipeline.infer(model, t, config) for t in tables]
    corpusio.write_outputs(args.out, outputs)
    print(f"wrote {len(outputs)} outputs -> {args.out}")
    return 0


def _cmd_eval(args, config) -> int:
    outputs = corpusio.read_outputs(args.outputs)
    tables = corpusio.read_unlabeled(args.tables)
    refs = corpusio.read_outputs(args.refs) if args.refs else None
    report = evaluation.evaluate(outputs, tables, refs, _load_patterns(args))
    sys.stdout.write(report.format())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return 0


def _cmd_serve_check(args, config) -> int:
    endpoint = _scorer_endpoint(args, config)
    if endpoint == "builtin":
        print("serve-check needs --scorer with a remote endpoint",
              file=sys.stderr)
        return 1
    scorer = remote.RemoteScorer(endpoint, timeout=5.0)
    table = parse_mr("name[Aromi], area[riverside]")
    candidates = [tokenize("Aromi is in riverside."), tokenize("Aromi.")]
    scores = scorer.score_batch(table, candidates)
    if len(scores) != len(candidates) or not all(
            isinstance(s, float) for s in scores):
        raise RemoteUnavailable("handshake returned a malformed score batch")
    print(f"scorer at {endpoint} ok; sample scores: "
          f"{', '.join(f'{s:.4f}' for s in scores)}")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "augment": _cmd_augment,
    "search": _cmd_search,
    "retrain": _cmd_retrain,
    "selftrain": _cmd_selftrain,
    "infer": _cmd_infer,
    "eval": _cmd_eval,
    "serve-check": _cmd_serve_check,
}


def cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        config = _load_config(args)
        return _COMMANDS[args.command](args, config)
    except RemoteUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli(sys.argv[1:]))
