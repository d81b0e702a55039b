"""Command-line driver for batch pipelines.

Subcommands: extract-pairs, train-ngram, summarize-ex, summarize-recon,
build-dataset, decode, rouge.  Every command is deterministic given its
config file and input files; reruns produce byte-identical outputs, and
per-example parallelism reassembles results in input order.

Exit codes: 0 success, 1 partial per-record failures, 2 usage or config
errors, 3 remote-scorer transport errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .decoder import DecodeParams, beam_decode_hypothesis
from .lm import (
    END_TOKEN,
    NGramModel,
    RemoteScorer,
    RemoteScorerConfig,
    Scorer,
    ScorerTransportError,
    make_cached,
    train_ngram,
)
from .rouge import EvalConfig, byte_cap_text, evaluate_corpus
from .search import SearchParams, summarize_ex, summarize_recon
from .selfsup import DEFAULT_DELIMITER, build_finetune_corpus
from .textprep import RawDocument, detokenize, extract_pairs, segment_sentences, tokenize

logger = logging.getLogger(__name__)

DEFAULT_CACHE_CAPACITY = 65_536


class UsageError(Exception):
    """Configuration or input-format problem; maps to exit code 2."""


# --------------------------------------------------------------------------
# Config file (TOML-style subset: [section] headers and scalar key = value)
# --------------------------------------------------------------------------


def _parse_value(value: str, lineno: int):
    if value.startswith('"'):
        try:
            return json.loads(value)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config line {lineno}: bad string value") from exc
    if value in ("true", "false"):
        return value == "true"
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        raise UsageError(f"config line {lineno}: unparseable value {value!r}") from None


def parse_config_text(text: str) -> dict[str, dict[str, object]]:
    sections: dict[str, dict[str, object]] = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key = value")
        if current is None:
            raise UsageError(f"config line {lineno}: key outside any [section]")
        key, _, value = line.partition("=")
        sections[current][key.strip()] = _parse_value(value.strip(), lineno)
    return sections


def load_config(path: Optional[str]) -> dict[str, dict[str, object]]:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


@dataclass
class RunConfig:
    """Resolved run settings: config file values overridden by CLI flags."""

    scorer_kind: Optional[str] = None
    ngram_model: Optional[str] = None
    remote_base_url: Optional[str] = None
    remote_timeout_ms: int = 30_000
    remote_max_retries: int = 3
    cache_capacity: int = DEFAULT_CACHE_CAPACITY
    workers: int = 1
    search: SearchParams = field(default_factory=SearchParams)
    decode: DecodeParams = field(default_factory=DecodeParams)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def _pick(flag, section: dict, key: str, default):
    if flag is not None:
        return flag
    if key in section:
        return section[key]
    return default


def resolve_config(args: argparse.Namespace) -> RunConfig:
    sections = load_config(getattr(args, "config", None))
    scorer = sections.get("scorer", {})
    search = sections.get("search", {})
    decode = sections.get("decode", {})
    eval_cfg = sections.get("eval", {})
    run = sections.get("run", {})
    try:
        params = SearchParams(
            k=int(_pick(getattr(args, "k", None), search, "k", 1)),
            m=int(_pick(getattr(args, "m", None), search, "m", 3)),
            dedupe=bool(_pick(getattr(args, "dedupe", None), search, "dedupe", True)),
            pool_cap=int(_pick(None, search, "pool_cap", 100_000)),
        )
        decode_params = DecodeParams(
            beam_size=int(_pick(getattr(args, "beam_size", None), decode, "beam_size", 5)),
            min_tokens=int(_pick(getattr(args, "min_tokens", None), decode, "min_tokens", 5)),
            max_tokens=_pick(getattr(args, "max_tokens", None), decode, "max_tokens", None),
            delimiter=str(_pick(getattr(args, "delimiter", None), decode, "delimiter", DEFAULT_DELIMITER)),
            end_token=str(_pick(getattr(args, "end_token", None), decode, "end_token", END_TOKEN)),
        )
        if decode_params.max_tokens is not None:
            decode_params = DecodeParams(
                beam_size=decode_params.beam_size,
                min_tokens=decode_params.min_tokens,
                max_tokens=int(decode_params.max_tokens),
                delimiter=decode_params.delimiter,
                end_token=decode_params.end_token,
            )
        evaluation = EvalConfig(
            byte_cap=_pick(getattr(args, "byte_cap", None), eval_cfg, "byte_cap", None),
            multi_ref_aggregation=str(
                _pick(getattr(args, "aggregation", None), eval_cfg, "aggregation", "max")
            ),
            case_fold=bool(_pick(getattr(args, "case_fold", None), eval_cfg, "case_fold", True)),
        )
        return RunConfig(
            scorer_kind=_pick(None, scorer, "kind", None),
            ngram_model=_pick(getattr(args, "ngram_model", None), scorer, "model", None),
            remote_base_url=_pick(getattr(args, "remote_url", None), scorer, "base_url", None),
            remote_timeout_ms=int(_pick(getattr(args, "remote_timeout_ms", None), scorer, "timeout_ms", 30_000)),
            remote_max_retries=int(_pick(getattr(args, "remote_max_retries", None), scorer, "max_retries", 3)),
            cache_capacity=int(
                _pick(getattr(args, "cache_capacity", None), run, "cache_capacity", DEFAULT_CACHE_CAPACITY)
            ),
            workers=int(_pick(getattr(args, "workers", None), run, "workers", 1)),
            search=params,
            decode=decode_params,
            eval=evaluation,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_scorer(cfg: RunConfig) -> Scorer:
    """Instantiate the configured backend wrapped in the shared LRU cache."""
    kind = cfg.scorer_kind
    if kind is None:
        if cfg.ngram_model is not None:
            kind = "ngram"
        elif cfg.remote_base_url is not None:
            kind = "remote"
        else:
            raise UsageError("no scorer configured: pass --ngram-model or --remote-url")
    if kind == "ngram":
        if cfg.ngram_model is None:
            raise UsageError("scorer kind 'ngram' requires a model path")
        try:
            inner: Scorer = NGramModel.load(cfg.ngram_model)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot load n-gram model {cfg.ngram_model}: {exc}") from exc
    elif kind == "remote":
        if cfg.remote_base_url is None:
            raise UsageError("scorer kind 'remote' requires a base URL")
        inner = RemoteScorer(
            RemoteScorerConfig(
                base_url=cfg.remote_base_url,
                timeout_ms=cfg.remote_timeout_ms,
                max_retries=cfg.remote_max_retries,
            )
        )
    else:
        raise UsageError(f"unknown scorer kind {kind!r}")
    return make_cached(inner, cfg.cache_capacity)


# --------------------------------------------------------------------------
# File I/O helpers
# --------------------------------------------------------------------------


def _read_jsonl(path: str, required: Sequence[str]) -> list[dict]:
    records: list[dict] = []
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}: line {lineno}: malformed JSON") from exc
            if not isinstance(record, dict):
                raise UsageError(f"{path}: line {lineno}: expected a JSON object")
            for key in required:
                if key not in record:
                    raise UsageError(f"{path}: line {lineno}: missing field {key!r}")
            records.append(record)
    return records


def _write_jsonl(path: str, records: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(record))
            handle.write("\n")


def _parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    """Apply fn to every item, preserving input order regardless of workers."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_extract_pairs(args: argparse.Namespace) -> int:
    records = _read_jsonl(args.input, required=("id", "body"))
    documents = []
    for record in records:
        if not isinstance(record["id"], str) or not record["id"]:
            raise UsageError(f"{args.input}: document id must be a non-empty string")
        if not isinstance(record["body"], str):
            raise UsageError(f"{args.input}: document body must be a string")
        documents.append(RawDocument(id=record["id"], body=record["body"]))
    total_sentences = 0
    total_pairs = 0
    excluded = 0
    out_records = []
    for doc in documents:
        n_sentences = sum(1 for s in segment_sentences(doc.body) if tokenize(s).tokens)
        pairs = extract_pairs(doc)
        total_sentences += n_sentences
        total_pairs += len(pairs)
        if n_sentences:
            excluded += 1  # the final sentence of each non-empty document
        for pair in pairs:
            out_records.append(
                {
                    "doc_id": pair.doc_id,
                    "position": pair.position,
                    "source": pair.source.raw,
                    "next": pair.next.raw,
                }
            )
    _write_jsonl(args.output, out_records)
    print(f"sentences={total_sentences} pairs={total_pairs} excluded={excluded}")
    return 0


def cmd_train_ngram(args: argparse.Namespace) -> int:
    records = _read_jsonl(args.input, required=("id", "body"))
    sentences = []
    for record in records:
        for sentence in segment_sentences(str(record["body"])):
            tokenized = tokenize(sentence)
            if tokenized.tokens:
                sentences.append(tokenized)
    try:
        model = train_ngram(sentences, order=args.order, add_k=args.add_k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    model.save(args.output)
    print(f"sentences={len(sentences)} vocab={len(model.vocab)} saved={args.output}")
    return 0


def _load_pairs(path: str) -> list[dict]:
    records = _read_jsonl(path, required=("doc_id", "position", "source", "next"))
    for index, record in enumerate(records):
        if not tokenize(str(record["source"])).tokens:
            raise UsageError(f"{path}: record {index}: empty source sentence")
    return records


def _summary_record(record: dict, result) -> dict:
    return {
        "doc_id": record["doc_id"],
        "position": record["position"],
        "source": record["source"],
        "next": record["next"],
        "summary": result.summary.raw,
        "kept": list(result.kept),
        "fluency": result.fluency,
        "relevance": result.relevance,
        "pool_size": result.pool_size,
        "candidates_scored": result.candidates_scored,
    }


def cmd_summarize_ex(args: argparse.Namespace, cfg: RunConfig) -> int:
    records = _load_pairs(args.pairs)
    scorer = build_scorer(cfg)

    def process(record: dict) -> dict:
        source = tokenize(str(record["source"]))
        next_sentence = tokenize(str(record["next"]))
        result = summarize_ex(source, next_sentence, cfg.search, scorer)
        return _summary_record(record, result)

    results = _parallel_map(process, records, cfg.workers)
    _write_jsonl(args.output, results)
    print(f"pairs={len(results)} written={args.output}")
    return 0


def cmd_summarize_recon(args: argparse.Namespace, cfg: RunConfig) -> int:
    records = _load_pairs(args.pairs)
    ex_records = _read_jsonl(args.ex_results, required=("doc_id", "position", "kept"))
    target_lens = {
        (record["doc_id"], record["position"]): len(record["kept"]) for record in ex_records
    }
    scorer = build_scorer(cfg)

    def process(record: dict) -> dict:
        key = (record["doc_id"], record["position"])
        if key not in target_lens:
            raise UsageError(f"no matching result for pair {key!r} in {args.ex_results}")
        source = tokenize(str(record["source"]))
        target_len = target_lens[key]
        if not 1 <= target_len <= len(source.tokens):
            raise UsageError(f"target length {target_len} out of range for pair {key!r}")
        result = summarize_recon(source, cfg.search, scorer, target_len)
        return _summary_record(record, result)

    results = _parallel_map(process, records, cfg.workers)
    _write_jsonl(args.output, results)
    print(f"pairs={len(results)} written={args.output}")
    return 0


def cmd_build_dataset(args: argparse.Namespace) -> int:
    records = _read_jsonl(args.results, required=("source", "summary"))
    pairs = [(str(r["source"]), str(r["summary"])) for r in records]
    try:
        stats = build_finetune_corpus(
            pairs,
            args.train_output,
            args.heldout_output,
            heldout=args.heldout,
            delimiter=args.delimiter,
            end_token=args.end_token,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(
        json.dumps(
            {
                "n_pairs": stats.n_pairs,
                "mean_compression_ratio": stats.mean_compression_ratio,
                "abstractive_token_pct": stats.abstractive_token_pct,
            }
        )
    )
    return 0


def cmd_decode(args: argparse.Namespace, cfg: RunConfig) -> int:
    records = _read_jsonl(args.sources, required=("source",))
    scorer = build_scorer(cfg)
    failures = 0

    def process(record: dict) -> dict:
        out: dict = {}
        for key in ("doc_id", "position"):
            if key in record:
                out[key] = record[key]
        out["source"] = record["source"]
        source = tokenize(str(record["source"]))
        try:
            hypothesis = beam_decode_hypothesis(scorer, source, cfg.decode)
        except (RuntimeError, ValueError) as exc:
            out["error"] = str(exc)
            return out
        out["summary"] = detokenize(hypothesis.tokens)
        out["score"] = hypothesis.score
        return out

    results = _parallel_map(process, records, cfg.workers)
    for index, record in enumerate(results):
        if "error" in record:
            failures += 1
            print(f"record {index}: {record['error']}", file=sys.stderr)
    _write_jsonl(args.output, results)
    print(f"sources={len(results)} failures={failures} written={args.output}")
    return 1 if failures else 0


def cmd_rouge(args: argparse.Namespace, cfg: RunConfig) -> int:
    eval_cfg = EvalConfig.duc() if args.duc else cfg.eval
    records = _read_jsonl(args.input, required=("candidate", "references"))
    outputs = []
    reference_sets = []
    sources = []
    for index, record in enumerate(records):
        references = record["references"]
        if not isinstance(references, list) or not references:
            raise UsageError(f"{args.input}: record {index}: empty reference list")
        outputs.append(str(record["candidate"]))
        reference_sets.append([str(r) for r in references])
        sources.append(record.get("source"))
    try:
        report = evaluate_corpus(outputs, reference_sets, eval_cfg).as_json_dict()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    payload: dict = {"n_examples": len(outputs)}
    payload.update(report)
    if args.baselines:
        if any(source is None for source in sources):
            raise UsageError("--baselines requires a 'source' field on every record")
        cap = eval_cfg.byte_cap if eval_cfg.byte_cap is not None else 75
        prefix_candidates = [byte_cap_text(str(s), cap) for s in sources]
        payload["baselines"] = {
            "prefix": evaluate_corpus(prefix_candidates, reference_sets, eval_cfg).as_json_dict(),
            "input": evaluate_corpus([str(s) for s in sources], reference_sets, eval_cfg).as_json_dict(),
        }
    rendered = json.dumps(payload, indent=2)
    if args.output:
        Path(args.output).write_text(rendered + "\n", encoding="utf-8")
    print(rendered)
    return 0


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def _add_global_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML-style config file; flags override it")
    parser.add_argument("--workers", type=int, help="parallel workers (default 1)")
    parser.add_argument("--cache-capacity", type=int, help="scorer LRU cache entries")


def _add_scorer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ngram-model", help="path to a saved n-gram model")
    parser.add_argument("--remote-url", help="base URL of a remote scoring server")
    parser.add_argument("--remote-timeout-ms", type=int, help="remote request timeout")
    parser.add_argument("--remote-max-retries", type=int, help="remote retry budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibsum",
        description="Next-sentence-guided extractive summarization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-pairs", help="extract adjacent sentence pairs from a corpus")
    p.add_argument("--input", required=True, help="JSONL corpus: {id, body} per line")
    p.add_argument("--output", required=True, help="JSONL pair file to write")
    _add_global_flags(p)

    p = sub.add_parser("train-ngram", help="train the add-k n-gram scorer on a corpus")
    p.add_argument("--input", required=True, help="JSONL corpus: {id, body} per line")
    p.add_argument("--output", required=True, help="model file to write (ngram-v1)")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--add-k", type=float, default=1.0)
    _add_global_flags(p)

    p = sub.add_parser("summarize-ex", help="next-sentence-guided extractive search")
    p.add_argument("--pairs", required=True, help="JSONL pair file")
    p.add_argument("--output", required=True, help="JSONL results file to write")
    p.add_argument("--k", type=int, help="candidates expanded per length (default 1)")
    p.add_argument("--m", type=int, help="max consecutive deletions (default 3)")
    _add_scorer_flags(p)
    _add_global_flags(p)

    p = sub.add_parser("summarize-recon", help="reconstruction-guided baseline")
    p.add_argument("--pairs", required=True, help="JSONL pair file")
    p.add_argument(
        "--ex-results",
        required=True,
        help="summarize-ex results file providing per-pair target lengths",
    )
    p.add_argument("--output", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    _add_scorer_flags(p)
    _add_global_flags(p)

    p = sub.add_parser("build-dataset", help="emit fine-tuning records and stats")
    p.add_argument("--results", required=True, help="JSONL results file with source+summary")
    p.add_argument("--train-output", required=True)
    p.add_argument("--heldout-output", required=True)
    p.add_argument("--heldout", type=int, required=True, help="held-out pair count")
    p.add_argument("--delimiter", default=DEFAULT_DELIMITER)
    p.add_argument("--end-token", default=END_TOKEN)
    _add_global_flags(p)

    p = sub.add_parser("decode", help="beam-search decode summaries from a generative scorer")
    p.add_argument("--sources", required=True, help="JSONL file with a 'source' field per line")
    p.add_argument("--output", required=True)
    p.add_argument("--beam-size", type=int)
    p.add_argument("--min-tokens", type=int)
    p.add_argument("--max-tokens", type=int)
    p.add_argument("--delimiter")
    p.add_argument("--end-token")
    _add_scorer_flags(p)
    _add_global_flags(p)

    p = sub.add_parser("rouge", help="evaluate candidates against references")
    p.add_argument("--input", required=True, help="JSONL: {candidate, references[, source]}")
    p.add_argument("--output", help="optional report JSON path")
    p.add_argument("--byte-cap", type=int)
    p.add_argument("--aggregation", choices=("max", "average"))
    p.add_argument("--case-fold", dest="case_fold", action="store_true", default=None)
    p.add_argument("--no-case-fold", dest="case_fold", action="store_false")
    p.add_argument("--duc", action="store_true", help="DUC preset: 75-byte cap, max aggregation")
    p.add_argument(
        "--baselines",
        action="store_true",
        help="also score PREFIX (first 75 bytes of source) and INPUT (full source)",
    )
    _add_global_flags(p)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = resolve_config(args)
        if args.command == "extract-pairs":
            return cmd_extract_pairs(args)
        if args.command == "train-ngram":
            return cmd_train_ngram(args)
        if args.command == "summarize-ex":
            return cmd_summarize_ex(args, cfg)
        if args.command == "summarize-recon":
            return cmd_summarize_recon(args, cfg)
        if args.command == "build-dataset":
            return cmd_build_dataset(args)
        if args.command == "decode":
            return cmd_decode(args, cfg)
        if args.command == "rouge":
            return cmd_rouge(args, cfg)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScorerTransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
