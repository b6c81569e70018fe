"""Command-line entry point.

Exit codes: 0 success, 2 input error, 3 cache or provider error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .citations import audit, citation_graph, read_bib_jsonl
from .config import ConfigError, RunConfig
from .embeddings import CachedEmbeddings, ProviderUnavailable, make_provider
from .gateway import (
    AuthMissing,
    CacheCorrupt,
    CacheMiss,
    Gateway,
    GatewayError,
    OpenAIChatProvider,
    ProviderExhausted,
    ResponseCache,
)
from .graph import KGError
from .graph_io import GraphFormat, read_graph, write_graph
from .ml_eval import TrainConfig
from .record_eval import BenchmarkSchema, CachedOracle, SchemaMismatch, bundled_schema, format_field_table
from .roget import (
    NotRogetFormat,
    ParseDiagnostics,
    SampleTooLarge,
    head_to_graph,
    parse_thesaurus,
    read_heads_jsonl,
    sample_heads,
    write_heads_jsonl,
)
from .stress import StressConfig, StressReport, run_stress_test

log = logging.getLogger("kgstress")

EXIT_OK, EXIT_INPUT, EXIT_PROVIDER = 0, 2, 3
EVAL_REPORT_SCHEMA = "kgstress.eval_report/1"
AUDIT_REPORT_SCHEMA = "kgstress.citation_audit/1"


class InputError(Exception):
    pass


def _header(command: str) -> dict:
    return {"tool": f"kgstress {__version__}", "command": command,
            "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds")}


def _write_json(path: str | Path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _require(path: str | Path) -> Path:
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such file: {p}")
    return p


# -- parse-roget ---------------------------------------------------------------

def cmd_parse_roget(args) -> int:
    data = _require(args.input).read_bytes()
    diag = ParseDiagnostics()
    heads = parse_thesaurus(data, diag)
    write_heads_jsonl(heads, args.out)
    sample = sample_heads(heads, args.sample, args.seed)
    sample_out = args.sample_out or str(Path(args.out).with_suffix("")) + ".sample.jsonl"
    write_heads_jsonl(sample, sample_out)
    log.info("parsed %d heads (%d skipped, %d duplicates); sampled %d", len(heads), len(diag.skipped),
             len(diag.duplicates), len(sample))
    print(f"{len(heads)} heads -> {args.out}; {len(sample)} sampled -> {sample_out}")
    return EXIT_OK


# -- build-graph ---------------------------------------------------------------

def _gateway(cfg: RunConfig) -> Gateway:
    provider = None if cfg.offline else OpenAIChatProvider(cfg.api_base)
    return Gateway(ResponseCache(cfg.cache_dir), provider, offline=cfg.offline, max_workers=cfg.max_workers)


def cmd_build_graph(args) -> int:
    if args.bib:
        graph = citation_graph(read_bib_jsonl(_require(args.bib)), args.name or "citations")
    else:
        heads = read_heads_jsonl(_require(args.heads))
        if args.llm_cache:
            from .pipeline import acquire, roget_generated_heads, roget_queries

            cfg = RunConfig(cache_dir=args.llm_cache, offline=args.offline, model=args.model)
            acq = acquire(_gateway(cfg), roget_queries(heads, cfg.model), [str(h.number) for h in heads])
            heads = roget_generated_heads(heads, acq.parsed)
        graph = head_to_graph(heads, args.name or ("llm" if args.llm_cache else "roget"))
    write_graph(graph, args.out, args.format)
    print(f"{graph.num_nodes} nodes, {graph.num_edges} edges -> {args.out}")
    return EXIT_OK


# -- stress --------------------------------------------------------------------

def cmd_stress(args) -> int:
    g_ref = read_graph(_require(args.truth))
    g_llm = read_graph(_require(args.generated))
    config = StressConfig(
        measures=tuple(args.measures),
        mobility_measure=args.mobility_measure,
        mobility_threshold=args.mobility_threshold,
        top_fraction=args.top_fraction,
        louvain_seed=args.seed,
    )
    report = run_stress_test(g_llm, g_ref, config)
    payload = report.to_dict() | _header("stress") | {"inputs": {"truth": str(args.truth), "generated": str(args.generated)}}
    _write_json(args.out, payload)
    summary = report.summary()
    summary_path = args.summary or str(Path(args.out).with_suffix(".txt"))
    Path(summary_path).write_text(summary, encoding="utf-8")
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["node", "rank_ref", "rank_llm", "delta", "is_fabrication"])
            for u in report.upward_mobile:
                w.writerow([u.node, "" if u.rank_ref is None else u.rank_ref, u.rank_llm, u.delta, u.is_fabrication])
    if not args.quiet:
        sys.stdout.write(summary)
    return EXIT_OK


# -- eval ----------------------------------------------------------------------

def _eval_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    cfg.override(
        benchmark=args.benchmark, truth=args.truth, cache_dir=args.cache_dir, schema=args.schema,
        prompt=args.prompt, oracle_cache=args.oracle_cache, match_threshold=args.threshold,
        embedding=args.embedding, embedding_url=args.embedding_url, classifier_seed=args.seed,
        max_workers=args.max_workers,
    )
    if args.offline:
        cfg.offline = True
    if args.live_oracle:
        cfg.oracle_cache_only = False
    cfg.validate()
    return cfg


def cmd_eval(args) -> int:
    from . import pipeline
    from .record_eval import DBpediaLookup

    cfg = _eval_config(args)
    gateway = _gateway(cfg)
    oracle = None
    if cfg.oracle_cache or not cfg.oracle_cache_only:
        backend = None if cfg.oracle_cache_only or cfg.offline else DBpediaLookup()
        oracle = CachedOracle(cfg.oracle_cache, backend, cache_only=backend is None)

    if cfg.benchmark == "roget":
        result = pipeline.run_roget(cfg.truth, gateway, cfg.model, cfg.match_threshold)
    elif cfg.benchmark == "bibliographic":
        result = pipeline.run_bibliographic(cfg.truth, gateway, cfg.model, cfg.match_threshold)
    else:
        if cfg.benchmark == "custom":
            schema = BenchmarkSchema.load(cfg.schema)
            template = Path(cfg.prompt).read_text(encoding="utf-8")
        else:
            schema = BenchmarkSchema.load(cfg.schema) if cfg.schema else bundled_schema(cfg.benchmark)
            from .gateway import load_prompt

            template = Path(cfg.prompt).read_text(encoding="utf-8") if cfg.prompt else load_prompt(cfg.benchmark)
        result = pipeline.run_records(cfg.truth, schema, template, gateway, cfg.model, cfg.match_threshold, oracle)

    payload = {"schema": EVAL_REPORT_SCHEMA} | _header("eval")
    payload["config"] = cfg.to_dict()
    payload["stage1"] = {
        "queries": len(result.pairs),
        "from_cache": result.acquisition.from_cache,
        "unparseable": result.acquisition.unparseable,
    }
    payload["fields"] = [r.to_dict() for r in result.evaluation.fields]

    if not args.no_ml:
        base = make_provider(cfg.embedding, cfg.embedding_model, cfg.embedding_url)
        provider = CachedEmbeddings(base, cfg.embedding_cache) if cfg.embedding_cache else base
        payload["similarity"] = pipeline.similarity_profile(result.pairs, provider)
        payload["classifier"] = pipeline.classifier_stage(
            result.evaluation, provider, TrainConfig(seed=cfg.classifier_seed)
        )
        payload["similarity_model"] = provider.model
    payload |= result.extras

    _write_json(args.out, payload)
    table = format_field_table(result.evaluation.fields)
    if args.csv:
        _write_field_csv(args.csv, payload["fields"])
    if not args.quiet:
        sys.stdout.write(table)
    return EXIT_OK


def _write_field_csv(path, rows) -> None:
    cols = ["field", "precision", "recall", "f1", "accuracy", "hallucination_rate", "tp", "fp", "fn",
            "hallucinated", "extra_knowledge", "unverified"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)


# -- audit-citations -----------------------------------------------------------

def cmd_audit_citations(args) -> int:
    truth = read_bib_jsonl(_require(args.truth))
    generated = read_bib_jsonl(_require(args.generated))
    result = audit(truth, generated, args.threshold)
    g_ref = citation_graph(truth, "reference")
    g_llm = citation_graph(generated, "llm")
    stress = run_stress_test(g_llm, g_ref, StressConfig())
    payload = {"schema": AUDIT_REPORT_SCHEMA} | _header("audit-citations") | result
    payload["citation_graph_stress"] = stress.to_dict()
    _write_json(args.out, payload)

    if args.csv_dir:
        out = Path(args.csv_dir)
        out.mkdir(parents=True, exist_ok=True)
        rec = result["citation_recall"]
        with open(out / "citation_recall.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["metric", "value"])
            w.writerow(["total_truth_citations", rec["truth_total"]])
            w.writerow(["total_generated_citations", rec["generated_total"]])
            w.writerow(["recall_rate", rec["recall"]])
            w.writerow(["omission_rate", rec["omission"]])
            w.writerow(["papers_with_citations", f"{rec['papers_with_citations']}/{rec['papers']}"])
        _write_field_csv(out / "fields.csv", result["fields"])
    if args.graph_dir:
        out = Path(args.graph_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_graph(g_ref, out / "reference.dot", GraphFormat.DOT)
        write_graph(g_llm, out / "generated.dot", GraphFormat.DOT)

    if not args.quiet:
        rec = result["citation_recall"]
        print(f"recall {rec['recall']:.1%}  omission {rec['omission']:.1%}  "
              f"papers with citations {rec['papers_with_citations']}/{rec['papers']}")
    return EXIT_OK


# -- report --------------------------------------------------------------------

def cmd_report(args) -> int:
    try:
        payload = json.loads(_require(args.report).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.report}: not JSON ({exc})") from None
    kind = payload.get("schema")
    if kind == "kgstress.stress_report/1":
        sys.stdout.write(StressReport.from_dict(payload).summary())
    elif kind == EVAL_REPORT_SCHEMA:
        from .record_eval import FieldEvalResult

        fields = []
        for row in payload["fields"]:
            row = {k: v for k, v in row.items() if k != "hallucination_rate"}
            fields.append(FieldEvalResult(**row))
        sys.stdout.write(format_field_table(fields))
        clf = payload.get("classifier", {})
        if "metrics" in clf:
            m = clf["metrics"]
            print(f"classifier: AUC {m['roc_auc']:.3f}  F1 {m['f1']:.3f}  MCC {m['mcc']:.3f}")
    elif kind == AUDIT_REPORT_SCHEMA:
        rec = payload["citation_recall"]
        print(f"recall {rec['recall']:.1%}  omission {rec['omission']:.1%}  "
              f"papers with citations {rec['papers_with_citations']}/{rec['papers']}")
    else:
        raise InputError(f"{args.report}: unknown report schema {kind!r}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kgstress", description="Structural hallucination diagnostics for generated knowledge graphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse-roget", help="parse the plain-text thesaurus into Heads JSONL and draw a sample")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--sample-out")
    p.add_argument("--sample", "--n", dest="sample", type=int, default=30)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_parse_roget)

    p = sub.add_parser("build-graph", help="build a knowledge graph from Heads or bibliographic records")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--heads", help="RogetHead JSONL")
    src.add_argument("--bib", help="BibRecord JSONL; builds the citation graph")
    p.add_argument("--llm-cache", help="build the generated graph from cached responses for --heads")
    p.add_argument("--model", default="gpt-4.1-mini")
    p.add_argument("--offline", action="store_true")
    p.add_argument("--name")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=[f.value for f in GraphFormat])
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("stress", help="compare a generated graph against a reference graph")
    p.add_argument("truth")
    p.add_argument("generated")
    p.add_argument("--out", required=True)
    p.add_argument("--summary")
    p.add_argument("--csv", help="upward-mobility table")
    p.add_argument("--measures", nargs="+", default=["degree", "betweenness", "pagerank"])
    p.add_argument("--mobility-measure", default="pagerank")
    p.add_argument("--mobility-threshold", type=float, default=0.25)
    p.add_argument("--top-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_stress)

    p = sub.add_parser("eval", help="run acquisition, field scoring and the classifier for a benchmark")
    p.add_argument("--benchmark", choices=["roget", "philosophers", "bibliographic", "custom"])
    p.add_argument("--config")
    p.add_argument("--truth")
    p.add_argument("--cache-dir")
    p.add_argument("--schema")
    p.add_argument("--prompt")
    p.add_argument("--oracle-cache")
    p.add_argument("--live-oracle", action="store_true", help="look up oracle cache misses online")
    p.add_argument("--threshold", type=float)
    p.add_argument("--embedding", choices=["hashing", "http", "subprocess"])
    p.add_argument("--embedding-url")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-workers", type=int)
    p.add_argument("--offline", action="store_true")
    p.add_argument("--no-ml", action="store_true", help="skip the embedding and classifier stage")
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("audit-citations", help="citation recall, DOI validity and field comparison")
    p.add_argument("truth")
    p.add_argument("generated")
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=80.0)
    p.add_argument("--csv-dir")
    p.add_argument("--graph-dir")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_audit_citations)

    p = sub.add_parser("report", help="print the text summary of a JSON report")
    p.add_argument("report")
    p.set_defaults(func=cmd_report)
    return ap


INPUT_ERRORS = (InputError, ConfigError, KGError, NotRogetFormat, SampleTooLarge, SchemaMismatch,
                json.JSONDecodeError, UnicodeDecodeError, FileNotFoundError, IsADirectoryError, KeyError)
PROVIDER_ERRORS = (CacheMiss, CacheCorrupt, ProviderExhausted, AuthMissing, GatewayError, ProviderUnavailable)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PROVIDER_ERRORS as exc:
        print(f"kgstress: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except INPUT_ERRORS as exc:
        print(f"kgstress: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"kgstress: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
