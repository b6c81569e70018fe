"""Three-stage benchmark runs: cached acquisition, field scoring, classifier.

Truth inputs per benchmark:

* ``roget``: RogetHead JSONL (the sampled Heads).
* ``philosophers`` and custom benchmarks: JSONL of
  ``{"entity_id", "prompt_vars": {...}, "fields": {name: value or list}}``.
* ``bibliographic``: BibRecord JSONL.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .citations import BibRecord, audit, bib_pairs, citation_graph, citation_key, read_bib_jsonl
from .embeddings import EmbeddingProvider
from .gateway import Gateway, QuerySpec, Unparseable, load_prompt, parse_structured, render_prompt
from .graph import normalize_label
from .ml_eval import (
    SingleClassTraining,
    TrainConfig,
    classifier_metrics,
    field_similarity,
    samples_from_run,
    train,
)
from .record_eval import (
    BenchmarkSchema,
    EvaluationRun,
    Oracle,
    RecordPair,
    as_list,
    bundled_schema,
    evaluate_records,
)
from .roget import POS_FIELDS, RogetHead, head_to_graph, read_heads_jsonl
from .stress import StressConfig, run_stress_test

logger = logging.getLogger(__name__)

ROGET_FIELDS = dict(zip(("noun_list", "verb_list", "adjective_list", "adverb_list"), POS_FIELDS))
BIB_RESPONSE_FIELDS = ("date", "doi", "type", "main_concepts", "research_areas", "times_cited", "citations")


@dataclass
class TruthRecord:
    entity_id: str
    prompt_vars: dict[str, str]
    fields: dict[str, list[str]]

    @classmethod
    def from_dict(cls, d: Mapping) -> TruthRecord:
        return cls(
            str(d["entity_id"]),
            {k: str(v) for k, v in d.get("prompt_vars", {}).items()},
            {k: as_list(v) for k, v in d.get("fields", {}).items()},
        )

    def to_dict(self) -> dict:
        return {"entity_id": self.entity_id, "prompt_vars": self.prompt_vars, "fields": self.fields}


def read_truth_jsonl(path: str | Path) -> list[TruthRecord]:
    with open(path, encoding="utf-8") as fh:
        return [TruthRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


@dataclass
class Acquisition:
    parsed: list[dict[str, list[str]] | None]
    unparseable: list[str] = field(default_factory=list)
    from_cache: int = 0


def acquire(gateway: Gateway, specs: Sequence[QuerySpec], ids: Sequence[str]) -> Acquisition:
    """Stage 1. Unparseable responses are recorded and their record scores as all-empty."""
    responses = gateway.query_many(specs)
    out = Acquisition([])
    for spec, resp, eid in zip(specs, responses, ids):
        out.from_cache += resp.from_cache
        try:
            out.parsed.append(parse_structured(resp.raw, spec.response_schema))
        except Unparseable:
            logger.warning("unparseable response for %s", eid)
            out.unparseable.append(eid)
            out.parsed.append(None)
    return out


def _spec(template: str, fields: Sequence[str], model: str, **values) -> QuerySpec:
    return QuerySpec(prompt=render_prompt(template, **values), model=model, response_schema=tuple(fields))


# -- roget ---------------------------------------------------------------------

def roget_queries(heads: Sequence[RogetHead], model: str) -> list[QuerySpec]:
    template = load_prompt("roget")
    fields = [*ROGET_FIELDS, "cross_references"]
    return [_spec(template, fields, model, number=h.number, title=h.title) for h in heads]


def _head_number(value: str) -> int | None:
    m = re.match(r"^\s*#?\s*(\d{1,4})", value)
    return int(m.group(1)) if m else None


def roget_generated_heads(heads: Sequence[RogetHead], parsed: Sequence[dict | None]) -> list[RogetHead]:
    """Generated Heads keep the truth number and title so Head nodes line up."""
    out = []
    for h, resp in zip(heads, parsed):
        resp = resp or {}
        lists = {}
        for key, pos in ROGET_FIELDS.items():
            terms = []
            for t in resp.get(key, []):
                label = normalize_label(t)
                if label and label not in terms:
                    terms.append(label)
            lists[pos] = terms
        refs = []
        for r in resp.get("cross_references", []):
            n = _head_number(r)
            if n is not None and n not in refs:
                refs.append(n)
        out.append(RogetHead(h.number, h.title, cross_refs=refs, **lists))
    return out


def roget_pairs(truth: Sequence[RogetHead], generated: Sequence[RogetHead]) -> list[RecordPair]:
    pairs = []
    for t, g in zip(truth, generated):
        values = {key: (t.terms(pos), g.terms(pos)) for key, pos in ROGET_FIELDS.items()}
        values["cross_references"] = ([str(n) for n in t.cross_refs], [str(n) for n in g.cross_refs])
        pairs.append(RecordPair(str(t.number), values))
    return pairs


# -- philosophers and custom ---------------------------------------------------

def record_queries(records: Sequence[TruthRecord], template: str, schema: BenchmarkSchema, model: str) -> list[QuerySpec]:
    return [_spec(template, schema.field_names, model, **r.prompt_vars) for r in records]


def record_pairs(records: Sequence[TruthRecord], parsed: Sequence[dict | None], schema: BenchmarkSchema) -> list[RecordPair]:
    pairs = []
    for r, resp in zip(records, parsed):
        resp = resp or {}
        pairs.append(RecordPair(r.entity_id, {n: (r.fields.get(n, []), resp.get(n, [])) for n in schema.field_names}))
    return pairs


# -- bibliographic -------------------------------------------------------------

def bib_queries(records: Sequence[BibRecord], model: str) -> list[QuerySpec]:
    template = load_prompt("bibliographic")
    return [
        _spec(template, BIB_RESPONSE_FIELDS, model, authors="; ".join(r.authors), title=r.title, year=r.year)
        for r in records
    ]


def parse_citation(text: str) -> str:
    parts = [p.strip() for p in text.split("|")]
    if len(parts) == 3:
        return citation_key(parts[0], parts[1], parts[2])
    return " ".join(text.lower().split())


def bib_generated(truth: Sequence[BibRecord], parsed: Sequence[dict | None]) -> list[BibRecord]:
    out = []
    for t, resp in zip(truth, parsed):
        resp = resp or {}

        def first(name):
            vals = resp.get(name, [])
            return vals[0] if vals else None

        try:
            cited = int(float(first("times_cited"))) if first("times_cited") is not None else None
        except ValueError:
            cited = None
        if cited is not None and cited < 0:
            cited = None
        cites = []
        for c in resp.get("citations", []):
            key = parse_citation(c)
            if key and key not in cites:
                cites.append(key)
        out.append(
            BibRecord(
                t.paper_id,
                authors=list(t.authors),
                title=t.title,
                year=t.year,
                doi=first("doi"),
                pub_type=first("type") or "",
                date=first("date"),
                concepts=resp.get("main_concepts", []),
                research_areas=resp.get("research_areas", []),
                times_cited=cited,
                citations=cites,
            )
        )
    return out


# -- stage 3 -------------------------------------------------------------------

def similarity_profile(pairs: Sequence[RecordPair], provider: EmbeddingProvider) -> dict[str, dict[str, float]]:
    """Per-field mean and standard deviation of list-level cosine similarity."""
    names = sorted({n for p in pairs for n in p.field_values})
    out = {}
    for name in names:
        sims = [field_similarity(*p.field_values[name], provider) for p in pairs if name in p.field_values]
        out[name] = {"mean": float(np.mean(sims)), "std": float(np.std(sims)), "n": len(sims)}
    return out


def classifier_stage(run: EvaluationRun, provider: EmbeddingProvider, config: TrainConfig) -> dict:
    samples = samples_from_run(run, provider)
    positives = sum(y for _, y in samples)
    block = {"samples": len(samples), "positives": positives, "config": config.__dict__.copy()}
    try:
        model = train(samples, config)
    except SingleClassTraining as exc:
        block["error"] = str(exc)
        return block
    block["metrics"] = classifier_metrics(model, model.holdout(samples))
    block["weights"] = model.weights
    block["bias"] = model.bias
    return block


# -- whole runs ----------------------------------------------------------------

@dataclass
class BenchmarkResult:
    benchmark: str
    pairs: list[RecordPair]
    evaluation: EvaluationRun
    acquisition: Acquisition
    extras: dict = field(default_factory=dict)


def run_roget(truth_path, gateway: Gateway, model: str, threshold: float) -> BenchmarkResult:
    heads = read_heads_jsonl(truth_path)
    acq = acquire(gateway, roget_queries(heads, model), [str(h.number) for h in heads])
    generated = roget_generated_heads(heads, acq.parsed)
    pairs = roget_pairs(heads, generated)
    run = evaluate_records(pairs, bundled_schema("roget"), threshold)
    report = run_stress_test(head_to_graph(generated, "llm"), head_to_graph(heads, "roget"), StressConfig())
    return BenchmarkResult("roget", pairs, run, acq, {"stress": report.to_dict()})


def run_records(truth_path, schema: BenchmarkSchema, template: str, gateway: Gateway, model: str,
                threshold: float, oracle: Oracle | None) -> BenchmarkResult:
    records = read_truth_jsonl(truth_path)
    acq = acquire(gateway, record_queries(records, template, schema, model), [r.entity_id for r in records])
    pairs = record_pairs(records, acq.parsed, schema)
    return BenchmarkResult(schema.name, pairs, evaluate_records(pairs, schema, threshold, oracle), acq)


def run_bibliographic(truth_path, gateway: Gateway, model: str, threshold: float) -> BenchmarkResult:
    truth = read_bib_jsonl(truth_path)
    acq = acquire(gateway, bib_queries(truth, model), [r.paper_id for r in truth])
    generated = bib_generated(truth, acq.parsed)
    pairs = bib_pairs(truth, generated)
    run = evaluate_records(pairs, bundled_schema("bibliographic"), threshold)
    extras = {"audit": audit(truth, generated, threshold)}
    stress = run_stress_test(citation_graph(generated, "llm"), citation_graph(truth, "reference"), StressConfig())
    extras["citation_graph_stress"] = stress.to_dict()
    return BenchmarkResult("bibliographic", pairs, run, acq, extras)
