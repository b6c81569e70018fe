"""Bibliographic integrity checks: DOI syntax, citation recall and field comparison."""
from __future__ import annotations

import enum
import json
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .graph import EdgeKind, KnowledgeGraph, NodeKind, normalize_label
from .matching import DEFAULT_THRESHOLD, match_lists
from .record_eval import BenchmarkSchema, FieldEvalResult, RecordPair, SchemaMismatch, bundled_schema, evaluate_records

_DOI = re.compile(r"^10\.\d{4,9}/\S+$")


class DoiStatus(str, enum.Enum):
    VALID = "Valid"
    BROKEN = "Broken"
    EMPTY = "Empty"


def validate_doi(s: str | None) -> DoiStatus:
    if s is None or not str(s).strip():
        return DoiStatus.EMPTY
    return DoiStatus.VALID if _DOI.match(str(s).strip()) else DoiStatus.BROKEN


def doi_histogram(dois: Iterable[str | None]) -> dict[str, int]:
    counts = Counter(validate_doi(d).value for d in dois)
    return {status.value: counts.get(status.value, 0) for status in DoiStatus}


def citation_key(author: str, title: str, year: int | str | None) -> str:
    """``surname|title|year``, lowercased with whitespace collapsed.

    ``author`` may be "Surname, Given" or "Given Surname".
    """
    author = " ".join(str(author or "").split())
    if "," in author:
        surname = author.split(",", 1)[0]
    else:
        surname = author.rsplit(" ", 1)[-1] if author else ""
    parts = [surname, str(title or ""), "" if year is None else str(year)]
    return "|".join(" ".join(p.lower().split()) for p in parts)


def _key_text(key: str) -> str:
    # the separators would otherwise glue surname, title and year into one token
    return key.replace("|", " ")


@dataclass
class BibRecord:
    paper_id: str
    authors: list[str] = field(default_factory=list)
    title: str = ""
    year: int | None = None
    doi: str | None = None
    pub_type: str = ""
    date: str | None = None
    concepts: list[str] = field(default_factory=list)
    research_areas: list[str] = field(default_factory=list)
    times_cited: int | None = None
    citations: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.year is not None and not 1400 <= int(self.year) <= 2100:
            raise ValueError(f"{self.paper_id}: year {self.year} outside 1400..2100")
        if self.times_cited is not None and int(self.times_cited) < 0:
            raise ValueError(f"{self.paper_id}: negative times_cited")

    @classmethod
    def from_dict(cls, d: Mapping) -> BibRecord:
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in d.items() if k in known})

    def to_dict(self) -> dict:
        return asdict(self)


def read_bib_jsonl(path: str | Path) -> list[BibRecord]:
    with open(path, encoding="utf-8") as fh:
        return [BibRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


def write_bib_jsonl(records: Iterable[BibRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")


@dataclass
class CitationRecall:
    recall: float
    omission: float
    papers_with_citations: int
    papers: int
    truth_total: int
    generated_total: int
    matched: int

    @property
    def papers_with_citations_share(self) -> float:
        return self.papers_with_citations / self.papers if self.papers else 0.0

    def to_dict(self) -> dict:
        return asdict(self) | {"papers_with_citations_share": self.papers_with_citations_share}


def citation_recall(
    truth: Mapping[str, Sequence[str]],
    generated: Mapping[str, Sequence[str]],
    threshold: float = DEFAULT_THRESHOLD,
) -> CitationRecall:
    """Per-paper one-to-one fuzzy matching of citation keys.

    Recall is pooled over all truth citations; with no truth citations at all
    it is 1.0. Papers present only on the generated side are ignored.
    """
    matched = truth_total = generated_total = with_citations = 0
    for paper, cites in truth.items():
        gen = list(generated.get(paper, ()))
        t_keys = [_key_text(c) for c in cites]
        g_keys = [_key_text(c) for c in gen]
        res = match_lists(t_keys, g_keys, threshold)
        matched += res.tp
        truth_total += res.tp + res.fn
        generated_total += res.tp + res.fp
        with_citations += bool(res.tp + res.fp)
    # pooled recall; omission is its exact complement
    recall = matched / truth_total if truth_total else 1.0
    return CitationRecall(recall, 1.0 - recall, with_citations, len(truth), truth_total, generated_total, matched)


_BIB_FIELDS = {
    "date": lambda r: r.date,
    "doi": lambda r: r.doi,
    "type": lambda r: r.pub_type,
    "times_cited": lambda r: r.times_cited,
    "main_concepts": lambda r: r.concepts,
    "research_areas": lambda r: r.research_areas,
}


def bib_pairs(truth: Sequence[BibRecord], generated: Sequence[BibRecord]) -> list[RecordPair]:
    """Align records by ``paper_id``; a paper without a generated record scores as all-empty."""
    from .record_eval import as_list

    gen = {r.paper_id: r for r in generated}
    pairs = []
    for t in truth:
        g = gen.get(t.paper_id, BibRecord(t.paper_id))
        pairs.append(RecordPair(t.paper_id, {name: (as_list(get(t)), as_list(get(g))) for name, get in _BIB_FIELDS.items()}))
    return pairs


def bib_field_eval(
    pairs: Sequence[RecordPair],
    schema: BenchmarkSchema | None = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[FieldEvalResult]:
    """Per-field results under the bibliographic schema. No oracle is consulted:
    every unmatched generated value counts as hallucinated."""
    schema = schema or bundled_schema("bibliographic")
    for p in pairs:
        unknown = set(p.field_values) - set(schema.field_names)
        if unknown:
            raise SchemaMismatch(f"{p.entity_id}: unknown fields {sorted(unknown)}")
    return evaluate_records(pairs, schema, threshold, oracle=None).fields


def citation_graph(records: Sequence[BibRecord], name: str = "citations") -> KnowledgeGraph:
    """Papers become Head nodes and cited works Term nodes joined by CITES edges.

    A paper node is labelled with its own citation key, so a paper cited by
    another paper in the set is the same node; it keeps its Head kind.
    """
    g = KnowledgeGraph(name)
    paper_label = {}
    for r in records:
        key = citation_key(r.authors[0] if r.authors else "", r.title, r.year)
        paper_label[r.paper_id] = g.add_node(key if normalize_label(key) else r.paper_id, NodeKind.HEAD)
    for r in records:
        src = paper_label[r.paper_id]
        for cite in r.citations:
            if not normalize_label(cite):
                continue
            dst = normalize_label(cite)
            if dst not in g:
                g.add_node(dst, NodeKind.TERM)
            if dst != src:
                g.add_edge(src, dst, EdgeKind.CITES)
    return g


def concentration(values: Iterable[str], k: int = 10) -> dict:
    """Frequency table with the share held by the ``k`` most frequent values."""
    counts = Counter(v for v in values if v)
    total = sum(counts.values())
    top = counts.most_common(k)
    return {
        "distinct": len(counts),
        "total": total,
        "top": [[v, c] for v, c in top],
        "top_k_share": sum(c for _, c in top) / total if total else 0.0,
    }


def _cited_authors(records: Sequence[BibRecord]) -> list[str]:
    return [c.split("|", 1)[0] for r in records for c in r.citations]


def audit(truth: Sequence[BibRecord], generated: Sequence[BibRecord], threshold: float = DEFAULT_THRESHOLD) -> dict:
    gen = {r.paper_id: r for r in generated}
    recall = citation_recall(
        {r.paper_id: r.citations for r in truth},
        {pid: r.citations for pid, r in gen.items()},
        threshold,
    )
    fields = bib_field_eval(bib_pairs(truth, generated), threshold=threshold)
    return {
        "threshold": threshold,
        "citation_recall": recall.to_dict(),
        "doi_status": {
            "truth": doi_histogram(r.doi for r in truth),
            "generated": doi_histogram(gen[r.paper_id].doi if r.paper_id in gen else None for r in truth),
        },
        "fields": [f.to_dict() for f in fields],
        "cited_author_concentration": {
            "truth": concentration(_cited_authors(truth)),
            "generated": concentration(_cited_authors(generated)),
        },
    }
