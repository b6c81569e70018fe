"""Field-level evaluation of generated records against ground truth.

Each generated value is fuzzy-matched to the truth list of the same field.
Unmatched generated values are false positives; an external knowledge-base
oracle splits them into genuine extra knowledge and hallucinations.
"""
from __future__ import annotations

import json
import logging
import re
import threading
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

from .matching import DEFAULT_THRESHOLD, MatchResult, match_lists, normalize_list, token_set_score

logger = logging.getLogger(__name__)

FIELD_TYPES = ("list", "scalar", "date", "count")


class SchemaMismatch(ValueError):
    pass


class OracleUnavailable(RuntimeError):
    pass


# -- schema --------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    name: str
    type: str = "list"
    match: str = "fuzzy"
    oracle: bool | None = None

    def __post_init__(self) -> None:
        if self.type not in FIELD_TYPES:
            raise SchemaMismatch(f"field {self.name!r}: unknown type {self.type!r}")
        if self.match not in ("fuzzy", "exact"):
            raise SchemaMismatch(f"field {self.name!r}: unknown match mode {self.match!r}")

    @property
    def uses_oracle(self) -> bool:
        # dates and counts have no knowledge-base entity to look up
        if self.oracle is not None:
            return self.oracle
        return self.type in ("list", "scalar")


@dataclass(frozen=True)
class BenchmarkSchema:
    name: str
    fields: tuple[FieldSpec, ...]

    @property
    def field_names(self) -> list[str]:
        return [f.name for f in self.fields]

    def field(self, name: str) -> FieldSpec:
        for f in self.fields:
            if f.name == name:
                return f
        raise SchemaMismatch(f"field {name!r} not in schema {self.name!r}")

    @classmethod
    def from_dict(cls, d: Mapping) -> BenchmarkSchema:
        try:
            fields = tuple(FieldSpec(**f) for f in d["fields"])
        except (KeyError, TypeError) as exc:
            raise SchemaMismatch(f"malformed schema: {exc}") from None
        return cls(d.get("name", "custom"), fields)

    @classmethod
    def load(cls, path: str | Path) -> BenchmarkSchema:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return {"name": self.name, "fields": [asdict(f) for f in self.fields]}


def bundled_schema(name: str) -> BenchmarkSchema:
    from importlib.resources import files

    return BenchmarkSchema.from_dict(json.loads((files("kgstress") / "data" / "schemas" / f"{name}.json").read_text()))


# -- records -------------------------------------------------------------------

def as_list(value: object) -> list[str]:
    """Coerce a scalar, list or missing value into a list of strings."""
    if value is None:
        return []
    if isinstance(value, (list, tuple, set)):
        return [_scalar_text(v) for v in value if v is not None and _scalar_text(v) != ""]
    text = _scalar_text(value)
    return [text] if text else []


def _scalar_text(v: object) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    if isinstance(v, (dict,)):
        return json.dumps(v, sort_keys=True)
    return str(v).strip()


@dataclass
class RecordPair:
    entity_id: str
    field_values: dict[str, tuple[list[str], list[str]]]

    def to_dict(self) -> dict:
        return {
            "entity_id": self.entity_id,
            "fields": {k: {"truth": t, "generated": g} for k, (t, g) in self.field_values.items()},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> RecordPair:
        fields = {}
        for name, v in d.get("fields", {}).items():
            fields[name] = (as_list(v.get("truth")), as_list(v.get("generated")))
        return cls(str(d["entity_id"]), fields)


def read_pairs_jsonl(path: str | Path) -> list[RecordPair]:
    with open(path, encoding="utf-8") as fh:
        return [RecordPair.from_dict(json.loads(line)) for line in fh if line.strip()]


def write_pairs_jsonl(pairs: Iterable[RecordPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(p.to_dict(), ensure_ascii=False) + "\n")


# -- oracle --------------------------------------------------------------------

class Oracle(Protocol):
    def lookup(self, values: Sequence[str]) -> dict[str, bool]: ...


@dataclass
class OracleVerdict:
    value: str
    known: bool


class DBpediaLookup:
    """Label lookup against the public DBpedia Lookup service."""

    endpoint = "https://lookup.dbpedia.org/api/search"

    def __init__(self, timeout: float = 10.0, endpoint: str | None = None):
        self.timeout = timeout
        if endpoint:
            self.endpoint = endpoint

    def lookup(self, values: Sequence[str]) -> dict[str, bool]:
        out = {}
        for value in values:
            query = urllib.parse.urlencode({"query": value, "format": "JSON", "maxResults": 5})
            try:
                with urllib.request.urlopen(f"{self.endpoint}?{query}", timeout=self.timeout) as resp:
                    payload = json.load(resp)
            except (urllib.error.URLError, TimeoutError, json.JSONDecodeError, OSError) as exc:
                raise OracleUnavailable(f"DBpedia lookup failed: {exc}") from None
            labels = []
            for doc in payload.get("docs", []):
                labels += [re.sub(r"<[^>]+>", "", lab).lower().strip() for lab in doc.get("label", [])]
            out[value] = value.lower().strip() in labels
        return out


class CachedOracle:
    """Replayable oracle: verdicts live in a JSONL file of ``{"value", "known"}``.

    Misses go to ``backend`` unless ``cache_only``; a miss that cannot be
    resolved fails the whole batch with :class:`OracleUnavailable`.
    """

    def __init__(self, path: str | Path | None = None, backend: Oracle | None = None, cache_only: bool = False):
        self.path = Path(path) if path else None
        self.backend = backend
        self.cache_only = cache_only
        self._lock = threading.Lock()
        self._verdicts: dict[str, bool] = {}
        if self.path and self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    d = json.loads(line)
                    self._verdicts[normalize_list([d["value"]])[0]] = bool(d["known"])

    def __len__(self) -> int:
        return len(self._verdicts)

    def lookup(self, values: Sequence[str]) -> dict[str, bool]:
        keys = {v: (normalize_list([v]) or [""])[0] for v in values}
        missing = sorted({k for k in keys.values() if k not in self._verdicts})
        if missing:
            if self.cache_only or self.backend is None:
                raise OracleUnavailable(f"{len(missing)} value(s) not in oracle cache")
            fetched = self.backend.lookup(missing)
            with self._lock:
                self._verdicts.update(fetched)
                if self.path:
                    with open(self.path, "a", encoding="utf-8") as fh:
                        for value in missing:
                            fh.write(json.dumps({"value": value, "known": fetched[value]}, ensure_ascii=False) + "\n")
        return {v: self._verdicts[k] for v, k in keys.items()}


@dataclass
class HallucinationLabels:
    hallucinated: list[str] = field(default_factory=list)
    extra_knowledge: list[str] = field(default_factory=list)
    unverified: list[str] = field(default_factory=list)


def label_hallucinations(fp_values: Sequence[str], oracle: Oracle | None) -> HallucinationLabels:
    """Split false positives by oracle verdict. Without an oracle every value
    is a hallucination; if the oracle is unreachable the batch is unverified."""
    labels = HallucinationLabels()
    if not fp_values:
        return labels
    if oracle is None:
        labels.hallucinated = list(fp_values)
        return labels
    try:
        verdicts = oracle.lookup(list(fp_values))
    except OracleUnavailable as exc:
        logger.warning("oracle unavailable, %d value(s) left unverified: %s", len(fp_values), exc)
        labels.unverified = list(fp_values)
        return labels
    for v in fp_values:
        (labels.extra_knowledge if verdicts[v] else labels.hallucinated).append(v)
    return labels


# -- evaluation ----------------------------------------------------------------

@dataclass
class FieldEvalResult:
    field: str
    tp: int = 0
    fp: int = 0
    fn: int = 0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    accuracy: float = 0.0
    hallucinated: int = 0
    extra_knowledge: int = 0
    unverified: int = 0
    records: int = 0

    @property
    def generated(self) -> int:
        return self.tp + self.fp

    @property
    def hallucination_rate(self) -> float:
        """Hallucinated share of generated values; unverified values are left out."""
        checked = self.generated - self.unverified
        return self.hallucinated / checked if checked else 0.0

    def to_dict(self) -> dict:
        return asdict(self) | {"hallucination_rate": self.hallucination_rate}


@dataclass
class ValueLabel:
    """One generated value with its closest truth value and its Stage-2 label."""

    entity_id: str
    field: str
    generated: str
    truth: str
    score: float
    label: str  # matched | hallucinated | extra_knowledge | unverified

    @property
    def is_hallucination(self) -> bool:
        return self.label == "hallucinated"


@dataclass
class EvaluationRun:
    fields: list[FieldEvalResult]
    values: list[ValueLabel]

    def by_field(self) -> dict[str, FieldEvalResult]:
        return {r.field: r for r in self.fields}


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Precision, recall, F1 with every 0/0 resolved to 0."""
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


_ISO_DATE = re.compile(r"^-?\d{1,4}(-\d{2}){0,2}")


def _date_score(a: str, b: str) -> float:
    if _ISO_DATE.match(a) and _ISO_DATE.match(b) and (a.startswith(b) or b.startswith(a)):
        return 100.0
    return token_set_score(a, b)


def _exact_score(a: str, b: str) -> float:
    return 100.0 if a == b else 0.0


def _count_score(a: str, b: str) -> float:
    try:
        return 100.0 if int(float(a)) == int(float(b)) else 0.0
    except ValueError:
        return _exact_score(a, b)


def compare_field(spec: FieldSpec, truth: Sequence[str], generated: Sequence[str], threshold: float) -> MatchResult:
    if spec.type == "count":
        scorer = _count_score
    elif spec.match == "exact":
        scorer = _exact_score
    elif spec.type == "date":
        scorer = _date_score
    else:
        scorer = token_set_score
    return match_lists(truth, generated, threshold, scorer)


def evaluate_records(
    pairs: Sequence[RecordPair],
    schema: BenchmarkSchema,
    threshold: float = DEFAULT_THRESHOLD,
    oracle: Oracle | None = None,
) -> EvaluationRun:
    """Per-field macro-averaged P/R/F1 and accuracy plus per-value labels.

    Accuracy is the share of records whose normalized truth and generated
    lists are equal as sets.
    """
    names = set(schema.field_names)
    for pair in pairs:
        extra = set(pair.field_values) - names
        if extra:
            raise SchemaMismatch(f"record {pair.entity_id!r} has fields outside the schema: {sorted(extra)}")

    results, values = [], []
    for spec in schema.fields:
        res = FieldEvalResult(spec.name, records=len(pairs))
        sums = [0.0, 0.0, 0.0, 0.0]
        fps: list[tuple[int, str]] = []
        field_values: list[ValueLabel] = []
        for pair in pairs:
            truth, gen = pair.field_values.get(spec.name, ([], []))
            m = compare_field(spec, truth, gen, threshold)
            res.tp += m.tp
            res.fp += m.fp
            res.fn += m.fn
            p, r, f = prf(m.tp, m.fp, m.fn)
            sums[0] += p
            sums[1] += r
            sums[2] += f
            sums[3] += set(normalize_list(truth)) == set(normalize_list(gen))
            for t, g, s in m.matched_pairs:
                field_values.append(ValueLabel(pair.entity_id, spec.name, g, t, s, "matched"))
            norm_truth = normalize_list(truth)
            for g in m.unmatched_generated:
                best_t, best_s = _closest(g, norm_truth)
                fps.append((len(field_values), g))
                field_values.append(ValueLabel(pair.entity_id, spec.name, g, best_t, best_s, "hallucinated"))
        labels = label_hallucinations(sorted({g for _, g in fps}), oracle if spec.uses_oracle else None)
        verdict = {v: "hallucinated" for v in labels.hallucinated}
        verdict |= {v: "extra_knowledge" for v in labels.extra_knowledge}
        verdict |= {v: "unverified" for v in labels.unverified}
        for idx, g in fps:
            field_values[idx].label = verdict[g]
        res.hallucinated = sum(1 for _, g in fps if verdict[g] == "hallucinated")
        res.extra_knowledge = sum(1 for _, g in fps if verdict[g] == "extra_knowledge")
        res.unverified = sum(1 for _, g in fps if verdict[g] == "unverified")
        n = len(pairs)
        if n:
            res.precision, res.recall, res.f1, res.accuracy = (x / n for x in sums)
        results.append(res)
        values.extend(field_values)
    return EvaluationRun(results, values)


def _closest(value: str, truth: Sequence[str]) -> tuple[str, float]:
    best, best_s = "", -1.0
    for t in truth:
        s = token_set_score(t, value)
        if s > best_s:
            best, best_s = t, s
    return best, max(best_s, 0.0)


def evaluate_benchmark(
    pairs: Sequence[RecordPair],
    schema: BenchmarkSchema,
    threshold: float = DEFAULT_THRESHOLD,
    oracle: Oracle | None = None,
) -> list[FieldEvalResult]:
    return evaluate_records(pairs, schema, threshold, oracle).fields


def format_field_table(results: Sequence[FieldEvalResult]) -> str:
    head = f"{'Field':<24}{'Precision':>10}{'Recall':>10}{'F1':>10}{'Accuracy':>10}{'Hall.Rate':>11}"
    rows = [head, "-" * len(head)]
    for r in results:
        rows.append(
            f"{r.field:<24}{r.precision:>10.3f}{r.recall:>10.3f}{r.f1:>10.3f}{r.accuracy:>10.2f}"
            f"{r.hallucination_rate:>11.3f}"
        )
    return "\n".join(rows) + "\n"
