"""Parser for the Project Gutenberg plain-text Roget's Thesaurus (1911).

Head entries start with a marker such as ``#1. Existence.--N. existence,
being, ...``. Within a Head, part-of-speech sections begin with ``N.``,
``V.``, ``Adj.`` and ``Adv.`` at the start of a paragraph; other sections
(``Phr.``, ``Int.``, ...) are read past but not kept. Bare numerals in the
body are references to other Heads.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .graph import EdgeKind, KnowledgeGraph, NodeKind, normalize_label
from .rng import shuffle

logger = logging.getLogger(__name__)


class NotRogetFormat(ValueError):
    pass


class SampleTooLarge(ValueError):
    pass


POS_FIELDS = ("nouns", "verbs", "adjectives", "adverbs")
_POS_EDGE = {
    "nouns": EdgeKind.HAS_NOUN,
    "verbs": EdgeKind.HAS_VERB,
    "adjectives": EdgeKind.HAS_ADJ,
    "adverbs": EdgeKind.HAS_ADV,
}
_MARKER_POS = {"N": "nouns", "V": "verbs", "Adj": "adjectives", "Adv": "adverbs"}


@dataclass
class RogetHead:
    number: int
    title: str
    nouns: list[str] = field(default_factory=list)
    verbs: list[str] = field(default_factory=list)
    adjectives: list[str] = field(default_factory=list)
    adverbs: list[str] = field(default_factory=list)
    cross_refs: list[int] = field(default_factory=list)

    @property
    def node_label(self) -> str:
        """Graph label of the Head node; numbered so it never collides with a term."""
        return f"{self.number}. {self.title}"

    def terms(self, pos: str) -> list[str]:
        return getattr(self, pos)

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> RogetHead:
        return cls(
            number=int(d["number"]),
            title=d["title"],
            **{pos: list(d.get(pos, [])) for pos in POS_FIELDS},
            cross_refs=[int(x) for x in d.get("cross_refs", [])],
        )


# -- term cleaning -------------------------------------------------------------

_PAREN = re.compile(r"\([^()]*\)")
_BRACKET = re.compile(r"\[[^\[\]]*\]")
_ETC = re.compile(r"&c\.?(\s*(?:adj|adv|n|v|vb)\.)?", re.IGNORECASE)
_NUMERAL = re.compile(r"\b\d+[a-z]?\b")
_STRAY = re.compile(r"[()\[\]]|\d")
_EDGE_PUNCT = re.compile(r"^[\s.,;:!?\-\"'`]+|[\s.,;:!?\-\"'`]+$")


def clean_term(raw: str) -> str | None:
    """Strip annotations, ``&c.`` markers and numerals; lowercase; trim.

    Returns ``None`` when nothing is left.
    """
    s = raw
    while True:
        t = _PAREN.sub(" ", s)
        if t == s:
            break
        s = t
    while True:
        t = _BRACKET.sub(" ", s)
        if t == s:
            break
        s = t
    # unbalanced leftovers from a split inside an annotation
    s = re.sub(r"\(.*$", " ", s)
    s = re.sub(r"^[^(]*\)", " ", s)
    s = re.sub(r"\[.*$", " ", s)
    s = re.sub(r"^[^\[]*\]", " ", s)
    s = _ETC.sub(" ", s)
    s = s.replace("&", " ")
    s = _NUMERAL.sub(" ", s)
    s = _STRAY.sub(" ", s)
    s = normalize_label(s)
    s = _EDGE_PUNCT.sub("", s)
    s = normalize_label(s)
    return s or None


def split_terms(text: str) -> list[str]:
    """Split on commas, semicolons and full stops that sit outside brackets."""
    parts, buf, depth = [], [], 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth = max(0, depth - 1)
        if depth == 0 and (ch in ",;" or (ch == "." and _is_sentence_end(text, i))):
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    return parts


def _is_sentence_end(text: str, i: int) -> bool:
    # "&c." and abbreviations like "adj." keep their full stop
    before = text[max(0, i - 4):i]
    if before.endswith("&c") or re.search(r"(?:^|\W)(?:adj|adv|n|v|vb|Lat|Fr|Gr|It|Ger|Sp|obs\d?)$", before):
        return False
    nxt = text[i + 1:i + 2]
    return nxt == "" or nxt.isspace()


# -- parsing -------------------------------------------------------------------

_HEAD = re.compile(r"^\s*#(\d+)([a-z]?)\.\s*(.*)$")
_SECTION_HEADER = re.compile(r"^\s*(CLASS\s+[IVXL]+|SECTION\s+[IVXL]+|DIVISION\s+[IVXL]+)\b")
_POS_MARKER = re.compile(r"(?:^|(?<=--))[ \t]*(N|V|Adj|Adv|Phr|Int|Prep|Conj|Pron|Wds)\.\s+", re.MULTILINE)
_REF = re.compile(r"(?<![\w.])(\d{1,4})[a-z]?\b")


@dataclass
class ParseDiagnostics:
    skipped: list[str] = field(default_factory=list)
    duplicates: list[int] = field(default_factory=list)


def decode_text(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError:
        return data.decode("latin-1")


def parse_thesaurus(data: bytes | str, diagnostics: ParseDiagnostics | None = None) -> list[RogetHead]:
    """Parse every valid Head.

    A Head is valid when its marker carries a number in 1..1000 and at least
    one of the four part-of-speech lists is non-empty. Lettered variants of
    a number already seen (``#450a``) are skipped as duplicates.
    """
    text = decode_text(data).replace("\r\n", "\n").replace("\r", "\n")
    diagnostics = diagnostics if diagnostics is not None else ParseDiagnostics()
    blocks: list[tuple[int, str, list[str]]] = []
    current: tuple[int, str, list[str]] | None = None
    for line in text.split("\n"):
        m = _HEAD.match(line)
        if m:
            current = (int(m.group(1)), m.group(2), [m.group(3)])
            blocks.append(current)
        elif _SECTION_HEADER.match(line) or line.strip().startswith("*** END"):
            current = None
        elif current is not None:
            current[2].append(line)
    if not blocks:
        raise NotRogetFormat("no Head markers ('#<number>.') found")

    heads: list[RogetHead] = []
    seen: set[int] = set()
    for number, suffix, lines in blocks:
        head = _parse_head(number, lines)
        label = f"#{number}{suffix}"
        if not 1 <= number <= 1000:
            diagnostics.skipped.append(f"{label}: number out of range")
        elif head is None:
            diagnostics.skipped.append(f"{label}: no noun/verb/adjective/adverb terms")
        elif number in seen:
            diagnostics.duplicates.append(number)
        else:
            seen.add(number)
            heads.append(head)
    for msg in diagnostics.skipped:
        logger.info("skipped Head %s", msg)
    return heads


def _parse_head(number: int, lines: list[str]) -> RogetHead | None:
    first = lines[0]
    title_part, sep, rest = first.partition("--")
    if not sep:
        # title ends at the first full stop after the marker
        title_part, _, rest = first.partition(".")
    title = normalize_label(re.sub(r"[\[\]]", "", title_part).strip().rstrip("."))
    body = "\n".join([("--" + rest) if sep else rest] + lines[1:])
    refs: list[int] = []
    for m in _REF.finditer(_BRACKET.sub(" ", body)):
        ref = int(m.group(1))
        if 1 <= ref <= 1000 and ref != number and ref not in refs:
            refs.append(ref)

    lists: dict[str, list[str]] = {pos: [] for pos in POS_FIELDS}
    pieces = _POS_MARKER.split(body)
    # pieces = [prefix, marker, text, marker, text, ...]
    for marker, chunk in zip(pieces[1::2], pieces[2::2]):
        pos = _MARKER_POS.get(marker)
        if pos is None:
            continue
        flat = re.sub(r"\s+", " ", chunk.replace("--", " "))
        for raw in split_terms(flat):
            term = clean_term(raw)
            if term and term not in lists[pos]:
                lists[pos].append(term)
    if not any(lists.values()) or not title:
        return None
    return RogetHead(number, title, **lists, cross_refs=refs)


def sample_heads(heads: Sequence[RogetHead], n: int = 30, seed: int = 42) -> list[RogetHead]:
    """First ``n`` Heads of a SplitMix64-seeded Fisher-Yates shuffle."""
    if n < 0 or n > len(heads):
        raise SampleTooLarge(f"cannot sample {n} of {len(heads)} heads")
    pool = sorted(heads, key=lambda h: h.number)
    return list(shuffle(pool, seed))[:n]


@dataclass
class GraphBuildStats:
    dropped_cross_refs: int = 0


def head_to_graph(
    heads: Iterable[RogetHead], name: str = "roget", stats: GraphBuildStats | None = None
) -> KnowledgeGraph:
    """Head nodes, Term nodes with HAS_* edges, and CROSS_REF edges between
    Heads of the given set; references leaving the set are counted and dropped."""
    heads = list(heads)
    stats = stats if stats is not None else GraphBuildStats()
    g = KnowledgeGraph(name=name, schema_checked=True)
    by_number = {h.number: h for h in heads}
    for h in heads:
        g.add_node(h.node_label, NodeKind.HEAD)
    for h in heads:
        for pos in POS_FIELDS:
            for term in h.terms(pos):
                node = g.add_node(term, NodeKind.TERM)
                g.add_edge(h.node_label, node, _POS_EDGE[pos])
        for ref in h.cross_refs:
            target = by_number.get(ref)
            if target is None:
                stats.dropped_cross_refs += 1
            elif target.number != h.number:
                g.add_edge(h.node_label, target.node_label, EdgeKind.CROSS_REF)
    return g


def read_heads_jsonl(path: str | Path) -> list[RogetHead]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(RogetHead.from_dict(json.loads(line)))
    return out


def write_heads_jsonl(heads: Iterable[RogetHead], path: str | Path) -> None:
    text = "".join(h.to_json() + "\n" for h in heads)
    Path(path).write_text(text, encoding="utf-8")
