"""Freeze reference token-set scores for the matcher tests.

Pairs are drawn from the sampled thesaurus terms and perturbed (typos,
reordering, added or dropped tokens) so that many land near the 80 cut-off.
Scores come from rapidfuzz, which is needed only to run this script.

    python scripts/freeze_oracles.py
"""
from __future__ import annotations

import json
import random
from pathlib import Path

from rapidfuzz import fuzz

ROOT = Path(__file__).resolve().parents[1]
HEADS = ROOT / "fixtures" / "roget" / "sample_heads.jsonl"
OUT = ROOT / "tests" / "data" / "token_set_corpus.json"
ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def typo(rng: random.Random, s: str) -> str:
    if not s:
        return s
    i = rng.randrange(len(s))
    op = rng.choice(("sub", "del", "ins"))
    if op == "sub":
        return s[:i] + rng.choice(ALPHABET) + s[i + 1:]
    if op == "del":
        return s[:i] + s[i + 1:]
    return s[:i] + rng.choice(ALPHABET) + s[i:]


def main() -> None:
    rng = random.Random(20240607)
    terms = []
    for line in HEADS.read_text(encoding="utf-8").splitlines():
        head = json.loads(line)
        for pos in ("nouns", "verbs", "adjectives", "adverbs"):
            terms.extend(head[pos])
    terms = sorted(set(terms))
    multi = [t for t in terms if " " in t]
    pairs = []
    while len(pairs) < 200:
        kind = rng.choice(("typo", "typo2", "shuffle", "extra", "drop", "random", "case", "multi"))
        a = rng.choice(multi if kind in ("shuffle", "drop", "multi") else terms)
        if kind == "typo":
            b = typo(rng, a)
        elif kind == "typo2":
            b = typo(rng, typo(rng, a))
        elif kind == "shuffle":
            toks = a.split()
            rng.shuffle(toks)
            b = " ".join(toks)
        elif kind == "extra":
            b = f"{a} {rng.choice(terms).split()[0]}"
        elif kind == "drop":
            toks = a.split()
            toks.pop(rng.randrange(len(toks)))
            b = " ".join(toks)
        elif kind == "case":
            b = a.upper() if rng.random() < 0.5 else f"  {a}  "
        elif kind == "multi":
            b = " ".join(typo(rng, t) if rng.random() < 0.4 else t for t in a.split())
        else:
            b = rng.choice(terms)
        pairs.append({"a": a, "b": b, "kind": kind, "score": fuzz.token_set_ratio(a, b, processor=str.lower)})
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"oracle": "rapidfuzz.fuzz.token_set_ratio(processor=str.lower)",
                               "pairs": pairs}, indent=1) + "\n", encoding="utf-8")
    near = sum(70 <= p["score"] <= 90 for p in pairs)
    print(f"wrote {len(pairs)} pairs to {OUT} ({near} within 70..90)")


if __name__ == "__main__":
    main()
