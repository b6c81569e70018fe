"""Token-set fuzzy matching and greedy one-to-one list alignment."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .kernels import indel_distance

DEFAULT_THRESHOLD = 80


def _tokens(s: str) -> set[str]:
    return set(s.lower().split())


def _similarity(a: str, b: str) -> float:
    total = len(a) + len(b)
    if total == 0:
        return 100.0
    return 100.0 - 100.0 * indel_distance(a, b) / total


def token_set_score(a: str, b: str) -> float:
    """Unrounded token-set similarity in [0, 100].

    With I the sorted token intersection, D1 = I + sorted(A - B) and
    D2 = I + sorted(B - A), the score is the best Indel similarity among
    (I, D1), (I, D2) and (D1, D2). Strings without tokens score 0.
    """
    ta, tb = _tokens(a), _tokens(b)
    if not ta or not tb:
        return 0.0
    inter = sorted(ta & tb)
    sect = " ".join(inter)
    d1 = " ".join(inter + sorted(ta - tb))
    d2 = " ".join(inter + sorted(tb - ta))
    if inter and (d1 == sect or d2 == sect):
        return 100.0
    best = _similarity(d1, d2)
    if inter:
        best = max(best, _similarity(sect, d1), _similarity(sect, d2))
    return best


def token_set_ratio(a: str, b: str) -> int:
    """:func:`token_set_score` rounded half-up to an integer."""
    return int(math.floor(token_set_score(a, b) + 0.5))


def normalize_value(v: object) -> str:
    return " ".join(str(v).lower().split())


def normalize_list(values: Sequence[object]) -> list[str]:
    """Lowercase, collapse whitespace, drop empties and duplicates (order kept)."""
    out: list[str] = []
    for v in values:
        s = normalize_value(v)
        if s and s not in out:
            out.append(s)
    return out


@dataclass
class MatchResult:
    tp: int
    fp: int
    fn: int
    matched_pairs: list[tuple[str, str, float]]
    unmatched_truth: list[str]
    unmatched_generated: list[str]


def match_lists(
    truth: Sequence[str],
    generated: Sequence[str],
    threshold: float = DEFAULT_THRESHOLD,
    scorer=token_set_score,
) -> MatchResult:
    """Greedy best-score one-to-one matching.

    Pairs are taken in descending score order while the score is at least
    ``threshold``. Ties are broken on the (min, max) of the two strings so
    swapping the arguments selects the same pairs.
    """
    if not 0 <= threshold <= 100:
        raise ValueError("threshold must lie in [0, 100]")
    truth, generated = normalize_list(truth), normalize_list(generated)
    candidates = []
    for t in truth:
        for g in generated:
            score = scorer(t, g)
            if score >= threshold:
                candidates.append((-score, min(t, g), max(t, g), t, g))
    candidates.sort()
    used_t: set[str] = set()
    used_g: set[str] = set()
    pairs = []
    for neg, _, _, t, g in candidates:
        if t in used_t or g in used_g:
            continue
        used_t.add(t)
        used_g.add(g)
        pairs.append((t, g, -neg))
    return MatchResult(
        tp=len(pairs),
        fp=len(generated) - len(pairs),
        fn=len(truth) - len(pairs),
        matched_pairs=pairs,
        unmatched_truth=[t for t in truth if t not in used_t],
        unmatched_generated=[g for g in generated if g not in used_g],
    )
