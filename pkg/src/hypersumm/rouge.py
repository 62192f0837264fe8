"""From-scratch ROUGE-N and ROUGE-L summary scoring.

ROUGE-N counts clipped n-gram overlap: for every n-gram of the reference
side, min(reference count, candidate count) matches are credited, and recall
divides the credited matches by the total reference n-gram count (precision
divides by the candidate total). ROUGE-L uses the length of the longest
common subsequence of the two token sequences instead.

Scores live in [0, 1]; display scaling is the caller's concern. There is no
stemming and no stopword removal, so results are easy to reproduce by hand.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

# A token sequence is a plain list of non-empty, lowercased strings as
# produced by tokenize().
TokenSeq = list[str]


@dataclass(frozen=True)
class RougeScore:
    recall: float
    precision: float
    f1: float

    @classmethod
    def from_counts(cls, overlap: float, reference_total: int, candidate_total: int) -> RougeScore:
        recall = overlap / reference_total if reference_total else 0.0
        precision = overlap / candidate_total if candidate_total else 0.0
        return cls(recall, precision, _f1(recall, precision))


@dataclass
class NGramMultiset:
    """Sliding-window n-gram counts of one token sequence."""

    n: int
    counts: Counter

    def total(self) -> int:
        return sum(self.counts.values())


def _f1(recall: float, precision: float) -> float:
    if recall + precision == 0:
        return 0.0
    return 2.0 * recall * precision / (recall + precision)


def tokenize(text: str) -> TokenSeq:
    """Lowercase and split on whitespace and Unicode punctuation.

    Punctuation characters are dropped entirely, so "Q: why-not?" tokenizes
    to ["q", "why", "not"]. Deterministic, and never yields empty tokens.
    """
    chars = []
    for ch in text.lower():
        if ch.isspace() or unicodedata.category(ch).startswith("P"):
            chars.append(" ")
        else:
            chars.append(ch)
    return "".join(chars).split()


def count_ngrams(seq: Sequence[str], n: int) -> NGramMultiset:
    """Count the sliding-window n-grams of a token sequence."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    counts: Counter = Counter()
    for i in range(len(seq) - n + 1):
        counts[tuple(seq[i : i + n])] += 1
    return NGramMultiset(n, counts)


def rouge_n(
    candidate: Sequence[str],
    references: Iterable[Sequence[str]],
    n: int,
    best_reference: bool = False,
) -> RougeScore:
    """Clipped n-gram overlap between a candidate and one or more references.

    With multiple references the reference n-gram counts are pooled (summed)
    before clipping; pass best_reference=True to instead score against each
    reference separately and keep the best F1.
    """
    references = list(references)
    if not references:
        raise ValueError("at least one reference is required")
    candidate_counts = count_ngrams(candidate, n)

    if best_reference:
        best = None
        for reference in references:
            score = _rouge_n_single(candidate_counts, count_ngrams(reference, n))
            if best is None or score.f1 > best.f1:
                best = score
        return best

    pooled: Counter = Counter()
    for reference in references:
        pooled.update(count_ngrams(reference, n).counts)
    return _rouge_n_single(candidate_counts, NGramMultiset(n, pooled))


def _rouge_n_single(candidate: NGramMultiset, reference: NGramMultiset) -> RougeScore:
    overlap = 0
    for gram, ref_count in reference.counts.items():
        overlap += min(ref_count, candidate.counts.get(gram, 0))
    return RougeScore.from_counts(overlap, reference.total(), candidate.total())


def lcs_length(x: Sequence[str], y: Sequence[str]) -> int:
    """Length of the longest common subsequence of two token sequences.

    Dynamic programming over a rolling row: O(len(x) * len(y)) time and
    O(min(len(x), len(y))) memory.
    """
    if len(y) > len(x):
        x, y = y, x
    if not y:
        return 0
    previous = [0] * (len(y) + 1)
    for xi in x:
        current = [0]
        for j, yj in enumerate(y, start=1):
            if xi == yj:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """LCS-based score: recall against the reference length, precision
    against the candidate length. Empty inputs score 0."""
    lcs = lcs_length(candidate, reference)
    return RougeScore.from_counts(lcs, len(reference), len(candidate))


def score_corpus(
    pairs: Sequence[tuple[str, str]],
    ns: Iterable[int] = (1, 2),
) -> dict[str, RougeScore]:
    """Macro-averaged ROUGE over (candidate text, reference text) pairs.

    Returns {"rouge-1": ..., "rouge-2": ..., "rouge-l": ...} with each field
    arithmetically averaged across pairs. ROUGE-L is always included.
    """
    if not pairs:
        raise ValueError("at least one (candidate, reference) pair is required")
    ns = sorted(set(ns))
    for n in ns:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")

    metric_names = [f"rouge-{n}" for n in ns] + ["rouge-l"]
    sums = {name: [0.0, 0.0, 0.0] for name in metric_names}
    for candidate_text, reference_text in pairs:
        candidate = tokenize(candidate_text)
        reference = tokenize(reference_text)
        per_pair = {f"rouge-{n}": rouge_n(candidate, [reference], n) for n in ns}
        per_pair["rouge-l"] = rouge_l(candidate, reference)
        for name, score in per_pair.items():
            sums[name][0] += score.recall
            sums[name][1] += score.precision
            sums[name][2] += score.f1

    count = len(pairs)
    return {
        name: RougeScore(total[0] / count, total[1] / count, total[2] / count)
        for name, total in sums.items()
    }
