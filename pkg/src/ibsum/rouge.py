"""Self-contained ROUGE-1/2/L scoring with multi-reference support.

No stemming and no stopword removal; case folding is on by default.  Corpus
evaluation tokenizes on word characters after optional byte capping of the
candidate surface (the DUC convention truncates candidates to 75 bytes;
references are assumed pre-capped).  Means use exact summation so corpus
scores are invariant under permutation of the examples.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

_WORD_RE = re.compile(r"\w+")

AGGREGATIONS = ("max", "average")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalConfig:
    byte_cap: Optional[int] = None
    multi_ref_aggregation: str = "max"
    case_fold: bool = True

    def __post_init__(self) -> None:
        if self.byte_cap is not None and self.byte_cap <= 0:
            raise ValueError("byte_cap must be > 0 when present")
        if self.multi_ref_aggregation not in AGGREGATIONS:
            raise ValueError(f"multi_ref_aggregation must be one of {AGGREGATIONS}")

    @classmethod
    def duc(cls) -> "EvalConfig":
        """DUC-style preset: 75-byte candidate cap, best reference, case folding."""
        return cls(byte_cap=75, multi_ref_aggregation="max", case_fold=True)


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _fold(tokens: Sequence[str], cfg: EvalConfig) -> list[str]:
    return [t.lower() for t in tokens] if cfg.case_fold else list(tokens)


def _aggregate(scores: list[RougeScore], cfg: EvalConfig) -> RougeScore:
    if cfg.multi_ref_aggregation == "max":
        return max(scores, key=lambda s: (s.f1, s.recall, s.precision))
    n = len(scores)
    return RougeScore(
        precision=math.fsum(s.precision for s in scores) / n,
        recall=math.fsum(s.recall for s in scores) / n,
        f1=math.fsum(s.f1 for s in scores) / n,
    )


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(
    candidate: Sequence[str],
    references: Sequence[Sequence[str]],
    n: int,
    cfg: EvalConfig = EvalConfig(),
) -> RougeScore:
    """Clipped n-gram overlap: each n-gram counts at most its reference frequency."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not references:
        raise ValueError("empty reference list")
    cand = _fold(candidate, cfg)
    cand_ngrams = _ngrams(cand, n)
    cand_total = sum(cand_ngrams.values())
    scores = []
    for reference in references:
        ref_ngrams = _ngrams(_fold(reference, cfg), n)
        ref_total = sum(ref_ngrams.values())
        overlap = sum(min(count, ref_ngrams[gram]) for gram, count in cand_ngrams.items())
        precision = overlap / cand_total if cand_total else 0.0
        recall = overlap / ref_total if ref_total else 0.0
        scores.append(RougeScore(precision, recall, _f1(precision, recall)))
    return _aggregate(scores, cfg)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token_a in a:
        current = [0]
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(
    candidate: Sequence[str],
    references: Sequence[Sequence[str]],
    cfg: EvalConfig = EvalConfig(),
) -> RougeScore:
    """Longest-common-subsequence overlap."""
    if not references:
        raise ValueError("empty reference list")
    cand = _fold(candidate, cfg)
    scores = []
    for reference in references:
        ref = _fold(reference, cfg)
        lcs = _lcs_length(cand, ref)
        precision = lcs / len(cand) if cand else 0.0
        recall = lcs / len(ref) if ref else 0.0
        scores.append(RougeScore(precision, recall, _f1(precision, recall)))
    return _aggregate(scores, cfg)


def byte_cap_text(text: str, cap: int) -> str:
    """Truncate to at most ``cap`` UTF-8 bytes without splitting a character."""
    return text.encode("utf-8")[:cap].decode("utf-8", errors="ignore")


def text_tokens(text: str, cfg: EvalConfig) -> list[str]:
    if cfg.case_fold:
        text = text.lower()
    return _WORD_RE.findall(text)


@dataclass(frozen=True)
class CorpusReport:
    """Per-example scores plus corpus means scaled by 100."""

    per_example: tuple[dict[str, RougeScore], ...]
    means: dict[str, dict[str, float]]

    def as_json_dict(self) -> dict:
        return {metric: dict(values) for metric, values in self.means.items()}


def evaluate_corpus(
    outputs: Sequence[str],
    reference_sets: Sequence[Sequence[str]],
    cfg: EvalConfig = EvalConfig(),
) -> CorpusReport:
    """Score every output against its reference set and average over the corpus."""
    if len(outputs) != len(reference_sets):
        raise ValueError("outputs and reference sets must have the same length")
    if not outputs:
        raise ValueError("empty evaluation corpus")
    per_example: list[dict[str, RougeScore]] = []
    for candidate_text, references in zip(outputs, reference_sets):
        if not references:
            raise ValueError("empty reference list")
        if cfg.byte_cap is not None:
            candidate_text = byte_cap_text(candidate_text, cfg.byte_cap)
        candidate = text_tokens(candidate_text, cfg)
        reference_tokens = [text_tokens(ref, cfg) for ref in references]
        per_example.append(
            {
                "rouge1": rouge_n(candidate, reference_tokens, 1, cfg),
                "rouge2": rouge_n(candidate, reference_tokens, 2, cfg),
                "rougeL": rouge_l(candidate, reference_tokens, cfg),
            }
        )
    means: dict[str, dict[str, float]] = {}
    count = len(per_example)
    for metric in ("rouge1", "rouge2", "rougeL"):
        means[metric] = {
            "precision": 100.0 * math.fsum(ex[metric].precision for ex in per_example) / count,
            "recall": 100.0 * math.fsum(ex[metric].recall for ex in per_example) / count,
            "f1": 100.0 * math.fsum(ex[metric].f1 for ex in per_example) / count,
        }
    return CorpusReport(per_example=tuple(per_example), means=means)
