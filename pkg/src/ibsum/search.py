"""Extractive sentence summarization by length-stratified deletion search.

The search keeps a pool of extractive candidates, each a strictly increasing
list of kept token indices into the source sentence.  Starting from the full
sentence, it walks lengths downward; at each length the candidates of that
length are ranked by relevance (the log-probability of a target sentence
conditioned on the candidate) and the best ``k`` are expanded by deleting
every span of up to ``m`` consecutive kept tokens.  A child is admitted only
when its own language-model score strictly exceeds its parent's, so fluency
increases monotonically along every derivation chain while candidates shrink.
The final summary is the pool-wide relevance argmax.

Two relevance targets are supported: the sentence that follows the source
(``summarize_ex``) and the source itself (``summarize_recon``, which also
constrains the returned length).  ``ib_loss`` computes the single-instance
compression/relevance trade-off the search monotonically improves; the search
itself never needs the trade-off coefficient because it optimizes the two
terms through monotone surrogates instead.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

from .lm import Scorer
from .textprep import TokenizedSentence, detokenize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchParams:
    """Search width ``k``, max consecutive-deletion span ``m``, and pool policy."""

    k: int = 1
    m: int = 3
    dedupe: bool = True
    pool_cap: int = 100_000

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.pool_cap < 1:
            raise ValueError("pool_cap must be >= 1")


@dataclass
class Candidate:
    """An extractive hypothesis: kept indices plus cached scores.

    ``fluency`` is the log-probability of the candidate's surface form;
    ``relevance`` is the log-probability of the relevance target given the
    candidate, filled in when the candidate is admitted to the pool.
    """

    kept: tuple[int, ...]
    fluency: float
    relevance: Optional[float] = None
    parent_kept: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if not self.kept:
            raise ValueError("kept index list must be non-empty")
        if any(b <= a for a, b in zip(self.kept, self.kept[1:])):
            raise ValueError("kept indices must be strictly increasing")


@dataclass(frozen=True)
class SummaryResult:
    summary: TokenizedSentence
    kept: tuple[int, ...]
    fluency: float
    relevance: float
    pool_size: int
    candidates_scored: int


def deletion_spans(length: int, m: int) -> list[tuple[int, int]]:
    """All (start, span) deletions of up to m consecutive tokens leaving >= 1.

    A candidate of length 1 has no legal deletion; deleting the entire
    candidate is never allowed.
    """
    spans: list[tuple[int, int]] = []
    for span in range(1, min(m, length - 1) + 1):
        for start in range(length - span + 1):
            spans.append((start, span))
    return spans


def candidate_surface(source: TokenizedSentence, kept: tuple[int, ...]) -> str:
    """Canonical surface text of the source tokens at the kept indices."""
    return detokenize(source.tokens[i] for i in kept)


def expand_deletions(
    source: TokenizedSentence, cand: Candidate, m: int, scorer: Scorer
) -> list[Candidate]:
    """Children of a candidate whose language-model score strictly improves.

    Every span of 1..m consecutive kept tokens is deleted in turn; a child is
    returned iff its fluency is strictly greater than the parent's.  Children
    are returned in kept-index lexicographic order so concurrent scoring of
    one expansion level has a defined merge order.
    """
    if any(i >= len(source.tokens) for i in cand.kept):
        raise ValueError("candidate indices exceed source length")
    children: list[Candidate] = []
    kept = cand.kept
    for start, span in deletion_spans(len(kept), m):
        child_kept = kept[:start] + kept[start + span :]
        fluency = scorer.sequence_logprob(candidate_surface(source, child_kept))
        if fluency > cand.fluency:
            children.append(Candidate(kept=child_kept, fluency=fluency, parent_kept=kept))
    children.sort(key=lambda c: c.kept)
    return children


def _rank_key(cand: Candidate) -> tuple:
    # Total order: relevance desc, fluency desc, kept indices asc.
    return (-cand.relevance, -cand.fluency, cand.kept)


def candidate_pool(
    source: TokenizedSentence,
    relevance_target: TokenizedSentence,
    params: SearchParams,
    scorer: Scorer,
) -> tuple[list[Candidate], int]:
    """Run the deletion search and return (pool, surfaces scored for fluency).

    The pool always contains the root (full-sentence) candidate, so the
    relevance argmax over the pool is well defined even when no deletion
    improves fluency.
    """
    if not source.tokens:
        raise ValueError("empty source sentence")
    target_surface = detokenize(relevance_target.tokens)
    root_surface = detokenize(source.tokens)
    root = Candidate(
        kept=tuple(range(len(source.tokens))),
        fluency=scorer.sequence_logprob(root_surface),
        relevance=scorer.continuation_logprob(root_surface, target_surface),
    )
    scored = 1
    pool: list[Candidate] = [root]
    seen: set[tuple[int, ...]] = {root.kept}
    best = root
    for length in range(len(source.tokens), 0, -1):
        stratum = [c for c in pool if len(c.kept) == length]
        stratum.sort(key=_rank_key)
        for cand in stratum[: params.k]:
            scored += len(deletion_spans(len(cand.kept), params.m))
            for child in expand_deletions(source, cand, params.m, scorer):
                if params.dedupe and child.kept in seen:
                    continue
                child.relevance = scorer.continuation_logprob(
                    candidate_surface(source, child.kept), target_surface
                )
                seen.add(child.kept)
                pool.append(child)
                if _rank_key(child) < _rank_key(best):
                    best = child
        if len(pool) > params.pool_cap:
            pool = _shrink_pool(pool, length, params.pool_cap, best)
    return pool, scored


def _shrink_pool(
    pool: list[Candidate], current_length: int, cap: int, best: Candidate
) -> list[Candidate]:
    """Drop lowest-relevance candidates that are no longer pending expansion.

    Candidates shorter than the current outer length still await their
    expansion turn and are never dropped, so the pool may transiently exceed
    the cap when pending candidates alone do.  The running argmax is always
    retained.
    """
    droppable = [
        c for c in pool if len(c.kept) >= current_length and c is not best
    ]
    excess = len(pool) - cap
    if excess <= 0 or not droppable:
        return pool
    droppable.sort(key=_rank_key)
    dropped = {id(c) for c in droppable[max(len(droppable) - excess, 0) :]}
    logger.warning(
        "candidate pool exceeded cap=%d at length %d; dropping %d candidates",
        cap,
        current_length,
        len(dropped),
    )
    return [c for c in pool if id(c) not in dropped]


def _result(
    source: TokenizedSentence, winner: Candidate, pool_size: int, scored: int
) -> SummaryResult:
    tokens = tuple(source.tokens[i] for i in winner.kept)
    return SummaryResult(
        summary=TokenizedSentence.from_tokens(tokens),
        kept=winner.kept,
        fluency=winner.fluency,
        relevance=winner.relevance,
        pool_size=pool_size,
        candidates_scored=scored,
    )


def summarize_ex(
    source: TokenizedSentence,
    next_sentence: TokenizedSentence,
    params: SearchParams,
    scorer: Scorer,
) -> SummaryResult:
    """Summarize a sentence guided by the sentence that follows it.

    Returns the pool-wide argmax of ``log p(next_sentence | candidate)``; the
    output token sequence is always a subsequence of the source.
    """
    pool, scored = candidate_pool(source, next_sentence, params, scorer)
    winner = min(pool, key=_rank_key)
    return _result(source, winner, len(pool), scored)


def summarize_recon(
    source: TokenizedSentence,
    params: SearchParams,
    scorer: Scorer,
    target_len: int,
) -> SummaryResult:
    """Reconstruction-guided baseline: the relevance target is the source itself.

    The same deletion search runs with ``log p(source | candidate)`` as
    relevance; the final selection is restricted to pool candidates whose
    length is closest to ``target_len``, breaking ties by higher relevance.
    """
    if not source.tokens:
        raise ValueError("empty source sentence")
    if not 1 <= target_len <= len(source.tokens):
        raise ValueError("target_len out of range")
    pool, scored = candidate_pool(source, source, params, scorer)
    winner = min(pool, key=lambda c: (abs(len(c.kept) - target_len),) + _rank_key(c))
    return _result(source, winner, len(pool), scored)


@dataclass(frozen=True)
class IBLossInputs:
    """Probabilities entering the compression/relevance trade-off loss."""

    p_summary: float
    p_next_given_summary: float
    beta1: float

    def __post_init__(self) -> None:
        for name in ("p_summary", "p_next_given_summary"):
            value = getattr(self, name)
            if value == 0:
                raise ValueError("loss undefined at zero probability")
            if not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1]")
        if self.beta1 <= 0:
            raise ValueError("beta1 must be > 0")

    def loss(self) -> float:
        return ib_loss(self.p_summary, self.p_next_given_summary, self.beta1)


def ib_loss(p_summary: float, p_next_given_summary: float, beta1: float) -> float:
    """Single-instance trade-off between pruning and relevance, in nats.

    ``-ln p(summary) - beta1 * p(next|summary) * p(summary) * ln p(next|summary)``.
    The first term rewards shorter, more probable summaries; the second
    rewards summaries under which the relevance target stays likely.
    Diagnostic only: the search optimizes both terms through monotone
    surrogates and never consumes ``beta1``.
    """
    inputs = IBLossInputs(p_summary, p_next_given_summary, beta1)
    return -math.log(inputs.p_summary) - inputs.beta1 * inputs.p_next_given_summary * inputs.p_summary * math.log(
        inputs.p_next_given_summary
    )
