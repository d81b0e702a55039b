"""Beam-search decoding of summaries from a generative scorer.

The decoder prompts the scorer with the source sentence followed by a
delimiter and grows hypotheses one scorer-token at a time.  At each step
every live hypothesis is extended with its top ``beam_size`` next tokens and
the best ``beam_size`` extensions survive globally.  The end token is masked
while a hypothesis is shorter than ``min_tokens``; hypotheses that reach
``max_tokens`` are force-finished.  Finishing is always scored with
``continuation_logprob`` of the end token so natural and forced terminations
are comparable.  All lengths are measured in the scorer's own token units,
including the default ``max_tokens`` (the scorer's token count of the source).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lm import END_TOKEN, NEG_INF, Scorer
from .textprep import TokenizedSentence, detokenize


@dataclass(frozen=True)
class DecodeParams:
    beam_size: int = 5
    min_tokens: int = 5
    max_tokens: Optional[int] = None
    delimiter: str = " TL;DR: "
    end_token: str = END_TOKEN

    def __post_init__(self) -> None:
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.min_tokens < 1:
            raise ValueError("min_tokens must be >= 1")
        if self.max_tokens is not None and self.max_tokens < self.min_tokens:
            raise ValueError("max_tokens must be >= min_tokens")


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[str, ...]
    score: float
    finished: bool = False


def _context(prompt: str, tokens: tuple[str, ...]) -> str:
    # Matches the fine-tuning record layout: source + delimiter + summary text.
    return prompt + detokenize(tokens)


def _sort_hyps(hyps: list[Hypothesis]) -> list[Hypothesis]:
    return sorted(hyps, key=lambda h: (-h.score, h.tokens))


def beam_decode_hypothesis(
    scorer: Scorer, source: TokenizedSentence, params: DecodeParams = DecodeParams()
) -> Hypothesis:
    """Run beam search and return the best finished hypothesis with its score."""
    if not source.tokens:
        raise ValueError("empty source sentence")
    prompt = detokenize(source.tokens) + params.delimiter
    max_tokens = params.max_tokens
    if max_tokens is None:
        # "No longer than the source" in scorer token units, but never below
        # the minimum length the window demands.
        max_tokens = max(params.min_tokens, scorer.count_tokens(detokenize(source.tokens)))
    live = [Hypothesis(tokens=(), score=0.0)]
    finished: list[Hypothesis] = []
    for _ in range(max_tokens):
        extensions: list[Hypothesis] = []
        for hyp in live:
            context = _context(prompt, hyp.tokens)
            masked = len(hyp.tokens) < params.min_tokens
            # While the end token is masked it is not an available action, so
            # fetch one extra candidate to keep beam_size usable extensions.
            fetch_k = params.beam_size + 1 if masked else params.beam_size
            taken = 0
            for token, logprob in scorer.next_token_topk(context, fetch_k):
                if token == params.end_token:
                    if not masked:
                        end_lp = scorer.continuation_logprob(context, params.end_token)
                        if end_lp != NEG_INF:
                            finished.append(
                                Hypothesis(hyp.tokens, hyp.score + end_lp, finished=True)
                            )
                    continue
                if taken >= params.beam_size or logprob == NEG_INF:
                    continue
                taken += 1
                extensions.append(Hypothesis(hyp.tokens + (token,), hyp.score + logprob))
        live = _sort_hyps(extensions)[: params.beam_size]
        if not live:
            break
    for hyp in live:
        end_lp = scorer.continuation_logprob(_context(prompt, hyp.tokens), params.end_token)
        if end_lp != NEG_INF:
            finished.append(Hypothesis(hyp.tokens, hyp.score + end_lp, finished=True))
    if not finished:
        raise RuntimeError("decoder cannot terminate")
    return _sort_hyps(finished)[0]


def beam_decode(
    scorer: Scorer, source: TokenizedSentence, params: DecodeParams = DecodeParams()
) -> TokenizedSentence:
    """Decode a summary for the source sentence; see :func:`beam_decode_hypothesis`."""
    best = beam_decode_hypothesis(scorer, source, params)
    return TokenizedSentence.from_tokens(best.tokens)
