"""Brute-force reference implementations the fast code is checked against.

These enumerate exhaustively and were written before the search and decoder
they validate; they share only the scorer with the code under test.
"""

from __future__ import annotations

from ibsum import Scorer, TokenizedSentence, detokenize
from ibsum.decoder import DecodeParams
from ibsum.search import candidate_surface, deletion_spans


def bfs_reachable(
    source: TokenizedSentence, scorer: Scorer, m: int
) -> tuple[set[tuple[int, ...]], dict[tuple[int, ...], float]]:
    """All kept-index sets reachable via strictly fluency-increasing deletions.

    Returns (reachable set including the root, fluency of every scored set).
    """
    root = tuple(range(len(source.tokens)))
    fluency = {root: scorer.sequence_logprob(candidate_surface(source, root))}
    reached = {root}
    stack = [root]
    while stack:
        kept = stack.pop()
        parent_fluency = fluency[kept]
        for start, span in deletion_spans(len(kept), m):
            child = kept[:start] + kept[start + span :]
            if child not in fluency:
                fluency[child] = scorer.sequence_logprob(candidate_surface(source, child))
            if fluency[child] > parent_fluency and child not in reached:
                reached.add(child)
                stack.append(child)
    return reached, fluency


def oracle_summarize(
    source: TokenizedSentence,
    target: TokenizedSentence,
    scorer: Scorer,
    m: int,
    target_len: int | None = None,
) -> tuple[int, ...]:
    """Relevance argmax over the exhaustively enumerated reachable set.

    Uses the same total order as the search: relevance desc, fluency desc,
    kept indices asc; with ``target_len`` the selection is restricted to the
    lengths closest to it first.
    """
    reached, fluency = bfs_reachable(source, scorer, m)
    target_surface = detokenize(target.tokens)
    relevance = {
        kept: scorer.continuation_logprob(candidate_surface(source, kept), target_surface)
        for kept in reached
    }

    def rank(kept: tuple[int, ...]) -> tuple:
        key = (-relevance[kept], -fluency[kept], kept)
        if target_len is None:
            return key
        return (abs(len(kept) - target_len),) + key

    return min(reached, key=rank)


def greedy_decode(
    scorer: Scorer, source: TokenizedSentence, params: DecodeParams
) -> tuple[str, ...]:
    """Iterated argmax of next_token_topk(k=1), masking the end token below min_tokens."""
    prompt = detokenize(source.tokens) + params.delimiter
    max_tokens = params.max_tokens
    if max_tokens is None:
        max_tokens = max(params.min_tokens, scorer.count_tokens(detokenize(source.tokens)))
    tokens: tuple[str, ...] = ()
    while len(tokens) < max_tokens:
        masked = len(tokens) < params.min_tokens
        entries = scorer.next_token_topk(prompt + detokenize(tokens), 2 if masked else 1)
        usable = [t for t, _ in entries if not (masked and t == params.end_token)]
        if usable[0] == params.end_token:
            break
        tokens = tokens + (usable[0],)
    return tokens


def exhaustive_decode(
    scorer: Scorer, source: TokenizedSentence, params: DecodeParams, vocab_k: int
) -> tuple[str, ...]:
    """Argmax over every token sequence in the decoder's length window.

    Enumerates all sequences of non-end tokens with length in
    [min_tokens, max_tokens], terminating each with the end token scored by
    continuation_logprob, and returns the best sequence under the decoder's
    tie-break (score desc, token sequence asc).
    """
    prompt = detokenize(source.tokens) + params.delimiter
    max_tokens = params.max_tokens
    assert max_tokens is not None
    best: tuple[float, tuple[str, ...]] | None = None

    def consider(score: float, tokens: tuple[str, ...]) -> None:
        nonlocal best
        if best is None or (-score, tokens) < (-best[0], best[1]):
            best = (score, tokens)

    def recurse(tokens: tuple[str, ...], score: float) -> None:
        context = prompt + detokenize(tokens)
        if len(tokens) >= params.min_tokens:
            end_lp = scorer.continuation_logprob(context, params.end_token)
            if end_lp != float("-inf"):
                consider(score + end_lp, tokens)
        if len(tokens) >= max_tokens:
            return
        for token, logprob in scorer.next_token_topk(context, vocab_k):
            if token == params.end_token or logprob == float("-inf"):
                continue
            recurse(tokens + (token,), score + logprob)

    recurse((), 0.0)
    assert best is not None, "no sequence can terminate"
    return best[1]
