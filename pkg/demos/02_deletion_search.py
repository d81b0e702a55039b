"""Summarize one sentence by fluency-monotone deletion search.

The search deletes spans of up to m consecutive words, keeps only children
the language model scores strictly higher than their parent, and returns the
candidate under which the *next* sentence is most probable.  The
reconstruction-guided baseline swaps the next sentence for the source itself
and pins the output length; comparing the two shows what next-sentence
guidance buys: details the context never mentions again get dropped, while
reconstruction tends to hoard them.
"""

import math

from ibsum import (
    SearchParams,
    ib_loss,
    make_cached,
    summarize_ex,
    summarize_recon,
    tokenize,
    train_ngram,
)

CORPUS = [
    "the city returned to chinese control in 1997 .",
    "the city is a bustling metropolis .",
    "the city has a population of seven million .",
    "control of the city changed in 1997 .",
    "a bustling metropolis sits on the coast .",
    "the city grew quickly .",
]

model = make_cached(train_ngram([tokenize(s) for s in CORPUS], order=3, add_k=0.1), 4096)

source = tokenize("the city , a bustling metropolis , has a population of seven million")
next_sentence = tokenize("the city returned to chinese control in 1997 .")

result = summarize_ex(source, next_sentence, SearchParams(k=1, m=3), model)
print(f"source : {source.raw}")
print(f"next   : {next_sentence.raw}")
print(f"summary: {result.summary.raw!r}")
print(
    f"kept {len(result.kept)}/{len(source.tokens)} tokens "
    f"(fluency {result.fluency:.2f}, relevance {result.relevance:.2f}, "
    f"pool {result.pool_size}, scored {result.candidates_scored})"
)

# Reconstruction-guided baseline, constrained to the same output length:
# without the next sentence it favors rare, detail-heavy words instead.
recon = summarize_recon(source, SearchParams(k=1, m=3), model, target_len=len(result.kept))
print(f"reconstruction baseline at the same length: {recon.summary.raw!r}")

# A wider search explores more candidates per length.
wide = summarize_ex(source, next_sentence, SearchParams(k=8, m=3), model)
print(f"wider search (k=8) pool grows to {wide.pool_size}: {wide.summary.raw!r}")

# Diagnostic: the single-instance trade-off between pruning and relevance.
loss = ib_loss(
    p_summary=math.exp(result.fluency),
    p_next_given_summary=math.exp(result.relevance),
    beta1=1.0,
)
print(f"trade-off loss of the chosen summary at beta1=1: {loss:.4f}")
