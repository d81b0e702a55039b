"""Beam-search decoding from a generative scorer.

At full scale the scorer is a remote model fine-tuned on the corpus from the
dataset builder; here the trainable n-gram stands in so the demo runs
offline.  The decoder prompts with source + delimiter, masks the end token
until the minimum length, and never exceeds the source's own token count.
"""

from ibsum import DecodeParams, beam_decode_hypothesis, make_cached, tokenize, train_ngram

# Teaching corpus: records in the same layout the dataset builder emits,
# so the model learns to continue "<source> TL;DR: " with a short summary.
# An order-2 stand-in only sees the delimiter when picking the first summary
# word, so the record being decoded is repeated to dominate those counts.
RECORDS = [
    "crews repaired broken lines overnight TL;DR: crews repaired lines",
    "crews repaired broken lines overnight TL;DR: crews repaired lines",
    "crews repaired broken lines overnight TL;DR: crews repaired lines",
    "officials expect full service by friday TL;DR: service by friday",
    "the storm flooded several coastal roads TL;DR: storm flooded roads",
    "shelters opened across the region TL;DR: shelters opened",
]

model = make_cached(train_ngram([tokenize(r) for r in RECORDS], order=2, add_k=0.05), 4096)

source = tokenize("crews repaired broken lines overnight")
params = DecodeParams(beam_size=5, min_tokens=2, max_tokens=5)

best = beam_decode_hypothesis(model, source, params)
print(f"source : {source.raw}")
print(f"prompt : {source.raw + params.delimiter!r}")
print(f"summary: {' '.join(best.tokens)!r}  (score {best.score:.3f})")

# Narrower beams commit earlier; beam_size=1 is exactly greedy decoding.
for beam_size in (1, 3, 5):
    narrow = DecodeParams(beam_size=beam_size, min_tokens=2, max_tokens=5)
    hyp = beam_decode_hypothesis(model, source, narrow)
    print(f"beam={beam_size}: {' '.join(hyp.tokens)!r} (score {hyp.score:.3f})")

# To decode against a served model instead, swap in the HTTP backend:
#   from ibsum import RemoteScorer, RemoteScorerConfig
#   scorer = RemoteScorer(RemoteScorerConfig(base_url="http://host:8000"))
