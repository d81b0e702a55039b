"""Ingest a tiny corpus, extract adjacent sentence pairs, and train a scorer.

Every downstream step (search, decoding, dataset building) consumes the two
artifacts produced here: (source, next-sentence) pairs and a trained n-gram
scoring model.
"""

from ibsum import RawDocument, extract_pairs, tokenize, train_ngram

ARTICLE = (
    "The storm reached the coast on Tuesday night. Thousands of homes lost "
    "power across the region. Repair crews worked through the night. "
    "Officials expect service to return by Friday."
)

doc = RawDocument(id="storm-article", body=ARTICLE)
pairs = extract_pairs(doc)

print(f"document {doc.id!r} yields {len(pairs)} (source, next) pairs:")
for pair in pairs:
    print(f"  [{pair.position}] {pair.source.raw!r}  ->  {pair.next.raw!r}")

# The built-in scorer is an add-k smoothed n-gram over rule-tokenized words.
# It is deterministic, trainable in milliseconds, and exposes the same
# interface as the remote backend, so the search code never knows the
# difference.
corpus = [pair.source for pair in pairs] + [pairs[-1].next]
model = train_ngram(corpus, order=2, add_k=1.0)

print(f"\ntrained order-{model.order} model, vocabulary size {len(model.vocab)}")
for text in ("the storm reached the coast", "coast the reached storm the"):
    print(f"  log p({text!r}) = {model.sequence_logprob(text):.3f}")

context = "Repair crews worked"
print(f"\ntop next tokens after {context!r}:")
for token, logprob in model.next_token_topk(context, 3):
    print(f"  {token!r}: {logprob:.3f}")

sentence = tokenize("Officials expect service to return by Friday.")
print(f"\ntokenized: {list(sentence.tokens)}")
