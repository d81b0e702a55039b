"""Build a fine-tuning corpus from search outputs.

Each record is one line: source + " TL;DR: " + summary + "<|endoftext|>".
An external trainer consumes the train file; the held-out file (the tail of
the input, deterministically) is for its model selection.  The printed stats
mirror what the dataset builder reports at scale.
"""

import tempfile
from pathlib import Path

from ibsum import (
    SearchParams,
    build_finetune_corpus,
    make_cached,
    parse_record,
    summarize_ex,
    tokenize,
    train_ngram,
)

SENTENCES = [
    ("crews repaired the broken lines overnight", "power returned before dawn ."),
    ("officials expect full service by friday morning", "residents stayed patient ."),
    ("the storm flooded several coastal roads", "traffic was diverted inland ."),
    ("emergency shelters opened across the region", "hundreds arrived overnight ."),
    ("forecasters warn of another front this weekend", "crews remain on call ."),
]

model = make_cached(
    train_ngram([tokenize(s) for s, _ in SENTENCES] + [tokenize(n) for _, n in SENTENCES], 2, 0.5),
    4096,
)

pairs = []
for source_text, next_text in SENTENCES:
    result = summarize_ex(tokenize(source_text), tokenize(next_text), SearchParams(), model)
    pairs.append((source_text, result.summary.raw))
    print(f"{source_text!r}\n  -> {result.summary.raw!r}")

out_dir = Path(tempfile.mkdtemp(prefix="ibsum_demo_"))
train_path = out_dir / "train.txt"
heldout_path = out_dir / "heldout.txt"
stats = build_finetune_corpus(pairs, train_path, heldout_path, heldout=1)

print(f"\nwrote {train_path} and {heldout_path}")
print(
    f"pairs={stats.n_pairs} mean_compression={stats.mean_compression_ratio:.3f} "
    f"abstractive_pct={stats.abstractive_token_pct:.1f}"
)

first = train_path.read_text(encoding="utf-8").splitlines()[0]
print(f"\nfirst record: {first!r}")
print(f"round-trips to: {parse_record(first)}")
