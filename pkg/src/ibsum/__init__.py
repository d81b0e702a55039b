"""Next-sentence-guided extractive sentence summarization toolkit.

The pipeline: segment documents into (source, next-sentence) pairs, search
for extractive summaries by fluency-monotone word deletion ranked by how well
each candidate predicts the next sentence, emit a self-supervision corpus for
an external generative trainer, beam-decode from a generative scorer, and
evaluate with ROUGE.  Scoring goes through a pluggable language-model
interface with a deterministic trainable n-gram backend, a remote HTTP
backend, and an LRU-caching wrapper.
"""

from .decoder import DecodeParams, Hypothesis, beam_decode, beam_decode_hypothesis
from .lm import (
    BOS_TOKEN,
    END_TOKEN,
    NEG_INF,
    UNK_TOKEN,
    CachedScorer,
    NGramModel,
    RemoteScorer,
    RemoteScorerConfig,
    Scorer,
    ScorerTransportError,
    make_cached,
    train_ngram,
)
from .rouge import CorpusReport, EvalConfig, RougeScore, evaluate_corpus, rouge_l, rouge_n
from .search import (
    Candidate,
    IBLossInputs,
    SearchParams,
    SummaryResult,
    candidate_pool,
    expand_deletions,
    ib_loss,
    summarize_ex,
    summarize_recon,
)
from .selfsup import (
    DatasetStats,
    FinetunePair,
    abstractive_token_pct,
    build_finetune_corpus,
    compression_ratio,
    parse_record,
)
from .textprep import (
    RawDocument,
    SentencePair,
    TokenizedSentence,
    detokenize,
    extract_pairs,
    segment_sentences,
    tokenize,
    word_tokens,
)

__version__ = "0.1.0"

__all__ = [
    "BOS_TOKEN",
    "CachedScorer",
    "Candidate",
    "CorpusReport",
    "DatasetStats",
    "DecodeParams",
    "END_TOKEN",
    "EvalConfig",
    "FinetunePair",
    "Hypothesis",
    "IBLossInputs",
    "NEG_INF",
    "NGramModel",
    "RawDocument",
    "RemoteScorer",
    "RemoteScorerConfig",
    "RougeScore",
    "Scorer",
    "ScorerTransportError",
    "SearchParams",
    "SentencePair",
    "SummaryResult",
    "TokenizedSentence",
    "UNK_TOKEN",
    "abstractive_token_pct",
    "beam_decode",
    "beam_decode_hypothesis",
    "build_finetune_corpus",
    "candidate_pool",
    "compression_ratio",
    "detokenize",
    "evaluate_corpus",
    "expand_deletions",
    "extract_pairs",
    "ib_loss",
    "make_cached",
    "parse_record",
    "rouge_l",
    "rouge_n",
    "segment_sentences",
    "summarize_ex",
    "summarize_recon",
    "tokenize",
    "train_ngram",
    "word_tokens",
]
