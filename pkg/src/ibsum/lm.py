"""Language-model scoring backends: trainable add-k n-gram, remote HTTP, LRU cache.

All scorers share one contract:

* scores are natural-log probabilities (nats), ``<= 0`` for proper events,
  with ``float("-inf")`` as the distinguished impossible-event sentinel;
* scoring operates on surface text, never token ids — each backend tokenizes
  internally, which decouples the search from any particular vocabulary;
* context and continuation are joined with a single space, so for every
  backend ``continuation_logprob(c, x)`` must equal
  ``sequence_logprob(c + " " + x) - sequence_logprob(c)`` under its own
  tokenization;
* the probability of a standalone sequence is taken from a
  beginning-of-sequence context with no document prefix.
"""

from __future__ import annotations

import json
import math
import threading
import time
from abc import ABC, abstractmethod
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import requests

from .textprep import TokenizedSentence, word_tokens

NEG_INF = float("-inf")

#: Literal text of the reserved symbols.  The end token matches what remote
#: inference servers emit, so decoders can treat both backends uniformly.
END_TOKEN = "<|endoftext|>"
UNK_TOKEN = "<unk>"
BOS_TOKEN = "<|bos|>"

NGRAM_FORMAT_TAG = "ngram-v1"


class ScorerTransportError(RuntimeError):
    """Raised when a remote scorer request fails after all retries."""

    def __init__(self, endpoint: str, attempts: int):
        super().__init__(f"scorer request to {endpoint} failed after {attempts} attempt(s)")
        self.endpoint = endpoint
        self.attempts = attempts


class Scorer(ABC):
    """Opaque language-model scoring capability."""

    @abstractmethod
    def sequence_logprob(self, text: str) -> float:
        """Log-probability of the text from a beginning-of-sequence context."""

    @abstractmethod
    def continuation_logprob(self, context: str, continuation: str) -> float:
        """Log-probability of the continuation given the context."""

    @abstractmethod
    def next_token_topk(self, context: str, k: int) -> list[tuple[str, float]]:
        """Top-k next tokens, sorted by logprob descending then token text."""

    @abstractmethod
    def count_tokens(self, text: str) -> int:
        """Length of the text in this backend's own token units."""


class NGramModel(Scorer):
    """Add-k smoothed n-gram model over rule-tokenized words.

    The stored vocabulary includes the reserved BOS, EOS, and UNK symbols.
    BOS is context-only: next-token distributions normalize over
    ``vocab - {BOS}``, so for the add-1 bigram trained on ``"a b a b"`` the
    normalizer is ``count(ctx) + add_k * 4`` with vocabulary {a, b, UNK, EOS}.
    Unseen tokens map to UNK at scoring time, which keeps every operation
    total.  When a context was never observed, the model backs off to the
    longest observed suffix (ultimately the unigram distribution).
    """

    def __init__(
        self,
        order: int,
        add_k: float,
        vocab: set[str],
        counts: dict[tuple[str, ...], int],
    ):
        if order < 1:
            raise ValueError("order must be >= 1")
        if add_k <= 0:
            raise ValueError("add_k must be > 0")
        self.order = order
        self.add_k = add_k
        self.vocab = set(vocab) | {BOS_TOKEN, END_TOKEN, UNK_TOKEN}
        self.counts = counts
        self.context_counts: dict[tuple[str, ...], int] = {}
        for gram, c in counts.items():
            ctx = gram[:-1]
            self.context_counts[ctx] = self.context_counts.get(ctx, 0) + c
        self._predictable = tuple(sorted(self.vocab - {BOS_TOKEN}))
        self._norm_size = len(self._predictable)

    # -- internal tokenization ------------------------------------------------

    def _text_tokens(self, text: str) -> list[str]:
        tokens: list[str] = []
        for chunk in text.split():
            if chunk == END_TOKEN or chunk == UNK_TOKEN:
                tokens.append(chunk)
            elif chunk == BOS_TOKEN:
                # BOS is never a predictable event; treat a literal occurrence
                # as an unknown word.
                tokens.append(UNK_TOKEN)
            else:
                tokens.extend(word_tokens(chunk))
        return [t if t in self.vocab else UNK_TOKEN for t in tokens]

    def _next_logprob(self, context: tuple[str, ...], word: str) -> float:
        ctx = context[-(self.order - 1) :] if self.order > 1 else ()
        while True:
            seen = self.context_counts.get(ctx, 0)
            if seen > 0 or not ctx:
                num = self.counts.get(ctx + (word,), 0) + self.add_k
                den = seen + self.add_k * self._norm_size
                return math.log(num / den)
            ctx = ctx[1:]

    # -- Scorer contract ------------------------------------------------------

    def sequence_logprob(self, text: str) -> float:
        tokens = self._text_tokens(text)
        if not tokens:
            return 0.0
        width = self.order - 1
        context = (BOS_TOKEN,) * width
        total = 0.0
        for word in tokens:
            total += self._next_logprob(context, word)
            if width:
                context = (context + (word,))[-width:]
        return total

    def continuation_logprob(self, context: str, continuation: str) -> float:
        if not continuation:
            return 0.0
        joined = context + " " + continuation
        return self.sequence_logprob(joined) - self.sequence_logprob(context)

    def next_token_topk(self, context: str, k: int) -> list[tuple[str, float]]:
        if k < 1:
            raise ValueError("k must be >= 1")
        prefix = (BOS_TOKEN,) * (self.order - 1) + tuple(self._text_tokens(context))
        scored = [(tok, self._next_logprob(prefix, tok)) for tok in self._predictable]
        scored.sort(key=lambda item: (-item[1], item[0]))
        return scored[:k]

    def count_tokens(self, text: str) -> int:
        return len(self._text_tokens(text))

    # -- persistence -----------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write the model as a versioned JSON file (format tag "ngram-v1")."""
        payload = {
            "format": NGRAM_FORMAT_TAG,
            "order": self.order,
            "add_k": self.add_k,
            "vocab": sorted(self.vocab),
            "counts": {" ".join(gram): c for gram, c in self.counts.items()},
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "NGramModel":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != NGRAM_FORMAT_TAG:
            raise ValueError(f"unsupported n-gram model format: {payload.get('format')!r}")
        counts = {tuple(key.split(" ")): int(c) for key, c in payload["counts"].items()}
        return cls(
            order=int(payload["order"]),
            add_k=float(payload["add_k"]),
            vocab=set(payload["vocab"]),
            counts=counts,
        )


def train_ngram(
    corpus: Sequence[TokenizedSentence], order: int, add_k: float
) -> NGramModel:
    """Count n-grams of length 1..order over BOS-padded, EOS-terminated sentences.

    The resulting model assigns
    ``P(w | ctx) = (count(ctx.w) + add_k) / (count(ctx) + add_k * |V|)``
    where ``|V|`` excludes BOS, backing off to shorter contexts that were
    actually observed.
    """
    if not corpus:
        raise ValueError("empty training corpus")
    if order < 1:
        raise ValueError("order must be >= 1")
    if add_k <= 0:
        raise ValueError("add_k must be > 0")
    vocab: set[str] = {BOS_TOKEN, END_TOKEN, UNK_TOKEN}
    counts: dict[tuple[str, ...], int] = {}
    for sentence in corpus:
        vocab.update(sentence.tokens)
    for sentence in corpus:
        seq = [BOS_TOKEN] * (order - 1) + list(sentence.tokens) + [END_TOKEN]
        for i in range(order - 1, len(seq)):
            for n in range(1, order + 1):
                gram = tuple(seq[i - n + 1 : i + 1])
                counts[gram] = counts.get(gram, 0) + 1
    return NGramModel(order=order, add_k=add_k, vocab=vocab, counts=counts)


@dataclass(frozen=True)
class RemoteScorerConfig:
    """Connection settings for a remote inference server."""

    base_url: str
    timeout_ms: int = 30_000
    max_retries: int = 3
    request_batch_size: int = 32

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.request_batch_size < 1:
            raise ValueError("request_batch_size must be >= 1")


class RemoteScorer(Scorer):
    """Scorer backed by an HTTP inference server.

    Wire protocol (JSON over HTTP, logprobs in nats):

    * ``POST {base_url}/v1/score`` body ``{"context", "continuation"}``
      returns ``{"logprob": number, "n_tokens": int}``;
    * ``POST {base_url}/v1/next`` body ``{"context", "k"}``
      returns ``{"tokens": [...], "logprobs": [...]}``.

    Non-200 responses and malformed bodies are retried with exponential
    backoff starting at 100 ms, up to ``max_retries`` extra attempts, then
    raise :class:`ScorerTransportError` carrying the endpoint and attempt
    count.  ``request_batch_size`` is a hint for batching clients; this
    client issues one request per call, which trivially preserves per-call
    determinism.
    """

    _BACKOFF_INITIAL = 0.1

    def __init__(self, config: RemoteScorerConfig):
        self.config = config
        self._local = threading.local()

    def _session(self) -> requests.Session:
        session = getattr(self._local, "session", None)
        if session is None:
            session = requests.Session()
            self._local.session = session
        return session

    def _post(self, path: str, payload: dict, validate: Callable[[dict], None]) -> dict:
        url = self.config.base_url.rstrip("/") + path
        attempts = 0
        delay = self._BACKOFF_INITIAL
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            attempts += 1
            try:
                response = self._session().post(
                    url, json=payload, timeout=self.config.timeout_ms / 1000.0
                )
                if response.status_code == 200:
                    body = response.json()
                    validate(body)
                    return body
                last_error = ValueError(f"HTTP {response.status_code}")
            except (requests.RequestException, ValueError, TypeError) as exc:
                last_error = exc
            if attempt < self.config.max_retries:
                time.sleep(delay)
                delay *= 2
        raise ScorerTransportError(url, attempts) from last_error

    @staticmethod
    def _validate_score(body: dict) -> None:
        if not isinstance(body.get("logprob"), (int, float)) or not isinstance(
            body.get("n_tokens"), int
        ):
            raise ValueError("malformed score response")

    @staticmethod
    def _validate_next(body: dict) -> None:
        tokens, logprobs = body.get("tokens"), body.get("logprobs")
        if not isinstance(tokens, list) or not isinstance(logprobs, list):
            raise ValueError("malformed next-token response")
        if len(tokens) != len(logprobs):
            raise ValueError("token/logprob length mismatch")
        if not all(isinstance(t, str) for t in tokens):
            raise ValueError("malformed token entry")
        if not all(isinstance(lp, (int, float)) for lp in logprobs):
            raise ValueError("malformed logprob entry")

    def _score(self, context: str, continuation: str) -> dict:
        return self._post(
            "/v1/score",
            {"context": context, "continuation": continuation},
            self._validate_score,
        )

    def sequence_logprob(self, text: str) -> float:
        if not text:
            return 0.0
        return float(self._score("", text)["logprob"])

    def continuation_logprob(self, context: str, continuation: str) -> float:
        if not continuation:
            return 0.0
        return float(self._score(context, continuation)["logprob"])

    def next_token_topk(self, context: str, k: int) -> list[tuple[str, float]]:
        if k < 1:
            raise ValueError("k must be >= 1")
        body = self._post("/v1/next", {"context": context, "k": k}, self._validate_next)
        pairs = [(t, float(lp)) for t, lp in zip(body["tokens"], body["logprobs"])]
        pairs.sort(key=lambda item: (-item[1], item[0]))
        return pairs[:k]

    def count_tokens(self, text: str) -> int:
        if not text:
            return 0
        return int(self._score("", text)["n_tokens"])


class CachedScorer(Scorer):
    """LRU-memoizing wrapper, observationally identical to the inner scorer.

    Keys are (operation, exact input text); eviction is least-recently-used.
    Safe under concurrent access: lookups and insertions are serialized, and
    because the inner scorer is deterministic, racing computations of the
    same key insert identical values.
    """

    def __init__(self, inner: Scorer, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.inner = inner
        self.capacity = capacity
        self._entries: OrderedDict[tuple, object] = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def _memo(self, key: tuple, compute: Callable[[], object]) -> object:
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
                self.hits += 1
                return self._entries[key]
        value = compute()
        with self._lock:
            self.misses += 1
            self._entries[key] = value
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)
        return value

    def sequence_logprob(self, text: str) -> float:
        return self._memo(("seq", text), lambda: self.inner.sequence_logprob(text))

    def continuation_logprob(self, context: str, continuation: str) -> float:
        if not continuation:
            return 0.0
        return self._memo(
            ("cont", context, continuation),
            lambda: self.inner.continuation_logprob(context, continuation),
        )

    def next_token_topk(self, context: str, k: int) -> list[tuple[str, float]]:
        return self._memo(("topk", context, k), lambda: self.inner.next_token_topk(context, k))

    def count_tokens(self, text: str) -> int:
        return self._memo(("count", text), lambda: self.inner.count_tokens(text))


def make_cached(scorer: Scorer, capacity: int) -> CachedScorer:
    """Wrap a scorer with an LRU memo of at most ``capacity`` entries."""
    return CachedScorer(scorer, capacity)
