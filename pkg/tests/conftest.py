"""Shared fixtures: deterministic fixture language models and stub scorers."""

from __future__ import annotations

import random
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
import json

import pytest

from ibsum import NGramModel, Scorer, tokenize, train_ngram

ENGLISH_CORPUS = [
    "the cat sat on the mat .",
    "the cat sat near the door .",
    "the dog sat on the rug .",
    "a cat saw the dog .",
    "the dog saw a bird .",
    "the bird flew over the house .",
    "a small bird sat on the fence .",
    "the house stood near the river .",
    "the river ran past the town .",
    "people walked along the river .",
    "the town grew near the water .",
    "a dog ran along the fence .",
]

VOCAB6 = ("a", "b", "c", "d", "e", "f")


def vocab6_corpus() -> list:
    """Deterministic pseudo-random corpus over a six-token vocabulary."""
    rng = random.Random(7)
    sentences = []
    for _ in range(150):
        n = rng.randint(3, 10)
        sentences.append(" ".join(rng.choice(VOCAB6) for _ in range(n)))
    return [tokenize(s) for s in sentences]


@pytest.fixture(scope="session")
def ab_model() -> NGramModel:
    """Add-1 bigram over the single sentence "a b a b" (hand-checkable counts)."""
    return train_ngram([tokenize("a b a b")], order=2, add_k=1.0)


@pytest.fixture(scope="session")
def english_model() -> NGramModel:
    return train_ngram([tokenize(s) for s in ENGLISH_CORPUS], order=2, add_k=1.0)


@pytest.fixture(scope="session")
def vocab6_model() -> NGramModel:
    return train_ngram(vocab6_corpus(), order=2, add_k=1.0)


@pytest.fixture(scope="session")
def chain_model() -> NGramModel:
    """Bigram with a strongly preferred chain x -> a -> b -> c -> end."""
    return train_ngram([tokenize("x a b c")] * 3, order=2, add_k=1.0)


class CountingScorer(Scorer):
    """Delegating scorer that counts how often each operation hits the inner."""

    def __init__(self, inner: Scorer):
        self.inner = inner
        self.calls = 0

    def sequence_logprob(self, text):
        self.calls += 1
        return self.inner.sequence_logprob(text)

    def continuation_logprob(self, context, continuation):
        self.calls += 1
        return self.inner.continuation_logprob(context, continuation)

    def next_token_topk(self, context, k):
        self.calls += 1
        return self.inner.next_token_topk(context, k)

    def count_tokens(self, text):
        self.calls += 1
        return self.inner.count_tokens(text)


class TableScorer(Scorer):
    """Programmable scorer: fixed next-token table independent of context.

    ``table`` maps token -> logprob; sequence and continuation scores sum the
    per-token entries.  Tokens missing from the table score ``missing``.
    """

    def __init__(self, table: dict, missing: float = float("-inf")):
        self.table = dict(table)
        self.missing = missing

    def _lp(self, token: str) -> float:
        return self.table.get(token, self.missing)

    def sequence_logprob(self, text):
        return sum(self._lp(t) for t in text.split())

    def continuation_logprob(self, context, continuation):
        if not continuation:
            return 0.0
        return sum(self._lp(t) for t in continuation.split())

    def next_token_topk(self, context, k):
        items = sorted(self.table.items(), key=lambda kv: (-kv[1], kv[0]))
        return items[:k]

    def count_tokens(self, text):
        return len(text.split())


# -- throwaway HTTP scoring server for remote-backend tests ------------------


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802 (http.server API)
        length = int(self.headers.get("Content-Length", "0"))
        try:
            body = json.loads(self.rfile.read(length)) if length else {}
        except json.JSONDecodeError:
            body = {}
        status, payload = self.server.behavior(self.path, body)
        data = payload if isinstance(payload, bytes) else json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):  # silence request logging in test output
        pass


@contextmanager
def scoring_server(behavior):
    """Serve ``behavior(path, body) -> (status, payload)`` on a local port."""
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    server.behavior = behavior
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()
        thread.join()
        server.server_close()


def ngram_behavior(model: NGramModel):
    """Wire-protocol behavior backed by an n-gram model."""

    def handle(path: str, body: dict):
        if path == "/v1/score":
            continuation = body["continuation"]
            logprob = model.continuation_logprob(body["context"], continuation)
            return 200, {"logprob": logprob, "n_tokens": model.count_tokens(continuation)}
        if path == "/v1/next":
            pairs = model.next_token_topk(body["context"], int(body["k"]))
            return 200, {"tokens": [t for t, _ in pairs], "logprobs": [lp for _, lp in pairs]}
        return 404, {"error": "unknown endpoint"}

    return handle
