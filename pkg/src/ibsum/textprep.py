"""Sentence segmentation, rule-based word tokenization, and adjacent-pair extraction.

Everything in this module is a pure function over text.  The tokenizer is a
deterministic whitespace-and-punctuation splitter with a fixed abbreviation
list; it makes no attempt to replicate any third-party tokenizer.  Input is
NFC-normalized before any splitting so that token identity is stable across
byte-level variants of the same string.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Sequence

# Words that keep their trailing period when tokenizing and never terminate a
# sentence on their own.  Matched case-insensitively.
ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "rev.", "hon.", "gen.", "sen.",
        "rep.", "gov.", "col.", "capt.", "lt.", "sgt.", "maj.", "adm.",
        "st.", "mt.", "ft.", "jr.", "sr.", "ave.", "blvd.", "rd.", "hwy.",
        "no.", "dept.", "univ.", "assn.", "bros.", "inc.", "ltd.", "co.",
        "corp.", "vs.", "etc.", "e.g.", "i.e.", "cf.", "al.", "approx.",
        "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.",
        "sept.", "oct.", "nov.", "dec.", "u.s.", "u.k.", "u.n.", "a.m.",
        "p.m.",
    }
)

# Letter-period sequences such as "U.S." or "J.R.R." are kept as one token.
# At least two groups are required so that "A." still splits into ["A", "."].
_ACRONYM_RE = re.compile(r"^(?:[A-Za-z]\.){2,}$")

# Characters peeled off chunk edges, one token per character.
_EDGE_PUNCT = frozenset(".,!?;:()[]{}\"'«»“”‘’…")

# Detokenization rule table.  A token starting with an attach-left character
# is glued to the preceding word; no space is emitted after an attach-right
# character.  Straight quotes are ambiguous and are rendered attach-left.
_ATTACH_LEFT = frozenset(".,!?;:)]}»”’…\"'")
_ATTACH_RIGHT = frozenset("([{«“‘")

# Sentence boundary: terminal punctuation plus any closing quotes/brackets,
# requiring following whitespace (end-of-text is handled by the tail flush).
_BOUNDARY_RE = re.compile(r"[.!?]+[)\]\"'»”’]*(?=\s)")

_PARAGRAPH_RE = re.compile(r"\n\s*\n")


@dataclass(frozen=True)
class RawDocument:
    """An input document: a corpus-unique id and a UTF-8 body."""

    id: str
    body: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be non-empty")


@dataclass(frozen=True)
class TokenizedSentence:
    """A sentence as an ordered token list plus its recoverable surface text."""

    tokens: tuple[str, ...]
    raw: str
    char_len: int

    def __post_init__(self) -> None:
        if self.char_len != len(self.raw):
            raise ValueError("char_len must equal the character count of raw")
        if self.raw and not self.tokens:
            raise ValueError("tokens must be non-empty unless raw is empty")
        for tok in self.tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError("tokens must be non-empty and whitespace-free")

    @classmethod
    def from_text(cls, text: str) -> "TokenizedSentence":
        raw = unicodedata.normalize("NFC", text).strip()
        return cls(tokens=tuple(word_tokens(raw)), raw=raw, char_len=len(raw))

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "TokenizedSentence":
        toks = tuple(tokens)
        raw = detokenize(toks)
        return cls(tokens=toks, raw=raw, char_len=len(raw))

    @property
    def surface(self) -> str:
        """Canonical surface form (detokenized); used for scoring."""
        return detokenize(self.tokens)


@dataclass(frozen=True)
class SentencePair:
    """A source sentence paired with the sentence that immediately follows it."""

    source: TokenizedSentence
    next: TokenizedSentence
    doc_id: str
    position: int

    def __post_init__(self) -> None:
        if self.position < 0:
            raise ValueError("position must be >= 0")


def _keep_whole(chunk: str) -> bool:
    return chunk.lower() in ABBREVIATIONS or bool(_ACRONYM_RE.match(chunk))


def _split_chunk(chunk: str) -> list[str]:
    """Split one whitespace-free chunk into word and punctuation tokens."""
    if not chunk:
        return []
    leading: list[str] = []
    core = chunk
    while core and core[0] in _EDGE_PUNCT and not _keep_whole(core):
        leading.append(core[0])
        core = core[1:]
    trailing: list[str] = []
    while core and core[-1] in _EDGE_PUNCT and not _keep_whole(core):
        trailing.append(core[-1])
        core = core[:-1]
    tokens = leading
    if core:
        tokens.append(core)
    tokens.extend(reversed(trailing))
    return tokens


def word_tokens(text: str) -> list[str]:
    """Tokenize text into words and punctuation marks (no whitespace tokens)."""
    text = unicodedata.normalize("NFC", text)
    tokens: list[str] = []
    for chunk in text.split():
        tokens.extend(_split_chunk(chunk))
    return tokens


def tokenize(sentence: str) -> TokenizedSentence:
    """Tokenize a sentence deterministically, splitting punctuation from words."""
    return TokenizedSentence.from_text(sentence)


def detokenize(tokens: Iterable[str]) -> str:
    """Render tokens as text, attaching punctuation per the rule table.

    Guarantees that ``word_tokens(detokenize(t)) == t`` for every token list
    produced by :func:`word_tokens`: a token is only glued to the pending
    chunk when re-splitting the merged chunk provably recovers the original
    tokens, otherwise a space is kept.
    """
    chunks: list[str] = []
    pending = ""
    pending_tokens: list[str] = []
    for tok in tokens:
        if not tok:
            continue
        if pending and (tok[0] in _ATTACH_LEFT or pending[-1] in _ATTACH_RIGHT):
            merged = pending + tok
            if _split_chunk(merged) == pending_tokens + [tok]:
                pending = merged
                pending_tokens.append(tok)
                continue
        if pending:
            chunks.append(pending)
        pending = tok
        pending_tokens = [tok]
    if pending:
        chunks.append(pending)
    return " ".join(chunks)


def _segment_paragraph(text: str) -> list[str]:
    sentences: list[str] = []
    start = 0
    for match in _BOUNDARY_RE.finditer(text):
        segment = text[start : match.end()]
        words = segment.split()
        last_word = words[-1] if words else ""
        if last_word.lower() in ABBREVIATIONS:
            continue
        sentence = segment.strip()
        if sentence:
            sentences.append(sentence)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def segment_sentences(body: str) -> list[str]:
    """Split text into sentences at terminal punctuation with abbreviation guards.

    Blank lines always end a sentence.  Whitespace-only segments are dropped;
    a trailing fragment without terminal punctuation is kept as a sentence so
    that no non-whitespace content is lost.
    """
    body = unicodedata.normalize("NFC", body)
    sentences: list[str] = []
    for paragraph in _PARAGRAPH_RE.split(body):
        sentences.extend(_segment_paragraph(paragraph))
    return sentences


def extract_pairs(doc: RawDocument) -> list[SentencePair]:
    """Extract (source, next-sentence) pairs for every sentence with a successor.

    A document with n sentences yields exactly n-1 pairs; the final sentence
    has no successor and is excluded.
    """
    sentences = [tokenize(s) for s in segment_sentences(doc.body)]
    sentences = [s for s in sentences if s.tokens]
    return [
        SentencePair(source=sentences[i], next=sentences[i + 1], doc_id=doc.id, position=i)
        for i in range(len(sentences) - 1)
    ]


def sentence_count(doc: RawDocument) -> int:
    """Number of non-empty sentences the segmenter finds in a document."""
    return sum(1 for s in segment_sentences(doc.body) if tokenize(s).tokens)
